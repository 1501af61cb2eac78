// SPDX-License-Identifier: Apache-2.0
//
// INI experiment configuration. Defaults: gamma = 10 dB, B = 400 MHz,
// T_F = 10 ms, f_c = 28 GHz, N_T = N_R = 8.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "isac/crlb_closed.hpp"
#include "isac/scene.hpp"
#include "isac/virtual_array.hpp"
#include "isac/waveform.hpp"

namespace isac {

struct WaveformConfig {
    Family family = Family::Ofdm;
    double bandwidth_hz = 400e6;
    double frame_s = 10e-3;
    std::size_t k = 64;
    std::size_t l = 64;
    std::string pulse = "sinc";   // rect | sinc | rrc | rc
    double alpha = 0.0;
    std::size_t l_cp = 0;
    std::string code = "random";  // random | lfsr
    unsigned lfsr_degree = 6;
    std::vector<unsigned> lfsr_taps{6, 5};
    std::optional<double> sample_count;  // N_s override (required for FMCW SNR input)

    PulseShape pulse_shape() const;
};

struct SceneConfig {
    std::optional<double> gamma;       // linear ESNR
    std::optional<double> snr;         // linear per-sample SNR (gamma = N_s SNR)
    double theta_rad = 0.0;
    double tau_s = 0.0;
    double fd_hz = 0.0;
    double phase_rad = 0.0;
    double fc_hz = 28e9;
};

struct SweepConfig {
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 0;
    bool log_scale = false;

    std::vector<double> points() const;
};

struct ExperimentConfig {
    std::string name = "default";
    std::uint64_t seed = 1;
    WaveformConfig waveform;
    SceneConfig scene;
    std::size_t n_t = 8;
    std::size_t n_r = 8;
    std::optional<VaScheme> va;
    std::optional<SweepConfig> sweep;
    std::string out_dir = ".";
    std::string format = "csv";
    std::size_t trials = 20;
    double oversample = 4.0;
    std::string signal_in;
    std::string signal_out;

    EsnrLinear gamma() const;
    // Closed-form request from the configured B, T_F, K, L (no synthesis).
    ClosedFormRequest closed_form_request() const;
    // Applies one sweep value to a copy of the configuration.
    ExperimentConfig with_value(const std::string& variable, double value) const;
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

// Desk-scale waveform realization for the numeric oracle. Random chips,
// data and grids are drawn from (seed, trial).
WaveformSpec build_waveform(const WaveformConfig& cfg, std::uint64_t seed, std::uint64_t trial);

} // namespace isac
