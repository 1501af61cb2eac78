// SPDX-License-Identifier: Apache-2.0
//
// MIMO virtual-array sensing: orthogonal multiplexing of N_T transmit
// signals, FIM summation over transmitters, and the closed-form CRLB ratios
// against single-beam (coherent) transmission.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "isac/fisher.hpp"
#include "isac/waveform.hpp"

namespace isac {

struct VaScheme {
    enum class Kind { Itdm, Btdm, Bfdm, Cfdm, Cdm };
    Kind kind = Kind::Itdm;
    unsigned beta = 0;  // CDM repetition factor

    static VaScheme itdm() { return {Kind::Itdm, 0}; }
    static VaScheme btdm() { return {Kind::Btdm, 0}; }
    static VaScheme bfdm() { return {Kind::Bfdm, 0}; }
    static VaScheme cfdm() { return {Kind::Cfdm, 0}; }
    static VaScheme cdm(unsigned beta) { return {Kind::Cdm, beta}; }

    bool is_tdm() const { return kind == Kind::Itdm || kind == Kind::Btdm; }
    bool is_fdm() const { return kind == Kind::Bfdm || kind == Kind::Cfdm; }
    std::string name() const;
    static VaScheme parse(const std::string& name, unsigned beta = 0);
};

struct VaCrlbRatios {
    double r_tau = 0.0;
    double r_fd = 0.0;
    double r_theta_exact = 0.0;   // exact N_v forms over the N_R baseline
    double r_theta_approx = 0.0;  // N_v >> 1 forms: 1, 1/N_T, beta/((beta-1) N_T)
};

// BFDM: FMCW/PMCW; CFDM: OFDM/OTFS; CDM: PMCW. Throws ConfigError otherwise.
void check_va_compatible(const VaScheme& scheme, Family family);

// Sylvester Hadamard matrix; n must be a power of two.
Eigen::MatrixXd hadamard(std::size_t n);

// Per-PRI outer code of transmitter tx: chip i = H(tx, i) held for beta PRIs,
// cycling over the N_T chips.
std::vector<double> outer_code(std::size_t tx, std::size_t n_t, unsigned beta, std::size_t k_total);

// gamma_v / gamma: 1/N_T^3 (TDM), 1/N_T^2 (FDM), (beta-1)/(beta N_T^2) (CDM).
double esnr_scale(const VaScheme& scheme, std::size_t n_t);

struct MultiplexOptions {
    // CDM: zero the first PRI of every beta-group instead of scaling energy.
    bool literal_discard = false;
    SynthesisOptions synthesis;
};

// N_T transmit signals on the base signal's time axis. Per-antenna average
// power matches the base signal (sqrt(N_T) amplitude scaling for FDM).
std::vector<SampledSignal> multiplex(const WaveformSpec& spec, const VaScheme& scheme, std::size_t n_t,
                                     double fs, const MultiplexOptions& opts = {});

// Virtual element positions (wavelengths) seen through transmitter tx:
// n_T d_T + n_R N_T d_T for n_R = 0..N_R-1.
std::vector<double> virtual_positions(std::size_t tx, const ArrayConfig& array);

// Sum of per-transmitter FIMs with the unbeamformed amplitude a = A / N_T.
FisherMatrix va_fim_from_branches(const std::vector<SampledSignal>& branches, const SceneParams& scene);

// Joint formulation: one FIM over the stacked N_T N_R channel observation.
FisherMatrix va_fim_joint(const std::vector<SampledSignal>& branches, const SceneParams& scene);

FisherMatrix va_fim(const WaveformSpec& spec, const VaScheme& scheme, const SceneParams& scene, double fs,
                    const MultiplexOptions& opts = {});

VaCrlbRatios va_crlb_ratios(const VaScheme& scheme, std::size_t n_t, std::size_t n_r = 8);

// Monte-Carlo whitening check of Hadamard outer decoding on white noise.
struct NoiseWhitening {
    double max_cross = 0.0;     // max |off-diagonal covariance| / sigma^2
    double max_diag_dev = 0.0;  // max |diagonal / sigma^2 - 1|
};
NoiseWhitening cdm_decode_noise_check(std::size_t n_t, std::size_t n_samples, std::size_t trials,
                                      std::uint64_t seed = 1);

// CSV: scheme,n_t,beta,r_tau,r_fd,r_theta_exact,r_theta_approx
struct RatioRow {
    VaScheme scheme;
    std::size_t n_t = 1;
    VaCrlbRatios ratios;
};
void write_ratio_csv(std::ostream& os, const std::vector<RatioRow>& rows);

} // namespace isac
