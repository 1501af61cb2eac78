// SPDX-License-Identifier: Apache-2.0
//
// Scalar semantic types and unit conversions. Everything inside the library
// is linear (Hz, s, rad, power ratios); dB only appears at the CLI boundary.
#pragma once

#include <cstddef>
#include <optional>

namespace isac {

struct WaveformSpec;

inline constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db);
double linear_to_db(double linear);

// Energy SNR gamma = A^2 E_s / sigma^2, linear.
class EsnrLinear {
public:
    explicit EsnrLinear(double value);
    static EsnrLinear from_db(double db) { return EsnrLinear(db_to_linear(db)); }

    double value() const { return value_; }
    double db() const { return linear_to_db(value_); }

private:
    double value_;
};

struct CarrierConfig {
    double fc_hz = 28e9;
    static constexpr double c0 = kSpeedOfLight;
};

// Number of receiver samples N_s in one frame at the waveform's natural rate:
// chip count for PMCW, B*T_F for OFDM/OTFS. FMCW has no natural rate and
// needs an explicit override.
double natural_sample_count(const WaveformSpec& waveform, std::optional<double> override_count = std::nullopt);

// gamma = N_s * SNR.
EsnrLinear esnr_from_snr(double snr, const WaveformSpec& waveform,
                         std::optional<double> sample_count = std::nullopt);

// C_r = (c0/2)^2 C_tau
double crlb_delay_to_range(double c_tau_s2);

// C_v = (c0/(2 fc))^2 C_fD
double crlb_doppler_to_velocity(double c_fd_hz2, const CarrierConfig& cfg);

} // namespace isac
