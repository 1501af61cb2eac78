// SPDX-License-Identifier: Apache-2.0
#include "isac/units.hpp"

#include <cmath>
#include <string>

#include "isac/errors.hpp"
#include "isac/waveform.hpp"

namespace isac {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
    if (!(linear > 0.0)) throw DomainError("dB of non-positive ratio");
    return 10.0 * std::log10(linear);
}

EsnrLinear::EsnrLinear(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError("ESNR must be positive and finite, got " + std::to_string(value));
}

double natural_sample_count(const WaveformSpec& waveform, std::optional<double> override_count) {
    if (override_count) {
        if (!(*override_count > 0.0)) throw ConfigError("sample count must be positive");
        return *override_count;
    }
    const FrameGeometry g = geometry(waveform);
    switch (waveform.family()) {
    case Family::Fmcw:
        throw ConfigError("FMCW has no natural sample count; supply N_s explicitly");
    case Family::Pmcw: {
        const auto& p = std::get<PmcwSpec>(waveform.body);
        const double alpha = p.pulse.kind() == PulseShape::Kind::Rrc || p.pulse.kind() == PulseShape::Kind::Rc
                                 ? p.pulse.alpha()
                                 : 0.0;
        return g.bandwidth_hz * g.frame_s / (1.0 + alpha);
    }
    case Family::Ofdm:
    case Family::Otfs:
        return g.bandwidth_hz * g.frame_s;
    }
    throw ConfigError("unknown waveform family");
}

EsnrLinear esnr_from_snr(double snr, const WaveformSpec& waveform, std::optional<double> sample_count) {
    if (!(snr > 0.0)) throw ConfigError("SNR must be positive");
    return EsnrLinear(natural_sample_count(waveform, sample_count) * snr);
}

double crlb_delay_to_range(double c_tau_s2) {
    if (c_tau_s2 < 0.0) throw DomainError("negative delay variance");
    const double h = kSpeedOfLight / 2.0;
    return h * h * c_tau_s2;
}

double crlb_doppler_to_velocity(double c_fd_hz2, const CarrierConfig& cfg) {
    if (!(cfg.fc_hz > 0.0)) throw DomainError("carrier frequency must be positive");
    if (c_fd_hz2 < 0.0) throw DomainError("negative Doppler variance");
    const double h = CarrierConfig::c0 / (2.0 * cfg.fc_hz);
    return h * h * c_fd_hz2;
}

} // namespace isac
