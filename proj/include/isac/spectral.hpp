// SPDX-License-Identifier: Apache-2.0
//
// Power spectra, RMS bandwidth and duration, and the closed-form RMS
// bandwidths of the four chip pulses.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "isac/waveform.hpp"

namespace isac {

// |S(f)|^2 on a bin grid symmetric about 0 Hz, ascending in frequency.
// df * sum(bins) equals the signal energy.
struct PowerSpectrum {
    std::vector<double> bins;
    double df = 0.0;
    double f_start = 0.0;

    std::size_t size() const { return bins.size(); }
    double frequency(std::size_t m) const { return f_start + static_cast<double>(m) * df; }
    double energy() const;
};

PowerSpectrum power_spectrum(const SampledSignal& sig);

// Second moment of the normalized spectrum about f = 0.
double rms_bandwidth_sq(const PowerSpectrum& ps);
// Same, integrating only |f| <= half_band (e.g. the rect main lobe).
double rms_bandwidth_sq(const PowerSpectrum& ps, double half_band);

// Second moment of the normalized envelope about t = 0.
double rms_time_sq(const SampledSignal& sig);

// Closed-form B_rms^2 of a single chip pulse:
//   rect  1 / (2 pi Si(2 pi) Tc^2)          (main lobe, B = 2/Tc)
//   sinc  1 / (12 Tc^2)                      (B = 1/Tc)
//   RRC   B^2/12 ((3pi^2-24)a^2+pi^2) / (pi^2 (1+a)^2)
//   RC    B^2/12 ((6-pi^2)a^3+(12pi^2-96)a^2-3pi^2 a+4pi^2) / (pi^2 (4-a)(1+a)^2)
double pulse_rms_bandwidth_sq(const PulseShape& pulse, double chip_period);

// (B^2/12) / B_rms^2 with B the pulse's own occupied bandwidth; multiplies
// the sinc delay bound 3 / (2 pi^2 N_R gamma B^2).
double pulse_delay_factor(const PulseShape& pulse);

// sum_{f>0} | |S(f)|^2 - |S(-f)|^2 | / sum_f |S(f)|^2, in [0, 1].
double spectrum_symmetry_defect(const PowerSpectrum& ps);

// Sine integral Si(x) = int_0^x sin(t)/t dt.
double si(double x);

// Centered moving average over `window` bins.
PowerSpectrum smoothed(const PowerSpectrum& ps, std::size_t window = 32);

// CSV with header `f_hz,psd`.
void write_spectrum_csv(std::ostream& os, const PowerSpectrum& ps);

// Ideal low-pass to |f| <= half_band_hz.
SampledSignal band_limit(const SampledSignal& sig, double half_band_hz);

// s(t_n - tau) and its time derivative, both computed in the frequency
// domain. The derivative is ds/dt, not a finite difference.
struct DelayedPair {
    std::vector<cplx> value;
    std::vector<cplx> derivative;
};
DelayedPair delayed_with_derivative(const SampledSignal& sig, double tau);

// One chip pulse sampled at fs on a grid symmetric about t = 0 (no sample at
// 0), zero padded to +-half_span chips.
SampledSignal sampled_pulse(const PulseShape& pulse, double chip_period, double fs, double half_span_chips);

} // namespace isac
