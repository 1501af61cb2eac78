// SPDX-License-Identifier: Apache-2.0
#include "isac/spectral.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isac/errors.hpp"
#include "isac/fft.hpp"
#include "isac/kernels.hpp"

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

// Zero-padded odd-length spectrum of the samples, FFT order.
std::vector<cplx> padded_spectrum(std::span<const cplx> s, std::size_t n_fft) {
    std::vector<cplx> buf(n_fft);
    std::copy(s.begin(), s.end(), buf.begin());
    return fft::forward(buf);
}

} // namespace

double PowerSpectrum::energy() const {
    double e = 0.0;
    for (double b : bins) e += b;
    return e * df;
}

PowerSpectrum power_spectrum(const SampledSignal& sig) {
    if (sig.size() == 0) throw DomainError("empty signal");
    const std::size_t n = fft::odd_length(sig.size());
    const auto x = padded_spectrum(sig.samples(), n);
    const std::size_t half = (n - 1) / 2;
    PowerSpectrum ps;
    ps.df = sig.fs() / static_cast<double>(n);
    ps.f_start = -static_cast<double>(half) * ps.df;
    ps.bins.resize(n);
    const double dt2 = sig.dt() * sig.dt();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = (i + n - half) % n;  // ascending index i -> FFT bin
        ps.bins[i] = dt2 * std::norm(x[m]);
    }
    return ps;
}

double rms_bandwidth_sq(const PowerSpectrum& ps) {
    return rms_bandwidth_sq(ps, std::numeric_limits<double>::infinity());
}

double rms_bandwidth_sq(const PowerSpectrum& ps, double half_band) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double f = ps.frequency(i);
        if (std::abs(f) > half_band * (1.0 + 1e-12)) continue;
        num += f * f * ps.bins[i];
        den += ps.bins[i];
    }
    if (!(den > 0.0)) throw DomainError("zero-energy spectrum");
    return num / den;
}

double rms_time_sq(const SampledSignal& sig) {
    const double e = kernels::time_moment_parallel(sig.samples(), sig.t0_offset(), sig.dt(), 0);
    if (!(e > 0.0)) throw DomainError("zero-energy signal");
    return kernels::time_moment_parallel(sig.samples(), sig.t0_offset(), sig.dt(), 2) / e;
}

double si(double x) {
    if (x == 0.0) return 0.0;
    auto f = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
    double err = 0.0;
    const double ax = std::abs(x);
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, ax, 30, 1e-14, &err);
    if (err > 1e-10) throw NumericalError("Si quadrature did not converge");
    return x < 0.0 ? -v : v;
}

double pulse_rms_bandwidth_sq(const PulseShape& pulse, double tc) {
    if (!(tc > 0.0)) throw ConfigError("chip period must be positive");
    const double pi2 = kPi * kPi;
    const double a = pulse.alpha();
    const double b = pulse.bandwidth(tc);
    switch (pulse.kind()) {
    case PulseShape::Kind::Rect:
        return 1.0 / (2.0 * kPi * si(2.0 * kPi) * tc * tc);
    case PulseShape::Kind::Sinc:
        return b * b / 12.0;
    case PulseShape::Kind::Rrc:
        return b * b / 12.0 * ((3.0 * pi2 - 24.0) * a * a + pi2) / (pi2 * (1.0 + a) * (1.0 + a));
    case PulseShape::Kind::Rc:
        return b * b / 12.0 *
               ((6.0 - pi2) * a * a * a + (12.0 * pi2 - 96.0) * a * a - 3.0 * pi2 * a + 4.0 * pi2) /
               (pi2 * (4.0 - a) * (1.0 + a) * (1.0 + a));
    }
    return 0.0;
}

double pulse_delay_factor(const PulseShape& pulse) {
    const double b = pulse.bandwidth(1.0);
    return b * b / 12.0 / pulse_rms_bandwidth_sq(pulse, 1.0);
}

double spectrum_symmetry_defect(const PowerSpectrum& ps) {
    const std::size_t n = ps.size();
    if (n == 0) return 0.0;
    const std::size_t c = (n - 1) / 2;
    double total = 0.0;
    for (double v : ps.bins) total += v;
    if (!(total > 0.0)) return 0.0;
    double d = 0.0;
    for (std::size_t i = 1; i <= c && c + i < n; ++i) d += std::abs(ps.bins[c + i] - ps.bins[c - i]);
    return d / total;
}

PowerSpectrum smoothed(const PowerSpectrum& ps, std::size_t window) {
    if (window < 2) return ps;
    PowerSpectrum out = ps;
    const auto n = static_cast<std::ptrdiff_t>(ps.size());
    const auto lo_off = static_cast<std::ptrdiff_t>(window / 2);
    const auto hi_off = static_cast<std::ptrdiff_t>(window) - lo_off - 1;
    std::vector<double> prefix(ps.size() + 1, 0.0);
    for (std::size_t i = 0; i < ps.size(); ++i) prefix[i + 1] = prefix[i] + ps.bins[i];
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto lo = std::max<std::ptrdiff_t>(0, i - lo_off);
        const auto hi = std::min<std::ptrdiff_t>(n - 1, i + hi_off);
        out.bins[static_cast<std::size_t>(i)] =
            (prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

void write_spectrum_csv(std::ostream& os, const PowerSpectrum& ps) {
    os << "f_hz,psd\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ps.size(); ++i) os << ps.frequency(i) << ',' << ps.bins[i] << '\n';
}

SampledSignal band_limit(const SampledSignal& sig, double half_band_hz) {
    const std::size_t n = fft::odd_length(sig.size());
    auto x = padded_spectrum(sig.samples(), n);
    for (std::size_t m = 0; m < n; ++m)
        if (std::abs(fft::bin_frequency(m, n, sig.fs())) > half_band_hz * (1.0 + 1e-12)) x[m] = 0.0;
    auto y = fft::inverse(x);
    y.resize(sig.size());
    return sig.with_samples(std::move(y));
}

DelayedPair delayed_with_derivative(const SampledSignal& sig, double tau) {
    const std::size_t n = fft::odd_length(sig.size());
    auto x = padded_spectrum(sig.samples(), n);
    std::vector<cplx> d(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double f = fft::bin_frequency(m, n, sig.fs());
        if (tau != 0.0) x[m] *= std::polar(1.0, -2.0 * kPi * f * tau);
        d[m] = x[m] * cplx(0.0, 2.0 * kPi * f);
    }
    DelayedPair out;
    if (tau != 0.0) {
        out.value = fft::inverse(x);
        out.value.resize(sig.size());
    } else {
        out.value.assign(sig.samples().begin(), sig.samples().end());
    }
    out.derivative = fft::inverse(d);
    out.derivative.resize(sig.size());
    return out;
}

SampledSignal sampled_pulse(const PulseShape& pulse, double tc, double fs, double half_span_chips) {
    const double span = pulse.unbounded_support() ? half_span_chips : 0.5;
    // samples at (i + 1/2)/fs, symmetric about 0; padding out to
    // +-half_span_chips sets the spectral resolution
    const auto m = static_cast<std::ptrdiff_t>(std::ceil(std::max(span, half_span_chips) * tc * fs));
    std::vector<cplx> s(static_cast<std::size_t>(2 * m));
    for (std::ptrdiff_t i = -m; i < m; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / (fs * tc);
        s[static_cast<std::size_t>(i + m)] = std::abs(x) <= span ? pulse.value(x) : 0.0;
    }
    return SampledSignal(std::move(s), fs, (-static_cast<double>(m) + 0.5) / fs);
}

} // namespace isac
