// SPDX-License-Identifier: Apache-2.0
#include "isac/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "isac/errors.hpp"
#include "isac/kernels.hpp"
#include "isac/spectral.hpp"

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc_pi(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("roll-off must lie in [0, 1]");
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> gains_or_ones(const std::vector<double>& g, std::size_t n, const char* what) {
    if (g.empty()) return std::vector<double>(n, 1.0);
    if (g.size() != n) throw ConfigError(std::string(what) + " gain vector has the wrong size");
    return g;
}

} // namespace

PulseShape PulseShape::rrc(double alpha) {
    check_alpha(alpha);
    return PulseShape(Kind::Rrc, alpha);
}

PulseShape PulseShape::rc(double alpha) {
    check_alpha(alpha);
    if (alpha == 0.0) throw ConfigError("RC with alpha = 0 is the sinc pulse; select sinc instead");
    return PulseShape(Kind::Rc, alpha);
}

std::string PulseShape::name() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Rect: return "rect";
    case Kind::Sinc: return "sinc";
    case Kind::Rrc: os << "rrc(" << alpha_ << ")"; return os.str();
    case Kind::Rc: os << "rc(" << alpha_ << ")"; return os.str();
    }
    return "?";
}

double PulseShape::bandwidth(double chip_period) const {
    switch (kind_) {
    case Kind::Rect: return 2.0 / chip_period;
    case Kind::Sinc: return 1.0 / chip_period;
    default: return (1.0 + alpha_) / chip_period;
    }
}

double PulseShape::chip_period_for_bandwidth(double bandwidth_hz) const {
    return bandwidth(1.0) / bandwidth_hz;
}

double PulseShape::value(double x) const {
    switch (kind_) {
    case Kind::Rect: {
        const double a = std::abs(x);
        return a < 0.5 ? 1.0 : (a == 0.5 ? 0.5 : 0.0);
    }
    case Kind::Sinc:
        return sinc_pi(x);
    case Kind::Rrc: {
        const double a = alpha_;
        if (std::abs(x) < 1e-10) return 1.0 - a + 4.0 * a / kPi;
        if (a > 0.0 && std::abs(std::abs(x) - 1.0 / (4.0 * a)) < 1e-10) {
            const double q = kPi / (4.0 * a);
            return a / std::numbers::sqrt2 * ((1.0 + 2.0 / kPi) * std::sin(q) + (1.0 - 2.0 / kPi) * std::cos(q));
        }
        const double num = std::sin(kPi * x * (1.0 - a)) + 4.0 * a * x * std::cos(kPi * x * (1.0 + a));
        const double den = kPi * x * (1.0 - (4.0 * a * x) * (4.0 * a * x));
        return num / den;
    }
    case Kind::Rc: {
        const double a = alpha_;
        const double norm = 1.0 / std::sqrt(1.0 - a / 4.0);
        if (std::abs(std::abs(x) - 1.0 / (2.0 * a)) < 1e-10) return norm * kPi / 4.0 * sinc_pi(1.0 / (2.0 * a));
        return norm * sinc_pi(x) * std::cos(kPi * a * x) / (1.0 - (2.0 * a * x) * (2.0 * a * x));
    }
    }
    return 0.0;
}

std::string to_string(Family f) {
    switch (f) {
    case Family::Fmcw: return "fmcw";
    case Family::Pmcw: return "pmcw";
    case Family::Ofdm: return "ofdm";
    case Family::Otfs: return "otfs";
    }
    return "?";
}

Family WaveformSpec::family() const { return static_cast<Family>(body.index()); }

void WaveformSpec::validate() const {
    std::visit(overloaded{
                   [](const FmcwSpec& s) {
                       if (!(s.bandwidth_hz >= 0.0)) throw ConfigError("FMCW bandwidth must be >= 0");
                       if (!(s.pri_s > 0.0)) throw ConfigError("FMCW PRI must be positive");
                       if (s.data.empty()) throw ConfigError("FMCW data is empty");
                       for (const auto& x : s.data)
                           if (std::abs(std::abs(x) - 1.0) > 1e-9)
                               throw ConfigError("FMCW data must be unit modulus");
                   },
                   [](const PmcwSpec& s) {
                       if (!(s.chip_period_s > 0.0)) throw ConfigError("PMCW chip period must be positive");
                       if (s.code.empty()) throw ConfigError("PMCW code is empty");
                       if (s.data.empty()) throw ConfigError("PMCW data is empty");
                       for (double b : s.code)
                           if (b != 1.0 && b != -1.0) throw ConfigError("PMCW chips must be +-1");
                       for (double x : s.data)
                           if (x != 1.0 && x != -1.0) throw ConfigError("PMCW data must be +-1");
                   },
                   [](const OfdmSpec& s) {
                       if (!(s.subcarrier_spacing_hz > 0.0)) throw ConfigError("OFDM subcarrier spacing must be positive");
                       if (s.symbols.size() == 0) throw ConfigError("OFDM symbol grid is empty");
                   },
                   [](const OtfsSpec& s) {
                       if (!(s.subcarrier_spacing_hz > 0.0)) throw ConfigError("OTFS subcarrier spacing must be positive");
                       if (s.dd_symbols.size() == 0) throw ConfigError("OTFS symbol grid is empty");
                   },
               },
               body);
}

FrameGeometry geometry(const WaveformSpec& spec) {
    return std::visit(
        overloaded{
            [](const FmcwSpec& s) {
                return FrameGeometry{s.bandwidth_hz, s.pri_s, s.pri_s * static_cast<double>(s.data.size()),
                                     s.data.size(), 1};
            },
            [](const PmcwSpec& s) {
                const double pri = s.chip_period_s * static_cast<double>(s.code.size());
                return FrameGeometry{s.pulse.bandwidth(s.chip_period_s), pri, pri * static_cast<double>(s.data.size()),
                                     s.data.size(), s.code.size()};
            },
            [](const OfdmSpec& s) {
                const auto l = static_cast<std::size_t>(s.symbols.rows());
                const auto k = static_cast<std::size_t>(s.symbols.cols());
                const double t = 1.0 / s.subcarrier_spacing_hz;
                const double ts = t + t * static_cast<double>(s.cp_length) / static_cast<double>(l);
                return FrameGeometry{s.subcarrier_spacing_hz * static_cast<double>(l), ts, ts * static_cast<double>(k), k, l};
            },
            [](const OtfsSpec& s) {
                const auto l = static_cast<std::size_t>(s.dd_symbols.rows());
                const auto k = static_cast<std::size_t>(s.dd_symbols.cols());
                const double t = 1.0 / s.subcarrier_spacing_hz;
                const double ts = t + t * static_cast<double>(s.cp_length) / static_cast<double>(l);
                return FrameGeometry{s.subcarrier_spacing_hz * static_cast<double>(l), ts, ts * static_cast<double>(k), k, l};
            },
        },
        spec.body);
}

SampledSignal::SampledSignal(std::vector<cplx> samples, double fs, double t0_offset, double centroid, double guard_s)
    : samples_(std::move(samples)), fs_(fs), t0_offset_(t0_offset), centroid_(centroid), guard_(guard_s) {
    if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
    double e = 0.0;
    for (const auto& v : samples_) e += std::norm(v);
    energy_ = e / fs_;
}

SampledSignal SampledSignal::centered(std::vector<cplx> samples, double fs, double t_first, double guard_s) {
    const double dt = 1.0 / fs;
    const double e = kernels::time_moment_serial(samples, t_first, dt, 0);
    const double m1 = kernels::time_moment_serial(samples, t_first, dt, 1);
    const double c = e > 0.0 ? m1 / e : 0.0;
    return SampledSignal(std::move(samples), fs, t_first - c, c, guard_s);
}

SampledSignal SampledSignal::with_samples(std::vector<cplx> samples) const {
    return SampledSignal(std::move(samples), fs_, t0_offset_, centroid_, guard_);
}

double default_guard(double bandwidth_hz, double max_delay_s) {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("guard needs a positive bandwidth");
    return std::max(2.0 * std::abs(max_delay_s), 8.0 / bandwidth_hz);
}

double default_sample_rate(const WaveformSpec& spec, double oversample) {
    const FrameGeometry g = geometry(spec);
    const double b = g.bandwidth_hz > 0.0 ? g.bandwidth_hz : 1.0 / g.pri_s;
    return oversample * b;
}

SampledSignal synthesize(const WaveformSpec& spec, double fs, const SynthesisOptions& opts) {
    spec.validate();
    if (const auto* o = std::get_if<OtfsSpec>(&spec.body)) return synthesize(WaveformSpec{as_ofdm(*o)}, fs, opts);
    const FrameGeometry g = geometry(spec);
    if (!(fs > 0.0) || fs < g.bandwidth_hz * (1.0 - 1e-12))
        throw SamplingError("sample rate below the occupied bandwidth");
    const double b_guard = g.bandwidth_hz > 0.0 ? g.bandwidth_hz : fs / 4.0;
    const double guard = default_guard(b_guard, opts.max_delay_s);
    const auto guard_n = static_cast<std::size_t>(std::ceil(guard * fs - 1e-9));
    const auto frame_n = static_cast<std::size_t>(std::ceil(g.frame_s * fs - 1e-9));

    std::size_t tail_n = 0;
    if (const auto* p = std::get_if<PmcwSpec>(&spec.body); p && p->pulse.unbounded_support())
        tail_n = static_cast<std::size_t>(std::ceil(opts.pulse_half_span_chips * p->chip_period_s * fs));

    const std::size_t first = guard_n + tail_n;
    const std::size_t total = 2 * (guard_n + tail_n) + frame_n;
    std::vector<cplx> out(total);
    const auto pri_gain = gains_or_ones(opts.pri_gain, g.k, "PRI");

    auto frame_time = [&](std::size_t n) {
        return (static_cast<double>(n) - static_cast<double>(first) + 0.5) / fs;
    };

    std::visit(
        overloaded{
            [&](const FmcwSpec& s) {
                const double mu = s.bandwidth_hz / s.pri_s;
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(frame_n); ++i) {
                    const std::size_t n = first + static_cast<std::size_t>(i);
                    const double tf = frame_time(n);
                    const auto k = std::min(static_cast<std::size_t>(tf / s.pri_s), g.k - 1);
                    const double u = tf - static_cast<double>(k) * s.pri_s - 0.5 * s.pri_s;
                    out[n] = pri_gain[k] * s.data[k] * std::polar(1.0, kPi * mu * u * u);
                }
            },
            [&](const PmcwSpec& s) {
                std::vector<double> amp(g.k * g.l);
                for (std::size_t k = 0; k < g.k; ++k)
                    for (std::size_t l = 0; l < g.l; ++l) amp[k * g.l + l] = pri_gain[k] * s.data[k] * s.code[l];
                const double spc = s.chip_period_s * fs;
                kernels::ChipTrain tr{amp, spc, static_cast<double>(first) + spc / 2.0 - 0.5,
                                      s.pulse.unbounded_support() ? opts.pulse_half_span_chips : 0.5};
                kernels::chip_train_parallel(tr, s.pulse, out);
            },
            [&](const OfdmSpec& s) {
                const auto sc_gain = gains_or_ones(opts.subcarrier_gain, g.l, "subcarrier");
                Eigen::MatrixXcd grid = s.symbols;
                for (Eigen::Index l = 0; l < grid.rows(); ++l)
                    for (Eigen::Index k = 0; k < grid.cols(); ++k)
                        grid(l, k) *= sc_gain[static_cast<std::size_t>(l)] * pri_gain[static_cast<std::size_t>(k)] /
                                      std::sqrt(static_cast<double>(g.l));
                const double t = 1.0 / s.subcarrier_spacing_hz;
                kernels::MulticarrierFrame mf{&grid,
                                              s.subcarrier_spacing_hz,
                                              s.subcarrier_spacing_hz * static_cast<double>(g.l - 1) / 2.0,
                                              t,
                                              g.pri_s - t,
                                              fs,
                                              first,
                                              frame_n};
                kernels::multicarrier_parallel(mf, out);
            },
            [](const OtfsSpec&) {},
        },
        spec.body);

    const double t_first = frame_time(0);
    SampledSignal sig(std::move(out), fs, t_first, 0.0, guard);
    if (opts.filter_sidelobes && g.bandwidth_hz > 0.0) sig = band_limit(sig, g.bandwidth_hz / 2.0);

    std::vector<cplx> samples(sig.samples().begin(), sig.samples().end());
    double centroid;
    if (opts.centroid_reference) {
        centroid = *opts.centroid_reference;
    } else {
        const double e = kernels::time_moment_parallel(samples, t_first, 1.0 / fs, 0);
        const double m1 = kernels::time_moment_parallel(samples, t_first, 1.0 / fs, 1);
        centroid = e > 0.0 ? m1 / e : 0.0;
    }
    return SampledSignal(std::move(samples), fs, t_first - centroid, centroid, guard);
}

Eigen::MatrixXcd otfs_to_tf(const Eigen::MatrixXcd& dd) {
    const Eigen::Index l = dd.rows();
    const Eigen::Index k = dd.cols();
    Eigen::MatrixXcd a(l, l);
    for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index m = 0; m < l; ++m)
            a(i, m) = std::polar(1.0, -2.0 * kPi * static_cast<double>((i * m) % l) / static_cast<double>(l));
    Eigen::MatrixXcd b(k, k);
    for (Eigen::Index v = 0; v < k; ++v)
        for (Eigen::Index j = 0; j < k; ++j)
            b(v, j) = std::polar(1.0, 2.0 * kPi * static_cast<double>((v * j) % k) / static_cast<double>(k));
    return (a * dd * b) / std::sqrt(static_cast<double>(k * l));
}

OfdmSpec as_ofdm(const OtfsSpec& otfs) {
    return OfdmSpec{otfs.subcarrier_spacing_hz, otfs.cp_length, otfs_to_tf(otfs.dd_symbols)};
}

std::vector<double> lfsr_msequence(unsigned degree, std::span<const unsigned> taps) {
    if (degree < 2 || degree > 24) throw ConfigError("LFSR degree must lie in [2, 24]");
    if (taps.empty()) throw ConfigError("LFSR needs at least one tap");
    for (unsigned t : taps)
        if (t < 1 || t > degree) throw ConfigError("LFSR tap outside the register");
    std::vector<unsigned char> reg(degree, 1);
    const std::size_t period = (std::size_t{1} << degree) - 1;
    std::vector<double> seq;
    seq.reserve(period);
    for (std::size_t i = 0; i < period; ++i) {
        seq.push_back(reg[degree - 1] ? -1.0 : 1.0);
        unsigned char fb = 0;
        for (unsigned t : taps) fb ^= reg[t - 1];
        for (std::size_t j = degree - 1; j > 0; --j) reg[j] = reg[j - 1];
        reg[0] = fb;
        if (i + 1 < period && std::all_of(reg.begin(), reg.end(), [](unsigned char r) { return r == 1; }))
            throw ConfigError("LFSR taps do not give a maximal-length sequence");
    }
    return seq;
}

} // namespace isac
