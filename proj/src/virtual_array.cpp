// SPDX-License-Identifier: Apache-2.0
#include "isac/virtual_array.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "isac/errors.hpp"
#include "isac/fft.hpp"
#include "isac/kernels.hpp"
#include "isac/rng.hpp"
#include "isac/spectral.hpp"

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_scheme(const VaScheme& s, std::size_t n_t) {
    if (n_t < 1) throw ConfigError("N_T must be at least 1");
    if (s.kind == VaScheme::Kind::Cdm) {
        if (s.beta < 2) throw ConfigError("CDM needs beta >= 2");
        if (!is_pow2(n_t)) throw ConfigError("CDM needs N_T to be a power of two");
    }
}


// Contiguous sub-band split of |f| <= B/2; bins outside go to the edge blocks.
std::vector<SampledSignal> band_split(const SampledSignal& base, double bandwidth, std::size_t n_t) {
    const std::size_t n = fft::odd_length(base.size());
    std::vector<cplx> buf(n);
    std::copy(base.samples().begin(), base.samples().end(), buf.begin());
    const auto x = fft::forward(buf);
    const double width = bandwidth / static_cast<double>(n_t);
    const double gain = std::sqrt(static_cast<double>(n_t));
    std::vector<std::vector<cplx>> parts(n_t, std::vector<cplx>(n));
    for (std::size_t m = 0; m < n; ++m) {
        const double f = fft::bin_frequency(m, n, base.fs());
        auto idx = static_cast<std::ptrdiff_t>(std::floor((f + bandwidth / 2.0) / width));
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(n_t) - 1);
        parts[static_cast<std::size_t>(idx)][m] = gain * x[m];
    }
    std::vector<SampledSignal> out;
    for (auto& p : parts)
        out.emplace_back(fft::inverse(p), base.fs(), base.t0_offset(), base.centroid(), base.guard());
    return out;
}

} // namespace

void check_va_compatible(const VaScheme& s, Family f) {
    using K = VaScheme::Kind;
    const bool single_carrier = f == Family::Fmcw || f == Family::Pmcw;
    if (s.kind == K::Bfdm && !single_carrier) throw ConfigError("BFDM applies to FMCW and PMCW only");
    if (s.kind == K::Cfdm && single_carrier) throw ConfigError("CFDM applies to OFDM and OTFS only");
    if (s.kind == K::Cdm && f != Family::Pmcw) throw ConfigError("CDM applies to PMCW only");
}

std::string VaScheme::name() const {
    switch (kind) {
    case Kind::Itdm: return "itdm";
    case Kind::Btdm: return "btdm";
    case Kind::Bfdm: return "bfdm";
    case Kind::Cfdm: return "cfdm";
    case Kind::Cdm: return "cdm";
    }
    return "?";
}

VaScheme VaScheme::parse(const std::string& name, unsigned beta) {
    if (name == "itdm" || name == "tdm") return itdm();
    if (name == "btdm") return btdm();
    if (name == "bfdm") return bfdm();
    if (name == "cfdm") return cfdm();
    if (name == "cdm") return cdm(beta);
    throw ConfigError("unknown VA scheme '" + name + "'");
}

Eigen::MatrixXd hadamard(std::size_t n) {
    if (!is_pow2(n)) throw ConfigError("Hadamard order must be a power of two");
    Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
    while (static_cast<std::size_t>(h.rows()) < n) {
        const Eigen::Index m = h.rows();
        Eigen::MatrixXd g(2 * m, 2 * m);
        g << h, h, h, -h;
        h = g;
    }
    return h;
}

std::vector<double> outer_code(std::size_t tx, std::size_t n_t, unsigned beta, std::size_t k_total) {
    if (beta < 1) throw ConfigError("beta must be positive");
    const Eigen::MatrixXd h = hadamard(n_t);
    if (tx >= n_t) throw ConfigError("transmitter index out of range");
    std::vector<double> c(k_total);
    for (std::size_t k = 0; k < k_total; ++k)
        c[k] = h(static_cast<Eigen::Index>(tx), static_cast<Eigen::Index>((k / beta) % n_t));
    return c;
}

double esnr_scale(const VaScheme& scheme, std::size_t n_t) {
    check_scheme(scheme, n_t);
    const auto n = static_cast<double>(n_t);
    if (scheme.is_tdm()) return 1.0 / (n * n * n);
    if (scheme.is_fdm()) return 1.0 / (n * n);
    const auto b = static_cast<double>(scheme.beta);
    return (b - 1.0) / (b * n * n);
}

std::vector<SampledSignal> multiplex(const WaveformSpec& spec, const VaScheme& scheme, std::size_t n_t, double fs,
                                     const MultiplexOptions& opts) {
    check_scheme(scheme, n_t);
    check_va_compatible(scheme, spec.family());
    const SampledSignal base = synthesize(spec, fs, opts.synthesis);
    if (n_t == 1) return {base};

    const FrameGeometry g = geometry(spec);
    if (scheme.kind == VaScheme::Kind::Bfdm) return band_split(base, g.bandwidth_hz, n_t);

    SynthesisOptions so = opts.synthesis;
    so.centroid_reference = base.centroid();
    std::vector<SampledSignal> out;
    out.reserve(n_t);

    if (scheme.kind == VaScheme::Kind::Cfdm) {
        const WaveformSpec ofdm = spec.family() == Family::Otfs
                                      ? WaveformSpec{as_ofdm(std::get<OtfsSpec>(spec.body))}
                                      : spec;
        const double gain = std::sqrt(static_cast<double>(n_t));
        for (std::size_t tx = 0; tx < n_t; ++tx) {
            so.subcarrier_gain.assign(g.l, 0.0);
            for (std::size_t l = tx; l < g.l; l += n_t) so.subcarrier_gain[l] = gain;
            out.push_back(synthesize(ofdm, fs, so));
        }
        return out;
    }

    const std::size_t k = g.k;
    if (scheme.kind == VaScheme::Kind::Btdm && k % n_t != 0) throw ConfigError("BTDM needs K divisible by N_T");
    if (scheme.kind == VaScheme::Kind::Cdm && k % (n_t * scheme.beta) != 0)
        throw ConfigError("CDM needs K divisible by N_T * beta");
    for (std::size_t tx = 0; tx < n_t; ++tx) {
        std::vector<double> gain(k, 0.0);
        switch (scheme.kind) {
        case VaScheme::Kind::Itdm:
            for (std::size_t i = tx; i < k; i += n_t) gain[i] = 1.0;
            break;
        case VaScheme::Kind::Btdm:
            for (std::size_t i = tx * (k / n_t); i < (tx + 1) * (k / n_t); ++i) gain[i] = 1.0;
            break;
        case VaScheme::Kind::Cdm: {
            gain = outer_code(tx, n_t, scheme.beta, k);
            const double b = scheme.beta;
            for (std::size_t i = 0; i < k; ++i) {
                if (opts.literal_discard) {
                    if (i % scheme.beta == 0) gain[i] = 0.0;
                } else {
                    gain[i] *= std::sqrt((b - 1.0) / b);
                }
            }
            break;
        }
        default:
            break;
        }
        so.pri_gain = std::move(gain);
        out.push_back(synthesize(spec, fs, so));
    }
    return out;
}

std::vector<double> virtual_positions(std::size_t tx, const ArrayConfig& array) {
    std::vector<double> p(array.n_r);
    const auto nt = static_cast<double>(array.n_t);
    for (std::size_t r = 0; r < array.n_r; ++r)
        p[r] = static_cast<double>(tx) * array.d_t + static_cast<double>(r) * nt * array.d_t;
    return p;
}

FisherMatrix va_fim_from_branches(const std::vector<SampledSignal>& branches, const SceneParams& scene) {
    if (branches.size() != scene.array.n_t) throw ConfigError("branch count does not match N_T");
    SceneParams sv = scene;
    sv.amplitude = scene.amplitude / static_cast<double>(scene.array.n_t);
    FisherMatrix f;
    for (std::size_t tx = 0; tx < branches.size(); ++tx) {
        const auto pos = virtual_positions(tx, scene.array);
        f += fim_from_signal(branches[tx], sv, pos);
    }
    return f;
}

FisherMatrix va_fim_joint(const std::vector<SampledSignal>& branches, const SceneParams& scene) {
    scene.validate();
    if (branches.size() != scene.array.n_t) throw ConfigError("branch count does not match N_T");
    const double a = scene.amplitude / static_cast<double>(scene.array.n_t);
    const double st = std::sin(scene.theta_rad);
    const double ct = std::cos(scene.theta_rad);
    std::array<std::vector<cplx>, 5> d;
    for (std::size_t tx = 0; tx < branches.size(); ++tx) {
        const SampledSignal& b = branches[tx];
        const auto pair = delayed_with_derivative(b, scene.delay_s);
        for (double p : virtual_positions(tx, scene.array)) {
            const cplx g = std::polar(a, scene.phase_rad - 2.0 * kPi * p * st);
            for (std::size_t n = 0; n < b.size(); ++n) {
                const double t = b.time(n) + b.centroid();
                const cplx e = std::polar(1.0, 2.0 * kPi * scene.doppler_hz * t);
                const cplx mu = g * pair.value[n] * e;
                d[0].push_back(mu / a);
                d[1].push_back(cplx(0.0, 1.0) * mu);
                d[2].push_back(-g * pair.derivative[n] * e);
                d[3].push_back(cplx(0.0, 2.0 * kPi * t) * mu);
                d[4].push_back(cplx(0.0, -2.0 * kPi * p * ct) * mu);
            }
        }
    }
    const std::array<std::span<const cplx>, 5> v{d[0], d[1], d[2], d[3], d[4]};
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(5, 5);
    kernels::gram_serial(v, gram);
    FisherMatrix f;
    f.entries = gram.real() * (2.0 / scene.sigma2 / branches.front().fs());
    return f;
}

FisherMatrix va_fim(const WaveformSpec& spec, const VaScheme& scheme, const SceneParams& scene, double fs,
                    const MultiplexOptions& opts) {
    MultiplexOptions o = opts;
    o.synthesis.max_delay_s = std::max(o.synthesis.max_delay_s, std::abs(scene.delay_s));
    if (const auto* p = std::get_if<PmcwSpec>(&spec.body); p && p->pulse.kind() == PulseShape::Kind::Rect)
        o.synthesis.filter_sidelobes = true;
    const auto branches = multiplex(spec, scheme, scene.array.n_t, fs, o);
    return va_fim_from_branches(branches, scene);
}

VaCrlbRatios va_crlb_ratios(const VaScheme& scheme, std::size_t n_t, std::size_t n_r) {
    check_scheme(scheme, n_t);
    if (n_r < 2) throw ConfigError("AoA ratios need N_R >= 2");
    const auto nt = static_cast<double>(n_t);
    const auto nr = static_cast<double>(n_r);
    const double nv = nt * nr;
    const double scale = esnr_scale(scheme, n_t);
    VaCrlbRatios r;
    if (scheme.is_tdm()) {
        r.r_tau = nt * nt;
        r.r_theta_approx = 1.0;
    } else if (scheme.is_fdm()) {
        r.r_tau = nt;
        r.r_theta_approx = 1.0 / nt;
    } else {
        const auto b = static_cast<double>(scheme.beta);
        r.r_tau = b * nt / (b - 1.0);
        r.r_theta_approx = b / ((b - 1.0) * nt);
    }
    r.r_fd = r.r_tau;
    r.r_theta_exact = nr * (nr * nr - 1.0) / (nv * (nv * nv - 1.0) * scale);
    return r;
}

NoiseWhitening cdm_decode_noise_check(std::size_t n_t, std::size_t n_samples, std::size_t trials, std::uint64_t seed) {
    const Eigen::MatrixXd h = hadamard(n_t);
    NoiseWhitening out;
    if (n_t == 1 || trials == 0 || n_samples == 0) return out;
    const auto m = static_cast<Eigen::Index>(n_t);
    std::vector<Eigen::MatrixXcd> per_trial(trials, Eigen::MatrixXcd::Zero(m, m));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_t));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t tr = 0; tr < static_cast<std::ptrdiff_t>(trials); ++tr) {
        CounterRng rng(seed, static_cast<std::uint64_t>(tr));
        Eigen::VectorXcd w(m);
        Eigen::MatrixXcd& c = per_trial[static_cast<std::size_t>(tr)];
        for (std::size_t s = 0; s < n_samples; ++s) {
            for (Eigen::Index i = 0; i < m; ++i) w(i) = rng.complex_normal(1.0);
            const Eigen::VectorXcd y = norm * (h.cast<cplx>() * w);
            c.noalias() += y * y.adjoint();
        }
        c /= static_cast<double>(n_samples);
    }
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(m, m);
    for (const auto& c : per_trial) mean += c;
    mean /= static_cast<double>(trials);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j)
                out.max_diag_dev = std::max(out.max_diag_dev, std::abs(mean(i, i).real() - 1.0));
            else
                out.max_cross = std::max(out.max_cross, std::abs(mean(i, j)));
        }
    return out;
}

void write_ratio_csv(std::ostream& os, const std::vector<RatioRow>& rows) {
    os << "scheme,n_t,beta,r_tau,r_fd,r_theta_exact,r_theta_approx\n" << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.scheme.name() << ',' << r.n_t << ',';
        if (r.scheme.kind == VaScheme::Kind::Cdm) os << r.scheme.beta;
        os << ',' << r.ratios.r_tau << ',' << r.ratios.r_fd << ',' << r.ratios.r_theta_exact << ','
           << r.ratios.r_theta_approx << '\n';
    }
}

} // namespace isac
