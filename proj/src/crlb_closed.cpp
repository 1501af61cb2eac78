// SPDX-License-Identifier: Apache-2.0
#include "isac/crlb_closed.hpp"

#include <cmath>
#include <numbers>

#include "isac/errors.hpp"
#include "isac/spectral.hpp"

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

// 3 / (2 pi^2 N_R gamma x^2)
double base_bound(const ClosedFormRequest& r, double x) {
    return 3.0 / (2.0 * kPi * kPi * static_cast<double>(r.n_r) * r.gamma.value() * x * x);
}

} // namespace

void ClosedFormRequest::validate() const {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
    if (!(frame_s > 0.0)) throw ConfigError("frame length must be positive");
    if (k < 1 || l < 1) throw ConfigError("K and L must be at least 1");
    if (n_r < 1) throw ConfigError("N_R must be at least 1");
}

ClosedFormRequest request_for(const WaveformSpec& spec, std::size_t n_r, EsnrLinear gamma, double theta_rad) {
    const FrameGeometry g = geometry(spec);
    ClosedFormRequest r;
    r.family = spec.family();
    r.bandwidth_hz = g.bandwidth_hz;
    r.frame_s = g.frame_s;
    r.k = g.k;
    r.l = g.l;
    r.n_r = n_r;
    r.gamma = gamma;
    r.theta_rad = theta_rad;
    if (const auto* p = std::get_if<PmcwSpec>(&spec.body)) r.pulse = p->pulse;
    if (r.family == Family::Ofdm || r.family == Family::Otfs) {
        r.subcarrier_spacing_hz = g.bandwidth_hz / static_cast<double>(g.l);
        r.symbol_s = g.pri_s;
    }
    return r;
}

Bound crlb_aoa(std::size_t n_r, EsnrLinear gamma, double theta_rad) {
    const double c = std::cos(theta_rad);
    if (n_r < 2 || std::abs(theta_rad) >= kPi / 2 || c * c == 0.0) return Bound::unbounded();
    const auto n = static_cast<double>(n_r);
    return Bound::finite(6.0 / (kPi * kPi * c * c * n * (n * n - 1.0) * gamma.value()));
}

Bound fmcw_exact_over_approx(std::size_t k) {
    if (k < 2) return Bound::unbounded();
    const auto kk = static_cast<double>(k) * static_cast<double>(k);
    return Bound::finite(kk / (kk - 1.0));
}

CrlbResult crlb_fmcw(const ClosedFormRequest& req) {
    req.validate();
    CrlbResult r;
    r.c_theta = crlb_aoa(req.n_r, req.gamma, req.theta_rad);
    if (req.approx_large_k) {
        r.c_tau = Bound::finite(base_bound(req, req.bandwidth_hz));
        r.c_fd = Bound::finite(base_bound(req, req.frame_s));
        return r;
    }
    if (req.k < 2) return r;
    const auto kk = static_cast<double>(req.k) * static_cast<double>(req.k);
    const double factor = 1.0 - 1.0 / kk;
    r.c_tau = Bound::finite(base_bound(req, req.bandwidth_hz) / factor);
    r.c_fd = Bound::finite(base_bound(req, req.frame_s) / factor);
    return r;
}

CrlbResult crlb_pmcw(const ClosedFormRequest& req) {
    req.validate();
    CrlbResult r;
    r.c_tau = Bound::finite(base_bound(req, req.bandwidth_hz) * pulse_delay_factor(req.pulse));
    r.c_fd = Bound::finite(base_bound(req, req.frame_s));
    r.c_theta = crlb_aoa(req.n_r, req.gamma, req.theta_rad);
    return r;
}

CrlbResult crlb_ofdm_continuous(const ClosedFormRequest& req) {
    req.validate();
    CrlbResult r;
    r.c_tau = Bound::finite(base_bound(req, req.bandwidth_hz));
    r.c_fd = Bound::finite(base_bound(req, req.frame_s));
    r.c_theta = crlb_aoa(req.n_r, req.gamma, req.theta_rad);
    return r;
}

DiscreteOfdmResult crlb_ofdm_discrete(const ClosedFormRequest& req) {
    req.validate();
    if (req.k < 2 || req.l < 2) throw ConfigError("discrete OFDM bounds need K, L >= 2");
    const double df = req.subcarrier_spacing_hz > 0.0 ? req.subcarrier_spacing_hz
                                                      : req.bandwidth_hz / static_cast<double>(req.l);
    const double ts = req.symbol_s > 0.0 ? req.symbol_s : req.frame_s / static_cast<double>(req.k);
    const auto k = static_cast<double>(req.k);
    const auto l = static_cast<double>(req.l);
    const double gamma_x = req.gamma.value() / (k * l);
    const double nr = static_cast<double>(req.n_r);
    DiscreteOfdmResult out;
    out.bounds.c_tau = Bound::finite(3.0 / (2.0 * kPi * kPi * nr * gamma_x * k * l * (l * l - 1.0) * df * df));
    out.bounds.c_fd = Bound::finite(3.0 / (2.0 * kPi * kPi * nr * gamma_x * k * l * (k * k - 1.0) * ts * ts));
    out.bounds.c_theta = crlb_aoa(req.n_r, req.gamma, req.theta_rad);
    out.ratio_tau = (l * l - 1.0) / (l * l);
    out.ratio_fd = (k * k - 1.0) / (k * k);
    return out;
}

CrlbResult crlb_otfs(const ClosedFormRequest& req) { return crlb_ofdm_continuous(req); }

CrlbResult crlb_closed(const ClosedFormRequest& req) {
    switch (req.family) {
    case Family::Fmcw: return crlb_fmcw(req);
    case Family::Pmcw: return crlb_pmcw(req);
    case Family::Ofdm: return crlb_ofdm_continuous(req);
    case Family::Otfs: return crlb_otfs(req);
    }
    throw ConfigError("unknown waveform family");
}

double rc_rect_crossing_alpha(double tol) {
    const double rect = pulse_delay_factor(PulseShape::rect());
    auto f = [&](double a) { return pulse_delay_factor(PulseShape::rc(a)) - rect; };
    double lo = 0.01;
    double hi = 1.0;
    if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw NumericalError("RC and rect factors do not cross on (0, 1]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace isac
