// SPDX-License-Identifier: Apache-2.0
#include "isac/fisher.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "isac/errors.hpp"
#include "isac/fft.hpp"
#include "isac/kernels.hpp"
#include "isac/spectral.hpp"

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

double Bound::value() const {
    if (!finite_) throw DomainError("bound is unbounded");
    return value_;
}

std::string Bound::str() const { return finite_ ? format_double(value_) : "unbounded"; }

std::complex<double> compute_c0(const SampledSignal& sig, double tau) {
    // full circular length: truncating the shifted copy would leak a real part
    const std::size_t n = fft::odd_length(sig.size());
    std::vector<cplx> buf(n);
    std::copy(sig.samples().begin(), sig.samples().end(), buf.begin());
    auto x = fft::forward(buf);
    std::vector<cplx> dx(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double f = fft::bin_frequency(m, n, sig.fs());
        if (tau != 0.0) x[m] *= std::polar(1.0, -2.0 * kPi * f * tau);
        dx[m] = x[m] * cplx(0.0, 2.0 * kPi * f);
    }
    const auto v = fft::inverse(x);
    const auto d = fft::inverse(dx);
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(v[i]) * d[i];
    return acc * sig.dt();
}

double compute_im_c1(const SampledSignal& sig, double tau) {
    // t = u + tau on the delayed copy; evaluate on the undelayed samples
    const auto d = delayed_with_derivative(sig, 0.0);
    cplx acc{};
    for (std::size_t n = 0; n < d.value.size(); ++n)
        acc += (sig.time(n) + tau) * std::conj(d.derivative[n]) * d.value[n];
    return (acc * sig.dt()).imag();
}

CouplingReport coupling_report(const SampledSignal& sig, double tau) {
    CouplingReport r;
    r.c0 = compute_c0(sig, tau);
    r.im_c1 = compute_im_c1(sig, tau);
    r.re_c0_defect = std::abs(r.c0.real());
    return r;
}

FisherMatrix fim_from_signal(const SampledSignal& sig, const SceneParams& scene,
                             std::span<const double> element_positions) {
    scene.validate();
    if (std::abs(scene.delay_s) > sig.guard() && scene.delay_s != 0.0)
        throw TruncationError("delay exceeds the guard interval of the signal");
    std::vector<double> rx;
    if (element_positions.empty()) {
        rx = rx_positions(scene.array);
        element_positions = rx;
    }

    const auto d = delayed_with_derivative(sig, scene.delay_s);
    const std::size_t n = sig.size();
    const double a = scene.amplitude;
    std::vector<cplx> w_a(n), w_phi(n), w_tau(n), w_f(n);
    const double wd = 2.0 * kPi * scene.doppler_hz;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double t = sig.time(k) + sig.centroid();
        const cplx e = scene.doppler_hz != 0.0 ? std::polar(1.0, wd * t) : cplx(1.0);
        const cplx ve = d.value[k] * e;
        w_a[k] = ve;
        w_phi[k] = cplx(0.0, a) * ve;
        w_tau[k] = -a * d.derivative[k] * e;
        w_f[k] = cplx(0.0, 2.0 * kPi * t * a) * ve;
    }
    const std::array<std::span<const cplx>, 4> vecs{w_a, w_phi, w_tau, w_f};
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(4, 4);
    kernels::gram_parallel(vecs, g);
    const Eigen::MatrixXd gr = g.real() * (2.0 / scene.sigma2 * sig.dt());

    // steering: d mu_e / d theta = -2 pi p_e cos(theta) * d mu_e / d phi
    double s1 = 0.0;
    double s2 = 0.0;
    for (double p : element_positions) {
        const double k = -2.0 * kPi * p * std::cos(scene.theta_rad);
        s1 += k;
        s2 += k * k;
    }
    const auto ne = static_cast<double>(element_positions.size());

    FisherMatrix f;
    f.entries.topLeftCorner<4, 4>() = ne * gr;
    for (int i = 0; i < 4; ++i) {
        f.entries(i, 4) = s1 * gr(i, 1);
        f.entries(4, i) = f.entries(i, 4);
    }
    f.entries(4, 4) = s2 * gr(1, 1);
    return f;
}

FisherMatrix fim_numeric(const WaveformSpec& spec, const SceneParams& scene, double fs, SynthesisOptions opts) {
    opts.max_delay_s = std::max(opts.max_delay_s, std::abs(scene.delay_s));
    if (const auto* p = std::get_if<PmcwSpec>(&spec.body); p && p->pulse.kind() == PulseShape::Kind::Rect)
        opts.filter_sidelobes = true;
    const SampledSignal sig = synthesize(spec, fs, opts);
    return fim_from_signal(sig, scene);
}

void check_fim(const FisherMatrix& f) {
    const auto& m = f.entries;
    Eigen::Matrix<double, 5, 1> scale;
    for (int i = 0; i < 5; ++i) scale(i) = m(i, i) > 0.0 ? 1.0 / std::sqrt(m(i, i)) : 0.0;
    for (int i = 0; i < 5; ++i) {
        if (!std::isfinite(m(i, i)) || m(i, i) < 0.0)
            throw NumericalError(std::string("FIM diagonal invalid at ") + kParamNames[i]);
        for (int j = i + 1; j < 5; ++j) {
            const double asym = std::abs(m(i, j) - m(j, i)) * scale(i) * scale(j);
            if (asym > 1e-12)
                throw NumericalError(std::string("FIM asymmetric at (") + kParamNames[i] + "," + kParamNames[j] + ")");
        }
    }
    const Eigen::Matrix<double, 5, 5> nm = scale.asDiagonal() * m * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(nm);
    const double tr = nm.trace();
    if (es.eigenvalues()(0) < -1e-9 * tr) {
        Eigen::Index worst = 0;
        es.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
        throw NumericalError("FIM not positive semidefinite; worst entry " + std::string(kParamNames[worst]) +
                             " (min eigenvalue " + format_double(es.eigenvalues()(0) / tr) + " of trace)");
    }
}

Eigen::Matrix3d efim(const FisherMatrix& f) {
    const auto& m = f.entries;
    const double norm = m.norm();
    for (int i = 1; i < 5; ++i)
        if (std::abs(m(0, i)) > 1e-9 * norm)
            throw NumericalError(std::string("amplitude not decoupled from ") + kParamNames[i]);
    const double fpp = m(1, 1);
    if (!(fpp > 0.0)) throw DegenerateSceneError("F_phiphi <= 0: phase carries no information");
    const Eigen::Matrix3d fss = m.block<3, 3>(2, 2);
    const Eigen::Vector3d fsp = m.block<3, 1>(2, 1);
    Eigen::Matrix3d e = fss - fsp * fsp.transpose() / fpp;
    return 0.5 * (e + e.transpose());
}

CrlbResult crlb_from_efim(const Eigen::Matrix3d& e) {
    // coordinates carry different units; work on the correlation form
    std::vector<int> keep;
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(e(i, i))) throw NumericalError("EFIM has a non-finite diagonal");
        if (e(i, i) > 0.0) keep.push_back(i);
    }
    if (keep.empty()) throw NumericalError("EFIM has no information");
    const auto k = static_cast<Eigen::Index>(keep.size());
    Eigen::VectorXd d(k);
    for (Eigen::Index i = 0; i < k; ++i) d(i) = 1.0 / std::sqrt(e(keep[i], keep[i]));
    Eigen::MatrixXd r(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) r(i, j) = d(i) * e(keep[i], keep[j]) * d(j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
    if (es.eigenvalues()(0) < -1e-9 * static_cast<double>(k)) throw NumericalError("EFIM is indefinite");
    if (!(es.eigenvalues()(0) > 1e-14)) throw NumericalError("EFIM is numerically singular");
    const Eigen::MatrixXd c = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    std::array<Bound, 3> b{Bound::unbounded(), Bound::unbounded(), Bound::unbounded()};
    for (Eigen::Index i = 0; i < k; ++i) b[static_cast<std::size_t>(keep[i])] = Bound::finite(c(i, i) * d(i) * d(i));
    CrlbResult out;
    out.c_tau = b[0];
    out.c_fd = b[1];
    out.c_theta = b[2];
    return out;
}

CrlbResult numeric_crlb(const SampledSignal& sig, const SceneParams& scene) {
    const FisherMatrix f = fim_from_signal(sig, scene);
    check_fim(f);
    CrlbResult r = crlb_from_efim(efim(f));
    r.coupling = coupling_report(sig, scene.delay_s);
    return r;
}

void write_fim_csv(std::ostream& os, const FisherMatrix& f, const CrlbResult& crlb) {
    os << "param_i,param_j,value\n" << std::setprecision(17);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) os << kParamNames[i] << ',' << kParamNames[j] << ',' << f.entries(i, j) << '\n';
    os << "# crlb\nparam,bound,unit\n";
    os << "tau," << crlb.c_tau.str() << ",s^2\n";
    os << "f_D," << crlb.c_fd.str() << ",Hz^2\n";
    os << "theta_R," << crlb.c_theta.str() << ",rad^2\n";
}

} // namespace isac
