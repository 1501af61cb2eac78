// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isac/errors.hpp"
#include "isac/fisher.hpp"
#include "isac/rng.hpp"
#include "isac/scene.hpp"
#include "isac/waveform.hpp"

using namespace isac;
using std::numbers::pi;

namespace {

WaveformSpec random_pmcw(PulseShape p, std::size_t l, std::size_t k, std::uint64_t seed, double b = 4e6) {
    CounterRng rng(seed);
    PmcwSpec s;
    s.pulse = p;
    s.chip_period_s = p.chip_period_for_bandwidth(b);
    for (std::size_t i = 0; i < l; ++i) s.code.push_back(rng.sign());
    for (std::size_t i = 0; i < k; ++i) s.data.push_back(rng.sign());
    return {s};
}

WaveformSpec random_ofdm(std::size_t l, std::size_t k, std::size_t cp, std::uint64_t seed, double b = 4e6) {
    CounterRng rng(seed);
    OfdmSpec o;
    o.subcarrier_spacing_hz = b / static_cast<double>(l);
    o.cp_length = cp;
    o.symbols.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < o.symbols.size(); ++i) o.symbols.data()[i] = rng.qpsk();
    return {o};
}

WaveformSpec fmcw(double b, double pri, std::size_t k) {
    FmcwSpec f;
    f.bandwidth_hz = b;
    f.pri_s = pri;
    f.data.assign(k, 1.0);
    return {f};
}

SceneParams scene_for(const SampledSignal& s, std::size_t n_r, double gamma, double theta = 0.0) {
    SceneParams sc;
    sc.array.n_r = n_r;
    sc.theta_rad = theta;
    return with_esnr(sc, s.energy(), gamma);
}

// Test-side second temporal moment about the centroid.
double trms2(const SampledSignal& s) {
    double e = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
        const double p = std::norm(s.samples()[n]);
        e += p;
        m2 += s.time(n) * s.time(n) * p;
    }
    return m2 / e;
}

double max_abs_eig_negative(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().minCoeff();
}

} // namespace

TEST_CASE("bound variant") {
    CHECK(Bound::unbounded().str() == "unbounded");
    CHECK_FALSE(Bound::unbounded().is_finite());
    CHECK_THROWS_AS(Bound::unbounded().value(), DomainError);
    CHECK(Bound::finite(0.25).value() == 0.25);
    CHECK(Bound::finite(0.25).str() == "0.25");
}

TEST_CASE("c0") {
    SUBCASE("real pulse train") {
        const auto s = synthesize(random_pmcw(PulseShape::rrc(0.5), 31, 4, 2), 16e6);
        const auto c0 = compute_c0(s, 0.0);
        const double tc = 1.5 / 4e6;
        CHECK(std::abs(c0.real()) <= 1e-9 * s.energy() / tc);
        CHECK(std::abs(c0.imag()) <= 1e-9 * s.energy() / tc);
    }
    SUBCASE("gaussian-windowed tone") {
        const double fs = 1e6, f1 = 37e3, sigma = 60e-6;
        std::vector<cplx> v(1501);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double t = (static_cast<double>(i) - 750.0) / fs;
            v[i] = std::exp(-t * t / (2 * sigma * sigma)) * std::polar(1.0, 2 * pi * f1 * t);
        }
        const auto s = SampledSignal::centered(std::move(v), fs);
        const auto c0 = compute_c0(s, 0.0);
        CHECK(std::abs(c0.real()) < 1e-9 * 2 * pi * f1 * s.energy());
        CHECK(c0.imag() == doctest::Approx(2 * pi * f1 * s.energy()).epsilon(1e-9));
    }
    SUBCASE("gated tone") {
        const double fs = 8e6, f1 = 250e3;
        std::vector<cplx> v(4000, 0.0);
        for (std::size_t i = 1000; i < 3000; ++i) v[i] = std::polar(1.0, 2 * pi * f1 * static_cast<double>(i) / fs);
        const auto s = SampledSignal::centered(std::move(v), fs);
        CHECK(compute_c0(s, 0.0).imag() == doctest::Approx(2 * pi * f1 * s.energy()).epsilon(1e-3));
    }
    SUBCASE("fmcw frame") {
        const auto s = synthesize(fmcw(4e6, 16e-6, 64), 16e6);
        CHECK(std::abs(compute_c0(s, 0.0)) <= 1e-3 * 2 * pi * 4e6 * s.energy());
    }
    SUBCASE("shift invariant") {
        const auto s = synthesize(random_ofdm(16, 4, 2, 3), 16e6);
        CHECK(std::abs(compute_c0(s, 1e-6) - compute_c0(s, 0.0)) < 1e-9 * std::abs(compute_c0(s, 0.0)) + 1e-12);
    }
}

TEST_CASE("im c1") {
    SUBCASE("real pmcw") {
        for (auto p : {PulseShape::rect(), PulseShape::sinc(), PulseShape::rc(0.7)}) {
            const auto s = synthesize(random_pmcw(p, 31, 4, 5), 16e6);
            CHECK(std::abs(compute_im_c1(s, 0.0)) <= 1e-9 * s.energy());
        }
    }
    SUBCASE("single chirp") {
        const double b = 4e6, t = 16e-6, mu = b / t;
        const auto s = synthesize(fmcw(b, t, 1), 16e6);
        CHECK(compute_im_c1(s, 0.0) == doctest::Approx(-pi * mu * t * t * s.energy() / 6.0).epsilon(0.01));
    }
    SUBCASE("ofdm vanishes on average") {
        double acc = 0.0;
        const int draws = 50;
        double norm = 0.0;
        for (int d = 0; d < draws; ++d) {
            const auto spec = random_ofdm(64, 64, 0, 300 + d);
            const auto s = synthesize(spec, 16e6);
            norm = pi * 4e6 * geometry(spec).frame_s * s.energy() / 6.0;
            acc += compute_im_c1(s, 0.0) / norm;
        }
        CHECK(std::abs(acc / draws) <= 0.02);
    }
}

TEST_CASE("fim entries") {
    const auto s = synthesize(random_pmcw(PulseShape::rrc(0.5), 31, 8, 7), 16e6);
    const double gamma = 10.0;
    auto sc = scene_for(s, 8, gamma);
    const auto f = fim_from_signal(s, sc);
    const double norm = f.entries.norm();

    CHECK(f(Param::Amplitude, Param::Amplitude) == doctest::Approx(2.0 * 8 * s.energy() / sc.sigma2).epsilon(1e-12));
    for (auto p : {Param::Phase, Param::Delay, Param::Doppler, Param::Angle}) {
        CHECK(std::abs(f(Param::Amplitude, p)) <= 1e-9 * norm);
        CHECK(std::abs(f(p, Param::Amplitude)) <= 1e-9 * norm);
    }
    CHECK(f(Param::Angle, Param::Angle) == doctest::Approx(pi * pi * gamma * 7 * 8 * 15 / 3.0).epsilon(0.005));
    CHECK(f(Param::Angle, Param::Angle) == doctest::Approx(27635.0).epsilon(0.005));
    // phi-f_D coupling carries the frame centroid T0
    CHECK(f(Param::Phase, Param::Doppler) == doctest::Approx(4 * pi * 8 * gamma * s.centroid()).epsilon(0.01));
    CHECK((f.entries - f.entries.transpose()).norm() <= 1e-12 * norm);
    CHECK(max_abs_eig_negative(f.entries) >= -1e-9 * f.entries.trace());
    CHECK_NOTHROW(check_fim(f));
}

TEST_CASE("doppler coupling follows the delay") {
    const auto s = synthesize(random_pmcw(PulseShape::rrc(0.5), 31, 8, 7), 16e6, SynthesisOptions{.max_delay_s = 2e-6});
    auto sc = scene_for(s, 4, 10.0);
    sc.delay_s = 1.5e-6;
    const auto f = fim_from_signal(s, sc);
    CHECK(f(Param::Phase, Param::Doppler) == doctest::Approx(4 * pi * 4 * 10.0 * (s.centroid() + sc.delay_s)).epsilon(0.01));
    // delay info is shift invariant
    auto sc0 = sc;
    sc0.delay_s = 0.0;
    CHECK(f(Param::Delay, Param::Delay) == doctest::Approx(fim_from_signal(s, sc0)(Param::Delay, Param::Delay)).epsilon(1e-9));
}

TEST_CASE("efim") {
    SUBCASE("no nuisance coupling") {
        FisherMatrix f;
        f.entries.diagonal() << 3.0, 2.0, 5.0, 7.0, 11.0;
        f.entries(2, 3) = f.entries(3, 2) = 1.0;
        const auto e = efim(f);
        CHECK((e - f.entries.bottomRightCorner<3, 3>()).norm() == 0.0);
    }
    SUBCASE("degenerate phase") {
        FisherMatrix f;
        f.entries.diagonal() << 1.0, 0.0, 1.0, 1.0, 1.0;
        CHECK_THROWS_AS(efim(f), DegenerateSceneError);
    }
    SUBCASE("amplitude coupling is rejected") {
        FisherMatrix f;
        f.entries.diagonal() << 1.0, 1.0, 1.0, 1.0, 1.0;
        f.entries(0, 2) = f.entries(2, 0) = 0.3;
        CHECK_THROWS_AS(efim(f), NumericalError);
    }
    SUBCASE("closed-form blocks on a real waveform") {
        const auto s = synthesize(random_pmcw(PulseShape::rrc(0.25), 63, 16, 9), 16e6);
        const double gamma = 10.0;
        const auto f = fim_from_signal(s, scene_for(s, 8, gamma));
        const auto e = efim(f);
        CHECK(e(1, 1) == doctest::Approx(8 * pi * pi * 8 * gamma * trms2(s)).epsilon(0.01));
        CHECK(e(2, 2) == doctest::Approx(pi * pi * 8 * 63 * gamma / 6.0).epsilon(1e-9));
        CHECK(e(2, 2) == doctest::Approx(8290.6).epsilon(1e-4));
        // Loewner order and Schur monotonicity
        const Eigen::Matrix3d fss = f.entries.bottomRightCorner<3, 3>();
        CHECK(max_abs_eig_negative(fss - e) >= -1e-9 * fss.trace());
        for (int i = 0; i < 3; ++i) CHECK(e(i, i) <= fss(i, i) * (1 + 1e-12));
    }
}

TEST_CASE("crlb from efim") {
    SUBCASE("diagonal") {
        Eigen::Matrix3d e = Eigen::Vector3d(2.0, 4.0, 8.0).asDiagonal();
        const auto r = crlb_from_efim(e);
        CHECK(r.c_tau.value() == doctest::Approx(0.5));
        CHECK(r.c_fd.value() == doctest::Approx(0.25));
        CHECK(r.c_theta.value() == doctest::Approx(0.125));
    }
    SUBCASE("tau-f coupling against a 2x2 inverse") {
        const double a = 3e15, b = 2e-3, rho = 0.6;
        Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
        e(0, 0) = a;
        e(1, 1) = b;
        e(0, 1) = e(1, 0) = rho * std::sqrt(a * b);
        e(2, 2) = 1.0;
        const auto r = crlb_from_efim(e);
        const double det = a * b - e(0, 1) * e(0, 1);
        CHECK(r.c_tau.value() == doctest::Approx(b / det).epsilon(1e-10));
        CHECK(r.c_tau.value() == doctest::Approx(1.0 / (a * (1 - rho * rho))).epsilon(1e-10));
        CHECK(r.c_fd.value() == doctest::Approx(a / det).epsilon(1e-10));
    }
    SUBCASE("structural singularity is unbounded") {
        Eigen::Matrix3d e = Eigen::Vector3d(2.0, 4.0, 0.0).asDiagonal();
        const auto r = crlb_from_efim(e);
        CHECK(r.c_tau.value() == doctest::Approx(0.5));
        CHECK_FALSE(r.c_theta.is_finite());
    }
    SUBCASE("indefinite") {
        Eigen::Matrix3d e;
        e << 1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0;
        CHECK_THROWS_AS(crlb_from_efim(e), NumericalError);
    }
    SUBCASE("single receive element has no angle information") {
        const auto s = synthesize(random_pmcw(PulseShape::sinc(), 31, 4, 1), 16e6);
        const auto r = numeric_crlb(s, scene_for(s, 1, 10.0));
        CHECK(r.c_tau.is_finite());
        CHECK_FALSE(r.c_theta.is_finite());
    }
}

TEST_CASE("check_fim names the worst entry") {
    FisherMatrix f;
    f.entries.setIdentity();
    f.entries(2, 3) = 0.5;
    f.entries(3, 2) = 0.1;
    try {
        check_fim(f);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("tau") != std::string::npos);
    }
    f.entries.setIdentity();
    f.entries(1, 2) = f.entries(2, 1) = 2.0;
    CHECK_THROWS_AS(check_fim(f), NumericalError);
}

TEST_CASE("numeric aoa bound and scaling laws") {
    const auto s = synthesize(random_ofdm(32, 16, 4, 12), 16e6);
    SUBCASE("c_theta at N_R = 8, gamma = 10") {
        const auto r = numeric_crlb(s, scene_for(s, 8, 10.0));
        CHECK(r.c_theta.value() == doctest::Approx(6.0 / (pi * pi * 8 * 63 * 10)).epsilon(1e-6));
        CHECK(r.c_theta.value() == doctest::Approx(1.2062e-4).epsilon(1e-4));
    }
    SUBCASE("noise power") {
        auto sc = scene_for(s, 4, 10.0, 0.3);
        const auto f1 = fim_from_signal(s, sc);
        const auto r1 = numeric_crlb(s, sc);
        sc.sigma2 *= 2.0;
        const auto f2 = fim_from_signal(s, sc);
        const auto r2 = numeric_crlb(s, sc);
        CHECK((f1.entries - 2.0 * f2.entries).norm() <= 1e-14 * f1.entries.norm());
        CHECK(r2.c_tau.value() == doctest::Approx(2.0 * r1.c_tau.value()).epsilon(1e-12));
        CHECK(r2.c_fd.value() == doctest::Approx(2.0 * r1.c_fd.value()).epsilon(1e-12));
        CHECK(r2.c_theta.value() == doctest::Approx(2.0 * r1.c_theta.value()).epsilon(1e-12));
    }
    SUBCASE("receive aperture law") {
        std::vector<double> v;
        for (std::size_t n : {2u, 4u, 8u, 16u}) {
            const auto r = numeric_crlb(s, scene_for(s, n, 10.0, 0.2));
            v.push_back(r.c_theta.value() * n * (n * n - 1.0));
        }
        for (double x : v) CHECK(x == doctest::Approx(v.front()).epsilon(0.01));
    }
}

TEST_CASE("fim_numeric synthesizes and evaluates") {
    const auto spec = random_pmcw(PulseShape::rect(), 31, 4, 3);
    SceneParams sc;
    sc.array.n_r = 2;
    const auto f = fim_numeric(spec, sc, 16e6);
    SynthesisOptions o;
    o.filter_sidelobes = true;
    const auto s = synthesize(spec, 16e6, o);
    CHECK((f.entries - fim_from_signal(s, sc).entries).norm() <= 1e-12 * f.entries.norm());
}

TEST_CASE("fim csv") {
    const auto s = synthesize(random_ofdm(16, 4, 0, 1), 16e6);
    const auto sc = scene_for(s, 4, 10.0);
    std::ostringstream os;
    write_fim_csv(os, fim_from_signal(s, sc), numeric_crlb(s, sc));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "param_i,param_j,value");
    int rows = 0;
    while (std::getline(is, line) && line != "# crlb") ++rows;
    CHECK(rows == 25);
    std::getline(is, line);
    CHECK(line == "param,bound,unit");
    std::getline(is, line);
    CHECK(line.rfind("tau,", 0) == 0);
    CHECK(line.find(",s^2") != std::string::npos);
}

TEST_CASE("C0 stays imaginary when the delay runs past the frame edge") {
    const auto spec = random_ofdm(32, 4, 0, 8);
    const auto sig = synthesize(spec, 16e6);
    for (double tau : {3.3e-8, 1e-6, -2.5e-6}) {
        CAPTURE(tau);
        const cplx c = compute_c0(sig, tau);
        CHECK(std::abs(c.real()) <= 1e-9 * sig.energy() * 4e6);
        CHECK(std::abs(c - compute_c0(sig, 0.0)) <= 1e-9 * sig.energy() * 4e6);
    }
}
