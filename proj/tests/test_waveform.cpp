// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <vector>

#include "isac/errors.hpp"
#include "isac/rng.hpp"
#include "isac/scene.hpp"
#include "isac/waveform.hpp"

using namespace isac;
using std::numbers::pi;

namespace {

double energy_recomputed(const SampledSignal& s) {
    long double e = 0.0L;
    for (const auto& v : s.samples()) e += std::norm(v);
    return static_cast<double>(e) * s.dt();
}

double centroid_moment(const SampledSignal& s) {
    double m = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) m += s.time(n) * std::norm(s.samples()[n]);
    return m * s.dt();
}

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

// Brute-force ISFFT straight from the double sum.
Eigen::MatrixXcd isfft_oracle(const Eigen::MatrixXcd& x) {
    const auto l = x.rows(), k = x.cols();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(l, k);
    for (Eigen::Index li = 0; li < l; ++li)
        for (Eigen::Index ki = 0; ki < k; ++ki) {
            std::complex<double> acc = 0.0;
            for (Eigen::Index mu = 0; mu < l; ++mu)
                for (Eigen::Index nu = 0; nu < k; ++nu) {
                    const double ph = 2.0 * pi *
                                      (static_cast<double>(ki * nu) / static_cast<double>(k) -
                                       static_cast<double>(li * mu) / static_cast<double>(l));
                    acc += x(mu, nu) * std::polar(1.0, ph);
                }
            out(li, ki) = acc / std::sqrt(static_cast<double>(k * l));
        }
    return out;
}

} // namespace

TEST_CASE("pulse shapes") {
    SUBCASE("unit energy per chip") {
        for (auto p : {PulseShape::rect(), PulseShape::sinc(), PulseShape::rrc(0.25), PulseShape::rrc(1.0),
                       PulseShape::rc(0.5), PulseShape::rc(1.0)}) {
            // trapezoid over +-400 chips; sinc tail beyond carries ~1/(pi^2 400)
            const double h = 1e-3;
            double e = 0.0;
            for (double x = -400.0; x <= 400.0; x += h) e += p.value(x) * p.value(x) * h;
            CAPTURE(p.name());
            CHECK(e == doctest::Approx(1.0).epsilon(p.kind() == PulseShape::Kind::Sinc ? 2e-3 : 2e-4));
        }
    }
    SUBCASE("finite at the rrc and rc singular points") {
        for (double a : {0.25, 0.5, 1.0}) {
            const auto rrc = PulseShape::rrc(a);
            const double xs = 1.0 / (4.0 * a);
            CHECK(std::isfinite(rrc.value(xs)));
            CHECK(rrc.value(xs) == doctest::Approx(rrc.value(xs + 1e-7)).epsilon(1e-5));
            const auto rc = PulseShape::rc(a);
            const double xr = 1.0 / (2.0 * a);
            CHECK(std::isfinite(rc.value(xr)));
            CHECK(rc.value(xr) == doctest::Approx(rc.value(xr - 1e-7)).epsilon(1e-5));
        }
    }
    SUBCASE("bandwidth conventions") {
        CHECK(PulseShape::rect().bandwidth(1.0) == 2.0);
        CHECK(PulseShape::sinc().bandwidth(1.0) == 1.0);
        CHECK(PulseShape::rrc(0.5).bandwidth(2.0) == doctest::Approx(0.75));
        CHECK(PulseShape::rc(1.0).chip_period_for_bandwidth(4.0) == doctest::Approx(0.5));
    }
    SUBCASE("invalid roll-off") {
        CHECK_THROWS_AS(PulseShape::rc(0.0), ConfigError);
        CHECK_THROWS_AS(PulseShape::rrc(1.5), ConfigError);
        CHECK_THROWS_AS(PulseShape::rrc(-0.1), ConfigError);
    }
}

TEST_CASE("degenerate chirp is a flat burst") {
    const double pri = 1e-5;
    const auto s = synthesize(fmcw(0.0, pri, 1), 8e6);
    CHECK(s.energy() == doctest::Approx(pri).epsilon(1e-9));
    std::size_t on = 0;
    for (auto v : s.samples())
        if (std::abs(v) > 0.5) {
            CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
            ++on;
        }
    CHECK(on == 80);
}

TEST_CASE("single dc tone") {
    OfdmSpec o;
    o.subcarrier_spacing_hz = 1e5;
    o.symbols = Eigen::MatrixXcd::Ones(1, 1);
    const auto s = synthesize(WaveformSpec{o}, 4e5);
    const auto first = s.samples()[0];
    double maxdev = 0.0;
    std::complex<double> ref{};
    for (auto v : s.samples())
        if (std::abs(v) > 0.5) {
            if (ref == std::complex<double>{}) ref = v;
            maxdev = std::max(maxdev, std::abs(v - ref));
        }
    CHECK(std::abs(first) == 0.0);
    CHECK(maxdev < 1e-12);
    CHECK(s.energy() == doctest::Approx(1e-5).epsilon(1e-9));
}

TEST_CASE("m-sequence pmcw energy") {
    const std::vector<unsigned> taps{3, 2};
    const auto code = lfsr_msequence(3, taps);
    REQUIRE(code.size() == 7);
    PmcwSpec p;
    p.pulse = PulseShape::rect();
    p.chip_period_s = 1e-6;
    p.code = code;
    p.data = {1.0};
    const auto s = synthesize(WaveformSpec{p}, 8e6);
    CHECK(s.energy() == doctest::Approx(7e-6).epsilon(1e-6));
}

TEST_CASE("lfsr m-sequences") {
    for (auto [deg, taps] : std::vector<std::pair<unsigned, std::vector<unsigned>>>{
             {3, {3, 2}}, {5, {5, 3}}, {6, {6, 5}}, {7, {7, 6}}}) {
        const auto c = lfsr_msequence(deg, taps);
        const std::size_t n = (1u << deg) - 1;
        REQUIRE(c.size() == n);
        double sum = 0.0;
        for (double v : c) {
            CHECK(std::abs(v) == 1.0);
            sum += v;
        }
        CHECK(std::abs(sum) == 1.0);
        // two-valued periodic autocorrelation: n at lag 0, -1 elsewhere
        for (std::size_t lag = 1; lag < n; ++lag) {
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i) r += c[i] * c[(i + lag) % n];
            CHECK(r == -1.0);
        }
    }
    const std::vector<unsigned> bad{4, 2};
    CHECK_THROWS_AS(lfsr_msequence(4, bad), ConfigError);
}

TEST_CASE("energy cache and centroid") {
    std::vector<WaveformSpec> specs{fmcw(4e6, 16e-6, 16), random_pmcw(PulseShape::rect(), 31, 8, 1),
                                    random_pmcw(PulseShape::rrc(0.5), 31, 8, 2), random_ofdm(32, 8, 4, 3)};
    OtfsSpec ot;
    ot.subcarrier_spacing_hz = 4e6 / 16;
    ot.cp_length = 2;
    ot.dd_symbols = Eigen::MatrixXcd::Random(16, 8);
    specs.push_back({ot});
    for (const auto& spec : specs) {
        const auto g = geometry(spec);
        const auto s = synthesize(spec, default_sample_rate(spec, 4.0));
        CAPTURE(to_string(spec.family()));
        CHECK(s.energy() == doctest::Approx(energy_recomputed(s)).epsilon(1e-10));
        CHECK(std::abs(centroid_moment(s)) <= 1e-6 * s.energy() * g.frame_s);
        CHECK(s.centroid() == doctest::Approx(g.frame_s / 2.0).epsilon(0.05));
    }
}

TEST_CASE("constant envelope away from boundaries") {
    const double fs = 16e6;
    SUBCASE("fmcw") {
        const auto s = synthesize(fmcw(4e6, 8e-6, 4), fs);
        double lo = 1e9, hi = 0.0;
        for (auto v : s.samples())
            if (std::abs(v) > 0.5) {
                lo = std::min(lo, std::abs(v));
                hi = std::max(hi, std::abs(v));
            }
        CHECK(hi - lo < 1e-9);
    }
    SUBCASE("rect pmcw") {
        const auto s = synthesize(random_pmcw(PulseShape::rect(), 15, 4, 9, 8e6), fs);
        double lo = 1e9, hi = 0.0;
        for (auto v : s.samples())
            if (std::abs(v) > 0.5) {
                lo = std::min(lo, std::abs(v));
                hi = std::max(hi, std::abs(v));
            }
        CHECK(hi - lo < 1e-9);
    }
    SUBCASE("energy within 0.1 percent of P_s T_F") {
        const auto spec = fmcw(4e6, 8e-6, 4);
        CHECK(synthesize(spec, fs).energy() == doctest::Approx(geometry(spec).frame_s).epsilon(1e-3));
    }
}

TEST_CASE("frame geometry") {
    const auto o = geometry(random_ofdm(64, 10, 8, 1));
    CHECK(o.pri_s == doctest::Approx(64.0 / 4e6 * 1.125));
    CHECK(o.frame_s == doctest::Approx(10 * o.pri_s));
    CHECK(o.bandwidth_hz == doctest::Approx(4e6));
    const auto p = geometry(random_pmcw(PulseShape::rrc(0.5), 31, 5, 1));
    CHECK(p.pri_s == doctest::Approx(31 * 1.5 / 4e6));
    CHECK(p.frame_s == doctest::Approx(5 * p.pri_s));
}

TEST_CASE("synthesis errors") {
    CHECK_THROWS_AS(synthesize(fmcw(4e6, 1e-5, 4), 3e6), SamplingError);
    FmcwSpec e;
    e.bandwidth_hz = 1e6;
    e.pri_s = 1e-5;
    CHECK_THROWS_AS(synthesize(WaveformSpec{e}, 4e6), ConfigError);
    e.data = {std::complex<double>(0.5, 0.0)};
    CHECK_THROWS_AS(synthesize(WaveformSpec{e}, 4e6), ConfigError);
    PmcwSpec p;
    p.chip_period_s = 1e-6;
    p.code = {1.0, 0.5};
    p.data = {1.0};
    CHECK_THROWS_AS(synthesize(WaveformSpec{p}, 4e6), ConfigError);
}

TEST_CASE("isfft") {
    SUBCASE("zero grid") {
        CHECK(otfs_to_tf(Eigen::MatrixXcd::Zero(8, 4)).norm() == 0.0);
    }
    SUBCASE("impulse") {
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(8, 4);
        x(0, 0) = 1.0;
        const auto X = otfs_to_tf(x);
        for (Eigen::Index i = 0; i < X.size(); ++i)
            CHECK(std::abs(X.data()[i] - 1.0 / std::sqrt(32.0)) < 1e-14);
    }
    SUBCASE("matches the double sum and preserves the norm") {
        const Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(6, 5);
        const auto X = otfs_to_tf(x);
        CHECK((X - isfft_oracle(x)).norm() < 1e-12 * x.norm());
        CHECK(X.norm() == doctest::Approx(x.norm()).epsilon(1e-10));
    }
    SUBCASE("white grid covariance") {
        // E{X X^H} over 2000 i.i.d. QPSK draws, K = L = 16
        const int n = 256, draws = 2000;
        Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
        CounterRng rng(77);
        for (int d = 0; d < draws; ++d) {
            Eigen::MatrixXcd x(16, 16);
            for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.qpsk();
            const Eigen::MatrixXcd X = otfs_to_tf(x);
            const Eigen::Map<const Eigen::VectorXcd> v(X.data(), n);
            cov.noalias() += v * v.adjoint();
        }
        cov /= draws;
        double diag = 0.0, off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j)
                    diag = std::max(diag, std::abs(cov(i, i) - 1.0));
                else
                    off = std::max(off, std::abs(cov(i, j)));
            }
        // MC std of a sample covariance entry is ~1/sqrt(2000) = 0.022
        CHECK(diag < 0.15);
        CHECK(off < 0.15);
    }
}

TEST_CASE("apply_scene") {
    const auto spec = random_ofdm(16, 4, 2, 5);
    const auto sig = synthesize(spec, 16e6);
    SUBCASE("identity scene is exact") {
        SceneParams sc;
        const auto b = apply_scene(sig, sc);
        REQUIRE(b.size() == 1);
        REQUIRE(b[0].size() == sig.size());
        for (std::size_t n = 0; n < sig.size(); ++n) CHECK(b[0].samples()[n] == sig.samples()[n]);
    }
    SUBCASE("doppler is a phase ramp") {
        SceneParams sc;
        sc.doppler_hz = 4e6 / 16;
        const auto b = apply_scene(sig, sc);
        double worst = 0.0;
        for (std::size_t n = 0; n < sig.size(); ++n) {
            const double t = sig.time(n) + sig.centroid();
            const auto want = sig.samples()[n] * std::polar(1.0, 2.0 * pi * sc.doppler_hz * t);
            worst = std::max(worst, std::abs(b[0].samples()[n] - want));
        }
        CHECK(worst < 1e-12);
    }
    SUBCASE("ula phase increment") {
        SceneParams sc;
        sc.theta_rad = pi / 6.0;
        sc.array.n_r = 4;
        const auto b = apply_scene(sig, sc);
        std::size_t n = 0;
        while (std::abs(sig.samples()[n]) < 0.1) ++n;
        for (std::size_t r = 1; r < 4; ++r) {
            const double step = std::arg(b[r - 1].samples()[n] / b[r].samples()[n]);
            CHECK(std::abs(step) == doctest::Approx(pi / 2.0).epsilon(1e-12));
        }
    }
    SUBCASE("delay beyond the guard is refused") {
        SceneParams sc;
        sc.delay_s = 10.0 * sig.guard();
        CHECK_THROWS_AS(apply_scene(sig, sc), TruncationError);
    }
}

TEST_CASE("noise has the requested power") {
    const auto sig = synthesize(random_ofdm(16, 16, 0, 5), 8e6);
    SceneParams sc;
    sc.array.n_r = 2;
    auto b = apply_scene(sig, sc);
    auto clean = b;
    CounterRng rng(3);
    add_noise(b, 0.25, rng);
    double p = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < b.size(); ++r)
        for (std::size_t i = 0; i < b[r].size(); ++i, ++n) p += std::norm(b[r].samples()[i] - clean[r].samples()[i]);
    CHECK(p / static_cast<double>(n) == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("signal file round trip") {
    const auto sig = synthesize(random_pmcw(PulseShape::rrc(0.5), 15, 4, 7), 8e6);
    const auto path = (std::filesystem::temp_directory_path() / "isac_sig_roundtrip.bin").string();
    write_signal(path, sig);
    CHECK(std::filesystem::file_size(path) == 24 + 16 * sig.size());
    const auto back = read_signal(path);
    CHECK(back.fs() == sig.fs());
    CHECK(back.t0_offset() == sig.t0_offset());
    REQUIRE(back.size() == sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) CHECK(back.samples()[i] == sig.samples()[i]);
    std::filesystem::resize_file(path, 30);
    CHECK_THROWS_AS(read_signal(path), ConfigError);
    std::filesystem::remove(path);
}
