// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "isac/errors.hpp"
#include "isac/units.hpp"
#include "isac/waveform.hpp"

using namespace isac;

namespace {

WaveformSpec ofdm_spec(double b, double tf, std::size_t l) {
    // T_F = K T with no CP; choose K so that K * L / B = tf
    const auto k = static_cast<std::size_t>(std::llround(tf * b / static_cast<double>(l)));
    OfdmSpec o;
    o.subcarrier_spacing_hz = b / static_cast<double>(l);
    o.symbols = Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
    return {o};
}

WaveformSpec pmcw_spec(PulseShape p, double b, std::size_t l, std::size_t k) {
    PmcwSpec s;
    s.pulse = p;
    s.chip_period_s = p.chip_period_for_bandwidth(b);
    s.code.assign(l, 1.0);
    s.data.assign(k, 1.0);
    return {s};
}

} // namespace

TEST_CASE("db round trip") {
    for (double db : {-40.0, -3.0, 0.0, 0.5, 10.0, 37.25, 120.0}) {
        const double back = linear_to_db(db_to_linear(db));
        CHECK(back == doctest::Approx(db).epsilon(1e-12));
    }
    for (double lin : {1e-9, 0.3, 1.0, 7.0, 1e12}) CHECK(db_to_linear(linear_to_db(lin)) == doctest::Approx(lin).epsilon(1e-12));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK_THROWS_AS(linear_to_db(0.0), DomainError);
}

TEST_CASE("esnr type") {
    CHECK(EsnrLinear::from_db(10.0).value() == doctest::Approx(10.0));
    CHECK(EsnrLinear(100.0).db() == doctest::Approx(20.0));
    CHECK_THROWS_AS(EsnrLinear(0.0), ConfigError);
    CHECK_THROWS_AS(EsnrLinear(-1.0), ConfigError);
    CHECK_THROWS_AS(EsnrLinear(std::numeric_limits<double>::infinity()), ConfigError);
    CHECK_THROWS_AS(EsnrLinear(std::nan("")), ConfigError);
}

TEST_CASE("esnr from snr") {
    SUBCASE("ofdm at the figure defaults") {
        const auto w = ofdm_spec(400e6, 10e-3, 1000);
        CHECK(esnr_from_snr(1.0, w).value() == doctest::Approx(4e6).epsilon(1e-12));
    }
    SUBCASE("pmcw alpha 0 matches ofdm") {
        // B T_F = 400e6 * 10e-3 with L*K chips at Tc = 1/B
        const auto w = pmcw_spec(PulseShape::sinc(), 400e6, 1000, 4000);
        CHECK(esnr_from_snr(1.0, w).value() == doctest::Approx(4e6).epsilon(1e-12));
    }
    SUBCASE("pmcw alpha 1") {
        // Tc = 2/B, T_F = K L Tc = 10 ms  ->  K L = 2e6
        const auto w = pmcw_spec(PulseShape::rrc(1.0), 400e6, 1000, 2000);
        CHECK(esnr_from_snr(0.5, w).value() == doctest::Approx(1e6).epsilon(1e-12));
    }
    SUBCASE("fmcw needs an explicit count") {
        FmcwSpec f;
        f.bandwidth_hz = 1e6;
        f.pri_s = 1e-4;
        f.data.assign(4, 1.0);
        const WaveformSpec w{f};
        CHECK_THROWS_AS(esnr_from_snr(1.0, w), ConfigError);
        CHECK(esnr_from_snr(2.0, w, 1234.0).value() == doctest::Approx(2468.0));
    }
    SUBCASE("nonpositive snr") {
        CHECK_THROWS_AS(esnr_from_snr(0.0, ofdm_spec(4e6, 1e-3, 64)), ConfigError);
    }
}

TEST_CASE("delay to range") {
    CHECK(crlb_delay_to_range(0.0) == 0.0);
    const double c = 2.99792458e8;
    CHECK(crlb_delay_to_range(1e-18) == doctest::Approx(c * c / 4.0 * 1e-18).epsilon(1e-15));
    CHECK(crlb_delay_to_range(1e-18) == doctest::Approx(2.2469e-2).epsilon(1e-4));
    CHECK(crlb_delay_to_range(4.0 / (c * c)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(crlb_delay_to_range(-1.0), DomainError);
}

TEST_CASE("doppler to velocity") {
    CarrierConfig cfg;
    cfg.fc_hz = 28e9;
    CHECK(crlb_doppler_to_velocity(0.0, cfg) == 0.0);
    CHECK(crlb_doppler_to_velocity(1.0, cfg) == doctest::Approx(2.8661e-5).epsilon(1e-4));
    cfg.fc_hz = kSpeedOfLight / 2.0;
    CHECK(crlb_doppler_to_velocity(1.0, cfg) == doctest::Approx(1.0).epsilon(1e-15));
    cfg.fc_hz = 0.0;
    CHECK_THROWS_AS(crlb_doppler_to_velocity(1.0, cfg), DomainError);
}

TEST_CASE("conversions are linear") {
    CarrierConfig cfg;
    for (double x : {1e-20, 3.7e-15, 0.25}) {
        for (double a : {2.0, 0.125, 1024.0}) {
            CHECK(crlb_delay_to_range(a * x) == doctest::Approx(a * crlb_delay_to_range(x)).epsilon(1e-15));
            CHECK(crlb_doppler_to_velocity(a * x, cfg) ==
                  doctest::Approx(a * crlb_doppler_to_velocity(x, cfg)).epsilon(1e-15));
        }
    }
}
