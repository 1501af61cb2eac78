// SPDX-License-Identifier: Apache-2.0
//
// Figure reproduction, closed-form sweeps and the numeric-vs-closed-form
// verification harness behind the CLI.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/fisher.hpp"
#include "isac/virtual_array.hpp"

namespace isac {

struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool plot = false;
};

// Figure defaults: gamma = 10 dB, B = 400 MHz, T_F = 10 ms, f_c = 28 GHz, N_R = 8.
struct FigureDefaults {
    double gamma = 10.0;  // linear (10 dB)
    double bandwidth_hz = 400e6;
    double frame_s = 10e-3;
    double fc_hz = 28e9;
    std::size_t n_r = 8;
};

struct Fig1Row {
    std::size_t k;
    double c_r_exact, c_r_approx, c_v_exact, c_v_approx, ratio;
};
std::vector<Fig1Row> fig1_rows(const FigureDefaults& d = {});

struct Fig2Row {
    double alpha;
    double factor_rect, factor_sinc, factor_rrc, factor_rc;
    double c_r_rect, c_r_sinc, c_r_rrc, c_r_rc;
};
std::vector<Fig2Row> fig2_rows(const FigureDefaults& d = {});

struct Fig3Row {
    std::size_t n;       // L for the range ratio, K for the velocity ratio
    double ratio_r;      // C_r / C_r'
    double ratio_v;      // C_v / C_v'
};
std::vector<Fig3Row> fig3_rows(const FigureDefaults& d = {});

std::vector<RatioRow> fig4_rows(std::size_t n_r = 8);

// Writes figN.csv (and figN.svg with ctx.plot); returns written paths.
std::vector<std::string> run_figure(const std::string& id, const RunContext& ctx);

struct SweepRow {
    double value;
    CrlbResult bounds;
    Bound c_r = Bound::unbounded();
    Bound c_v = Bound::unbounded();
    bool has_va = false;
    VaCrlbRatios ratios;
};
CrlbResult closed_point(const ExperimentConfig& cfg);
std::vector<SweepRow> sweep_rows(const ExperimentConfig& cfg);
std::string run_sweep(const ExperimentConfig& cfg, const RunContext& ctx);
std::string run_crlb(const ExperimentConfig& cfg, const RunContext& ctx, std::ostream& log);

struct Check {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double error = 0.0;      // relative unless reference == 0
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<Check> checks;
    bool pass() const;
    const Check* worst() const;  // first failing check, or the largest error/tolerance
};

// Oracle sample rate near oversample * B, rounded so chips (PMCW) and
// useful symbols (OFDM/OTFS) span an integer number of samples.
double oracle_sample_rate(const WaveformSpec& spec, double oversample);

VerifyReport run_verify(const ExperimentConfig& cfg, double oversample);
void write_verify_csv(std::ostream& os, const VerifyReport& r);

} // namespace isac
