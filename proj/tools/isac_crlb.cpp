// SPDX-License-Identifier: Apache-2.0
//
// isac-crlb figure <id> | verify <config> | sweep <config> | crlb <config>
// exit codes: 0 ok, 1 config error, 2 numerical failure, 3 tolerance failure

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "isac/config.hpp"
#include "isac/errors.hpp"
#include "isac/experiments.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kTolerance = 3 };

struct Flags {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<int> oversample;
};

isac::RunContext context(const isac::ExperimentConfig& cfg, const Flags& f) {
    isac::RunContext ctx;
    ctx.out_dir = f.out.value_or(cfg.out_dir);
    ctx.seed = f.seed.value_or(cfg.seed);
    ctx.plot = f.format.value_or(cfg.format) == "csv+plot";
    return ctx;
}

isac::ExperimentConfig load(const std::string& path, const Flags& f) {
    auto cfg = isac::load_config(path);
    if (f.seed) cfg.seed = *f.seed;
    if (f.oversample) {
        if (*f.oversample < 1) throw isac::ConfigError("--oversample must be >= 1");
        cfg.oversample = *f.oversample;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CRLB toolkit for ISAC radar waveforms"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags flags;
    std::string out, format;
    std::uint64_t seed = 0;
    int oversample = 0;
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_seed = app.add_option("--seed", seed, "64-bit seed for all random draws");
    auto* o_fmt = app.add_option("--format", format, "csv | csv+plot")->check(CLI::IsMember({"csv", "csv+plot"}));
    auto* o_os = app.add_option("--oversample", oversample, "sample rate / bandwidth for numeric runs");

    std::string figure_id, config_path;
    auto* fig = app.add_subcommand("figure", "reproduce fig1..fig4");
    fig->add_option("id", figure_id)->required()->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "all"}));
    auto* ver = app.add_subcommand("verify", "numeric FIM oracle vs closed forms");
    ver->add_option("config", config_path)->required();
    auto* swp = app.add_subcommand("sweep", "closed-form sweep over one variable");
    swp->add_option("config", config_path)->required();
    auto* one = app.add_subcommand("crlb", "closed-form bounds at one point");
    one->add_option("config", config_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    if (*o_out) flags.out = out;
    if (*o_seed) flags.seed = seed;
    if (*o_fmt) flags.format = format;
    if (*o_os) flags.oversample = oversample;

    try {
        if (*fig) {
            isac::ExperimentConfig defaults;
            const auto ctx = context(defaults, flags);
            const std::vector<std::string> ids =
                figure_id == "all" ? std::vector<std::string>{"fig1", "fig2", "fig3", "fig4"}
                                   : std::vector<std::string>{figure_id};
            for (const auto& id : ids)
                for (const auto& p : isac::run_figure(id, ctx)) std::cout << p << '\n';
            return kOk;
        }
        const auto cfg = load(config_path, flags);
        const auto ctx = context(cfg, flags);
        if (*swp) {
            std::cout << isac::run_sweep(cfg, ctx) << '\n';
            return kOk;
        }
        if (*one) {
            isac::run_crlb(cfg, ctx, std::cout);
            return kOk;
        }
        const auto rep = isac::run_verify(cfg, cfg.oversample);
        isac::write_verify_csv(std::cout, rep);
        std::filesystem::create_directories(ctx.out_dir);
        std::ofstream os(std::filesystem::path(ctx.out_dir) / ("verify_" + cfg.name + ".csv"));
        os << "# seed=" << cfg.seed << '\n';
        isac::write_verify_csv(os, rep);
        if (!rep.pass()) {
            std::cerr << "verify: FAIL, worst offender " << rep.worst()->name << '\n';
            return kTolerance;
        }
        std::cerr << "verify: pass\n";
        return kOk;
    } catch (const isac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const isac::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const isac::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}
