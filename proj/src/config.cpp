// SPDX-License-Identifier: Apache-2.0
#include "isac/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "isac/errors.hpp"
#include "isac/rng.hpp"
#include "isac/units.hpp"

namespace isac {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys{
    "scenario.name",       "scenario.seed",
    "waveform.family",     "waveform.bandwidth_hz", "waveform.frame_s",    "waveform.k",
    "waveform.l",          "waveform.pulse",        "waveform.alpha",      "waveform.l_cp",
    "waveform.code",       "waveform.lfsr_degree",  "waveform.lfsr_taps",  "waveform.sample_count",
    "scene.gamma",         "scene.gamma_db",        "scene.snr",           "scene.snr_db",
    "scene.theta_r_rad",   "scene.tau_s",           "scene.fd_hz",         "scene.phase_rad",
    "scene.fc_hz",         "array.n_t",             "array.n_r",           "va.scheme",
    "va.beta",             "sweep.variable",        "sweep.start",         "sweep.stop",
    "sweep.steps",         "sweep.scale",           "output.directory",    "output.format",
    "verify.trials",       "verify.oversample",     "verify.signal_in",    "verify.signal_out",
};

const std::set<std::string> kSweepVariables{"gamma", "gamma_db", "n_r", "n_t", "theta_r_rad", "bandwidth_hz",
                                            "frame_s", "k", "l", "alpha", "beta"};

template <class T>
T get_value(const pt::ptree& tree, const std::string& key) {
    const std::string raw = tree.get<std::string>(pt::ptree::path_type(key, '.'));
    std::istringstream is(raw);
    T v{};
    is >> v;
    std::string rest;
    if (is.fail() || (is >> rest)) throw ConfigError("bad value for " + key + ": '" + raw + "'");
    return v;
}

template <class T>
void maybe(const pt::ptree& tree, const std::string& key, T& dst) {
    if (tree.get_child_optional(pt::ptree::path_type(key, '.'))) dst = get_value<T>(tree, key);
}

template <class T>
void maybe_opt(const pt::ptree& tree, const std::string& key, std::optional<T>& dst) {
    if (tree.get_child_optional(pt::ptree::path_type(key, '.'))) dst = get_value<T>(tree, key);
}

std::size_t as_count(double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

Family parse_family(const std::string& s) {
    if (s == "fmcw") return Family::Fmcw;
    if (s == "pmcw") return Family::Pmcw;
    if (s == "ofdm") return Family::Ofdm;
    if (s == "otfs") return Family::Otfs;
    throw ConfigError("unknown waveform family '" + s + "'");
}

} // namespace

PulseShape WaveformConfig::pulse_shape() const {
    if (pulse == "rect") return PulseShape::rect();
    if (pulse == "sinc") return PulseShape::sinc();
    if (pulse == "rrc") return PulseShape::rrc(alpha);
    if (pulse == "rc") return PulseShape::rc(alpha);
    throw ConfigError("unknown pulse '" + pulse + "'");
}

std::vector<double> SweepConfig::points() const {
    if (steps < 1) throw ConfigError("sweep needs at least one step");
    if (log_scale && !(start > 0.0 && stop > 0.0)) throw ConfigError("log sweep needs positive bounds");
    std::vector<double> p(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double u = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
        p[i] = log_scale ? start * std::pow(stop / start, u) : start + (stop - start) * u;
    }
    return p;
}

EsnrLinear ExperimentConfig::gamma() const {
    if (scene.gamma) return EsnrLinear(*scene.gamma);
    if (scene.snr) {
        double ns = 0.0;
        if (waveform.sample_count) {
            ns = *waveform.sample_count;
        } else if (waveform.family == Family::Fmcw) {
            throw ConfigError("FMCW needs waveform.sample_count to convert SNR to ESNR");
        } else if (waveform.family == Family::Pmcw) {
            const PulseShape p = waveform.pulse_shape();
            const double a = (p.kind() == PulseShape::Kind::Rrc || p.kind() == PulseShape::Kind::Rc) ? p.alpha() : 0.0;
            ns = waveform.bandwidth_hz * waveform.frame_s / (1.0 + a);
        } else {
            ns = waveform.bandwidth_hz * waveform.frame_s;
        }
        if (!(*scene.snr > 0.0)) throw ConfigError("SNR must be positive");
        return EsnrLinear(ns * *scene.snr);
    }
    return EsnrLinear::from_db(10.0);
}

ClosedFormRequest ExperimentConfig::closed_form_request() const {
    ClosedFormRequest r;
    r.family = waveform.family;
    r.bandwidth_hz = waveform.bandwidth_hz;
    r.frame_s = waveform.frame_s;
    r.k = waveform.k;
    r.l = waveform.family == Family::Fmcw ? 1 : waveform.l;
    if (waveform.family == Family::Pmcw) r.pulse = waveform.pulse_shape();
    if (waveform.family == Family::Ofdm || waveform.family == Family::Otfs) {
        r.subcarrier_spacing_hz = waveform.bandwidth_hz / static_cast<double>(waveform.l);
        r.symbol_s = waveform.frame_s / static_cast<double>(waveform.k);
    }
    r.n_r = n_r;
    r.gamma = gamma();
    r.theta_rad = scene.theta_rad;
    r.validate();
    return r;
}

ExperimentConfig ExperimentConfig::with_value(const std::string& variable, double v) const {
    ExperimentConfig c = *this;
    if (variable == "gamma") {
        c.scene.gamma = v;
        c.scene.snr.reset();
    } else if (variable == "gamma_db") {
        c.scene.gamma = db_to_linear(v);
        c.scene.snr.reset();
    } else if (variable == "n_r") {
        c.n_r = as_count(std::round(v), "n_r");
    } else if (variable == "n_t") {
        c.n_t = as_count(std::round(v), "n_t");
    } else if (variable == "theta_r_rad") {
        c.scene.theta_rad = v;
    } else if (variable == "bandwidth_hz") {
        c.waveform.bandwidth_hz = v;
    } else if (variable == "frame_s") {
        c.waveform.frame_s = v;
    } else if (variable == "k") {
        c.waveform.k = as_count(std::round(v), "k");
    } else if (variable == "l") {
        c.waveform.l = as_count(std::round(v), "l");
    } else if (variable == "alpha") {
        c.waveform.alpha = v;
    } else if (variable == "beta") {
        if (!c.va || c.va->kind != VaScheme::Kind::Cdm) throw ConfigError("beta sweep needs va.scheme = cdm");
        c.va->beta = static_cast<unsigned>(as_count(std::round(v), "beta"));
    } else {
        throw ConfigError("unknown sweep variable '" + variable + "'");
    }
    return c;
}

ExperimentConfig parse_config(std::istream& is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("INI parse error: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, v] : body) {
            (void)v;
            if (!kKnownKeys.count(section + "." + key)) throw ConfigError("unknown key " + section + "." + key);
        }
    }

    ExperimentConfig c;
    maybe(tree, "scenario.name", c.name);
    maybe(tree, "scenario.seed", c.seed);

    auto& w = c.waveform;
    if (auto f = tree.get_optional<std::string>("waveform.family")) w.family = parse_family(*f);
    maybe(tree, "waveform.bandwidth_hz", w.bandwidth_hz);
    maybe(tree, "waveform.frame_s", w.frame_s);
    maybe(tree, "waveform.k", w.k);
    maybe(tree, "waveform.l", w.l);
    maybe(tree, "waveform.pulse", w.pulse);
    maybe(tree, "waveform.alpha", w.alpha);
    maybe(tree, "waveform.l_cp", w.l_cp);
    maybe(tree, "waveform.code", w.code);
    maybe(tree, "waveform.lfsr_degree", w.lfsr_degree);
    maybe_opt(tree, "waveform.sample_count", w.sample_count);
    if (auto taps = tree.get_optional<std::string>("waveform.lfsr_taps")) {
        w.lfsr_taps.clear();
        std::stringstream ss(*taps);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                w.lfsr_taps.push_back(static_cast<unsigned>(std::stoul(item)));
            } catch (const std::exception&) {
                throw ConfigError("bad LFSR tap '" + item + "'");
            }
        }
    }
    if (w.code != "random" && w.code != "lfsr") throw ConfigError("waveform.code must be random or lfsr");
    if (w.k < 1 || w.l < 1) throw ConfigError("K and L must be at least 1");
    (void)w.pulse_shape();

    auto& s = c.scene;
    const int esnr_keys = static_cast<int>(tree.get_child_optional("scene.gamma").has_value()) +
                          static_cast<int>(tree.get_child_optional("scene.gamma_db").has_value()) +
                          static_cast<int>(tree.get_child_optional("scene.snr").has_value()) +
                          static_cast<int>(tree.get_child_optional("scene.snr_db").has_value());
    if (esnr_keys > 1) throw ConfigError("give exactly one of gamma, gamma_db, snr, snr_db");
    maybe_opt(tree, "scene.gamma", s.gamma);
    if (tree.get_child_optional("scene.gamma_db")) s.gamma = db_to_linear(get_value<double>(tree, "scene.gamma_db"));
    maybe_opt(tree, "scene.snr", s.snr);
    if (tree.get_child_optional("scene.snr_db")) s.snr = db_to_linear(get_value<double>(tree, "scene.snr_db"));
    maybe(tree, "scene.theta_r_rad", s.theta_rad);
    maybe(tree, "scene.tau_s", s.tau_s);
    maybe(tree, "scene.fd_hz", s.fd_hz);
    maybe(tree, "scene.phase_rad", s.phase_rad);
    maybe(tree, "scene.fc_hz", s.fc_hz);
    if (!(s.fc_hz > 0.0)) throw ConfigError("scene.fc_hz must be positive");

    maybe(tree, "array.n_t", c.n_t);
    maybe(tree, "array.n_r", c.n_r);
    if (c.n_t < 1 || c.n_r < 1) throw ConfigError("array sizes must be at least 1");

    if (auto scheme = tree.get_optional<std::string>("va.scheme")) {
        unsigned beta = 0;
        maybe(tree, "va.beta", beta);
        c.va = VaScheme::parse(*scheme, beta);
        (void)esnr_scale(*c.va, c.n_t);
        check_va_compatible(*c.va, w.family);
    }

    if (auto var = tree.get_optional<std::string>("sweep.variable")) {
        if (!kSweepVariables.count(*var)) throw ConfigError("unknown sweep variable '" + *var + "'");
        SweepConfig sw;
        sw.variable = *var;
        sw.start = get_value<double>(tree, "sweep.start");
        sw.stop = get_value<double>(tree, "sweep.stop");
        sw.steps = get_value<std::size_t>(tree, "sweep.steps");
        const std::string scale = tree.get<std::string>("sweep.scale", "linear");
        if (scale != "linear" && scale != "log") throw ConfigError("sweep.scale must be linear or log");
        sw.log_scale = scale == "log";
        (void)sw.points();
        c.sweep = sw;
    }

    maybe(tree, "output.directory", c.out_dir);
    maybe(tree, "output.format", c.format);
    if (c.format != "csv" && c.format != "csv+plot") throw ConfigError("output.format must be csv or csv+plot");
    maybe(tree, "verify.trials", c.trials);
    maybe(tree, "verify.oversample", c.oversample);
    maybe(tree, "verify.signal_in", c.signal_in);
    maybe(tree, "verify.signal_out", c.signal_out);
    if (c.trials < 1) throw ConfigError("verify.trials must be at least 1");
    if (!(c.oversample >= 1.0)) throw ConfigError("verify.oversample must be >= 1");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    return parse_config(is);
}

WaveformSpec build_waveform(const WaveformConfig& cfg, std::uint64_t seed, std::uint64_t trial) {
    CounterRng rng(seed, trial);
    const double b = cfg.bandwidth_hz;
    switch (cfg.family) {
    case Family::Fmcw: {
        FmcwSpec s{b, cfg.frame_s / static_cast<double>(cfg.k), std::vector<cplx>(cfg.k, cplx(1.0))};
        return WaveformSpec{s};
    }
    case Family::Pmcw: {
        PmcwSpec s;
        s.pulse = cfg.pulse_shape();
        s.chip_period_s = s.pulse.chip_period_for_bandwidth(b);
        if (cfg.code == "lfsr") {
            s.code = lfsr_msequence(cfg.lfsr_degree, cfg.lfsr_taps);
        } else {
            s.code.resize(cfg.l);
            for (auto& c : s.code) c = rng.sign();
        }
        s.data.resize(cfg.k);
        for (auto& x : s.data) x = rng.sign();
        return WaveformSpec{s};
    }
    case Family::Ofdm: {
        OfdmSpec s{b / static_cast<double>(cfg.l), cfg.l_cp, Eigen::MatrixXcd(cfg.l, cfg.k)};
        for (Eigen::Index k = 0; k < s.symbols.cols(); ++k)
            for (Eigen::Index l = 0; l < s.symbols.rows(); ++l) s.symbols(l, k) = rng.qpsk();
        return WaveformSpec{s};
    }
    case Family::Otfs: {
        OtfsSpec s{b / static_cast<double>(cfg.l), cfg.l_cp, Eigen::MatrixXcd(cfg.l, cfg.k)};
        for (Eigen::Index k = 0; k < s.dd_symbols.cols(); ++k)
            for (Eigen::Index l = 0; l < s.dd_symbols.rows(); ++l) s.dd_symbols(l, k) = rng.qpsk();
        return WaveformSpec{s};
    }
    }
    throw ConfigError("unknown waveform family");
}

} // namespace isac
