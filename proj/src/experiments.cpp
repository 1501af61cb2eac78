// SPDX-License-Identifier: Apache-2.0
#include "isac/experiments.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "isac/crlb_closed.hpp"
#include "isac/errors.hpp"
#include "isac/plot.hpp"
#include "isac/spectral.hpp"
#include "isac/units.hpp"

namespace isac {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(15) << v;
    return os.str();
}

std::ofstream open_out(const RunContext& ctx, const std::string& file, std::string& path) {
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    path = (fs::path(ctx.out_dir) / file).string();
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    os << "# seed=" << ctx.seed << '\n';
    return os;
}

ClosedFormRequest figure_request(const FigureDefaults& d, Family f) {
    ClosedFormRequest r;
    r.family = f;
    r.bandwidth_hz = d.bandwidth_hz;
    r.frame_s = d.frame_s;
    r.n_r = d.n_r;
    r.gamma = EsnrLinear(d.gamma);
    return r;
}

Bound map_bound(const Bound& b, double scale) {
    return b.is_finite() ? Bound::finite(b.value() * scale) : Bound::unbounded();
}

} // namespace

std::vector<Fig1Row> fig1_rows(const FigureDefaults& d) {
    const CarrierConfig cc{d.fc_hz};
    std::vector<Fig1Row> rows;
    for (std::size_t k = 2; k <= 200; ++k) {
        ClosedFormRequest r = figure_request(d, Family::Fmcw);
        r.k = k;
        const CrlbResult exact = crlb_fmcw(r);
        r.approx_large_k = true;
        const CrlbResult approx = crlb_fmcw(r);
        rows.push_back({k, crlb_delay_to_range(exact.c_tau.value()), crlb_delay_to_range(approx.c_tau.value()),
                        crlb_doppler_to_velocity(exact.c_fd.value(), cc),
                        crlb_doppler_to_velocity(approx.c_fd.value(), cc), fmcw_exact_over_approx(k).value()});
    }
    return rows;
}

std::vector<Fig2Row> fig2_rows(const FigureDefaults& d) {
    std::vector<Fig2Row> rows;
    ClosedFormRequest r = figure_request(d, Family::Pmcw);
    auto c_r = [&](const PulseShape& p) {
        r.pulse = p;
        return crlb_delay_to_range(crlb_pmcw(r).c_tau.value());
    };
    const double f_rect = pulse_delay_factor(PulseShape::rect());
    const double f_sinc = pulse_delay_factor(PulseShape::sinc());
    const double cr_rect = c_r(PulseShape::rect());
    const double cr_sinc = c_r(PulseShape::sinc());
    for (int i = 1; i <= 100; ++i) {
        const double a = 0.01 * i;
        rows.push_back({a, f_rect, f_sinc, pulse_delay_factor(PulseShape::rrc(a)), pulse_delay_factor(PulseShape::rc(a)),
                        cr_rect, cr_sinc, c_r(PulseShape::rrc(a)), c_r(PulseShape::rc(a))});
    }
    return rows;
}

std::vector<Fig3Row> fig3_rows(const FigureDefaults& d) {
    std::vector<Fig3Row> rows;
    for (std::size_t n = 2; n <= 300; ++n) {
        ClosedFormRequest r = figure_request(d, Family::Ofdm);
        r.k = n;
        r.l = n;
        const auto disc = crlb_ofdm_discrete(r);
        rows.push_back({n, disc.ratio_tau, disc.ratio_fd});
    }
    return rows;
}

std::vector<RatioRow> fig4_rows(std::size_t n_r) {
    std::vector<RatioRow> rows;
    std::vector<VaScheme> schemes{VaScheme::itdm(), VaScheme::btdm(), VaScheme::bfdm(), VaScheme::cfdm(),
                                  VaScheme::cdm(2), VaScheme::cdm(4), VaScheme::cdm(8)};
    for (const auto& s : schemes)
        for (std::size_t nt : {2, 4, 8, 16}) rows.push_back({s, nt, va_crlb_ratios(s, nt, n_r)});
    return rows;
}

std::vector<std::string> run_figure(const std::string& id, const RunContext& ctx) {
    std::vector<std::string> written;
    std::string path;
    if (id == "fig1") {
        const auto rows = fig1_rows();
        {
            auto os = open_out(ctx, "fig1.csv", path);
            os << "k,c_r_exact_m2,c_r_approx_m2,c_v_exact_m2ps2,c_v_approx_m2ps2,ratio_exact_over_approx\n";
            for (const auto& r : rows)
                os << r.k << ',' << fmt(r.c_r_exact) << ',' << fmt(r.c_r_approx) << ',' << fmt(r.c_v_exact) << ','
                   << fmt(r.c_v_approx) << ',' << fmt(r.ratio) << '\n';
        }
        written.push_back(path);
        if (ctx.plot) {
            PlotSpec p{"FMCW range CRLB, exact vs K>>1", "K", "C_r (m^2)", false, true, {}};
            Series a{"exact", {}, {}}, b{"approx", {}, {}};
            for (const auto& r : rows) {
                a.x.push_back(static_cast<double>(r.k));
                a.y.push_back(r.c_r_exact);
                b.x.push_back(static_cast<double>(r.k));
                b.y.push_back(r.c_r_approx);
            }
            p.series = {a, b};
            const auto svg = (fs::path(ctx.out_dir) / "fig1.svg").string();
            write_svg(svg, p);
            written.push_back(svg);
        }
    } else if (id == "fig2") {
        const auto rows = fig2_rows();
        {
            auto os = open_out(ctx, "fig2.csv", path);
            os << "alpha,c_r_rect_m2,c_r_sinc_m2,c_r_rrc_m2,c_r_rc_m2,factor_rect,factor_sinc,factor_rrc,factor_rc\n";
            for (const auto& r : rows)
                os << fmt(r.alpha) << ',' << fmt(r.c_r_rect) << ',' << fmt(r.c_r_sinc) << ',' << fmt(r.c_r_rrc) << ','
                   << fmt(r.c_r_rc) << ',' << fmt(r.factor_rect) << ',' << fmt(r.factor_sinc) << ','
                   << fmt(r.factor_rrc) << ',' << fmt(r.factor_rc) << '\n';
        }
        written.push_back(path);
        if (ctx.plot) {
            PlotSpec p{"PMCW range CRLB by pulse shape", "roll-off alpha", "C_r (m^2)", false, true, {}};
            Series s[4] = {{"rect", {}, {}}, {"sinc", {}, {}}, {"RRC", {}, {}}, {"RC", {}, {}}};
            for (const auto& r : rows) {
                const double v[4] = {r.c_r_rect, r.c_r_sinc, r.c_r_rrc, r.c_r_rc};
                for (int i = 0; i < 4; ++i) {
                    s[i].x.push_back(r.alpha);
                    s[i].y.push_back(v[i]);
                }
            }
            p.series.assign(std::begin(s), std::end(s));
            const auto svg = (fs::path(ctx.out_dir) / "fig2.svg").string();
            write_svg(svg, p);
            written.push_back(svg);
        }
    } else if (id == "fig3") {
        const auto rows = fig3_rows();
        {
            auto os = open_out(ctx, "fig3.csv", path);
            os << "n,ratio_r_c_over_c_prime,ratio_v_c_over_c_prime\n";
            for (const auto& r : rows) os << r.n << ',' << fmt(r.ratio_r) << ',' << fmt(r.ratio_v) << '\n';
        }
        written.push_back(path);
        if (ctx.plot) {
            PlotSpec p{"OFDM continuous / discrete CRLB", "L (range), K (velocity)", "C / C'", true, false, {}};
            Series a{"C_r/C_r'", {}, {}}, b{"C_v/C_v'", {}, {}};
            for (const auto& r : rows) {
                a.x.push_back(static_cast<double>(r.n));
                a.y.push_back(r.ratio_r);
                b.x.push_back(static_cast<double>(r.n));
                b.y.push_back(r.ratio_v);
            }
            p.series = {a, b};
            const auto svg = (fs::path(ctx.out_dir) / "fig3.svg").string();
            write_svg(svg, p);
            written.push_back(svg);
        }
    } else if (id == "fig4") {
        const auto rows = fig4_rows();
        {
            auto os = open_out(ctx, "fig4.csv", path);
            write_ratio_csv(os, rows);
        }
        written.push_back(path);
        if (ctx.plot) {
            PlotSpec p{"VA / non-VA CRLB ratios (delay)", "N_T", "C_tau ratio", true, true, {}};
            for (const auto& r : rows) {
                const std::string name =
                    r.scheme.kind == VaScheme::Kind::Cdm ? "cdm b=" + std::to_string(r.scheme.beta) : r.scheme.name();
                if (p.series.empty() || p.series.back().name != name) p.series.push_back({name, {}, {}});
                p.series.back().x.push_back(static_cast<double>(r.n_t));
                p.series.back().y.push_back(r.ratios.r_tau);
            }
            const auto svg = (fs::path(ctx.out_dir) / "fig4.svg").string();
            write_svg(svg, p);
            written.push_back(svg);
        }
    } else {
        throw ConfigError("unknown figure '" + id + "' (expected fig1..fig4)");
    }
    return written;
}

CrlbResult closed_point(const ExperimentConfig& cfg) { return crlb_closed(cfg.closed_form_request()); }

std::vector<SweepRow> sweep_rows(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("config has no [sweep] block");
    const auto pts = cfg.sweep->points();
    std::vector<SweepRow> rows(pts.size(), SweepRow{0.0, {}, Bound::unbounded(), Bound::unbounded(), false, {}});
    std::vector<std::exception_ptr> errors(pts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pts.size()); ++i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            const ExperimentConfig c = cfg.with_value(cfg.sweep->variable, pts[u]);
            SweepRow& r = rows[u];
            r.value = pts[u];
            r.bounds = closed_point(c);
            r.c_r = map_bound(r.bounds.c_tau, crlb_delay_to_range(1.0));
            r.c_v = map_bound(r.bounds.c_fd, crlb_doppler_to_velocity(1.0, CarrierConfig{c.scene.fc_hz}));
            if (c.va) {
                r.has_va = true;
                r.ratios = va_crlb_ratios(*c.va, c.n_t, c.n_r);
            }
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string run_sweep(const ExperimentConfig& cfg, const RunContext& ctx) {
    const auto rows = sweep_rows(cfg);
    std::string path;
    auto os = open_out(ctx, "sweep_" + cfg.name + ".csv", path);
    const bool va = !rows.empty() && rows.front().has_va;
    os << cfg.sweep->variable << ",c_tau_s2,c_fd_hz2,c_theta_rad2,c_r_m2,c_v_m2ps2";
    if (va) os << ",c_tau_va_s2,c_fd_va_hz2,c_theta_va_rad2";
    os << '\n';
    for (const auto& r : rows) {
        os << fmt(r.value) << ',' << r.bounds.c_tau.str() << ',' << r.bounds.c_fd.str() << ',' << r.bounds.c_theta.str()
           << ',' << r.c_r.str() << ',' << r.c_v.str();
        if (va)
            os << ',' << map_bound(r.bounds.c_tau, r.ratios.r_tau).str() << ','
               << map_bound(r.bounds.c_fd, r.ratios.r_fd).str() << ','
               << map_bound(r.bounds.c_theta, r.ratios.r_theta_exact).str();
        os << '\n';
    }
    if (ctx.plot) {
        PlotSpec p{"sweep " + cfg.name, cfg.sweep->variable, "C_tau (s^2)", cfg.sweep->log_scale, true, {}};
        Series s{"c_tau", {}, {}};
        for (const auto& r : rows)
            if (r.bounds.c_tau.is_finite()) {
                s.x.push_back(r.value);
                s.y.push_back(r.bounds.c_tau.value());
            }
        p.series = {s};
        write_svg((fs::path(ctx.out_dir) / ("sweep_" + cfg.name + ".svg")).string(), p);
    }
    return path;
}

std::string run_crlb(const ExperimentConfig& cfg, const RunContext& ctx, std::ostream& log) {
    const auto req = cfg.closed_form_request();
    const CrlbResult r = crlb_closed(req);
    const CarrierConfig cc{cfg.scene.fc_hz};
    std::string path;
    auto os = open_out(ctx, "crlb_" + cfg.name + ".csv", path);
    std::ostringstream body;
    body << "quantity,value,unit\n";
    body << "gamma," << fmt(req.gamma.value()) << ",linear\n";
    body << "c_tau," << r.c_tau.str() << ",s^2\n";
    body << "c_fd," << r.c_fd.str() << ",Hz^2\n";
    body << "c_theta," << r.c_theta.str() << ",rad^2\n";
    body << "c_r," << map_bound(r.c_tau, crlb_delay_to_range(1.0)).str() << ",m^2\n";
    body << "c_v," << map_bound(r.c_fd, crlb_doppler_to_velocity(1.0, cc)).str() << ",(m/s)^2\n";
    if ((req.family == Family::Ofdm || req.family == Family::Otfs) && req.k >= 2 && req.l >= 2) {
        const auto d = crlb_ofdm_discrete(req);
        body << "c_tau_discrete," << d.bounds.c_tau.str() << ",s^2\n";
        body << "c_fd_discrete," << d.bounds.c_fd.str() << ",Hz^2\n";
    }
    if (cfg.va) {
        const auto v = va_crlb_ratios(*cfg.va, cfg.n_t, cfg.n_r);
        body << "va_r_tau," << fmt(v.r_tau) << ",1\n";
        body << "va_r_fd," << fmt(v.r_fd) << ",1\n";
        body << "va_r_theta_exact," << fmt(v.r_theta_exact) << ",1\n";
        body << "va_r_theta_approx," << fmt(v.r_theta_approx) << ",1\n";
    }
    os << body.str();
    log << body.str();
    return path;
}

double oracle_sample_rate(const WaveformSpec& spec, double oversample) {
    const FrameGeometry g = geometry(spec);
    switch (spec.family()) {
    case Family::Pmcw: {
        const double tc = std::get<PmcwSpec>(spec.body).chip_period_s;
        return std::ceil(oversample * g.bandwidth_hz * tc - 1e-9) / tc;
    }
    case Family::Ofdm:
    case Family::Otfs:
        return std::ceil(oversample - 1e-9) * g.bandwidth_hz;
    case Family::Fmcw:
        break;
    }
    return default_sample_rate(spec, oversample);
}

bool VerifyReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const Check* VerifyReport::worst() const {
    const Check* w = nullptr;
    for (const auto& c : checks) {
        if (!c.pass) return &c;
        if (!w || c.error / c.tolerance > w->error / w->tolerance) w = &c;
    }
    return w;
}

namespace {

Check relative_check(std::string name, double value, double reference, double tol) {
    const double err = std::abs(value - reference) / std::abs(reference);
    return {std::move(name), value, reference, err, tol, err <= tol};
}

Check bound_check(std::string name, double value, double tol) {
    return {std::move(name), value, 0.0, std::abs(value), tol, std::abs(value) <= tol};
}

struct TrialStats {
    FisherMatrix fim;      // summed over trials
    FisherMatrix va_fim;
    double re_c0 = 0.0;    // max |Re C0| / (E B)
    double im_c1_abs = 0.0;  // max |Im C1| / E
    double im_c1_norm = 0.0; // sum Im C1 / (pi B T_F E / 6)
    int n = 0;
};

// Bounds of the trial-averaged FIM.
CrlbResult mean_crlb(const FisherMatrix& sum, int n) {
    FisherMatrix m = sum;
    m.entries /= static_cast<double>(n);
    check_fim(m);
    return crlb_from_efim(efim(m));
}

} // namespace

VerifyReport run_verify(const ExperimentConfig& cfg, double oversample) {
    const EsnrLinear gamma = cfg.gamma();
    SceneParams scene;
    scene.delay_s = cfg.scene.tau_s;
    scene.doppler_hz = cfg.scene.fd_hz;
    scene.theta_rad = cfg.scene.theta_rad;
    scene.phase_rad = cfg.scene.phase_rad;
    scene.array.n_r = cfg.n_r;
    scene.array.lambda_m = kSpeedOfLight / cfg.scene.fc_hz;

    const Family fam = cfg.waveform.family;
    const bool from_file = !cfg.signal_in.empty();
    const std::size_t trials = (fam == Family::Fmcw || from_file) ? 1 : cfg.trials;
    const double tol = fam == Family::Fmcw ? 0.02 : 0.05;

    const WaveformSpec spec0 = build_waveform(cfg.waveform, cfg.seed, 0);
    const double fs = oracle_sample_rate(spec0, oversample);
    const FrameGeometry g0 = geometry(spec0);

    auto synth_opts = [&](const WaveformSpec& spec) {
        SynthesisOptions o;
        o.max_delay_s = std::abs(scene.delay_s);
        if (const auto* p = std::get_if<PmcwSpec>(&spec.body); p && p->pulse.kind() == PulseShape::Kind::Rect)
            o.filter_sidelobes = true;
        return o;
    };

    TrialStats st;
    TrialStats ofdm_ref;
    for (std::size_t t = 0; t < trials; ++t) {
        const WaveformSpec spec = build_waveform(cfg.waveform, cfg.seed, t);
        const SampledSignal sig = from_file ? read_signal(cfg.signal_in) : synthesize(spec, fs, synth_opts(spec));
        if (t == 0 && !cfg.signal_out.empty()) write_signal(cfg.signal_out, sig);
        const SceneParams sc = with_esnr(scene, sig.energy(), gamma.value());
        st.fim += fim_from_signal(sig, sc);
        const CouplingReport cr = coupling_report(sig, sc.delay_s);
        const double e = sig.energy();
        st.re_c0 = std::max(st.re_c0, cr.re_c0_defect / (e * g0.bandwidth_hz));
        st.im_c1_abs = std::max(st.im_c1_abs, std::abs(cr.im_c1) / e);
        st.im_c1_norm += cr.im_c1 / (std::numbers::pi * g0.bandwidth_hz * g0.frame_s * e / 6.0);
        ++st.n;

        if (cfg.va && cfg.n_t > 1) {
            SceneParams sv = sc;
            sv.array.n_t = cfg.n_t;
            st.va_fim += va_fim(spec, *cfg.va, sv, fs);
        }

        if (fam == Family::Otfs) {
            WaveformConfig oc = cfg.waveform;
            oc.family = Family::Ofdm;
            const WaveformSpec os = build_waveform(oc, cfg.seed ^ 0x0fd3ULL, t);
            const SampledSignal osig = synthesize(os, fs, synth_opts(os));
            ofdm_ref.fim += fim_from_signal(osig, with_esnr(scene, osig.energy(), gamma.value()));
            ++ofdm_ref.n;
        }
    }

    const CrlbResult r = mean_crlb(st.fim, st.n);
    const double n = static_cast<double>(st.n);
    const CrlbResult closed = crlb_closed(request_for(spec0, cfg.n_r, gamma, scene.theta_rad));
    VerifyReport rep;
    rep.checks.push_back(relative_check("c_tau", r.c_tau.value(), closed.c_tau.value(), tol));
    rep.checks.push_back(relative_check("c_fd", r.c_fd.value(), closed.c_fd.value(), tol));
    if (closed.c_theta.is_finite() && r.c_theta.is_finite())
        rep.checks.push_back(relative_check("c_theta", r.c_theta.value(), closed.c_theta.value(), tol));
    rep.checks.push_back(bound_check("re_c0_over_es_b", st.re_c0, 1e-9));
    if (fam == Family::Pmcw) rep.checks.push_back(bound_check("im_c1_over_es", st.im_c1_abs, 1e-9));
    if (fam == Family::Ofdm || fam == Family::Otfs)
        rep.checks.push_back(bound_check("mean_im_c1_normalized", st.im_c1_norm / n, 0.02));
    if (fam == Family::Fmcw && g0.k == 1) {
        const double mu = g0.bandwidth_hz / g0.pri_s;
        const SampledSignal sig = from_file ? read_signal(cfg.signal_in) : synthesize(spec0, fs, synth_opts(spec0));
        const double expect = -std::numbers::pi * mu * g0.pri_s * g0.pri_s * sig.energy() / 6.0;
        rep.checks.push_back(relative_check("im_c1_single_chirp", compute_im_c1(sig, 0.0), expect, 0.01));
    }
    if (fam == Family::Otfs) {
        const CrlbResult o = mean_crlb(ofdm_ref.fim, ofdm_ref.n);
        rep.checks.push_back(relative_check("otfs_vs_ofdm_c_tau", r.c_tau.value(), o.c_tau.value(), 0.05));
        rep.checks.push_back(relative_check("otfs_vs_ofdm_c_fd", r.c_fd.value(), o.c_fd.value(), 0.05));
    }
    if (cfg.va && cfg.n_t > 1) {
        const auto ratios = va_crlb_ratios(*cfg.va, cfg.n_t, cfg.n_r);
        const CrlbResult v = mean_crlb(st.va_fim, st.n);
        rep.checks.push_back(relative_check("va_r_tau", v.c_tau.value() / r.c_tau.value(), ratios.r_tau, 0.05));
        rep.checks.push_back(relative_check("va_r_fd", v.c_fd.value() / r.c_fd.value(), ratios.r_fd, 0.05));
        if (v.c_theta.is_finite() && r.c_theta.is_finite())
            rep.checks.push_back(
                relative_check("va_r_theta", v.c_theta.value() / r.c_theta.value(), ratios.r_theta_exact, 0.05));
    }
    return rep;
}

void write_verify_csv(std::ostream& os, const VerifyReport& r) {
    os << "check,numeric,reference,error,tolerance,status\n";
    for (const auto& c : r.checks)
        os << c.name << ',' << fmt(c.value) << ',' << fmt(c.reference) << ',' << fmt(c.error) << ','
           << fmt(c.tolerance) << ',' << (c.pass ? "pass" : "FAIL") << '\n';
}

} // namespace isac
