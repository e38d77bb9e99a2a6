#include "shearsync/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "shearsync/bifurcation.hpp"
#include "shearsync/ensemble.hpp"
#include "shearsync/errors.hpp"
#include "shearsync/io.hpp"
#include "shearsync/kicks.hpp"
#include "shearsync/lyapunov.hpp"
#include "shearsync/philox.hpp"
#include "shearsync/presets.hpp"
#include "shearsync/pullback.hpp"
#include "shearsync/version.hpp"

namespace shearsync {

namespace {

using nlohmann::ordered_json;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Session {
    ExperimentConfig cfg;
    std::string dir;
    std::vector<std::string> artifacts;
    std::ostream* log = nullptr;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    std::string path(const std::string& name) const { return join_path(dir, name); }
    void record(const std::string& name) { artifacts.push_back(name); }

    template <class... Args>
    void say(Args&&... args) {
        if (log == nullptr) return;
        ((*log) << ... << args) << '\n';
    }

    void write_manifest(bool complete) const {
        ordered_json man;
        man["version"] = kVersion;
        man["experiment"] = cfg.experiment;
        man["model"] = cfg.model;
        man["seed"] = cfg.seed;
        man["complete"] = complete;
        man["config"] = ordered_json::parse(serialize_config_json(cfg));
        man["artifacts"] = artifacts;
        man["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        write_text_file(join_path(dir, "manifest.json"), man.dump(2) + "\n");
    }
};

LyapunovSettings lyapunov_settings(const ExperimentConfig& cfg) {
    LyapunovSettings s;
    s.horizon = cfg.horizon;
    s.burn_in = cfg.burn_in;
    s.renorm_every = cfg.renorm_every;
    s.n_blocks = cfg.n_blocks;
    s.bootstrap_resamples = cfg.bootstrap_resamples;
    s.integ.scheme = scheme_from_string(cfg.scheme);
    return s;
}

PointSpec point_spec(const ExperimentConfig& cfg) {
    PointSpec pt;
    pt.model = cfg.model_kind();
    pt.alpha = cfg.alpha;
    pt.d_ext = cfg.d_ext;
    pt.j = cfg.j;
    pt.delta = cfg.delta;
    return pt;
}

double default_dt(const ExperimentConfig& cfg) {
    return cfg.dt > 0.0 ? cfg.dt : dt_for_point(point_spec(cfg));
}

std::vector<double> alpha_list(const ExperimentConfig& cfg) {
    return cfg.alpha_axis.empty() ? std::vector<double>{cfg.alpha} : cfg.alpha_axis;
}

ForcingKind forcing_kind(const std::string& s) {
    if (s == "none") return ForcingKind::none;
    if (s == "monochromatic") return ForcingKind::monochromatic;
    if (s == "white_noise") return ForcingKind::white_noise;
    throw ConfigError("unknown forcing '" + s + "'");
}

// ---------------------------------------------------------------- floquet --

void run_floquet(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    const bool single = cfg.j_axis.empty();
    const std::vector<double> js = single ? std::vector<double>{cfg.j} : cfg.j_axis;

    std::vector<std::vector<std::string>> rows;
    FloquetSet last;
    for (double j : js) {
        FloquetSet f;
        if (cfg.model_kind() == ModelKind::laser) {
            LaserParams p = cfg.laser_params();
            p.j = j;
            f = floquet_closed_form(p);
        } else {
            LandauStuartParams p = cfg.ls_params();
            p.j = j;
            f = floquet_closed_form(p);
        }
        last = f;
        rows.push_back({format_g17(j), format_g17(f.mu1), format_g17(f.mu2.real()),
                        format_g17(f.mu2.imag()), format_g17(f.mu3.real()),
                        format_g17(f.mu3.imag()), to_string(f.regime)});
    }
    write_csv_text(s.path("floquet.csv"),
                   {"j", "mu1", "mu2_re", "mu2_im", "mu3_re", "mu3_im", "regime"}, rows);
    s.record("floquet.csv");

    if (single) {
        s.say("mu1 = ", fmt6(last.mu1));
        if (last.regime == FloquetRegime::landau_stuart)
            s.say("mu2 = ", fmt6(last.mu2.real()));
        else if (last.regime == FloquetRegime::underdamped)
            s.say("mu2,3 = ", fmt6(last.mu2.real()), " +/- ", fmt6(last.mu2.imag()), "i");
        else
            s.say("mu2 = ", fmt6(last.mu2.real()), ", mu3 = ", fmt6(last.mu3.real()));
        s.say("regime = ", to_string(last.regime));
    } else {
        s.say("floquet curve over ", js.size(), " pump values -> floquet.csv");
    }
}

// --------------------------------------------------------------- lyapunov --

void run_lyapunov(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    LyapunovSettings set = lyapunov_settings(cfg);
    set.integ.dt = default_dt(cfg);

    NoiseSpec spec;
    spec.d_ext = cfg.d_ext;
    spec.d_e = cfg.d_e;
    spec.d_n = cfg.d_n;
    spec.seed = cfg.seed;
    spec.dt_grid = set.integ.dt;

    LyapunovEstimate est;
    if (cfg.model_kind() == ModelKind::laser) {
        LaserModel m{cfg.laser_params()};
        est = estimate_lambda_max(m, spec, set);
    } else {
        LandauStuartModel m{cfg.ls_params()};
        est = estimate_lambda_max(m, spec, set);
    }

    write_csv_text(
        s.path("lyapunov.csv"),
        {"model", "alpha", "d_ext", "d_e", "d_n", "j", "delta", "dt", "horizon", "burn_in",
         "lambda_max", "std_err", "resolved", "mean_intensity", "n_renorm", "seed"},
        {{cfg.model, format_g17(cfg.alpha), format_g17(cfg.d_ext), format_g17(cfg.d_e),
          format_g17(cfg.d_n), format_g17(cfg.j), format_g17(cfg.delta),
          format_g17(set.integ.dt), format_g17(est.horizon), format_g17(est.burn_in),
          format_g17(est.lambda_max), format_g17(est.std_err),
          est.resolved() ? "1" : "0", format_g17(est.mean_intensity),
          std::to_string(est.n_renorm), std::to_string(est.seed)}});
    s.record("lyapunov.csv");
    s.say("lambda_max = ", fmt6(est.lambda_max), " +/- ", fmt6(est.std_err),
          est.resolved() ? " (resolved)" : " (not resolved beyond 2 sigma)");
}

// --------------------------------------------------------------- pullback --

template <class Model>
std::vector<SnapshotSummary> pullback_dispatch(const Model& m, const ExperimentConfig& cfg,
                                               PullbackConfig& pc) {
    NoiseSpec spec;
    spec.d_ext = cfg.d_ext;
    spec.seed = cfg.seed;
    spec.dt_grid = pc.integ.dt;
    return pullback_snapshot(m, spec, pc);
}

void run_pullback(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    PullbackConfig pc;
    pc.t_snapshot = cfg.t_snapshot;
    pc.t0_list = cfg.t0_list;
    if (pc.t0_list.empty()) {
        pc.t0_list = {cfg.t_snapshot - 1.0, cfg.t_snapshot - 2.0};
        if (cfg.t_snapshot > 2.0) pc.t0_list.push_back(0.0);
    }
    pc.n_points = cfg.n_points;
    pc.box_half_width = cfg.box_half_width;
    pc.n_value = cfg.ic_n_value;
    pc.cluster_radius = cfg.cluster_radius;
    pc.integ.dt = default_dt(cfg);
    pc.integ.scheme = scheme_from_string(cfg.scheme);
    pc.policy = cfg.policy();

    std::vector<SnapshotSummary> sums;
    if (cfg.model_kind() == ModelKind::laser) {
        LaserModel m{cfg.laser_params()};
        sums = pullback_dispatch(m, cfg, pc);
    } else {
        LandauStuartModel m{cfg.ls_params()};
        sums = pullback_dispatch(m, cfg, pc);
    }

    const LyapunovEstimate est = lambda_at_point(point_spec(cfg), lyapunov_settings(cfg),
                                                 cfg.seed, cfg.resolve_sigma,
                                                 cfg.max_horizon_factor);
    const AttractorClass cls = classify_attractor(sums, est);

    std::vector<std::vector<double>> summary_rows;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        const SnapshotSummary& snap = sums[i];
        char name[48];
        std::snprintf(name, sizeof(name), "snapshot_%02zu.csv", i);
        std::vector<std::vector<double>> pts;
        pts.reserve(snap.points.size());
        for (const State& p : snap.points) pts.push_back({p.e_re, p.e_im, p.n});
        write_csv(s.path(name), {"e_re", "e_im", "n"}, pts);
        s.record(name);
        summary_rows.push_back({snap.t0, snap.diameter, double(snap.cluster_count),
                                snap.cluster_radius, double(snap.points.size()),
                                double(snap.n_blowups)});
    }
    write_csv(s.path("pullback_summary.csv"),
              {"t0", "diameter", "clusters", "cluster_radius", "n_alive", "n_blowups"},
              summary_rows);
    s.record("pullback_summary.csv");

    ordered_json doc;
    doc["classification"] = to_string(cls);
    doc["lambda_max"] = est.lambda_max;
    doc["lambda_std_err"] = est.std_err;
    doc["t_snapshot"] = pc.t_snapshot;
    doc["snapshots"] = ordered_json::array();
    for (const SnapshotSummary& snap : sums)
        doc["snapshots"].push_back({{"t0", snap.t0},
                                    {"diameter", snap.diameter},
                                    {"clusters", snap.cluster_count},
                                    {"n_blowups", snap.n_blowups}});
    write_text_file(s.path("pullback.json"), doc.dump(2) + "\n");
    s.record("pullback.json");

    s.say("lambda_max = ", fmt6(est.lambda_max), " +/- ", fmt6(est.std_err));
    for (const SnapshotSummary& snap : sums)
        s.say("t0 = ", fmt6(snap.t0), ": diameter ", fmt6(snap.diameter), ", ",
              snap.cluster_count, " cluster(s)");
    s.say("classification = ", to_string(cls));
}

// ------------------------------------------------------- bifurcation modes --

SweepGrid sweep_grid(const ExperimentConfig& cfg) {
    SweepGrid g;
    g.model = cfg.model_kind();
    g.d_ext = cfg.d_axis;
    g.j = cfg.j_axis;
    g.alpha = alpha_list(cfg);
    g.delta = cfg.delta;
    g.lyap = lyapunov_settings(cfg);
    g.seed = cfg.seed;
    g.resolve_sigma = cfg.resolve_sigma;
    g.max_horizon_factor = cfg.max_horizon_factor;
    return g;
}

void write_estimate_cells(Session& s, const char* file, const SweepResult& r) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(r.cells.size());
    for (const SweepCell& c : r.cells) {
        const bool done = c.status == CellStatus::done;
        const double nan = std::nan("");
        rows.push_back({std::to_string(c.job), format_g17(c.alpha), format_g17(c.d_ext),
                        format_g17(c.j), to_string(c.status),
                        format_g17(done ? c.est.lambda_max : nan),
                        format_g17(done ? c.est.std_err : nan),
                        done && c.est.resolved() ? "1" : "0",
                        format_g17(done ? c.est.mean_intensity : nan),
                        format_g17(done ? c.est.t_total : nan),
                        std::to_string(c.est.seed)});
    }
    write_csv_text(s.path(file),
                   {"job", "alpha", "d_ext", "j", "status", "lambda_max", "std_err",
                    "resolved", "mean_intensity", "t_total", "seed"},
                   rows);
    s.record(file);
}

// Returns true while the sweep is still partial (capped by max_cells).
bool run_sweep(Session& s, const RunOptions& opt) {
    SweepOptions so;
    so.checkpoint_path = s.path("checkpoint.json");
    so.resume = opt.resume;
    so.max_cells = opt.max_cells;
    so.policy = s.cfg.policy();

    const SweepGrid g = sweep_grid(s.cfg);
    const SweepResult r = sweep_lambda(g, so);
    s.record("checkpoint.json");
    if (!r.complete) {
        s.say("sweep stopped after this batch: ", r.n_done + r.n_missing, "/",
              r.cells.size(), " cells done; checkpoint retained, resume to continue");
        return true;
    }
    write_estimate_cells(s, "sweep.csv", r);
    int positive = 0, negative = 0;
    for (const SweepCell& c : r.cells)
        if (c.status == CellStatus::done && c.est.resolved()) {
            if (c.est.lambda_max > 0) ++positive;
            else ++negative;
        }
    s.say("sweep complete: ", r.n_done, " cells done, ", r.n_missing, " blown up; ",
          positive, " resolved positive, ", negative, " resolved negative");
    return false;
}

Axis axis_from_string(const std::string& s) {
    if (s == "d_ext") return Axis::d_ext;
    if (s == "j") return Axis::j;
    if (s == "alpha") return Axis::alpha;
    throw ConfigError("unknown bisect_axis '" + s + "'");
}

void run_locate(Session& s) {
    const SweepGrid g = sweep_grid(s.cfg);
    BifurcationLocus locus = locate_d_bifurcation(g, axis_from_string(s.cfg.bisect_axis),
                                                  s.cfg.rel_tol);
    std::string fit_error;
    try {
        locus.fits = fit_power_law(locus, s.cfg.weak_forcing_tol);
    } catch (const DomainError& e) {
        fit_error = e.what();
    }

    std::vector<std::vector<std::string>> rows;
    for (const LocusPoint& p : locus.points)
        rows.push_back({format_g17(p.alpha), format_g17(p.d_ext), format_g17(p.j),
                        to_string(p.bisected), std::to_string(p.branch), format_g17(p.lo),
                        format_g17(p.hi), format_g17(p.est_lo.lambda_max),
                        format_g17(p.est_hi.lambda_max),
                        p.resolution_limited ? "1" : "0"});
    write_csv_text(s.path("locus.csv"),
                   {"alpha", "d_ext", "j", "bisected", "branch", "bracket_lo",
                    "bracket_hi", "lambda_lo", "lambda_hi", "resolution_limited"},
                   rows);
    s.record("locus.csv");

    ordered_json doc;
    doc["n_points"] = locus.points.size();
    doc["fits"] = ordered_json::array();
    for (const PowerLawFit& f : locus.fits)
        doc["fits"].push_back({{"branch", f.branch},
                               {"slope", f.slope},
                               {"intercept", f.intercept},
                               {"c", f.c},
                               {"residual_rms", f.residual_rms},
                               {"n_points", f.n_points}});
    if (!fit_error.empty()) doc["fit_error"] = fit_error;
    write_text_file(s.path("fits.json"), doc.dump(2) + "\n");
    s.record("fits.json");

    s.say("locus: ", locus.points.size(), " crossing(s)");
    for (const PowerLawFit& f : locus.fits)
        s.say("branch ", f.branch, ": J = ", fmt6(f.c), " * sqrt(2 D)^", fmt6(f.slope),
              "  (rms ", fmt6(f.residual_rms), ", ", f.n_points, " points)");
    if (!fit_error.empty()) s.say("power-law fit unavailable: ", fit_error);
}

void run_alpha_min(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    AlphaMinSearch search;
    search.model = cfg.model_kind();
    search.alpha_lo = cfg.alpha_lo;
    search.alpha_hi = cfg.alpha_hi;
    search.tol = cfg.alpha_tol;
    search.delta = cfg.delta;
    search.lyap = lyapunov_settings(cfg);
    search.seed = cfg.seed;
    search.resolve_sigma = cfg.resolve_sigma;
    search.max_horizon_factor = cfg.max_horizon_factor;
    const AlphaMinResult r = find_alpha_min(search);

    ordered_json doc;
    doc["alpha_min"] = r.alpha_min;
    doc["bracket_lo"] = r.lo;
    doc["bracket_hi"] = r.hi;
    doc["n_lambda_evals"] = r.n_lambda_evals;
    write_text_file(s.path("alpha_min.json"), doc.dump(2) + "\n");
    s.record("alpha_min.json");
    s.say("alpha_min = ", fmt6(r.alpha_min), " (bracket [", fmt6(r.lo), ", ", fmt6(r.hi),
          "], ", r.n_lambda_evals, " exponent evaluations)");
}

void write_uplift(Session& s, const char* file, const UpliftScan& u) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < u.d_ext.size(); ++i)
        rows.push_back({format_g17(u.d_ext[i]), format_g17(u.lambda[i].lambda_max),
                        format_g17(u.lambda[i].std_err),
                        u.lambda[i].resolved() ? "1" : "0"});
    write_csv_text(s.path(file), {"d_ext", "lambda_max", "std_err", "resolved"}, rows);
    s.record(file);
}

void run_compare(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    if (cfg.model_kind() != ModelKind::laser)
        throw ConfigError("compare mode pits the laser against its phase reduction; set "
                          "model = laser");
    CompareOptions opt;
    opt.delta = cfg.delta;
    opt.laser_lyap = lyapunov_settings(cfg);
    opt.reduced_lyap = lyapunov_settings(cfg);
    opt.reduced_lyap.integ.dt = 0.0;  // per-point policy picks both steps
    opt.seed = cfg.seed;
    opt.resolve_sigma = cfg.resolve_sigma;
    opt.max_horizon_factor = cfg.max_horizon_factor;
    opt.uplift_j = cfg.uplift_j;
    opt.uplift_d_ext = cfg.uplift_d_axis;
    const ModelComparison r = compare_models(cfg.alpha, cfg.j_axis, cfg.d_axis, opt);

    std::vector<std::vector<std::string>> rows;
    for (const ComparisonCell& c : r.cells)
        rows.push_back({format_g17(c.d_ext), format_g17(c.j),
                        format_g17(c.laser.lambda_max), format_g17(c.laser.std_err),
                        format_g17(c.reduced.lambda_max), format_g17(c.reduced.std_err),
                        c.both_resolved ? "1" : "0", c.sign_differs ? "1" : "0"});
    write_csv_text(s.path("compare.csv"),
                   {"d_ext", "j", "laser_lambda", "laser_std_err", "reduced_lambda",
                    "reduced_std_err", "both_resolved", "sign_differs"},
                   rows);
    s.record("compare.csv");

    ordered_json doc;
    doc["alpha"] = r.alpha;
    doc["n_cells"] = r.cells.size();
    doc["n_discrepancies"] = r.n_discrepancies;
    if (cfg.uplift_j > 0.0) {
        write_uplift(s, "uplift_laser.csv", r.laser_uplift);
        write_uplift(s, "uplift_reduced.csv", r.reduced_uplift);
        doc["uplift_j"] = cfg.uplift_j;
        doc["laser_positive_intervals"] = r.laser_uplift.positive_intervals;
        doc["reduced_positive_intervals"] = r.reduced_uplift.positive_intervals;
        s.say("uplift scan at J = ", fmt6(cfg.uplift_j), ": laser has ",
              r.laser_uplift.positive_intervals, " positive interval(s), reduction ",
              r.reduced_uplift.positive_intervals);
    }
    write_text_file(s.path("compare.json"), doc.dump(2) + "\n");
    s.record("compare.json");
    s.say("compared ", r.cells.size(), " cell(s): ", r.n_discrepancies,
          " resolved sign discrepancies");
}

bool run_bifurcation(Session& s, const RunOptions& opt) {
    const std::string& mode = s.cfg.sweep_mode;
    if (mode == "sweep") return run_sweep(s, opt);
    if (mode == "locate") run_locate(s);
    else if (mode == "alpha-min") run_alpha_min(s);
    else if (mode == "compare") run_compare(s);
    else throw ConfigError("unknown sweep_mode '" + mode + "'");
    return false;
}

// --------------------------------------------------------------- ensemble --

EnsembleConfig ensemble_config(const ExperimentConfig& cfg) {
    EnsembleConfig ec;
    ec.m = cfg.m;
    ec.forcing.kind = forcing_kind(cfg.forcing);
    ec.forcing.k = cfg.k_amp;
    ec.forcing.nu_ext = cfg.nu_ext;
    ec.forcing.d_ext = cfg.d_ext;
    ec.d_e = cfg.d_e;
    ec.d_n = cfg.d_n;
    ec.horizon = cfg.ens_horizon;
    ec.burn_in = cfg.ens_burn_in;
    ec.integ.dt = cfg.dt > 0.0 ? cfg.dt : 1e-4;
    ec.integ.scheme = scheme_from_string(cfg.scheme);
    ec.sample_stride = cfg.sample_stride;
    ec.histogram_bins = cfg.histogram_bins;
    return ec;
}

void write_histogram_csv(Session& s, const std::string& name, const Histogram& h) {
    std::vector<std::vector<double>> rows;
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
        rows.push_back({h.edges[b], h.edges[b + 1], h.mass[b]});
    write_csv(s.path(name), {"bin_lo", "bin_hi", "mass"}, rows);
    s.record(name);
}

void run_ensemble_single(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    const EnsembleConfig ec = ensemble_config(cfg);
    LaserParams p = cfg.laser_params();
    const OrderParameterResult r = run_ensemble(p, ec, cfg.seed, cfg.policy());

    const double strength =
        ec.forcing.kind == ForcingKind::monochromatic ? ec.forcing.k : ec.forcing.d_ext;
    write_csv_text(s.path("ensemble.csv"),
                   {"m", "forcing", "strength", "mean_im", "mean_ifr", "ratio",
                    "sync_class"},
                   {{std::to_string(r.m), to_string(ec.forcing.kind),
                     format_g17(strength), format_g17(r.mean_im), format_g17(r.mean_ifr),
                     format_g17(r.ratio), to_string(r.sync_class)}});
    s.record("ensemble.csv");

    std::vector<std::vector<double>> samples;
    samples.reserve(r.im_samples.size());
    for (std::size_t k = 0; k < r.im_samples.size(); ++k)
        samples.push_back(
            {double(k), ec.burn_in + double(k + 1) * r.sample_dt, r.im_samples[k]});
    write_csv(s.path("im_samples.csv"), {"sample", "t", "im"}, samples);
    s.record("im_samples.csv");

    write_histogram_csv(s, "histogram.csv", r.histogram);

    std::vector<std::vector<double>> finals;
    for (std::size_t k = 0; k < r.final_states.size(); ++k)
        finals.push_back({double(k), r.final_states[k].e_re, r.final_states[k].e_im,
                          r.final_states[k].n});
    write_csv(s.path("final_states.csv"), {"member", "e_re", "e_im", "n"}, finals);
    s.record("final_states.csv");

    s.say("ratio = ", fmt6(r.ratio), " (", to_string(r.sync_class), "), mean I_M = ",
          fmt6(r.mean_im), ", baseline I_fr = ", fmt6(r.mean_ifr));
}

void run_ensemble_curve(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    const EnsembleConfig ec = ensemble_config(cfg);
    if (ec.forcing.kind == ForcingKind::none)
        throw ConfigError("a forcing-strength curve needs forcing = monochromatic or "
                          "white_noise");

    std::vector<std::vector<std::string>> rows;
    const std::vector<double> alphas = alpha_list(cfg);
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        LaserParams p = cfg.laser_params();
        p.alpha = alphas[ia];
        std::vector<ForcingCurvePoint> pts;
        if (cfg.write_histograms) {
            // same per-point seeds as sweep_forcing_strength, plus histograms
            pts.resize(cfg.strength_axis.size());
            for (std::size_t i = 0; i < cfg.strength_axis.size(); ++i) {
                EnsembleConfig pt_cfg = ec;
                if (ec.forcing.kind == ForcingKind::monochromatic)
                    pt_cfg.forcing.k = cfg.strength_axis[i];
                else
                    pt_cfg.forcing.d_ext = cfg.strength_axis[i];
                const std::uint64_t pt_seed =
                    splitmix64(cfg.seed + 0x9E3779B97F4A7C15ULL * (i + 1));
                ForcingCurvePoint& out = pts[i];
                out.strength = cfg.strength_axis[i];
                try {
                    const OrderParameterResult r =
                        run_ensemble(p, pt_cfg, pt_seed, cfg.policy());
                    out.mean_im = r.mean_im;
                    out.mean_ifr = r.mean_ifr;
                    out.ratio = r.ratio;
                    out.sync_class = r.sync_class;
                    char name[64];
                    std::snprintf(name, sizeof(name), "hist_a%02zu_s%02zu.csv", ia, i);
                    write_histogram_csv(s, name, r.histogram);
                } catch (const BlowUpError& e) {
                    out.failed = true;
                    out.fail_time = e.time();
                }
            }
        } else {
            pts = sweep_forcing_strength(p, ec, cfg.strength_axis, cfg.seed, cfg.policy());
        }
        for (const ForcingCurvePoint& pt : pts)
            rows.push_back({format_g17(alphas[ia]), format_g17(pt.strength),
                            format_g17(pt.mean_im), format_g17(pt.mean_ifr),
                            format_g17(pt.ratio), to_string(pt.sync_class),
                            pt.failed ? "1" : "0", format_g17(pt.fail_time)});
        s.say("alpha = ", fmt6(alphas[ia]), ": ", pts.size(), " strength points done");
    }
    write_csv_text(s.path("ensemble_curve.csv"),
                   {"alpha", "strength", "mean_im", "mean_ifr", "ratio", "sync_class",
                    "failed", "fail_time"},
                   rows);
    s.record("ensemble_curve.csv");
}

void run_ensemble_experiment(Session& s) {
    if (s.cfg.model_kind() != ModelKind::laser)
        throw ConfigError("the ensemble experiment runs the laser model; set model = laser");
    if (s.cfg.strength_axis.empty()) run_ensemble_single(s);
    else run_ensemble_curve(s);
}

// ------------------------------------------------------------------ kicks --

IntegratorConfig kick_integ(const ExperimentConfig& cfg, ModelKind kind) {
    IntegratorConfig ic;
    ic.scheme = scheme_from_string(cfg.scheme);
    if (cfg.dt > 0.0) ic.dt = cfg.dt;
    else ic.dt = kind == ModelKind::laser ? 1e-4 : 1e-2;
    ic.record_stride = cfg.record_stride;
    return ic;
}

void run_kicked_set(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    KickSchedule sched;
    sched.times = cfg.kick_times;
    sched.amplitude = cfg.kick_amplitude;
    sched.angular_wavenumber = cfg.kick_wavenumber;
    sched.mode = cfg.kick_mode == "additive" ? KickMode::additive : KickMode::multiplicative;

    std::vector<double> snaps = cfg.kick_snapshots;
    if (snaps.empty()) snaps = {cfg.kick_t_end};
    const std::vector<State> initial = circle_set(cfg.j, cfg.kick_points);
    const IntegratorConfig ic = kick_integ(cfg, cfg.model_kind());

    std::vector<KickedSnapshot> result;
    if (cfg.model_kind() == ModelKind::laser) {
        LaserModel m{cfg.laser_params()};
        result = evolve_kicked_set(m, initial, sched, cfg.kick_t_end, snaps, ic,
                                   cfg.policy());
    } else {
        LandauStuartModel m{cfg.ls_params()};
        result = evolve_kicked_set(m, initial, sched, cfg.kick_t_end, snaps, ic,
                                   cfg.policy());
    }

    std::vector<std::vector<std::string>> summary;
    for (std::size_t i = 0; i < result.size(); ++i) {
        const KickedSnapshot& snap = result[i];
        char name[48];
        std::snprintf(name, sizeof(name), "kicked_t%02zu.csv", i);
        std::vector<std::vector<double>> pts;
        pts.reserve(snap.points.size());
        for (std::size_t k = 0; k < snap.points.size(); ++k)
            pts.push_back({double(k), snap.points[k].e_re, snap.points[k].e_im,
                           snap.points[k].n, double(snap.alive[k])});
        write_csv(s.path(name), {"point", "e_re", "e_im", "n", "alive"}, pts);
        s.record(name);

        std::vector<State> loop;
        loop.reserve(snap.points.size());
        for (std::size_t k = 0; k < snap.points.size(); ++k)
            if (snap.alive[k]) loop.push_back(snap.points[k]);
        double winding = std::nan("");
        double folds = std::nan("");
        if (loop.size() >= 3) {
            try {
                winding = winding_number(loop);
                folds = count_folds(loop);
            } catch (const DomainError&) {
                // zero-field point in the loop; metrics stay undefined
            }
        }
        summary.push_back({format_g17(snap.t), format_g17(winding), format_g17(folds),
                           std::to_string(snap.n_blowups)});
        const std::string blown =
            snap.n_blowups ? ", " + std::to_string(snap.n_blowups) + " blow-ups"
                           : std::string();
        s.say("t = ", fmt6(snap.t), ": winding ", fmt6(winding), ", folds ", fmt6(folds),
              blown);
    }
    write_csv_text(s.path("kicks_summary.csv"), {"t", "winding", "folds", "n_blowups"},
                   summary);
    s.record("kicks_summary.csv");
}

void run_phase_diff(Session& s) {
    const ExperimentConfig& cfg = s.cfg;
    const double rj = std::sqrt(cfg.j);
    State ic1, ic2;
    ic1.e_re = cfg.pd_r1 * rj;
    ic2.e_re = cfg.pd_r2 * rj;

    std::vector<PhaseDiffCase> cases = {{ModelKind::laser, 0.0},
                                        {ModelKind::laser, cfg.alpha},
                                        {ModelKind::landau_stuart, cfg.alpha}};
    IntegratorConfig laser_ic = kick_integ(cfg, ModelKind::laser);
    IntegratorConfig ls_ic = kick_integ(cfg, ModelKind::landau_stuart);
    const std::vector<PhaseDiffCurve> curves = phase_difference_experiment(
        cfg.j, cases, ic1, ic2, cfg.pd_t_end, laser_ic, ls_ic);

    ordered_json doc = ordered_json::array();
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const PhaseDiffCurve& c = curves[i];
        char name[48];
        std::snprintf(name, sizeof(name), "phase_diff_%02zu.csv", i);
        std::vector<std::vector<double>> rows;
        rows.reserve(c.t.size());
        for (std::size_t k = 0; k < c.t.size(); ++k)
            rows.push_back({c.t[k], c.dphase[k]});
        write_csv(s.path(name), {"t", "dphase"}, rows);
        s.record(name);
        doc.push_back({{"model", to_string(c.model)},
                       {"alpha", c.alpha},
                       {"initial_dpsi", c.initial_dpsi},
                       {"final_dphase", c.final_dphase}});
        s.say(to_string(c.model), " alpha = ", fmt6(c.alpha), ": initial dPsi ",
              fmt6(c.initial_dpsi), ", final phase difference ", fmt6(c.final_dphase));
    }
    write_text_file(s.path("phase_diff.json"), doc.dump(2) + "\n");
    s.record("phase_diff.json");
}

void run_kicks(Session& s) {
    if (s.cfg.kick_experiment == "set") run_kicked_set(s);
    else run_phase_diff(s);
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    set_worker_count(cfg.workers);

    Session s;
    s.cfg = cfg;
    s.dir = resolve_out_dir(cfg.out_dir);
    s.log = opt.log;
    ensure_dir(s.dir);
    s.write_manifest(false);  // config lands on disk before any heavy work

    bool partial = false;
    switch (cfg.kind()) {
        case ExperimentKind::floquet: run_floquet(s); break;
        case ExperimentKind::lyapunov: run_lyapunov(s); break;
        case ExperimentKind::pullback: run_pullback(s); break;
        case ExperimentKind::bifurcation_sweep: partial = run_bifurcation(s, opt); break;
        case ExperimentKind::ensemble: run_ensemble_experiment(s); break;
        case ExperimentKind::kicks: run_kicks(s); break;
    }

    s.write_manifest(!partial);
    RunOutcome out;
    out.out_dir = s.dir;
    out.artifacts = s.artifacts;
    out.sweep_partial = partial;
    return out;
}

RunOutcome resume_experiment(const std::string& path, const RunOptions& opt) {
    std::string dir = path;
    if (file_exists(path) && !std::filesystem::is_directory(path))
        dir = std::filesystem::path(path).parent_path().string();
    const std::string manifest = join_path(dir, "manifest.json");
    if (!file_exists(manifest))
        throw ConfigError("no manifest.json under '" + dir + "' to resume from");

    nlohmann::json man;
    try {
        man = nlohmann::json::parse(read_text_file(manifest));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("unreadable manifest " + manifest + ": " + e.what());
    }
    if (!man.contains("config"))
        throw ConfigError("manifest " + manifest + " has no embedded config");
    ExperimentConfig cfg = parse_config(man["config"].dump());
    // resume in place even if the env override changed since the first run
    cfg.out_dir = std::filesystem::absolute(dir).string();

    RunOptions ropt = opt;
    ropt.resume = true;
    return run_experiment(cfg, ropt);
}

}  // namespace shearsync
