#include "shearsync/bifurcation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>

#include "json.hpp"
#include "shearsync/errors.hpp"
#include "shearsync/philox.hpp"

namespace shearsync {

using nlohmann::json;

const char* to_string(CellStatus s) {
    switch (s) {
        case CellStatus::pending: return "pending";
        case CellStatus::done: return "done";
        default: return "missing";
    }
}

const char* to_string(Axis a) {
    switch (a) {
        case Axis::d_ext: return "d_ext";
        case Axis::j: return "j";
        default: return "alpha";
    }
}

double dt_for_point(const PointSpec& pt) {
    if (pt.model == ModelKind::laser) {
        const LaserParams ref{pt.j, pt.delta, pt.alpha};
        const double a = 0.5 * (1.0 + ref.g * pt.j);
        const double b = std::sqrt(std::max(2.0 * ref.g_gamma() * pt.j - a * a, 0.0));
        // Noise-driven intensity pushes the inversion toward -1/g, where the
        // field rotation rate saturates at gamma.
        const double ibar = pt.j + 2.0 * pt.d_ext;
        const double rot = ref.gamma * ref.g * ibar / (1.0 + ref.g * ibar);
        const double scale = a + b + std::fabs(pt.delta) + 1.0 + rot;
        return std::max(std::min(1e-4, 0.05 / scale), 2e-6);
    }
    const double scale = 1.0 + 2.0 * pt.j + std::fabs(pt.delta) +
                         std::fabs(pt.alpha) * (pt.j + 2.0 * pt.d_ext);
    return std::max(std::min(1e-2, 0.05 / scale), 1e-5);
}

LyapunovEstimate lambda_at_point(const PointSpec& pt, const LyapunovSettings& base,
                                 std::uint64_t seed, double resolve_sigma,
                                 int max_horizon_factor) {
    if (!(pt.j > 0.0)) throw DomainError("lambda_at_point: j must be > 0");
    if (pt.d_ext < 0.0) throw DomainError("lambda_at_point: d_ext must be >= 0");
    const double dt = dt_for_point(pt);
    NoiseSpec spec;
    spec.d_ext = pt.d_ext;
    spec.d_e = 0.0;
    spec.d_n = 0.0;
    spec.seed = seed;
    spec.dt_grid = dt;

    const double rate = pt.model == ModelKind::laser
                            ? 0.5 * (1.0 + LaserParams{pt.j, 0.0, 0.0}.g * pt.j)
                            : 2.0 * pt.j;
    LyapunovSettings s = base;
    s.integ = IntegratorConfig::for_grid(spec, base.integ.scheme);
    const double burn = base.burn_in >= 0.0 ? base.burn_in : 20.0 / rate;

    LyapunovEstimate est;
    for (int f = 1;; f *= 4) {
        s.horizon = std::max(base.horizon * double(f), 3.0 * burn);
        if (pt.model == ModelKind::laser) {
            LaserModel m{LaserParams{pt.j, pt.delta, pt.alpha}};
            est = estimate_lambda_max(m, spec, s);
        } else {
            LandauStuartModel m{LandauStuartParams{pt.j, pt.delta, pt.alpha}};
            est = estimate_lambda_max(m, spec, s);
        }
        if (est.resolved(resolve_sigma) || f >= max_horizon_factor) break;
    }
    return est;
}

void SweepGrid::validate() const {
    auto ascending = [](const std::vector<double>& v, bool positive, const char* name) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (positive && !(v[i] > 0.0))
                throw ConfigError(std::string("sweep axis ") + name + " must be > 0");
            if (i > 0 && !(v[i] > v[i - 1]))
                throw ConfigError(std::string("sweep axis ") + name +
                                  " must be strictly increasing");
        }
    };
    ascending(d_ext, true, "d_ext");
    ascending(j, true, "j");
    ascending(alpha, false, "alpha");
    if (!(resolve_sigma > 0.0)) throw ConfigError("resolve_sigma must be > 0");
    if (max_horizon_factor < 1) throw ConfigError("max_horizon_factor must be >= 1");
}

PointSpec SweepGrid::point_of(std::size_t job) const {
    const std::size_t nd = d_ext.size(), nj = j.size();
    PointSpec pt;
    pt.model = model;
    pt.d_ext = d_ext[job % nd];
    pt.j = j[(job / nd) % nj];
    pt.alpha = alpha[job / (nd * nj)];
    pt.delta = delta;
    return pt;
}

std::uint64_t SweepGrid::seed_of(std::size_t job) const {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (std::uint64_t(job) + 1));
}

namespace {

void put(std::string& s, const char* k, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.17g;", k, v);
    s += buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string SweepGrid::fingerprint() const {
    std::string s;
    s += "model=";
    s += to_string(model);
    s += ";";
    put(s, "delta", delta);
    char buf[64];
    std::snprintf(buf, sizeof buf, "seed=%llu;", (unsigned long long)seed);
    s += buf;
    put(s, "sigma", resolve_sigma);
    std::snprintf(buf, sizeof buf, "maxf=%d;", max_horizon_factor);
    s += buf;
    put(s, "horizon", lyap.horizon);
    put(s, "burn_in", lyap.burn_in);
    std::snprintf(buf, sizeof buf, "renorm=%d;blocks=%d;resamples=%d;scheme=%s;",
                  lyap.renorm_every, lyap.n_blocks, lyap.bootstrap_resamples,
                  to_string(lyap.integ.scheme));
    s += buf;
    auto axis = [&](const char* name, const std::vector<double>& v) {
        s += name;
        s += "=[";
        for (double x : v) put(s, "", x);
        s += "];";
    };
    axis("d", d_ext);
    axis("j", j);
    axis("a", alpha);
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(s));
    return buf;
}

namespace {

SweepResult blank_result(const SweepGrid& grid) {
    SweepResult r;
    r.grid = grid;
    r.cells.resize(grid.n_cells());
    for (std::size_t job = 0; job < r.cells.size(); ++job) {
        const PointSpec pt = grid.point_of(job);
        r.cells[job].job = job;
        r.cells[job].alpha = pt.alpha;
        r.cells[job].d_ext = pt.d_ext;
        r.cells[job].j = pt.j;
        r.cells[job].status = CellStatus::pending;
    }
    return r;
}

void refresh_counters(SweepResult& r) {
    r.n_done = r.n_missing = r.n_pending = 0;
    for (const auto& c : r.cells) {
        if (c.status == CellStatus::done) ++r.n_done;
        else if (c.status == CellStatus::missing) ++r.n_missing;
        else ++r.n_pending;
    }
    r.complete = r.n_pending == 0;
}

}  // namespace

void write_sweep_checkpoint(const SweepResult& r, const std::string& path) {
    json doc;
    doc["fingerprint"] = r.grid.fingerprint();
    doc["n_cells"] = r.grid.n_cells();
    json arr = json::array();
    for (const auto& c : r.cells) {
        if (c.status == CellStatus::pending) continue;
        json cell;
        cell["job"] = c.job;
        cell["alpha"] = c.alpha;
        cell["d_ext"] = c.d_ext;
        cell["j"] = c.j;
        cell["status"] = to_string(c.status);
        cell["lambda"] = c.est.lambda_max;
        cell["std_err"] = c.est.std_err;
        cell["t_total"] = c.est.t_total;
        cell["n_renorm"] = c.est.n_renorm;
        cell["seed"] = c.est.seed;
        cell["mean_intensity"] = c.est.mean_intensity;
        cell["burn_in"] = c.est.burn_in;
        cell["horizon"] = c.est.horizon;
        arr.push_back(std::move(cell));
    }
    doc["cells"] = std::move(arr);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ConfigError("cannot write checkpoint file " + tmp);
        out << doc.dump(1) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot move checkpoint into place at " + path);
}

SweepResult load_sweep_checkpoint(const SweepGrid& grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointMismatchError("checkpoint file not readable: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw CheckpointMismatchError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    SweepResult r = blank_result(grid);
    try {
        if (doc.at("fingerprint").get<std::string>() != grid.fingerprint())
            throw CheckpointMismatchError("checkpoint fingerprint does not match the configuration");
        if (doc.at("n_cells").get<std::size_t>() != grid.n_cells())
            throw CheckpointMismatchError("checkpoint cell count does not match the configuration");
        for (const auto& cell : doc.at("cells")) {
            const auto job = cell.at("job").get<std::size_t>();
            if (job >= r.cells.size())
                throw CheckpointMismatchError("checkpoint cell index out of range");
            SweepCell& c = r.cells[job];
            auto close = [](double x, double y) {
                return std::fabs(x - y) <= 1e-12 * std::max({1.0, std::fabs(x), std::fabs(y)});
            };
            if (!close(cell.at("alpha").get<double>(), c.alpha) ||
                !close(cell.at("d_ext").get<double>(), c.d_ext) ||
                !close(cell.at("j").get<double>(), c.j))
                throw CheckpointMismatchError("checkpoint cell coordinates do not match the grid");
            const std::string st = cell.at("status").get<std::string>();
            c.status = st == "done" ? CellStatus::done
                       : st == "missing" ? CellStatus::missing
                                         : throw CheckpointMismatchError("unknown cell status " + st);
            c.est.lambda_max = cell.at("lambda").get<double>();
            c.est.std_err = cell.at("std_err").get<double>();
            c.est.t_total = cell.at("t_total").get<double>();
            c.est.n_renorm = cell.at("n_renorm").get<std::int64_t>();
            c.est.seed = cell.at("seed").get<std::uint64_t>();
            c.est.mean_intensity = cell.at("mean_intensity").get<double>();
            c.est.burn_in = cell.at("burn_in").get<double>();
            c.est.horizon = cell.at("horizon").get<double>();
        }
    } catch (const json::exception& e) {
        throw CheckpointMismatchError(std::string("checkpoint is missing fields: ") + e.what());
    }
    refresh_counters(r);
    return r;
}

SweepResult sweep_lambda(const SweepGrid& grid, const SweepOptions& opt) {
    grid.validate();
    SweepResult r;
    const bool checkpointed = !opt.checkpoint_path.empty();
    if (checkpointed && opt.resume) {
        r = load_sweep_checkpoint(grid, opt.checkpoint_path);
    } else {
        if (checkpointed) {
            std::ifstream probe(opt.checkpoint_path);
            if (probe)
                throw ConfigError("checkpoint already exists at " + opt.checkpoint_path +
                                  "; resume it or remove the file");
        }
        r = blank_result(grid);
    }

    std::vector<std::size_t> pending;
    for (const auto& c : r.cells)
        if (c.status == CellStatus::pending) pending.push_back(c.job);

    const std::size_t allowance = std::min(opt.max_cells, pending.size());
    const std::size_t batch_max =
        opt.policy == ExecPolicy::openmp ? std::max<std::size_t>(hardware_workers(), 1) : 1;

    std::size_t done_here = 0;
    while (done_here < allowance) {
        const std::size_t batch = std::min(batch_max, allowance - done_here);
        parallel_for(opt.policy, batch, [&](std::size_t i) {
            const std::size_t job = pending[done_here + i];
            SweepCell& c = r.cells[job];
            try {
                c.est = lambda_at_point(grid.point_of(job), grid.lyap, grid.seed_of(job),
                                        grid.resolve_sigma, grid.max_horizon_factor);
                c.status = CellStatus::done;
            } catch (const BlowUpError&) {
                c.status = CellStatus::missing;
                c.est = LyapunovEstimate{};
                c.est.seed = grid.seed_of(job);
            }
        });
        done_here += batch;
        refresh_counters(r);
        if (checkpointed) write_sweep_checkpoint(r, opt.checkpoint_path);
    }
    refresh_counters(r);
    if (checkpointed) write_sweep_checkpoint(r, opt.checkpoint_path);
    return r;
}

namespace {

bool log_axis(Axis a) { return a != Axis::alpha; }

double midpoint_on(Axis a, double lo, double hi) {
    return log_axis(a) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
}

}  // namespace

BifurcationLocus locate_d_bifurcation(const SweepGrid& slice, Axis axis_to_bisect,
                                      double rel_tol) {
    slice.validate();
    if (!(rel_tol > 0.0)) throw ConfigError("locate: rel_tol must be > 0");
    const std::vector<double>& ladder = axis_to_bisect == Axis::d_ext ? slice.d_ext
                                        : axis_to_bisect == Axis::j   ? slice.j
                                                                      : slice.alpha;
    if (ladder.size() < 2)
        throw ConfigError("locate: the bisected axis needs at least two ladder values");
    const double n_sigma = std::max(2.0, slice.resolve_sigma);

    std::uint64_t eval_counter = 0;
    auto eval = [&](double alpha, double d, double jj) -> std::optional<LyapunovEstimate> {
        PointSpec pt{slice.model, alpha, d, jj, slice.delta};
        ++eval_counter;
        try {
            LyapunovEstimate est =
                lambda_at_point(pt, slice.lyap,
                                splitmix64(slice.seed + 0x9E3779B97F4A7C15ULL * eval_counter),
                                n_sigma, slice.max_horizon_factor);
            if (!est.resolved(n_sigma)) return std::nullopt;
            return est;
        } catch (const BlowUpError&) {
            return std::nullopt;
        }
    };

    // The two fixed axes for each scan of the ladder.
    std::vector<std::pair<double, double>> combos;  // (alpha-or-first, second)
    if (axis_to_bisect == Axis::j) {
        for (double a : slice.alpha)
            for (double d : slice.d_ext) combos.emplace_back(a, d);
    } else if (axis_to_bisect == Axis::d_ext) {
        for (double a : slice.alpha)
            for (double jj : slice.j) combos.emplace_back(a, jj);
    } else {
        for (double d : slice.d_ext)
            for (double jj : slice.j) combos.emplace_back(d, jj);
    }

    auto coords = [&](const std::pair<double, double>& combo, double x) {
        // returns (alpha, d_ext, j) given the bisected-axis value x
        if (axis_to_bisect == Axis::j) return std::array<double, 3>{combo.first, combo.second, x};
        if (axis_to_bisect == Axis::d_ext)
            return std::array<double, 3>{combo.first, x, combo.second};
        return std::array<double, 3>{x, combo.first, combo.second};
    };

    BifurcationLocus out;
    for (const auto& combo : combos) {
        std::vector<std::pair<double, LyapunovEstimate>> resolved;
        for (double x : ladder) {
            const auto c = coords(combo, x);
            if (auto est = eval(c[0], c[1], c[2])) resolved.emplace_back(x, *est);
        }
        for (std::size_t i = 0; i + 1 < resolved.size(); ++i) {
            double lo = resolved[i].first, hi = resolved[i + 1].first;
            LyapunovEstimate est_lo = resolved[i].second, est_hi = resolved[i + 1].second;
            if ((est_lo.lambda_max < 0.0) == (est_hi.lambda_max < 0.0)) continue;

            LocusPoint p;
            p.bisected = axis_to_bisect;
            p.branch = est_lo.lambda_max < 0.0 ? 1 : 2;
            while (hi - lo > rel_tol * midpoint_on(axis_to_bisect, lo, hi)) {
                const double mid = midpoint_on(axis_to_bisect, lo, hi);
                const auto c = coords(combo, mid);
                auto est_mid = eval(c[0], c[1], c[2]);
                if (!est_mid) {
                    p.resolution_limited = true;
                    break;
                }
                if ((est_mid->lambda_max < 0.0) == (est_lo.lambda_max < 0.0)) {
                    lo = mid;
                    est_lo = *est_mid;
                } else {
                    hi = mid;
                    est_hi = *est_mid;
                }
            }
            const double cross = midpoint_on(axis_to_bisect, lo, hi);
            const auto c = coords(combo, cross);
            p.alpha = c[0];
            p.d_ext = c[1];
            p.j = c[2];
            p.lo = lo;
            p.hi = hi;
            p.est_lo = est_lo;
            p.est_hi = est_hi;
            out.points.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<PowerLawFit> fit_power_law(const BifurcationLocus& locus, double weak_forcing_tol) {
    std::map<int, std::vector<const LocusPoint*>> branches;
    for (const auto& p : locus.points) {
        const double mi = 0.5 * (p.est_lo.mean_intensity + p.est_hi.mean_intensity);
        if (!(p.j > 0.0)) continue;
        if (std::fabs(mi / p.j - 1.0) >= weak_forcing_tol) continue;  // forcing not weak
        branches[p.branch].push_back(&p);
    }
    if (branches.empty()) throw DomainError("fit_power_law: no weak-forcing points on any branch");
    std::vector<PowerLawFit> fits;
    for (const auto& [branch, pts] : branches) {
        if (pts.size() < 4)
            throw DomainError("fit_power_law: branch " + std::to_string(branch) +
                              " has fewer than 4 weak-forcing points");
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = double(pts.size());
        for (const auto* p : pts) {
            const double x = std::log(std::sqrt(2.0 * p->d_ext));
            const double y = std::log(p->j);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = n * sxx - sx * sx;
        if (!(std::fabs(denom) > 0.0))
            throw DomainError("fit_power_law: degenerate abscissa (identical d_ext values)");
        PowerLawFit f;
        f.branch = branch;
        f.slope = (n * sxy - sx * sy) / denom;
        f.intercept = (sy - f.slope * sx) / n;
        f.c = std::exp(f.intercept);
        double ss = 0.0;
        for (const auto* p : pts) {
            const double x = std::log(std::sqrt(2.0 * p->d_ext));
            const double r = std::log(p->j) - (f.intercept + f.slope * x);
            ss += r * r;
        }
        f.residual_rms = std::sqrt(ss / n);
        f.n_points = int(pts.size());
        fits.push_back(f);
    }
    return fits;
}

std::vector<ProbePoint> default_alpha_min_probe(ModelKind model) {
    std::vector<ProbePoint> probe;
    if (model == ModelKind::landau_stuart) {
        // Rays J = C sqrt(2 D) straddling the merged curve C = 1.
        for (double d : {3e-4, 1e-3, 3e-3, 1e-2})
            for (double c : {0.8, 0.9, 1.0, 1.1, 1.2})
                probe.push_back({d, c * std::sqrt(2.0 * d)});
    } else {
        for (double d : {0.5, 1.0, 2.0, 5.0, 10.0})
            for (double jj : {0.3, 1.0, 3.0}) probe.push_back({d, jj});
    }
    return probe;
}

AlphaMinResult find_alpha_min(const AlphaMinSearch& search) {
    if (!(search.alpha_lo < search.alpha_hi))
        throw ConfigError("find_alpha_min: alpha_lo must be < alpha_hi");
    if (!(search.tol > 0.0)) throw ConfigError("find_alpha_min: tol must be > 0");
    const std::vector<ProbePoint> probe =
        search.probe.empty() ? default_alpha_min_probe(search.model) : search.probe;
    if (probe.empty()) throw ConfigError("find_alpha_min: empty probe grid");

    int evals = 0;
    auto region_exists = [&](double alpha) {
        bool found = false;
        for (const auto& pp : probe) {
            ++evals;
            PointSpec pt{search.model, alpha, pp.d_ext, pp.j, search.delta};
            try {
                const LyapunovEstimate est = lambda_at_point(
                    pt, search.lyap,
                    splitmix64(search.seed + 0x9E3779B97F4A7C15ULL * std::uint64_t(evals)),
                    search.resolve_sigma, search.max_horizon_factor);
                if (est.lambda_max > 0.0 && est.resolved(search.resolve_sigma)) {
                    found = true;
                    break;
                }
            } catch (const BlowUpError&) {
                // an exploding probe point certifies nothing
            }
        }
        return found;
    };

    double lo = search.alpha_lo, hi = search.alpha_hi;
    if (region_exists(lo))
        throw ConfigError("find_alpha_min: a positive region already exists at alpha_lo");
    if (!region_exists(hi))
        throw ConfigError("find_alpha_min: no positive region at alpha_hi; range does not bracket");
    while (hi - lo > search.tol) {
        const double mid = 0.5 * (lo + hi);
        if (region_exists(mid)) hi = mid;
        else lo = mid;
    }
    AlphaMinResult r;
    r.alpha_min = hi;  // certified side of the bracket
    r.lo = lo;
    r.hi = hi;
    r.n_lambda_evals = evals;
    return r;
}

namespace {

int count_positive_intervals(const std::vector<LyapunovEstimate>& lambda, double n_sigma) {
    int intervals = 0;
    bool inside = false;
    for (const auto& est : lambda) {
        const bool pos = est.lambda_max > 0.0 && est.resolved(n_sigma);
        if (pos && !inside) ++intervals;
        inside = pos;
    }
    return intervals;
}

}  // namespace

ModelComparison compare_models(double alpha, const std::vector<double>& j_values,
                               const std::vector<double>& d_values, const CompareOptions& opt) {
    const double gg = LaserParams{1.0, 0.0, 0.0}.g_gamma();
    ModelComparison out;
    out.alpha = alpha;
    std::uint64_t k = 0;
    auto next_seed = [&] { return splitmix64(opt.seed + 0x9E3779B97F4A7C15ULL * (++k)); };
    auto try_point = [&](const PointSpec& pt, const LyapunovSettings& lyap) {
        try {
            return lambda_at_point(pt, lyap, next_seed(), opt.resolve_sigma,
                                   opt.max_horizon_factor);
        } catch (const BlowUpError&) {
            LyapunovEstimate est;
            est.std_err = std::numeric_limits<double>::infinity();
            return est;
        }
    };

    for (double jj : j_values) {
        for (double d : d_values) {
            ComparisonCell cell;
            cell.d_ext = d;
            cell.j = jj;
            cell.laser = try_point({ModelKind::laser, alpha, d, jj, opt.delta}, opt.laser_lyap);
            cell.reduced = try_point(
                {ModelKind::landau_stuart, alpha, d / gg, jj, opt.delta / gg}, opt.reduced_lyap);
            cell.both_resolved = cell.laser.resolved(opt.resolve_sigma) &&
                                 cell.reduced.resolved(opt.resolve_sigma);
            cell.sign_differs = cell.both_resolved &&
                                (cell.laser.lambda_max > 0.0) != (cell.reduced.lambda_max > 0.0);
            if (cell.sign_differs) ++out.n_discrepancies;
            out.cells.push_back(std::move(cell));
        }
    }

    if (opt.uplift_j > 0.0) {
        std::vector<double> ladder = opt.uplift_d_ext;
        if (ladder.empty()) {
            // four decades, 4 points per decade
            for (int i = 0; i <= 16; ++i) ladder.push_back(1e-2 * std::pow(10.0, 0.25 * i));
        }
        out.laser_uplift.j = opt.uplift_j;
        out.laser_uplift.d_ext = ladder;
        out.reduced_uplift.j = opt.uplift_j;
        out.reduced_uplift.d_ext = ladder;
        for (double d : ladder) {
            out.laser_uplift.lambda.push_back(
                try_point({ModelKind::laser, alpha, d, opt.uplift_j, opt.delta}, opt.laser_lyap));
            out.reduced_uplift.lambda.push_back(
                try_point({ModelKind::landau_stuart, alpha, d / gg, opt.uplift_j, opt.delta / gg},
                          opt.reduced_lyap));
        }
        out.laser_uplift.positive_intervals =
            count_positive_intervals(out.laser_uplift.lambda, opt.resolve_sigma);
        out.reduced_uplift.positive_intervals =
            count_positive_intervals(out.reduced_uplift.lambda, opt.resolve_sigma);
    }
    return out;
}

}  // namespace shearsync
