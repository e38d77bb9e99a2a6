#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "shearsync/lyapunov.hpp"
#include "shearsync/models.hpp"
#include "shearsync/parallel.hpp"

namespace shearsync {

enum class CellStatus { pending, done, missing };

const char* to_string(CellStatus s);

// One lambda_max evaluation point. For the Landau-Stuart model d_ext, delta
// and the resulting exponent are all in rescaled time units.
struct PointSpec {
    ModelKind model = ModelKind::laser;
    double alpha = 0.0;
    double d_ext = 0.0;
    double j = 1.0;
    double delta = 0.0;
};

// Deterministic per-point time step: resolves the fastest local rate
// (relaxation, intensity oscillation, detuning, noise-driven rotation)
// to about 5% per step, capped at the model's default step.
double dt_for_point(const PointSpec& pt);

// Estimate lambda_max at a point, extending the horizon by 4x (same seed,
// so the path extends rather than resamples) until |lambda| clears
// resolve_sigma standard errors or the factor cap is hit. Returns the last
// estimate either way; blow-ups propagate.
LyapunovEstimate lambda_at_point(const PointSpec& pt, const LyapunovSettings& base,
                                 std::uint64_t seed, double resolve_sigma = 3.0,
                                 int max_horizon_factor = 16);

struct SweepGrid {
    ModelKind model = ModelKind::laser;
    std::vector<double> d_ext;  // strictly increasing, > 0
    std::vector<double> j;      // strictly increasing, > 0
    std::vector<double> alpha;  // strictly increasing
    double delta = 0.0;
    LyapunovSettings lyap;
    std::uint64_t seed = 1;
    double resolve_sigma = 3.0;
    int max_horizon_factor = 16;

    void validate() const;
    std::size_t n_cells() const { return d_ext.size() * j.size() * alpha.size(); }
    // Flat job index, alpha-major then j then d_ext.
    std::size_t job_of(std::size_t ia, std::size_t ij, std::size_t id) const {
        return (ia * j.size() + ij) * d_ext.size() + id;
    }
    PointSpec point_of(std::size_t job) const;
    std::uint64_t seed_of(std::size_t job) const;
    // Stable digest of everything that influences the numbers; resuming a
    // checkpoint written under a different config must fail loudly.
    std::string fingerprint() const;
};

struct SweepCell {
    std::size_t job = 0;
    double alpha = 0.0, d_ext = 0.0, j = 0.0;
    CellStatus status = CellStatus::pending;
    LyapunovEstimate est;
};

struct SweepResult {
    SweepGrid grid;
    std::vector<SweepCell> cells;  // always n_cells entries, job order
    bool complete = false;
    std::size_t n_done = 0, n_missing = 0, n_pending = 0;
};

struct SweepOptions {
    std::string checkpoint_path;  // empty: no checkpointing
    bool resume = false;          // pick up an existing checkpoint
    std::size_t max_cells = std::numeric_limits<std::size_t>::max();  // per call
    ExecPolicy policy = ExecPolicy::serial;
};

// Map lambda_max over the grid. Per-cell blow-ups become status=missing and
// the sweep continues. With a checkpoint path the file is rewritten
// atomically after every completed batch, so an interrupted sweep resumes
// without recomputation and finishes bitwise identical to an uninterrupted
// one (cell values are pure functions of the grid and the job index).
SweepResult sweep_lambda(const SweepGrid& grid, const SweepOptions& opt = {});

void write_sweep_checkpoint(const SweepResult& r, const std::string& path);
SweepResult load_sweep_checkpoint(const SweepGrid& grid, const std::string& path);

enum class Axis { d_ext, j, alpha };

const char* to_string(Axis a);

struct LocusPoint {
    double alpha = 0.0, d_ext = 0.0, j = 0.0;  // crossing coordinates
    Axis bisected = Axis::j;
    double lo = 0.0, hi = 0.0;  // final bracket on the bisected axis
    LyapunovEstimate est_lo, est_hi;
    int branch = 0;                  // 1: lambda goes - to + upward; 2: + to -
    bool resolution_limited = false; // stopped because the CI swallowed zero
};

struct PowerLawFit {
    int branch = 0;
    double slope = 0.0;      // in (ln sqrt(2 D_ext), ln J)
    double intercept = 0.0;
    double c = 0.0;          // exp(intercept)
    double residual_rms = 0.0;
    int n_points = 0;
};

struct BifurcationLocus {
    std::vector<LocusPoint> points;
    std::vector<PowerLawFit> fits;
};

// Scan the slice's bisect-axis ladder at every combination of the other two
// axes, bracket each sign change of lambda_max, and bisect (geometrically on
// d_ext and j, arithmetically on alpha) until the bracket is narrower than
// rel_tol of its midpoint or the estimate's uncertainty dominates. Both ends
// of every reported bracket are resolved beyond 2 sigma. No sign change on a
// ladder yields no points, not an error.
BifurcationLocus locate_d_bifurcation(const SweepGrid& slice, Axis axis_to_bisect,
                                      double rel_tol = 0.02);

// Per-branch regression of ln J on ln sqrt(2 D_ext) over the locus points
// whose mean intensity stays within weak_forcing_tol of J (the weak-forcing
// regime where the linear parametrisation holds). Fewer than 4 surviving
// points on a branch is an error.
std::vector<PowerLawFit> fit_power_law(const BifurcationLocus& locus,
                                       double weak_forcing_tol = 0.10);

struct ProbePoint {
    double d_ext = 0.0, j = 0.0;
};

struct AlphaMinSearch {
    ModelKind model = ModelKind::landau_stuart;
    double alpha_lo = 4.0, alpha_hi = 7.0;
    double tol = 0.1;
    std::vector<ProbePoint> probe;  // empty: model default probe grid
    double delta = 0.0;
    LyapunovSettings lyap;
    std::uint64_t seed = 1;
    double resolve_sigma = 2.0;
    int max_horizon_factor = 16;
};

struct AlphaMinResult {
    double alpha_min = 0.0;  // upper end of the final bracket: a positive
                             // region is certified to exist at this alpha
    double lo = 0.0, hi = 0.0;
    int n_lambda_evals = 0;
};

std::vector<ProbePoint> default_alpha_min_probe(ModelKind model);

// Bisect alpha on "some probe point has lambda_max > 0 beyond resolve_sigma".
// Requires the initial range to bracket (no region at alpha_lo, region at
// alpha_hi); otherwise throws.
AlphaMinResult find_alpha_min(const AlphaMinSearch& search);

struct ComparisonCell {
    double d_ext = 0.0, j = 0.0;  // laser-time units; the rescaled model runs
                                  // at d_ext/g_gamma internally
    LyapunovEstimate laser, reduced;
    bool both_resolved = false;
    bool sign_differs = false;
};

struct UpliftScan {
    double j = 0.0;
    std::vector<double> d_ext;
    std::vector<LyapunovEstimate> lambda;
    int positive_intervals = 0;  // maximal runs of resolved-positive lambda
};

struct ModelComparison {
    double alpha = 0.0;
    std::vector<ComparisonCell> cells;
    int n_discrepancies = 0;
    UpliftScan laser_uplift, reduced_uplift;  // populated when uplift_j > 0
};

struct CompareOptions {
    double delta = 0.0;  // laser detuning; mapped to delta/g_gamma for the
                         // reduced model
    LyapunovSettings laser_lyap, reduced_lyap;
    std::uint64_t seed = 1;
    double resolve_sigma = 2.0;
    int max_horizon_factor = 16;
    double uplift_j = 0.0;            // > 0 enables the low-J uplift scan
    std::vector<double> uplift_d_ext; // empty: default log ladder
};

// Evaluate both models on matched grids (forcing rescaled by 1/g_gamma for
// the reduced model) and report where the lambda_max signs disagree; with
// uplift_j > 0 also scans a low-J slice for disjoint positive intervals.
ModelComparison compare_models(double alpha, const std::vector<double>& j_values,
                               const std::vector<double>& d_values, const CompareOptions& opt);

}  // namespace shearsync
