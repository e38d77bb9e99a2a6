#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "shearsync/integrate.hpp"
#include "shearsync/lyapunov.hpp"
#include "shearsync/models.hpp"
#include "shearsync/noise.hpp"
#include "shearsync/parallel.hpp"

namespace shearsync {

// Release-and-snapshot protocol: one fixed noise realisation, ensembles of
// initial conditions released at each t0 and observed at t_snapshot.
struct PullbackConfig {
    double t_snapshot = 30.0;
    std::vector<double> t0_list;  // strictly descending, every entry < t_snapshot
    int n_points = 2500;          // uniform grid over the seeding box, >= 2
    double box_half_width = -1.0; // <= 0 resolves to 2*sqrt(J)
    double n_value = 0.0;         // inversion coordinate of every seed
    double cluster_radius = -1.0; // <= 0 resolves to 1e-3*sqrt(J)
    IntegratorConfig integ;
    ExecPolicy policy = ExecPolicy::serial;

    void validate() const;
};

struct SnapshotSummary {
    double t0 = 0.0;
    std::vector<State> points;    // surviving members at t_snapshot
    double diameter = 0.0;        // max pairwise distance, E-plane projection
    int cluster_count = 0;        // single-linkage clusters at cluster_radius
    double cluster_radius = 0.0;  // radius actually used, kept for audit
    int n_blowups = 0;
};

enum class AttractorClass { random_sink, random_strange_attractor, inconclusive };

const char* to_string(AttractorClass c);

// Row-major uniform grid of n_points seeds over [-half_width, half_width]^2
// in the E-plane, all at the given inversion value.
std::vector<State> pullback_initial_grid(int n_points, double half_width, double n_value);

double snapshot_diameter(const std::vector<State>& points);
int snapshot_cluster_count(const std::vector<State>& points, double radius);

// Sign of lambda_max decides (beyond two standard errors); the diameter trend
// across release times only vetoes: a contradiction makes the call
// inconclusive, an ambiguous trend leaves the primary verdict alone.
AttractorClass classify_attractor(const std::vector<SnapshotSummary>& summaries,
                                  const LyapunovEstimate& lambda_est);

template <class Model>
std::vector<SnapshotSummary> pullback_snapshot(const Model& m, const NoiseSpec& spec,
                                               const PullbackConfig& cfg) {
    cfg.validate();
    spec.validate();
    cfg.integ.validate();
    const double j = m.p.j;
    const double half = cfg.box_half_width > 0.0 ? cfg.box_half_width : 2.0 * std::sqrt(j);
    const double radius = cfg.cluster_radius > 0.0 ? cfg.cluster_radius : 1e-3 * std::sqrt(j);
    const std::vector<State> seeds = pullback_initial_grid(cfg.n_points, half, cfg.n_value);

    NoisePath path(spec);
    const bool stochastic = cfg.integ.scheme != Scheme::rk4_deterministic;
    if (stochastic) cfg.integ.check_grid(spec);
    const PathBinding binding = stochastic ? PathBinding{&path, 0} : PathBinding{};

    const std::int64_t si1 = grid_index_of(cfg.t_snapshot, cfg.integ.dt, "t_snapshot");

    std::vector<SnapshotSummary> out;
    out.reserve(cfg.t0_list.size());
    for (double t0 : cfg.t0_list) {
        const std::int64_t si0 = grid_index_of(t0, cfg.integ.dt, "t0");
        const std::int64_t nsteps = si1 - si0;

        std::vector<State> finals(seeds.size());
        std::vector<char> alive(seeds.size(), 0);
        parallel_for(cfg.policy, seeds.size(), [&](std::size_t p) {
            double x[Model::dim];
            detail::load<Model>(seeds[p], x);
            try {
                for (std::int64_t i = 0; i < nsteps; ++i)
                    step_raw(m, cfg.integ, binding, si0 + i, x);
                finals[p] = detail::store<Model>(x, cfg.t_snapshot);
                alive[p] = 1;
            } catch (const BlowUpError&) {
                alive[p] = 0;
            }
        });

        SnapshotSummary s;
        s.t0 = t0;
        s.cluster_radius = radius;
        for (std::size_t p = 0; p < seeds.size(); ++p) {
            if (alive[p]) s.points.push_back(finals[p]);
        }
        s.n_blowups = int(seeds.size() - s.points.size());
        s.diameter = snapshot_diameter(s.points);
        s.cluster_count = snapshot_cluster_count(s.points, radius);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace shearsync
