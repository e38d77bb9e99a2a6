#include "shearsync/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shearsync/errors.hpp"

namespace shearsync {

const char* to_string(AttractorClass c) {
    switch (c) {
        case AttractorClass::random_sink: return "random_sink";
        case AttractorClass::random_strange_attractor: return "random_strange_attractor";
        default: return "inconclusive";
    }
}

void PullbackConfig::validate() const {
    if (n_points < 2) throw ConfigError("pullback: n_points must be >= 2");
    if (t0_list.empty()) throw ConfigError("pullback: t0_list must not be empty");
    for (std::size_t i = 0; i < t0_list.size(); ++i) {
        if (!(t0_list[i] < t_snapshot))
            throw ConfigError("pullback: every t0 must precede t_snapshot");
        if (i > 0 && !(t0_list[i] < t0_list[i - 1]))
            throw ConfigError("pullback: t0_list must be strictly descending");
    }
}

std::vector<State> pullback_initial_grid(int n_points, double half_width, double n_value) {
    if (n_points < 1) throw ConfigError("pullback grid: n_points must be >= 1");
    if (!(half_width > 0.0)) throw DomainError("pullback grid: half_width must be > 0");
    const int side = int(std::ceil(std::sqrt(double(n_points))));
    std::vector<State> seeds;
    seeds.reserve(std::size_t(n_points));
    for (int r = 0; r < side && int(seeds.size()) < n_points; ++r) {
        for (int c = 0; c < side && int(seeds.size()) < n_points; ++c) {
            State s;
            s.e_re = side == 1 ? 0.0 : half_width * (2.0 * double(c) / double(side - 1) - 1.0);
            s.e_im = side == 1 ? 0.0 : half_width * (2.0 * double(r) / double(side - 1) - 1.0);
            s.n = n_value;
            s.t = 0.0;
            seeds.push_back(s);
        }
    }
    return seeds;
}

double snapshot_diameter(const std::vector<State>& points) {
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        for (std::size_t k = i + 1; k < points.size(); ++k) {
            const double dx = points[i].e_re - points[k].e_re;
            const double dy = points[i].e_im - points[k].e_im;
            best = std::max(best, dx * dx + dy * dy);
        }
    }
    return std::sqrt(best);
}

namespace {

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

int snapshot_cluster_count(const std::vector<State>& points, double radius) {
    if (!(radius > 0.0)) throw DomainError("cluster_count: radius must be > 0");
    const int n = int(points.size());
    if (n == 0) return 0;
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    const double r2 = radius * radius;
    for (int i = 0; i + 1 < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            const double dx = points[std::size_t(i)].e_re - points[std::size_t(k)].e_re;
            const double dy = points[std::size_t(i)].e_im - points[std::size_t(k)].e_im;
            if (dx * dx + dy * dy <= r2) {
                const int a = find_root(parent, i);
                const int b = find_root(parent, k);
                if (a != b) parent[std::size_t(a)] = b;
            }
        }
    }
    int count = 0;
    for (int i = 0; i < n; ++i)
        if (find_root(parent, i) == i) ++count;
    return count;
}

AttractorClass classify_attractor(const std::vector<SnapshotSummary>& summaries,
                                  const LyapunovEstimate& lambda_est) {
    const bool negative = lambda_est.lambda_max < 0.0 && lambda_est.resolved(2.0);
    const bool positive = lambda_est.lambda_max > 0.0 && lambda_est.resolved(2.0);
    if (!negative && !positive) return AttractorClass::inconclusive;

    if (summaries.size() >= 2) {
        // t0_list is descending, so front() had the shortest window and
        // back() the longest; contraction shows up as a shrinking tail.
        const double d_late = summaries.front().diameter;
        const double d_early = summaries.back().diameter;
        const bool collapsed = d_early < 0.1 * d_late;
        const bool persistent = d_early > 0.5 * d_late;
        if (negative && persistent) return AttractorClass::inconclusive;
        if (positive && collapsed) return AttractorClass::inconclusive;
    }
    return negative ? AttractorClass::random_sink : AttractorClass::random_strange_attractor;
}

}  // namespace shearsync
