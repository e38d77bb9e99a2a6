#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shearsync/integrate.hpp"
#include "shearsync/models.hpp"
#include "shearsync/parallel.hpp"

namespace shearsync {

enum class KickMode { multiplicative, additive };

const char* to_string(KickMode m);

// Angular-dependent radial kick: |E| changes, arg E and N do not.
struct KickSchedule {
    std::vector<double> times;  // strictly increasing kick instants
    double amplitude = 0.8;     // kappa
    int angular_wavenumber = 4; // k
    KickMode mode = KickMode::multiplicative;

    void validate() const;
};

// multiplicative: |E| -> |E| * (1 + kappa*sin(k*arg E))
// additive:       |E| -> |E| + kappa*sin(k*arg E)
// A non-positive result is clamped to 1e-9 and flagged through `clamped`.
State apply_kick(const State& s, const KickSchedule& sched, bool* clamped = nullptr);

// n_points equally spaced seeds on the stable circle |E| = sqrt(j), N = 0,
// ordered by angle (the fold detector relies on this ordering).
std::vector<State> circle_set(double j, int n_points);

// Net angle swept by the closed loop of points, in turns.
double winding_number(const std::vector<State>& loop);

// Folds of the image curve: maximal runs where the principal angular
// increment along the ordered loop (wraparound included) turns negative.
int count_folds(const std::vector<State>& loop);

struct KickedSnapshot {
    double t = 0.0;
    std::vector<State> points;  // original circle order
    std::vector<char> alive;    // 0 after a blow-up (stale state retained)
    int n_blowups = 0;
};

// Deterministic flow interleaved with kicks. Snapshots at a kick instant are
// taken before the kick applies.
template <class Model>
std::vector<KickedSnapshot> evolve_kicked_set(const Model& m, const std::vector<State>& initial,
                                              const KickSchedule& sched, double t_end,
                                              std::vector<double> snapshot_times,
                                              const IntegratorConfig& integ,
                                              ExecPolicy policy = ExecPolicy::serial) {
    sched.validate();
    integ.validate();
    if (integ.scheme != Scheme::rk4_deterministic)
        throw ConfigError("evolve_kicked_set: the flow between kicks is deterministic");
    if (initial.empty()) throw ConfigError("evolve_kicked_set: empty initial set");
    const double t0 = initial.front().t;
    for (const State& s : initial)
        if (s.t != t0) throw ConfigError("evolve_kicked_set: initial states must share one time");
    const std::int64_t s0 = grid_index_of(t0, integ.dt, "initial time");
    const std::int64_t s_end = grid_index_of(t_end, integ.dt, "t_end");
    if (s_end < s0) throw ConfigError("evolve_kicked_set: t_end precedes the initial time");

    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                         snapshot_times.end());

    struct Event {
        std::int64_t step;
        int snap = -1;  // index into the output list
        bool kick = false;
    };
    std::vector<Event> events;
    auto event_at = [&](std::int64_t step) -> Event& {
        for (auto& e : events)
            if (e.step == step) return e;
        events.push_back(Event{step});
        return events.back();
    };
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        const std::int64_t step = grid_index_of(snapshot_times[i], integ.dt, "snapshot time");
        if (step < s0 || step > s_end)
            throw ConfigError("evolve_kicked_set: snapshot time outside [t0, t_end]");
        event_at(step).snap = int(i);
    }
    for (double tk : sched.times) {
        const std::int64_t step = grid_index_of(tk, integ.dt, "kick time");
        if (step < s0 || step > s_end)
            throw ConfigError("evolve_kicked_set: kick time outside [t0, t_end]");
        event_at(step).kick = true;
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.step < b.step; });

    std::vector<KickedSnapshot> snaps(snapshot_times.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        snaps[i].t = snapshot_times[i];
        snaps[i].points.resize(initial.size());
        snaps[i].alive.assign(initial.size(), 1);
    }

    parallel_for(policy, initial.size(), [&](std::size_t p) {
        double x[Model::dim];
        detail::load<Model>(initial[p], x);
        bool ok = true;
        std::int64_t cur = s0;
        auto flow_to = [&](std::int64_t target) {
            if (!ok) {
                cur = target;
                return;
            }
            try {
                for (; cur < target; ++cur) step_raw(m, integ, PathBinding{}, cur, x);
            } catch (const BlowUpError&) {
                ok = false;
                cur = target;
            }
        };
        for (const Event& e : events) {
            flow_to(e.step);
            const double t = double(e.step) * integ.dt;
            if (e.snap >= 0) {
                snaps[std::size_t(e.snap)].points[p] = detail::store<Model>(x, t);
                snaps[std::size_t(e.snap)].alive[p] = ok ? 1 : 0;
            }
            if (e.kick && ok) {
                const State kicked = apply_kick(detail::store<Model>(x, t), sched);
                detail::load<Model>(kicked, x);
            }
        }
        flow_to(s_end);
    });

    for (auto& s : snaps)
        s.n_blowups = int(std::count(s.alive.begin(), s.alive.end(), char(0)));
    return snaps;
}

struct PhaseDiffCase {
    ModelKind model = ModelKind::laser;
    double alpha = 0.0;
};

struct PhaseDiffCurve {
    ModelKind model = ModelKind::laser;
    double alpha = 0.0;
    std::vector<double> t;     // laser-frame time for both models
    std::vector<double> dphase;  // unwrapped arg(E1) - arg(E2)
    double initial_dpsi = 0.0;   // Psi(ic1) - Psi(ic2)
    double final_dphase = 0.0;
};

// Two deterministic trajectories per case; the rescaled model runs in its own
// time and is mapped back through t = t_tilde/(g*gamma).
std::vector<PhaseDiffCurve> phase_difference_experiment(double j,
                                                        const std::vector<PhaseDiffCase>& cases,
                                                        const State& ic1, const State& ic2,
                                                        double t_end,
                                                        const IntegratorConfig& laser_integ,
                                                        const IntegratorConfig& ls_integ);

}  // namespace shearsync
