#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "shearsync/errors.hpp"
#include "shearsync/models.hpp"
#include "shearsync/noise.hpp"

namespace shearsync {

enum class Scheme { rk4_deterministic, euler_maruyama, stochastic_heun };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::rk4_deterministic: return "rk4_deterministic";
        case Scheme::euler_maruyama: return "euler_maruyama";
        default: return "stochastic_heun";
    }
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "rk4_deterministic" || s == "rk4") return Scheme::rk4_deterministic;
    if (s == "euler_maruyama" || s == "euler") return Scheme::euler_maruyama;
    if (s == "stochastic_heun" || s == "heun") return Scheme::stochastic_heun;
    throw ConfigError("unknown scheme '" + s +
                      "' (expected rk4_deterministic, euler_maruyama, or stochastic_heun)");
}

struct IntegratorConfig {
    double dt = 1e-4;
    Scheme scheme = Scheme::stochastic_heun;
    int record_stride = 1;
    // Step/grid relation: exactly one of these may exceed 1.
    //   dt = dt_grid / substeps_per_cell   (iid equal-variance sub-increments)
    //   dt = cells_per_step * dt_grid      (sums consecutive cell increments;
    //                                       lets convergence tests coarsen a
    //                                       step while keeping the same path)
    int substeps_per_cell = 1;
    int cells_per_step = 1;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("integrator dt must be > 0");
        if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
        if (substeps_per_cell < 1 || cells_per_step < 1)
            throw ConfigError("step/grid factors must be >= 1");
        if (substeps_per_cell > 1 && cells_per_step > 1)
            throw ConfigError("step cannot both subdivide and span grid cells");
    }

    // Require dt to match the noise grid through the declared factors.
    void check_grid(const NoiseSpec& spec) const {
        const double expect = spec.dt_grid * double(cells_per_step) / double(substeps_per_cell);
        if (std::fabs(dt - expect) > 1e-12 * std::max(1.0, expect))
            throw ConfigError("integrator dt must equal dt_grid*cells_per_step/substeps_per_cell");
    }

    static IntegratorConfig for_grid(const NoiseSpec& spec, Scheme scheme = Scheme::stochastic_heun,
                                     int substeps = 1, int cells = 1) {
        IntegratorConfig c;
        c.dt = spec.dt_grid * double(cells) / double(substeps);
        c.scheme = scheme;
        c.substeps_per_cell = substeps;
        c.cells_per_step = cells;
        return c;
    }
};

// Which noise path (if any) drives a trajectory and which oscillator's
// intrinsic channels it reads. The external channels are shared by all
// oscillators by construction.
struct PathBinding {
    const NoisePath* path = nullptr;
    std::uint32_t osc = 0;
};

// Index of an instant on a grid of spacing dt; rejects off-grid times so
// noise cells line up exactly across runs released at different t0.
inline std::int64_t grid_index_of(double t, double dt, const char* what = "time") {
    const double q = t / dt;
    const auto idx = std::int64_t(std::llround(q));
    if (std::fabs(q - double(idx)) > 1e-6)
        throw ConfigError(std::string(what) + " does not sit on the integration grid");
    return idx;
}

namespace detail {

// Per-step Wiener increments for each state component. `si` is the absolute
// step index (t = si*dt).
template <class M>
inline void gather_noise(const M&, const PathBinding& b, const IntegratorConfig& cfg,
                         std::int64_t si, double* w) {
    for (int i = 0; i < M::dim; ++i) w[i] = 0.0;
    if (!b.path) return;
    const auto k = std::uint32_t(cfg.substeps_per_cell);
    if (cfg.cells_per_step == 1) {
        w[0] = b.path->increment(si, chan::ext_re, k) + b.path->increment(si, chan::e_re(b.osc), k);
        w[1] = b.path->increment(si, chan::ext_im, k) + b.path->increment(si, chan::e_im(b.osc), k);
        if constexpr (M::has_inversion_noise) w[2] = b.path->increment(si, chan::n(b.osc), k);
    } else {
        for (int c = 0; c < cfg.cells_per_step; ++c) {
            const std::int64_t cell = si * cfg.cells_per_step + c;
            w[0] += b.path->increment(cell, chan::ext_re) + b.path->increment(cell, chan::e_re(b.osc));
            w[1] += b.path->increment(cell, chan::ext_im) + b.path->increment(cell, chan::e_im(b.osc));
            if constexpr (M::has_inversion_noise) w[2] += b.path->increment(cell, chan::n(b.osc));
        }
    }
}

template <int D>
inline void matvec(const double* jc, const double* v, double* out) {
    for (int r = 0; r < D; ++r) {
        double acc = 0.0;
        for (int c = 0; c < D; ++c) acc += jc[r * D + c] * v[c];
        out[r] = acc;
    }
}

}  // namespace detail

// Advance state by one step. `si` is the absolute step index, t = si*dt.
template <class M>
inline void step_raw(const M& m, const IntegratorConfig& cfg, const PathBinding& b,
                     std::int64_t si, double* x) {
    constexpr int D = M::dim;
    const double t = double(si) * cfg.dt;
    const double dt = cfg.dt;
    double w[D], f1[D];
    detail::gather_noise<M>(m, b, cfg, si, w);
    switch (cfg.scheme) {
        case Scheme::rk4_deterministic: {
            double k2[D], k3[D], k4[D], xs[D];
            m.drift(x, t, f1);
            for (int i = 0; i < D; ++i) xs[i] = x[i] + 0.5 * dt * f1[i];
            m.drift(xs, t + 0.5 * dt, k2);
            for (int i = 0; i < D; ++i) xs[i] = x[i] + 0.5 * dt * k2[i];
            m.drift(xs, t + 0.5 * dt, k3);
            for (int i = 0; i < D; ++i) xs[i] = x[i] + dt * k3[i];
            m.drift(xs, t + dt, k4);
            for (int i = 0; i < D; ++i)
                x[i] += dt / 6.0 * (f1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            break;
        }
        case Scheme::euler_maruyama: {
            m.drift(x, t, f1);
            for (int i = 0; i < D; ++i) x[i] += dt * f1[i] + w[i];
            break;
        }
        case Scheme::stochastic_heun: {
            double xp[D], f2[D];
            m.drift(x, t, f1);
            for (int i = 0; i < D; ++i) xp[i] = x[i] + dt * f1[i] + w[i];
            m.drift(xp, t + dt, f2);
            for (int i = 0; i < D; ++i) x[i] += 0.5 * dt * (f1[i] + f2[i]) + w[i];
            break;
        }
    }
    if (m.blown_up(x) || !std::isfinite(x[0]))
        throw BlowUpError(t + dt, "trajectory blow-up");
}

// Advance state and tangent jointly. The forcing is additive, so it drops
// out of the variational equation; the tangent sees only the Jacobian flow.
template <class M>
inline void step_with_tangent_raw(const M& m, const IntegratorConfig& cfg, const PathBinding& b,
                                  std::int64_t si, double* x, double* v) {
    constexpr int D = M::dim;
    const double t = double(si) * cfg.dt;
    const double dt = cfg.dt;
    double w[D], f1[D], jc[D * D], jv[D];
    detail::gather_noise<M>(m, b, cfg, si, w);
    switch (cfg.scheme) {
        case Scheme::rk4_deterministic: {
            double k2[D], k3[D], k4[D], xs1[D], xs2[D], xs3[D];
            double l1[D], l2[D], l3[D], l4[D], vs[D];
            m.drift(x, t, f1);
            for (int i = 0; i < D; ++i) xs1[i] = x[i] + 0.5 * dt * f1[i];
            m.drift(xs1, t + 0.5 * dt, k2);
            for (int i = 0; i < D; ++i) xs2[i] = x[i] + 0.5 * dt * k2[i];
            m.drift(xs2, t + 0.5 * dt, k3);
            for (int i = 0; i < D; ++i) xs3[i] = x[i] + dt * k3[i];
            m.drift(xs3, t + dt, k4);

            m.jacobian(x, jc);
            detail::matvec<D>(jc, v, l1);
            m.jacobian(xs1, jc);
            for (int i = 0; i < D; ++i) vs[i] = v[i] + 0.5 * dt * l1[i];
            detail::matvec<D>(jc, vs, l2);
            m.jacobian(xs2, jc);
            for (int i = 0; i < D; ++i) vs[i] = v[i] + 0.5 * dt * l2[i];
            detail::matvec<D>(jc, vs, l3);
            m.jacobian(xs3, jc);
            for (int i = 0; i < D; ++i) vs[i] = v[i] + dt * l3[i];
            detail::matvec<D>(jc, vs, l4);

            for (int i = 0; i < D; ++i) {
                x[i] += dt / 6.0 * (f1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                v[i] += dt / 6.0 * (l1[i] + 2.0 * l2[i] + 2.0 * l3[i] + l4[i]);
            }
            break;
        }
        case Scheme::euler_maruyama: {
            m.drift(x, t, f1);
            m.jacobian(x, jc);
            detail::matvec<D>(jc, v, jv);
            for (int i = 0; i < D; ++i) {
                x[i] += dt * f1[i] + w[i];
                v[i] += dt * jv[i];
            }
            break;
        }
        case Scheme::stochastic_heun: {
            double xp[D], f2[D], vp[D], jvp[D];
            m.drift(x, t, f1);
            m.jacobian(x, jc);
            detail::matvec<D>(jc, v, jv);
            for (int i = 0; i < D; ++i) {
                xp[i] = x[i] + dt * f1[i] + w[i];
                vp[i] = v[i] + dt * jv[i];
            }
            m.drift(xp, t + dt, f2);
            m.jacobian(xp, jc);
            detail::matvec<D>(jc, vp, jvp);
            for (int i = 0; i < D; ++i) {
                x[i] += 0.5 * dt * (f1[i] + f2[i]) + w[i];
                v[i] += 0.5 * dt * (jv[i] + jvp[i]);
            }
            break;
        }
    }
    if (m.blown_up(x) || !std::isfinite(x[0]))
        throw BlowUpError(t + dt, "trajectory blow-up");
}

// -------- State-level convenience wrappers --------

namespace detail {
template <class M>
inline void load(const State& s, double* x) {
    x[0] = s.e_re;
    x[1] = s.e_im;
    if constexpr (M::dim == 3) x[2] = s.n;
}
template <class M>
inline State store(const double* x, double t) {
    State s;
    s.e_re = x[0];
    s.e_im = x[1];
    s.n = (M::dim == 3) ? x[2] : 0.0;
    s.t = t;
    return s;
}
template <class M>
inline void check_scheme_path(const IntegratorConfig& cfg, const PathBinding& b) {
    cfg.validate();
    if (cfg.scheme != Scheme::rk4_deterministic && !b.path)
        throw ConfigError("stochastic schemes require a noise path");
    if (cfg.scheme == Scheme::rk4_deterministic && b.path)
        throw ConfigError("rk4_deterministic does not consume a noise path");
    if (b.path) cfg.check_grid(b.path->spec());
}
}  // namespace detail

template <class M>
State step(const M& m, const State& s, const IntegratorConfig& cfg, const PathBinding& b = {}) {
    detail::check_scheme_path<M>(cfg, b);
    double x[M::dim];
    detail::load<M>(s, x);
    const std::int64_t si = grid_index_of(s.t, cfg.dt, "state time");
    step_raw(m, cfg, b, si, x);
    return detail::store<M>(x, double(si + 1) * cfg.dt);
}

template <class M>
std::pair<State, std::array<double, M::dim>> step_with_tangent(
    const M& m, const State& s, const std::array<double, M::dim>& tangent,
    const IntegratorConfig& cfg, const PathBinding& b = {}) {
    detail::check_scheme_path<M>(cfg, b);
    double norm2 = 0.0;
    for (double c : tangent) norm2 += c * c;
    if (!(norm2 > 0.0)) throw DomainError("step_with_tangent: zero tangent");
    double x[M::dim];
    std::array<double, M::dim> v = tangent;
    detail::load<M>(s, x);
    const std::int64_t si = grid_index_of(s.t, cfg.dt, "state time");
    step_with_tangent_raw(m, cfg, b, si, x, v.data());
    return {detail::store<M>(x, double(si + 1) * cfg.dt), v};
}

// Decimated trajectory record. n is 0 for the Landau-Stuart model; arg is
// unwrapped step-by-step so phase plots have no 2*pi jumps.
struct Trace {
    std::vector<double> t, e_re, e_im, n, intensity, arg_unwrapped;
    std::size_t size() const { return t.size(); }
};

using StepObserver = std::function<void(std::int64_t step, double t, const double* x)>;

template <class M>
Trace run(const M& m, const State& init, double t0, double t1, const IntegratorConfig& cfg,
          const PathBinding& b = {}, const StepObserver& observer = {}) {
    detail::check_scheme_path<M>(cfg, b);
    if (t1 < t0) throw ConfigError("run: t1 must be >= t0");
    const auto nsteps = std::int64_t(std::llround((t1 - t0) / cfg.dt));
    if (std::fabs((t1 - t0) - double(nsteps) * cfg.dt) > 1e-6 * std::max(1.0, std::fabs(t1 - t0)))
        throw ConfigError("run: t1 - t0 must be a whole number of steps");
    const std::int64_t si0 = grid_index_of(t0, cfg.dt, "t0");

    double x[M::dim];
    detail::load<M>(init, x);

    Trace tr;
    const auto reserve = std::size_t(nsteps / cfg.record_stride + 2);
    tr.t.reserve(reserve);
    tr.e_re.reserve(reserve);
    tr.e_im.reserve(reserve);
    tr.n.reserve(reserve);
    tr.intensity.reserve(reserve);
    tr.arg_unwrapped.reserve(reserve);

    double prev_arg = std::atan2(x[1], x[0]);
    double unwrapped = prev_arg;
    auto record = [&](double t) {
        tr.t.push_back(t);
        tr.e_re.push_back(x[0]);
        tr.e_im.push_back(x[1]);
        tr.n.push_back(M::dim == 3 ? x[2] : 0.0);
        tr.intensity.push_back(x[0] * x[0] + x[1] * x[1]);
        tr.arg_unwrapped.push_back(unwrapped);
    };

    record(t0);
    if (observer) observer(0, t0, x);
    for (std::int64_t i = 0; i < nsteps; ++i) {
        step_raw(m, cfg, b, si0 + i, x);
        const double t = double(si0 + i + 1) * cfg.dt;
        const double a = std::atan2(x[1], x[0]);
        double d = a - prev_arg;
        if (d > M_PI) d -= 2.0 * M_PI;
        if (d <= -M_PI) d += 2.0 * M_PI;
        unwrapped += d;
        prev_arg = a;
        if (observer) observer(i + 1, t, x);
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == nsteps) record(t);
    }
    return tr;
}

}  // namespace shearsync
