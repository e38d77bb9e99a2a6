#include "doctest.h"

#include <array>
#include <cmath>

#include "shearsync/integrate.hpp"

using namespace shearsync;

namespace {

NoiseSpec ls_noise(double d_ext, std::uint64_t seed) {
    NoiseSpec s;
    s.d_ext = d_ext;
    s.seed = seed;
    s.dt_grid = 1e-2;
    return s;
}

template <class M>
State advance(const M& m, State s, int nsteps, const IntegratorConfig& cfg,
              const PathBinding& b = {}) {
    for (int i = 0; i < nsteps; ++i) s = step(m, s, cfg, b);
    return s;
}

}  // namespace

TEST_CASE("grid index of accepts grid times and rejects the rest") {
    CHECK(grid_index_of(0.3, 1e-2) == 30);
    CHECK(grid_index_of(-0.2, 1e-2) == -20);
    CHECK(grid_index_of(0.0, 1e-4) == 0);
    CHECK_THROWS_AS((void)grid_index_of(0.305 + 1e-4, 1e-2), ConfigError);
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.record_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.substeps_per_cell = 2;
    cfg.cells_per_step = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    const NoiseSpec spec = ls_noise(1e-3, 1);
    cfg = IntegratorConfig::for_grid(spec);
    CHECK(cfg.dt == spec.dt_grid);
    CHECK_NOTHROW(cfg.check_grid(spec));
    cfg = IntegratorConfig::for_grid(spec, Scheme::stochastic_heun, 4);
    CHECK(cfg.dt == doctest::Approx(2.5e-3).epsilon(1e-15));
    CHECK_NOTHROW(cfg.check_grid(spec));
    cfg.dt *= 1.5;
    CHECK_THROWS_AS(cfg.check_grid(spec), ConfigError);
}

TEST_CASE("scheme and path pairing is enforced") {
    LandauStuartModel m;
    m.p = {1.0, 0.0, 0.0};
    const State s{1.0, 0.0, 0.0, 0.0};
    NoisePath path(ls_noise(1e-3, 5));
    IntegratorConfig det;
    det.dt = 1e-2;
    det.scheme = Scheme::rk4_deterministic;
    CHECK_THROWS_AS((void)step(m, s, det, PathBinding{&path, 0}), ConfigError);

    IntegratorConfig sto = IntegratorConfig::for_grid(path.spec());
    CHECK_THROWS_AS((void)step(m, s, sto, PathBinding{}), ConfigError);
    CHECK_NOTHROW((void)step(m, s, sto, PathBinding{&path, 0}));
    CHECK_NOTHROW((void)step(m, s, det, PathBinding{}));
}

TEST_CASE("equilibria are bitwise fixed points of the deterministic scheme") {
    LaserModel m;
    m.p.j = 2.5;
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.scheme = Scheme::rk4_deterministic;
    State s{0.0, 0.0, 2.5, 0.0};
    s = advance(m, s, 50, cfg);
    CHECK(s.e_re == 0.0);
    CHECK(s.e_im == 0.0);
    CHECK(s.n == 2.5);
    CHECK(s.t == doctest::Approx(50 * 1e-4).epsilon(1e-12));

    LandauStuartModel ls;
    ls.p = {1.0, 0.0, 3.0};  // on the cycle with zero detuning the drift vanishes
    IntegratorConfig lcfg;
    lcfg.dt = 1e-2;
    lcfg.scheme = Scheme::rk4_deterministic;
    State q{std::sqrt(0.5), std::sqrt(0.5), 0.0, 0.0};
    q = advance(ls, q, 50, lcfg);
    CHECK(q.e_re == std::sqrt(0.5));
    CHECK(q.e_im == std::sqrt(0.5));
}

TEST_CASE("deterministic cycle rotates at the detuning rate") {
    LandauStuartModel m;
    m.p = {1.0, 0.5, 2.0};
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.scheme = Scheme::rk4_deterministic;
    State s{1.0, 0.0, 0.0, 0.0};
    s = advance(m, s, 200, cfg);  // t = 2
    CHECK(std::atan2(s.e_im, s.e_re) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.intensity() == doctest::Approx(1.0).epsilon(1e-10));

    // laser cycle |E|^2 = J, N = 0 under detuning
    LaserModel lm;
    lm.p.j = 1.0;
    lm.p.delta = 3.0;
    IntegratorConfig lcfg;
    lcfg.dt = 1e-4;
    lcfg.scheme = Scheme::rk4_deterministic;
    State u{1.0, 0.0, 0.0, 0.0};
    u = advance(lm, u, 1000, lcfg);  // t = 0.1
    CHECK(std::atan2(u.e_im, u.e_re) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(u.intensity() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(u.n) < 1e-9);
}

TEST_CASE("stochastic runs are bitwise reproducible") {
    LandauStuartModel m;
    m.p = {1.0, 0.0, 4.0};
    NoisePath path(ls_noise(0.05, 321));
    const IntegratorConfig cfg = IntegratorConfig::for_grid(path.spec());
    const State init{1.0, 0.0, 0.0, 0.0};
    const Trace a = run(m, init, 0.0, 5.0, cfg, {&path, 0});
    const Trace b = run(m, init, 0.0, 5.0, cfg, {&path, 0});
    REQUIRE(a.size() == b.size());
    CHECK(a.e_re.back() == b.e_re.back());
    CHECK(a.e_im.back() == b.e_im.back());

    NoisePath other(ls_noise(0.05, 322));
    const Trace c = run(m, init, 0.0, 5.0, cfg, {&other, 0});
    CHECK(c.e_re.back() != a.e_re.back());
}

TEST_CASE("restarting mid-run consumes the same noise cells") {
    LaserModel m;
    m.p.j = 1.0;
    m.p.alpha = 2.0;
    NoiseSpec spec;
    spec.d_ext = 0.2;
    spec.d_e = 0.05;
    spec.d_n = 3.5e-8;
    spec.seed = 99;
    spec.dt_grid = 1e-4;
    NoisePath path(spec);
    const IntegratorConfig cfg = IntegratorConfig::for_grid(spec);
    const State init{0.8, 0.0, 0.1, 0.0};
    const Trace whole = run(m, init, 0.0, 0.2, cfg, {&path, 0});

    const Trace first = run(m, init, 0.0, 0.1, cfg, {&path, 0});
    State mid{first.e_re.back(), first.e_im.back(), first.n.back(), first.t.back()};
    const Trace second = run(m, mid, 0.1, 0.2, cfg, {&path, 0});
    CHECK(second.e_re.back() == whole.e_re.back());
    CHECK(second.e_im.back() == whole.e_im.back());
    CHECK(second.n.back() == whole.n.back());
}

TEST_CASE("external channels are shared while intrinsic channels are per oscillator") {
    LandauStuartModel m;
    m.p = {1.0, 0.0, 1.0};
    NoiseSpec spec = ls_noise(0.02, 7);
    NoisePath path(spec);
    const IntegratorConfig cfg = IntegratorConfig::for_grid(spec);
    const State init{1.0, 0.0, 0.0, 0.0};
    // only external forcing: oscillator identity is invisible
    const Trace a = run(m, init, 0.0, 2.0, cfg, {&path, 0});
    const Trace b = run(m, init, 0.0, 2.0, cfg, {&path, 3});
    CHECK(a.e_re.back() == b.e_re.back());
    CHECK(a.e_im.back() == b.e_im.back());

    // add intrinsic field noise: oscillators now see distinct channels
    spec.d_e = 0.02;
    NoisePath path2(spec);
    const Trace c = run(m, init, 0.0, 2.0, cfg, {&path2, 0});
    const Trace d = run(m, init, 0.0, 2.0, cfg, {&path2, 3});
    CHECK(c.e_re.back() != d.e_re.back());
}

TEST_CASE("coarsening steps over the same path converges at strong order one") {
    LandauStuartModel m;
    m.p = {1.0, 0.0, 2.0};
    const State init{1.0, 0.0, 0.0, 0.0};
    double log_ratio_sum = 0.0;
    const int n_seeds = 5;
    for (int k = 0; k < n_seeds; ++k) {
        NoiseSpec spec = ls_noise(1e-3, 1000 + std::uint64_t(k));
        NoisePath path(spec);
        const PathBinding b{&path, 0};
        const IntegratorConfig fine = IntegratorConfig::for_grid(spec);
        const IntegratorConfig c2 = IntegratorConfig::for_grid(spec, Scheme::stochastic_heun, 1, 2);
        const IntegratorConfig c4 = IntegratorConfig::for_grid(spec, Scheme::stochastic_heun, 1, 4);
        const Trace rf = run(m, init, 0.0, 4.0, fine, b);
        const Trace r2 = run(m, init, 0.0, 4.0, c2, b);
        const Trace r4 = run(m, init, 0.0, 4.0, c4, b);
        const double e2 = std::hypot(r2.e_re.back() - rf.e_re.back(),
                                     r2.e_im.back() - rf.e_im.back());
        const double e4 = std::hypot(r4.e_re.back() - rf.e_re.back(),
                                     r4.e_im.back() - rf.e_im.back());
        REQUIRE(e2 > 0.0);
        log_ratio_sum += std::log2(e4 / e2);
    }
    // strong order 1: halving dt halves the error; allow statistical slack
    const double order = log_ratio_sum / n_seeds;
    CHECK(order > 0.5);
    CHECK(order < 2.2);
}

TEST_CASE("subdividing cells draws iid sub-increments with the right scale") {
    NoiseSpec spec = ls_noise(0.5, 12);
    NoisePath path(spec);
    // variance over many cells at substream 2 should be half the cell variance
    const int n = 20000;
    double v1 = 0.0, v2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = path.increment(i, chan::ext_re, 1);
        const double b = path.increment(i, chan::ext_re, 2);
        v1 += a * a;
        v2 += b * b;
    }
    v1 /= n;
    v2 /= n;
    CHECK(v1 == doctest::Approx(0.5 * spec.dt_grid).epsilon(0.05));
    CHECK(v2 == doctest::Approx(0.25 * spec.dt_grid).epsilon(0.05));

    // the integrator accepts the matching dt and runs
    LandauStuartModel m;
    m.p = {1.0, 0.0, 0.0};
    const IntegratorConfig cfg = IntegratorConfig::for_grid(spec, Scheme::stochastic_heun, 2);
    CHECK_NOTHROW((void)run(m, State{1.0, 0.0, 0.0, 0.0}, 0.0, 1.0, cfg, {&path, 0}));
}

TEST_CASE("tangent propagation matches a finite-difference flow derivative") {
    LandauStuartModel m;
    m.p = {1.3, 0.3, 4.0};
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.scheme = Scheme::rk4_deterministic;

    const State x0{0.9, 0.1, 0.0, 0.0};
    const std::array<double, 2> v0{0.6, -0.8};
    State xs = x0;
    std::array<double, 2> v = v0;
    const int nsteps = 20;
    for (int i = 0; i < nsteps; ++i) {
        auto [nx, nv] = step_with_tangent(m, xs, v, cfg);
        xs = nx;
        v = nv;
    }

    const double eps = 1e-7;
    State up{x0.e_re + eps * v0[0], x0.e_im + eps * v0[1], 0.0, 0.0};
    State dn{x0.e_re - eps * v0[0], x0.e_im - eps * v0[1], 0.0, 0.0};
    up = advance(m, up, nsteps, cfg);
    dn = advance(m, dn, nsteps, cfg);
    const double fd0 = (up.e_re - dn.e_re) / (2.0 * eps);
    const double fd1 = (up.e_im - dn.e_im) / (2.0 * eps);
    CHECK(v[0] == doctest::Approx(fd0).epsilon(1e-6));
    CHECK(v[1] == doctest::Approx(fd1).epsilon(1e-6));
}

TEST_CASE("laser tangent tracks the stiff inversion dynamics") {
    LaserModel m;
    m.p.j = 1.0;
    m.p.alpha = 3.0;
    m.p.delta = 0.5;
    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.scheme = Scheme::rk4_deterministic;

    const State x0{0.3, -0.1, 0.02, 0.0};
    const std::array<double, 3> v0{1.0, 0.5, -0.2};
    State xs = x0;
    std::array<double, 3> v = v0;
    const int nsteps = 100;
    for (int i = 0; i < nsteps; ++i) {
        auto [nx, nv] = step_with_tangent(m, xs, v, cfg);
        xs = nx;
        v = nv;
    }
    const double eps = 1e-8;
    State up{x0.e_re + eps * v0[0], x0.e_im + eps * v0[1], x0.n + eps * v0[2], 0.0};
    State dn{x0.e_re - eps * v0[0], x0.e_im - eps * v0[1], x0.n - eps * v0[2], 0.0};
    up = advance(m, up, nsteps, cfg);
    dn = advance(m, dn, nsteps, cfg);
    CHECK(v[0] == doctest::Approx((up.e_re - dn.e_re) / (2.0 * eps)).epsilon(1e-5));
    CHECK(v[1] == doctest::Approx((up.e_im - dn.e_im) / (2.0 * eps)).epsilon(1e-5));
    CHECK(v[2] == doctest::Approx((up.n - dn.n) / (2.0 * eps)).epsilon(1e-5));

    std::array<double, 3> zero{0.0, 0.0, 0.0};
    CHECK_THROWS_AS((void)step_with_tangent(m, x0, zero, cfg), DomainError);
}

TEST_CASE("blow-ups carry the failure time") {
    LandauStuartModel m;
    m.p = {1e6, 0.0, 0.0};  // enormous pump: radius ~1000 crosses the guard
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.scheme = Scheme::rk4_deterministic;
    bool thrown = false;
    try {
        (void)run(m, State{1.0, 0.0, 0.0, 0.0}, 0.0, 10.0, cfg);
    } catch (const BlowUpError& e) {
        thrown = true;
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 10.0);
    }
    CHECK(thrown);
}

TEST_CASE("trace recording honours the stride and endpoints") {
    LandauStuartModel m;
    m.p = {1.0, 1.0, 0.0};
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.scheme = Scheme::rk4_deterministic;
    cfg.record_stride = 7;
    const Trace tr = run(m, State{1.0, 0.0, 0.0, 0.0}, 0.0, 1.0, cfg);
    // 100 steps: initial point, every 7th step, and the final step
    REQUIRE(tr.size() == 2 + 100 / 7 + (100 % 7 ? 1 : 0));
    CHECK(tr.t.front() == 0.0);
    CHECK(tr.t.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.t[1] == doctest::Approx(0.07).epsilon(1e-12));

    int observed = 0;
    (void)run(m, State{1.0, 0.0, 0.0, 0.0}, 0.0, 1.0, cfg, {},
              [&](std::int64_t, double, const double*) { ++observed; });
    CHECK(observed == 101);

    CHECK_THROWS_AS((void)run(m, State{1.0, 0.0, 0.0, 0.0}, 1.0, 0.0, cfg), ConfigError);
    CHECK_THROWS_AS((void)run(m, State{1.0, 0.0, 0.0, 0.0}, 0.0, 1.003, cfg), ConfigError);
}

TEST_CASE("phase unwrapping accumulates multiple turns") {
    LandauStuartModel m;
    m.p = {1.0, 3.0, 0.0};  // three radians per unit time
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.scheme = Scheme::rk4_deterministic;
    const Trace tr = run(m, State{1.0, 0.0, 0.0, 0.0}, 0.0, 5.0, cfg);
    // total angle 15 rad > 2 turns; unwrapped must not fold back
    CHECK(tr.arg_unwrapped.back() == doctest::Approx(15.0).epsilon(1e-6));
    CHECK(tr.arg_unwrapped.front() == 0.0);
}

TEST_CASE("euler and heun consume the same increments but differ in drift order") {
    LandauStuartModel m;
    m.p = {1.0, 0.0, 2.0};
    NoiseSpec spec = ls_noise(1e-3, 31);
    NoisePath path(spec);
    const PathBinding b{&path, 0};
    IntegratorConfig heun = IntegratorConfig::for_grid(spec, Scheme::stochastic_heun);
    IntegratorConfig euler = IntegratorConfig::for_grid(spec, Scheme::euler_maruyama);
    const State init{1.0, 0.0, 0.0, 0.0};
    const Trace th = run(m, init, 0.0, 1.0, heun, b);
    const Trace te = run(m, init, 0.0, 1.0, euler, b);
    CHECK(th.e_re.back() != te.e_re.back());
    // both stay near the cycle for weak noise
    CHECK(th.intensity.back() == doctest::Approx(1.0).epsilon(0.3));
    CHECK(te.intensity.back() == doctest::Approx(1.0).epsilon(0.3));
}
