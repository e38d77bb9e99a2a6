#include "doctest.h"

#include <array>
#include <cmath>

#include "shearsync/models.hpp"

using namespace shearsync;

namespace {

LaserParams laser_defaults() {
    LaserParams p;
    p.j = 1.0;
    p.delta = 0.0;
    p.alpha = 0.0;
    return p;
}

// central-difference jacobian oracle for the 3-d field equations
void fd_laser_jacobian(const State& s, const LaserParams& p, double out[9]) {
    const double h = 1e-6;
    for (int col = 0; col < 3; ++col) {
        State up = s, dn = s;
        double* pu = col == 0 ? &up.e_re : col == 1 ? &up.e_im : &up.n;
        double* pd = col == 0 ? &dn.e_re : col == 1 ? &dn.e_im : &dn.n;
        *pu += h;
        *pd -= h;
        const auto fu = laser_drift(up, p);
        const auto fd = laser_drift(dn, p);
        for (int row = 0; row < 3; ++row)
            out[3 * row + col] = (fu[row] - fd[row]) / (2.0 * h);
    }
}

void fd_ls_jacobian(const State& s, const LandauStuartParams& p, double out[4]) {
    const double h = 1e-7;
    for (int col = 0; col < 2; ++col) {
        State up = s, dn = s;
        double* pu = col == 0 ? &up.e_re : &up.e_im;
        double* pd = col == 0 ? &dn.e_re : &dn.e_im;
        *pu += h;
        *pd -= h;
        const auto fu = ls_drift(up, p);
        const auto fd = ls_drift(dn, p);
        for (int row = 0; row < 2; ++row)
            out[2 * row + col] = (fu[row] - fd[row]) / (2.0 * h);
    }
}

}  // namespace

TEST_CASE("laser drift hand value") {
    LaserParams p = laser_defaults();
    p.delta = 0.5;
    p.alpha = 2.0;
    // g*gamma = 1382.5; r2 = 0.1; worked by hand:
    //   f0 = 0.05 + 27.65*0.1          = 2.815
    //   f1 = 0.15 + 27.65*(-0.7)       = -19.205
    //   f2 = 0.98 - 1.0553*0.1         = 0.87447
    const State s{0.3, -0.1, 0.02, 0.0};
    const auto f = laser_drift(s, p);
    CHECK(f[0] == doctest::Approx(2.815).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(-19.205).epsilon(1e-12));
    CHECK(f[2] == doctest::Approx(0.87447).epsilon(1e-12));
}

TEST_CASE("landau-stuart drift hand value") {
    LandauStuartParams p{2.0, 0.3, 1.5};
    // on the cycle r2 = J the radial term vanishes and phi = delta~
    const auto on = ls_drift(State{1.0, -1.0, 0.0, 0.0}, p);
    CHECK(on[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(on[1] == doctest::Approx(0.3).epsilon(1e-12));
    // generic point r2 = 0.5: phi = 0.3 - 1.5*1.5 = -1.95
    const auto f = ls_drift(State{0.5, 0.5, 0.0, 0.0}, p);
    CHECK(f[0] == doctest::Approx(1.725).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(-0.225).epsilon(1e-12));
}

TEST_CASE("laser equilibria and cycle rotation") {
    LaserParams p = laser_defaults();
    p.j = 2.5;
    const auto off = laser_drift(State{0.0, 0.0, p.j, 0.0}, p);
    CHECK(off[0] == 0.0);
    CHECK(off[1] == 0.0);
    CHECK(off[2] == 0.0);

    // on the cycle |E|^2 = J, N = 0 the drift is a pure rotation at rate delta
    p.delta = 3.0;
    p.alpha = 7.0;  // alpha invisible on the cycle since N = 0
    const double r = std::sqrt(p.j);
    const State on{r * std::cos(1.1), r * std::sin(1.1), 0.0, 0.0};
    const auto f = laser_drift(on, p);
    CHECK(f[0] == doctest::Approx(-p.delta * on.e_im).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(p.delta * on.e_re).epsilon(1e-12));
    CHECK(f[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("non-finite states are rejected as blow-ups") {
    LaserParams p = laser_defaults();
    State s{std::nan(""), 0.0, 0.0, 4.5};
    CHECK_THROWS_AS((void)laser_drift(s, p), BlowUpError);
    try {
        (void)laser_drift(s, p);
    } catch (const BlowUpError& e) {
        CHECK(e.time() == 4.5);
    }
    LandauStuartParams lp{1.0, 0.0, 0.0};
    State q{0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    CHECK_THROWS_AS((void)ls_drift(q, lp), BlowUpError);
}

TEST_CASE("analytic jacobians match central differences") {
    LaserParams p = laser_defaults();
    p.delta = 0.7;
    p.alpha = 3.0;
    const State s{0.4, -0.25, 0.013, 0.0};
    double a[9], fd[9];
    laser_jacobian(s, p, a);
    fd_laser_jacobian(s, p, fd);
    for (int i = 0; i < 9; ++i)
        CHECK(a[i] == doctest::Approx(fd[i]).epsilon(5e-5).scale(1e3));

    LandauStuartParams lp{1.5, 0.4, 6.0};
    const State q{0.8, 0.55, 0.0, 0.0};
    double b[4], fdb[4];
    ls_jacobian(q, lp, b);
    fd_ls_jacobian(q, lp, fdb);
    for (int i = 0; i < 4; ++i)
        CHECK(b[i] == doctest::Approx(fdb[i]).epsilon(5e-6).scale(10.0));
}

TEST_CASE("floquet closed form at unit pump") {
    LaserParams p = laser_defaults();
    const FloquetSet f = floquet_closed_form(p);
    CHECK(f.mu1 == 0.0);
    CHECK(f.regime == FloquetRegime::underdamped);
    // a = (1 + g J)/2 = 1.8825; imag = sqrt(2 g gamma J - a^2)
    CHECK(f.mu2.real() == doctest::Approx(-1.8825).epsilon(1e-12));
    CHECK(f.mu2.imag() == doctest::Approx(52.5495594).epsilon(1e-7));
    CHECK(f.mu3 == std::conj(f.mu2));
    // consistency: |mu|^2 equals the characteristic-polynomial constant term
    CHECK(std::norm(f.mu2) ==
          doctest::Approx(2.0 * p.g * p.gamma * p.j).epsilon(1e-12));
}

TEST_CASE("floquet regime boundaries") {
    LaserParams p = laser_defaults();
    const auto b = floquet_regime_boundaries(p);
    CHECK(b[0] == doctest::Approx(9.0462e-5).epsilon(1e-4));
    CHECK(b[1] == doctest::Approx(1445.93).epsilon(1e-5));

    // below the lower boundary: real pair, both negative, mu2 >= mu3
    p.j = 5e-5;
    FloquetSet lo = floquet_closed_form(p);
    CHECK(lo.regime == FloquetRegime::overdamped);
    CHECK(lo.mu2.imag() == 0.0);
    CHECK(lo.mu2.real() < 0.0);
    CHECK(lo.mu2.real() >= lo.mu3.real());

    // between the boundaries: conjugate pair
    p.j = 1.0;
    CHECK(floquet_closed_form(p).regime == FloquetRegime::underdamped);
    p.j = 1000.0;
    CHECK(floquet_closed_form(p).regime == FloquetRegime::underdamped);

    // above the upper boundary: overdamped again
    p.j = 2000.0;
    CHECK(floquet_closed_form(p).regime == FloquetRegime::overdamped);

    p.j = 0.0;
    CHECK_THROWS_AS((void)floquet_closed_form(p), DomainError);
}

TEST_CASE("landau-stuart floquet set") {
    LandauStuartParams p{2.0, 0.0, 5.0};
    const FloquetSet f = floquet_closed_form(p);
    CHECK(f.mu1 == 0.0);
    CHECK(f.mu2 == std::complex<double>(-4.0, 0.0));
    CHECK(f.mu3 == std::complex<double>(0.0, 0.0));
    CHECK(f.regime == FloquetRegime::landau_stuart);
    p.j = -1.0;
    CHECK_THROWS_AS((void)floquet_closed_form(p), DomainError);
}

TEST_CASE("shear phase from polar construction") {
    const double r = std::exp(0.4);
    const double th = 0.3;
    const State s{r * std::cos(th), r * std::sin(th), 0.0, 0.0};
    CHECK(phase_psi(s, 2.0) == doctest::Approx(0.3 + 2.0 * 0.4).epsilon(1e-12));
    CHECK(phase_psi(s, 0.0) == doctest::Approx(0.3).epsilon(1e-12));

    // wrapping folds into (-pi, pi]
    const double rw = std::exp(1.0);
    const State w{rw * std::cos(1.5), rw * std::sin(1.5), 0.0, 0.0};
    CHECK(phase_psi(w, 3.0, true) ==
          doctest::Approx(4.5 - 2.0 * M_PI).epsilon(1e-12));

    CHECK_THROWS_AS((void)phase_psi(State{}, 1.0), DomainError);
}

TEST_CASE("isochrone points satisfy the defining level set") {
    const double c = 0.7, alpha = 2.5;
    const auto pts = isochrone_points(c, alpha, 0.1, 3.0, 64);
    REQUIRE(pts.size() == 64);
    CHECK(std::hypot(pts.front()[0], pts.front()[1]) ==
          doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::hypot(pts.back()[0], pts.back()[1]) ==
          doctest::Approx(3.0).epsilon(1e-12));
    for (const auto& q : pts) {
        const State s{q[0], q[1], 0.0, 0.0};
        const double psi = phase_psi(s, alpha);
        // same level set modulo 2 pi (atan2 branch cuts allowed)
        CHECK(std::remainder(psi - c, 2.0 * M_PI) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)isochrone_points(0.0, 1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)isochrone_points(0.0, 1.0, 0.5, 1.0, 1), DomainError);
}

TEST_CASE("amplitude-equation reduction rescales detuning only") {
    LaserParams p = laser_defaults();
    p.j = 0.8;
    p.delta = 138.25;
    p.alpha = 4.0;
    const LandauStuartParams r = reduce_to_landau_stuart(p);
    CHECK(r.j == 0.8);
    CHECK(r.alpha == 4.0);
    CHECK(r.delta_tilde == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("model wrappers agree with the free drift functions") {
    LaserModel m;
    m.p.j = 1.3;
    m.p.delta = 0.2;
    m.p.alpha = 1.0;
    const State s{0.5, -0.7, 0.01, 0.0};
    const double x[3] = {s.e_re, s.e_im, s.n};
    double f[3];
    m.drift(x, 0.0, f);
    const auto ref = laser_drift(s, m.p);
    CHECK(f[0] == ref[0]);
    CHECK(f[1] == ref[1]);
    CHECK(f[2] == ref[2]);

    // monochromatic injection adds k*(cos, sin) to the field components
    m.mono = {0.25, 2.0};
    m.drift(x, 0.0, f);
    CHECK(f[0] == doctest::Approx(ref[0] + 0.25).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(ref[1]).epsilon(1e-12));
    const double tq = M_PI / 4.0;  // nu*t = pi/2
    m.drift(x, tq, f);
    CHECK(f[0] == doctest::Approx(ref[0]).scale(1.0).epsilon(1e-10));
    CHECK(f[1] == doctest::Approx(ref[1] + 0.25).epsilon(1e-10));

    LandauStuartModel ls;
    ls.p = {1.5, 0.4, 6.0};
    const State q{0.8, 0.55, 0.0, 0.0};
    const double xq[2] = {q.e_re, q.e_im};
    double g2[2];
    ls.drift(xq, 0.0, g2);
    const auto lref = ls_drift(q, ls.p);
    CHECK(g2[0] == lref[0]);
    CHECK(g2[1] == lref[1]);
}

TEST_CASE("blow-up predicates") {
    LaserModel m;
    const double fine[3] = {1.0, 1.0, 5.0};
    CHECK_FALSE(m.blown_up(fine));
    const double big_field[3] = {4e4, 4e4, 0.0};
    CHECK(m.blown_up(big_field));
    const double big_n[3] = {0.0, 0.0, 2e6};
    CHECK(m.blown_up(big_n));
    const double nan_state[3] = {std::nan(""), 0.0, 0.0};
    CHECK(m.blown_up(nan_state));

    LandauStuartModel ls;
    const double ok[2] = {100.0, 100.0};
    CHECK_FALSE(ls.blown_up(ok));
    const double bad[2] = {4e4, 4e4};
    CHECK(ls.blown_up(bad));
}

TEST_CASE("model kind parsing") {
    CHECK(model_kind_from_string("laser") == ModelKind::laser);
    CHECK(model_kind_from_string("landau_stuart") == ModelKind::landau_stuart);
    CHECK(model_kind_from_string("landau-stuart") == ModelKind::landau_stuart);
    CHECK(model_kind_from_string("ls") == ModelKind::landau_stuart);
    CHECK_THROWS_AS((void)model_kind_from_string("pendulum"), ConfigError);
    CHECK(to_string(ModelKind::laser) == std::string("laser"));
    CHECK(to_string(ModelKind::landau_stuart) == std::string("landau_stuart"));
}

TEST_CASE("parameter validation") {
    LaserParams p = laser_defaults();
    p.gamma = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = laser_defaults();
    p.g = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = laser_defaults();
    p.alpha = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigError);

    LandauStuartParams lp{1.0, std::nan(""), 0.0};
    CHECK_THROWS_AS(lp.validate(), ConfigError);
}
