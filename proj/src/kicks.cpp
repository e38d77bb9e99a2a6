#include "shearsync/kicks.hpp"

#include <cmath>

#include "shearsync/errors.hpp"

namespace shearsync {

const char* to_string(KickMode m) {
    return m == KickMode::multiplicative ? "multiplicative" : "additive";
}

void KickSchedule::validate() const {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw ConfigError("kick times must be finite");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ConfigError("kick times must be strictly increasing");
    }
    if (!std::isfinite(amplitude)) throw ConfigError("kick amplitude must be finite");
    if (angular_wavenumber < 0) throw ConfigError("kick wavenumber must be >= 0");
}

State apply_kick(const State& s, const KickSchedule& sched, bool* clamped) {
    if (clamped) *clamped = false;
    const double r = std::sqrt(s.intensity());
    if (!(r > 0.0)) throw DomainError("apply_kick: phase undefined at E = 0");
    const double theta = std::atan2(s.e_im, s.e_re);
    const double gain = sched.amplitude * std::sin(double(sched.angular_wavenumber) * theta);
    double r_new = sched.mode == KickMode::multiplicative ? r * (1.0 + gain) : r + gain;
    if (!(r_new > 0.0)) {
        r_new = 1e-9;
        if (clamped) *clamped = true;
    }
    State out = s;  // N and t carry over bitwise
    const double scale = r_new / r;
    out.e_re = s.e_re * scale;
    out.e_im = s.e_im * scale;
    return out;
}

std::vector<State> circle_set(double j, int n_points) {
    if (!(j > 0.0)) throw DomainError("circle_set: j must be > 0");
    if (n_points < 3) throw DomainError("circle_set: need >= 3 points");
    const double r = std::sqrt(j);
    std::vector<State> pts(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double th = 2.0 * M_PI * double(i) / double(n_points);
        pts[std::size_t(i)].e_re = r * std::cos(th);
        pts[std::size_t(i)].e_im = r * std::sin(th);
        pts[std::size_t(i)].n = 0.0;
        pts[std::size_t(i)].t = 0.0;
    }
    return pts;
}

namespace {

// Principal angular increments along the closed loop, wraparound included.
std::vector<double> loop_increments(const std::vector<State>& loop) {
    const std::size_t n = loop.size();
    if (n < 3) throw DomainError("loop angle scan: need >= 3 points");
    std::vector<double> inc(n);
    for (std::size_t i = 0; i < n; ++i) {
        const State& a = loop[i];
        const State& b = loop[(i + 1) % n];
        if (!(a.intensity() > 0.0) || !(b.intensity() > 0.0))
            throw DomainError("loop angle scan: point at E = 0");
        double d = std::atan2(b.e_im, b.e_re) - std::atan2(a.e_im, a.e_re);
        if (d > M_PI) d -= 2.0 * M_PI;
        if (d <= -M_PI) d += 2.0 * M_PI;
        inc[i] = d;
    }
    return inc;
}

}  // namespace

double winding_number(const std::vector<State>& loop) {
    double total = 0.0;
    for (double d : loop_increments(loop)) total += d;
    return total / (2.0 * M_PI);
}

int count_folds(const std::vector<State>& loop) {
    const std::vector<double> inc = loop_increments(loop);
    // Count maximal negative runs cyclically: transitions positive -> negative.
    int folds = 0;
    bool any_positive = false;
    for (double d : inc)
        if (d > 0.0) any_positive = true;
    if (!any_positive) return 1;  // the whole loop runs backwards: one global fold
    const std::size_t n = inc.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool prev_neg = inc[(i + n - 1) % n] < 0.0;
        const bool here_neg = inc[i] < 0.0;
        if (here_neg && !prev_neg) ++folds;
    }
    return folds;
}

std::vector<PhaseDiffCurve> phase_difference_experiment(double j,
                                                        const std::vector<PhaseDiffCase>& cases,
                                                        const State& ic1, const State& ic2,
                                                        double t_end,
                                                        const IntegratorConfig& laser_integ,
                                                        const IntegratorConfig& ls_integ) {
    if (!(j > 0.0)) throw DomainError("phase_difference_experiment: j must be > 0");
    if (!(t_end > 0.0)) throw ConfigError("phase_difference_experiment: t_end must be > 0");
    if (laser_integ.scheme != Scheme::rk4_deterministic ||
        ls_integ.scheme != Scheme::rk4_deterministic)
        throw ConfigError("phase_difference_experiment: deterministic integration required");
    const double gg = LaserParams{1.0, 0.0, 0.0}.g_gamma();

    std::vector<PhaseDiffCurve> out;
    for (const PhaseDiffCase& c : cases) {
        PhaseDiffCurve curve;
        curve.model = c.model;
        curve.alpha = c.alpha;
        curve.initial_dpsi = phase_psi(ic1, c.alpha) - phase_psi(ic2, c.alpha);

        Trace tr1, tr2;
        double time_scale = 1.0;
        if (c.model == ModelKind::laser) {
            LaserModel m{LaserParams{j, 0.0, c.alpha}};
            tr1 = run(m, ic1, 0.0, t_end, laser_integ);
            tr2 = run(m, ic2, 0.0, t_end, laser_integ);
        } else {
            LandauStuartModel m{LandauStuartParams{j, 0.0, c.alpha}};
            const double t_end_tilde = t_end * gg;
            tr1 = run(m, ic1, 0.0, t_end_tilde, ls_integ);
            tr2 = run(m, ic2, 0.0, t_end_tilde, ls_integ);
            time_scale = 1.0 / gg;
        }
        curve.t.reserve(tr1.size());
        curve.dphase.reserve(tr1.size());
        for (std::size_t i = 0; i < tr1.size(); ++i) {
            curve.t.push_back(tr1.t[i] * time_scale);
            curve.dphase.push_back(tr1.arg_unwrapped[i] - tr2.arg_unwrapped[i]);
        }
        curve.final_dphase = curve.dphase.back();
        out.push_back(std::move(curve));
    }
    return out;
}

}  // namespace shearsync
