#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "shearsync/errors.hpp"

namespace shearsync {

enum class ModelKind { laser, landau_stuart };

inline const char* to_string(ModelKind m) {
    return m == ModelKind::laser ? "laser" : "landau_stuart";
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "laser") return ModelKind::laser;
    if (s == "landau_stuart" || s == "landau-stuart" || s == "ls") return ModelKind::landau_stuart;
    throw ConfigError("unknown model '" + s + "' (expected laser or landau_stuart)");
}

struct LaserParams {
    double j = 1.0;       // pump deviation from threshold
    double delta = 0.0;   // detuning
    double alpha = 0.0;   // linewidth enhancement factor (shear)
    double gamma = 500.0; // decay rate
    double g = 2.765;     // gain coefficient

    double g_gamma() const { return g * gamma; }

    void validate() const {
        if (!(gamma > 0.0)) throw ConfigError("laser gamma must be > 0");
        if (!(g > 0.0)) throw ConfigError("laser g must be > 0");
        if (!std::isfinite(j) || !std::isfinite(delta) || !std::isfinite(alpha))
            throw ConfigError("laser parameters must be finite");
    }
};

struct LandauStuartParams {
    double j = 1.0;
    double delta_tilde = 0.0;
    double alpha = 0.0;

    void validate() const {
        if (!std::isfinite(j) || !std::isfinite(delta_tilde) || !std::isfinite(alpha))
            throw ConfigError("Landau-Stuart parameters must be finite");
    }
};

// Field state in real coordinates. n is ignored by the Landau-Stuart model.
struct State {
    double e_re = 0.0;
    double e_im = 0.0;
    double n = 0.0;
    double t = 0.0;

    double intensity() const { return e_re * e_re + e_im * e_im; }
};

enum class FloquetRegime { overdamped, underdamped, landau_stuart };

struct FloquetSet {
    double mu1 = 0.0;  // neutral direction along the cycle, exactly 0
    std::complex<double> mu2{};
    std::complex<double> mu3{};  // landau_stuart regime leaves mu3 = 0 (2-d system)
    FloquetRegime regime = FloquetRegime::underdamped;
};

inline const char* to_string(FloquetRegime r) {
    switch (r) {
        case FloquetRegime::overdamped: return "overdamped";
        case FloquetRegime::underdamped: return "underdamped";
        default: return "landau_stuart";
    }
}

namespace detail {
inline void require_finite_state(const State& s) {
    if (!std::isfinite(s.e_re) || !std::isfinite(s.e_im) || !std::isfinite(s.n))
        throw BlowUpError(s.t, "non-finite state");
}
}  // namespace detail

// dE/dt = i*delta*E + g*gamma*(1 - i*alpha)*N*E
// dN/dt = J - N - (1 + g*N)*|E|^2
inline std::array<double, 3> laser_drift(const State& s, const LaserParams& p) {
    detail::require_finite_state(s);
    const double gg = p.g_gamma();
    const double r2 = s.intensity();
    return {
        -p.delta * s.e_im + gg * s.n * (s.e_re + p.alpha * s.e_im),
        p.delta * s.e_re + gg * s.n * (s.e_im - p.alpha * s.e_re),
        p.j - s.n - (1.0 + p.g * s.n) * r2,
    };
}

// dE/dt~ = [J + i(delta~ - alpha*(J - |E|^2))]*E - E*|E|^2
inline std::array<double, 2> ls_drift(const State& s, const LandauStuartParams& p) {
    detail::require_finite_state(s);
    const double r2 = s.intensity();
    const double phi = p.delta_tilde - p.alpha * (p.j - r2);
    return {
        (p.j - r2) * s.e_re - phi * s.e_im,
        (p.j - r2) * s.e_im + phi * s.e_re,
    };
}

// Row-major 3x3 Jacobian of laser_drift.
inline void laser_jacobian(const State& s, const LaserParams& p, double out[9]) {
    const double gg = p.g_gamma();
    const double one_gn = 1.0 + p.g * s.n;
    out[0] = gg * s.n;
    out[1] = -p.delta + gg * s.n * p.alpha;
    out[2] = gg * (s.e_re + p.alpha * s.e_im);
    out[3] = p.delta - gg * s.n * p.alpha;
    out[4] = gg * s.n;
    out[5] = gg * (s.e_im - p.alpha * s.e_re);
    out[6] = -2.0 * s.e_re * one_gn;
    out[7] = -2.0 * s.e_im * one_gn;
    out[8] = -1.0 - p.g * s.intensity();
}

// Row-major 2x2 Jacobian of ls_drift.
inline void ls_jacobian(const State& s, const LandauStuartParams& p, double out[4]) {
    const double r2 = s.intensity();
    const double phi = p.delta_tilde - p.alpha * (p.j - r2);
    out[0] = (p.j - r2) - 2.0 * s.e_re * s.e_re - 2.0 * p.alpha * s.e_re * s.e_im;
    out[1] = -2.0 * s.e_im * s.e_re - phi - 2.0 * p.alpha * s.e_im * s.e_im;
    out[2] = -2.0 * s.e_re * s.e_im + 2.0 * p.alpha * s.e_re * s.e_re + phi;
    out[3] = (p.j - r2) - 2.0 * s.e_im * s.e_im + 2.0 * p.alpha * s.e_im * s.e_re;
}

// J-regime boundaries (4*gamma*(1 -+ sqrt(1 - 1/(2*gamma))) - 1)/g: between
// them the nonzero exponents form a complex-conjugate pair.
inline std::array<double, 2> floquet_regime_boundaries(const LaserParams& p) {
    const double root = std::sqrt(1.0 - 1.0 / (2.0 * p.gamma));
    return {
        (4.0 * p.gamma * (1.0 - root) - 1.0) / p.g,
        (4.0 * p.gamma * (1.0 + root) - 1.0) / p.g,
    };
}

inline FloquetSet floquet_closed_form(const LaserParams& p) {
    p.validate();
    if (!(p.j > 0.0))
        throw DomainError("floquet_closed_form: no limit cycle for J <= 0");
    const double a = 0.5 * (1.0 + p.g * p.j);
    const double disc = a * a - 2.0 * p.g * p.gamma * p.j;
    FloquetSet f;
    f.mu1 = 0.0;
    if (disc >= 0.0) {
        const double b = std::sqrt(disc);
        f.mu2 = {-a + b, 0.0};
        f.mu3 = {-a - b, 0.0};
        f.regime = FloquetRegime::overdamped;
    } else {
        const double b = std::sqrt(-disc);
        f.mu2 = {-a, b};
        f.mu3 = {-a, -b};
        f.regime = FloquetRegime::underdamped;
    }
    return f;
}

inline FloquetSet floquet_closed_form(const LandauStuartParams& p) {
    p.validate();
    if (!(p.j > 0.0))
        throw DomainError("floquet_closed_form: no limit cycle for J <= 0");
    FloquetSet f;
    f.mu1 = 0.0;
    f.mu2 = {-2.0 * p.j, 0.0};
    f.mu3 = {0.0, 0.0};
    f.regime = FloquetRegime::landau_stuart;
    return f;
}

// Psi = arg(E) + alpha*ln|E|; constant drift rate delta along deterministic
// trajectories. `wrap` reduces the result to (-pi, pi].
inline double phase_psi(const State& s, double alpha, bool wrap = false) {
    const double r2 = s.intensity();
    if (r2 == 0.0) throw DomainError("phase_psi: undefined at E = 0");
    double psi = std::atan2(s.e_im, s.e_re) + 0.5 * alpha * std::log(r2);
    if (wrap) {
        psi = std::remainder(psi, 2.0 * M_PI);
        if (psi <= -M_PI) psi += 2.0 * M_PI;
    }
    return psi;
}

// Points of the isochrone arg(E) + alpha*ln|E| = C, i.e. the logarithmic
// spiral arg = C - alpha*ln r, sampled over [r0, r1].
inline std::vector<std::array<double, 2>> isochrone_points(double c, double alpha,
                                                           double r0, double r1,
                                                           int n_points = 256) {
    if (!(r0 > 0.0) || !(r1 > 0.0))
        throw DomainError("isochrone_points: radius range must exclude 0");
    if (n_points < 2) throw DomainError("isochrone_points: need >= 2 points");
    std::vector<std::array<double, 2>> pts(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double r = r0 + (r1 - r0) * double(i) / double(n_points - 1);
        const double th = c - alpha * std::log(r);
        pts[i] = {r * std::cos(th), r * std::sin(th)};
    }
    return pts;
}

// t~ = t*g*gamma, delta~ = delta/(g*gamma); J and alpha carry over.
inline LandauStuartParams reduce_to_landau_stuart(const LaserParams& p) {
    p.validate();
    return {p.j, p.delta / p.g_gamma(), p.alpha};
}

// -------- integrator-facing model wrappers --------

// Optional deterministic injection K*exp(i*nu*t) added to dE/dt.
struct MonoForcing {
    double k = 0.0;
    double nu = 0.0;
};

struct LaserModel {
    static constexpr int dim = 3;
    LaserParams p{};
    MonoForcing mono{};

    void drift(const double* x, double t, double* f) const {
        const double gg = p.g_gamma();
        const double r2 = x[0] * x[0] + x[1] * x[1];
        f[0] = -p.delta * x[1] + gg * x[2] * (x[0] + p.alpha * x[1]);
        f[1] = p.delta * x[0] + gg * x[2] * (x[1] - p.alpha * x[0]);
        f[2] = p.j - x[2] - (1.0 + p.g * x[2]) * r2;
        if (mono.k != 0.0) {
            f[0] += mono.k * std::cos(mono.nu * t);
            f[1] += mono.k * std::sin(mono.nu * t);
        }
    }

    void jacobian(const double* x, double* jc) const {
        State s{x[0], x[1], x[2], 0.0};
        laser_jacobian(s, p, jc);
    }

    // Noise layout: components 0,1 carry ext + intrinsic field channels,
    // component 2 carries the intrinsic inversion channel.
    static constexpr bool has_inversion_noise = true;

    bool blown_up(const double* x) const {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return !(r2 <= 1e9) || !(std::fabs(x[2]) <= 1e6);
    }
};

struct LandauStuartModel {
    static constexpr int dim = 2;
    LandauStuartParams p{};
    MonoForcing mono{};

    void drift(const double* x, double t, double* f) const {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double phi = p.delta_tilde - p.alpha * (p.j - r2);
        f[0] = (p.j - r2) * x[0] - phi * x[1];
        f[1] = (p.j - r2) * x[1] + phi * x[0];
        if (mono.k != 0.0) {
            f[0] += mono.k * std::cos(mono.nu * t);
            f[1] += mono.k * std::sin(mono.nu * t);
        }
    }

    void jacobian(const double* x, double* jc) const {
        State s{x[0], x[1], 0.0, 0.0};
        ls_jacobian(s, p, jc);
    }

    static constexpr bool has_inversion_noise = false;

    bool blown_up(const double* x) const {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return !(r2 <= 1e9);
    }
};

}  // namespace shearsync
