#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shearsync/integrate.hpp"
#include "shearsync/models.hpp"
#include "shearsync/noise.hpp"

namespace shearsync {

struct LyapunovSettings {
    double horizon = 500.0;
    double burn_in = -1.0;  // < 0: auto, 20/|Re mu2| of the unforced cycle
    int renorm_every = 10;
    int n_blocks = 25;           // block bootstrap over >= 20 blocks
    int bootstrap_resamples = 200;
    IntegratorConfig integ{};
};

struct LyapunovEstimate {
    double lambda_max = 0.0;
    double std_err = 0.0;
    double t_total = 0.0;
    std::int64_t n_renorm = 0;
    std::uint64_t seed = 0;
    double mean_intensity = 0.0;  // time-average |E|^2 over the horizon
    double burn_in = 0.0;
    double horizon = 0.0;

    // Sign resolved against estimator noise.
    bool resolved(double n_sigma = 2.0) const {
        return std::fabs(lambda_max) >= n_sigma * std_err && std_err > 0.0;
    }
};

// Real parts of the full exponent spectrum from tangent-basis
// orthonormalisation (a FloquetSet holds the closed forms; numeric
// estimation only sees real parts).
struct NumericSpectrum {
    std::array<double, 3> lambda{};  // descending; index >= count unused
    int count = 0;
    FloquetRegime regime = FloquetRegime::underdamped;
};

namespace detail {

// Contiguous block bootstrap for the ratio sum(r)/sum(tau). Deterministic:
// resample indices come from a splitmix64 chain.
double block_bootstrap_stderr(const std::vector<double>& r, const std::vector<double>& tau,
                              int n_blocks, int resamples, std::uint64_t seed);

inline double relaxation_rate(const LaserParams& p) {
    return p.j > 0.0 ? 0.5 * (1.0 + p.g * p.j) : 0.5;
}
inline double relaxation_rate(const LandauStuartParams& p) {
    return p.j > 0.0 ? 2.0 * p.j : 1.0;
}

constexpr std::uint32_t tag_ic = 101;
constexpr std::uint32_t tag_tangent = 102;

}  // namespace detail

// Largest Lyapunov exponent by tangent-vector renormalisation. The initial
// condition is drawn near the cycle from the spec seed; the forcing path is
// the spec seed's realisation. Blow-ups propagate as BlowUpError.
template <class M>
LyapunovEstimate estimate_lambda_max(const M& m, const NoiseSpec& spec,
                                     const LyapunovSettings& settings) {
    settings.integ.validate();
    const NoisePath path(spec);
    const bool stochastic = settings.integ.scheme != Scheme::rk4_deterministic;
    const PathBinding bind = stochastic ? PathBinding{&path, 0} : PathBinding{};
    if (stochastic) settings.integ.check_grid(spec);

    const double burn = settings.burn_in >= 0.0 ? settings.burn_in
                                                : 20.0 / detail::relaxation_rate(m.p);
    if (!(settings.horizon > burn))
        throw ConfigError("lyapunov horizon must exceed burn-in");

    const double dt = settings.integ.dt;
    const auto burn_steps = std::int64_t(std::ceil(burn / dt));
    const auto total_steps = std::int64_t(std::llround((settings.horizon) / dt));

    // Initial condition near the cycle; tangent direction random.
    const double jpos = std::max(m.p.j, 1e-12);
    const double u1 = counter_uniform(spec.seed, 0, detail::tag_ic);
    const double u2 = counter_uniform(spec.seed, 1, detail::tag_ic);
    const double r0 = std::sqrt(jpos) * (0.85 + 0.3 * u1);
    double x[M::dim];
    x[0] = r0 * std::cos(2.0 * M_PI * u2);
    x[1] = r0 * std::sin(2.0 * M_PI * u2);
    if constexpr (M::dim == 3) x[2] = 0.0;

    double v[M::dim], vnorm2 = 0.0;
    for (int i = 0; i < M::dim; ++i) {
        v[i] = counter_uniform(spec.seed, std::uint64_t(i), detail::tag_tangent) - 0.5;
        vnorm2 += v[i] * v[i];
    }
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (int i = 0; i < M::dim; ++i) v[i] *= inv;

    std::vector<double> log_growth, block_tau;
    log_growth.reserve(std::size_t((total_steps - burn_steps) / settings.renorm_every + 2));
    block_tau.reserve(log_growth.capacity());

    double mean_r2 = 0.0;
    std::int64_t n_r2 = 0;
    std::int64_t since_renorm = 0;
    bool accumulating = false;

    auto renorm = [&](std::int64_t step_now) {
        double n2 = 0.0;
        for (int i = 0; i < M::dim; ++i) n2 += v[i] * v[i];
        const double norm = std::sqrt(n2);
        if (accumulating && since_renorm > 0) {
            log_growth.push_back(std::log(norm));
            block_tau.push_back(double(since_renorm) * dt);
        }
        const double s = 1.0 / norm;
        for (int i = 0; i < M::dim; ++i) v[i] *= s;
        since_renorm = 0;
        (void)step_now;
    };

    for (std::int64_t i = 0; i < total_steps; ++i) {
        if (i == burn_steps) {
            renorm(i);  // reset to unit norm, drop transient growth
            accumulating = true;
        }
        step_with_tangent_raw(m, settings.integ, bind, i, x, v);
        ++since_renorm;
        double n2 = 0.0;
        for (int d = 0; d < M::dim; ++d) n2 += v[d] * v[d];
        const bool out_of_range = n2 < 1e-12 || n2 > 1e12;
        if (since_renorm >= settings.renorm_every || out_of_range) renorm(i + 1);
        if (accumulating && (i % 16 == 0)) {
            mean_r2 += x[0] * x[0] + x[1] * x[1];
            ++n_r2;
        }
    }
    renorm(total_steps);

    if (std::ssize(log_growth) < settings.n_blocks)
        throw ConfigError("lyapunov horizon too short for requested bootstrap blocks");

    double sum_r = 0.0, sum_tau = 0.0;
    for (std::size_t k = 0; k < log_growth.size(); ++k) {
        sum_r += log_growth[k];
        sum_tau += block_tau[k];
    }

    LyapunovEstimate est;
    est.lambda_max = sum_r / sum_tau;
    est.std_err = detail::block_bootstrap_stderr(log_growth, block_tau, settings.n_blocks,
                                                 settings.bootstrap_resamples, spec.seed);
    est.t_total = sum_tau;
    est.n_renorm = std::ssize(log_growth);
    est.seed = spec.seed;
    est.mean_intensity = n_r2 > 0 ? mean_r2 / double(n_r2) : 0.0;
    est.burn_in = burn;
    est.horizon = settings.horizon;
    return est;
}

// Repeat the estimate with consecutive derived seeds (independent paths).
template <class M>
std::vector<LyapunovEstimate> lambda_vs_seed(const M& m, const NoiseSpec& spec,
                                             const LyapunovSettings& settings, int n_seeds) {
    if (n_seeds < 1) throw ConfigError("lambda_vs_seed: n_seeds must be >= 1");
    std::vector<LyapunovEstimate> out;
    out.reserve(std::size_t(n_seeds));
    for (int k = 0; k < n_seeds; ++k) {
        NoiseSpec s = spec;
        s.seed = k == 0 ? spec.seed : splitmix64(spec.seed + std::uint64_t(k));
        out.push_back(estimate_lambda_max(m, s, settings));
    }
    return out;
}

// Full spectrum of the unforced model: Benettin with a complete tangent
// basis, modified Gram-Schmidt at each renormalisation.
NumericSpectrum floquet_spectrum_numeric(const LaserParams& p);
NumericSpectrum floquet_spectrum_numeric(const LandauStuartParams& p);

}  // namespace shearsync
