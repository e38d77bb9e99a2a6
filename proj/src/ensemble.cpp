#include "shearsync/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "shearsync/errors.hpp"
#include "shearsync/lyapunov.hpp"
#include "shearsync/philox.hpp"

namespace shearsync {

const char* to_string(ForcingKind f) {
    switch (f) {
        case ForcingKind::none: return "none";
        case ForcingKind::monochromatic: return "monochromatic";
        default: return "white_noise";
    }
}

const char* to_string(SyncClass s) {
    switch (s) {
        case SyncClass::synchronised: return "synchronised";
        case SyncClass::partial: return "partial";
        case SyncClass::unsynchronised: return "unsynchronised";
        default: return "trivial";
    }
}

void EnsembleConfig::validate() const {
    if (m < 1) throw ConfigError("ensemble: m must be >= 1");
    if (forcing.k < 0.0) throw ConfigError("ensemble: monochromatic amplitude must be >= 0");
    if (forcing.d_ext < 0.0 || d_e < 0.0 || d_n < 0.0)
        throw ConfigError("ensemble: noise intensities must be >= 0");
    if (!(horizon > burn_in)) throw ConfigError("ensemble: horizon must exceed burn_in");
    if (!(burn_in >= 0.0)) throw ConfigError("ensemble: burn_in must be >= 0");
    if (sample_stride < 1) throw ConfigError("ensemble: sample_stride must be >= 1");
    if (histogram_bins < 1) throw ConfigError("ensemble: histogram_bins must be >= 1");
    integ.validate();
    if (integ.scheme == Scheme::rk4_deterministic)
        throw ConfigError("ensemble always consumes a noise path; use a stochastic scheme "
                          "(zero intensities make it deterministic)");
}

State ensemble_initial_state(const LaserParams& p, std::uint64_t seed, int member) {
    const double u = counter_uniform(seed, 2 * std::int64_t(member), detail::tag_ic);
    const double u2 = counter_uniform(seed, 2 * std::int64_t(member) + 1, detail::tag_ic);
    const double r = std::sqrt(p.j) * (0.85 + 0.3 * u);
    const double th = 2.0 * M_PI * u2;
    State s;
    s.e_re = r * std::cos(th);
    s.e_im = r * std::sin(th);
    s.n = 0.0;
    s.t = 0.0;
    return s;
}

SyncClass classify_sync(double ratio, int m) {
    if (m < 1) throw ConfigError("classify_sync: m must be >= 1");
    if (ratio > 1.2) return SyncClass::trivial;
    if (ratio >= 0.8) return SyncClass::synchronised;
    if (ratio * double(m) <= 1.2) return SyncClass::unsynchronised;
    return SyncClass::partial;
}

Histogram histogram_im(const std::vector<double>& samples, int bins) {
    if (samples.empty()) throw DomainError("histogram_im: no samples");
    if (bins < 1) throw ConfigError("histogram_im: bins must be >= 1");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    Histogram h;
    if (!(hi > lo)) {
        const double eps = std::max(1e-12, std::fabs(lo) * 1e-12);
        h.edges = {lo - eps, lo + eps};
        h.mass = {1.0};
        return h;
    }
    h.edges.resize(std::size_t(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.edges[std::size_t(b)] = lo + (hi - lo) * double(b) / double(bins);
    h.mass.assign(std::size_t(bins), 0.0);
    const double w = 1.0 / double(samples.size());
    for (double x : samples) {
        int b = int(double(bins) * (x - lo) / (hi - lo));
        b = std::min(std::max(b, 0), bins - 1);
        h.mass[std::size_t(b)] += w;
    }
    return h;
}

namespace {

// Lock-step advance of n_members trajectories over [0, horizon]; samples the
// reducer at every sample_stride boundary strictly after the burn-in.
template <class Reduce>
void lockstep(const LaserModel& model, const NoisePath& path, const EnsembleConfig& cfg,
              std::vector<std::array<double, 3>>& xs, ExecPolicy policy, const Reduce& reduce) {
    const double dt = cfg.integ.dt;
    const auto n_total = std::int64_t(std::llround(cfg.horizon / dt));
    if (std::fabs(cfg.horizon - double(n_total) * dt) > 1e-6 * std::max(1.0, cfg.horizon))
        throw ConfigError("ensemble: horizon must be a whole number of steps");
    const auto n_burn = std::int64_t(std::llround(cfg.burn_in / dt));

    const std::size_t n_members = xs.size();
    std::vector<double> blow_t(n_members, std::numeric_limits<double>::quiet_NaN());

    std::int64_t i = 0;
    while (i < n_total) {
        const std::int64_t chunk = std::min<std::int64_t>(cfg.sample_stride, n_total - i);
        parallel_for(policy, n_members, [&](std::size_t jm) {
            double* x = xs[jm].data();
            try {
                for (std::int64_t k = 0; k < chunk; ++k)
                    step_raw(model, cfg.integ, PathBinding{&path, std::uint32_t(jm)}, i + k, x);
            } catch (const BlowUpError& e) {
                blow_t[jm] = e.time();
            }
        });
        i += chunk;
        for (std::size_t jm = 0; jm < n_members; ++jm)
            if (!std::isnan(blow_t[jm]))
                throw BlowUpError(blow_t[jm],
                                  "ensemble member " + std::to_string(jm) + " blew up");
        if (i > n_burn) reduce(i);
    }
}

}  // namespace

OrderParameterResult run_ensemble(const LaserParams& p, const EnsembleConfig& cfg,
                                  std::uint64_t seed, ExecPolicy policy) {
    p.validate();
    cfg.validate();

    NoiseSpec spec;
    spec.d_ext = cfg.forcing.kind == ForcingKind::white_noise ? cfg.forcing.d_ext : 0.0;
    spec.d_e = cfg.d_e;
    spec.d_n = cfg.d_n;
    spec.seed = seed;
    spec.dt_grid =
        cfg.integ.dt * double(cfg.integ.substeps_per_cell) / double(cfg.integ.cells_per_step);
    spec.validate();
    cfg.integ.check_grid(spec);

    LaserModel model{p};
    if (cfg.forcing.kind == ForcingKind::monochromatic)
        model.mono = MonoForcing{cfg.forcing.k, cfg.forcing.nu_ext};

    NoisePath path(spec);
    std::vector<std::array<double, 3>> xs(std::size_t(cfg.m));
    for (int jm = 0; jm < cfg.m; ++jm) {
        const State s0 = ensemble_initial_state(p, seed, jm);
        xs[std::size_t(jm)] = {s0.e_re, s0.e_im, s0.n};
    }

    OrderParameterResult r;
    r.m = cfg.m;
    r.sample_dt = double(cfg.sample_stride) * cfg.integ.dt;
    double sum_im = 0.0;
    r.im_min = std::numeric_limits<double>::infinity();
    r.im_max = 0.0;
    lockstep(model, path, cfg, xs, policy, [&](std::int64_t) {
        double sx = 0.0, sy = 0.0, s1 = 0.0;
        for (const auto& x : xs) {
            sx += x[0];
            sy += x[1];
            s1 += std::sqrt(x[0] * x[0] + x[1] * x[1]);
        }
        const double im = sx * sx + sy * sy;
        if (im > s1 * s1 * (1.0 + 1e-12) + 1e-300)
            throw std::logic_error("order parameter exceeded the triangle-inequality bound");
        sum_im += im;
        r.im_samples.push_back(im);
        r.im_min = std::min(r.im_min, im);
        r.im_max = std::max(r.im_max, im);
    });
    if (r.im_samples.empty()) throw ConfigError("ensemble: no samples after burn-in");
    r.mean_im = sum_im / double(r.im_samples.size());
    for (const auto& x : xs) {
        State s;
        s.e_re = x[0];
        s.e_im = x[1];
        s.n = x[2];
        s.t = cfg.horizon;
        r.final_states.push_back(s);
    }

    // Free-running baseline: forcing off, same intrinsic intensities, fresh
    // channel block (member index m) so it shares nothing with the ensemble.
    NoiseSpec fr = spec;
    fr.d_ext = 0.0;
    NoisePath fr_path(fr);
    LaserModel fr_model{p};
    std::vector<std::array<double, 3>> fx(1);
    const State fr0 = ensemble_initial_state(p, seed, cfg.m);
    fx[0] = {fr0.e_re, fr0.e_im, fr0.n};
    // Rebind the single member to channel block m by shifting through a
    // dedicated lockstep call.
    {
        const double dt = cfg.integ.dt;
        const auto n_total = std::int64_t(std::llround(cfg.horizon / dt));
        const auto n_burn = std::int64_t(std::llround(cfg.burn_in / dt));
        double sum = 0.0;
        std::int64_t count = 0;
        double* x = fx[0].data();
        for (std::int64_t i = 0; i < n_total; ++i) {
            step_raw(fr_model, cfg.integ, PathBinding{&fr_path, std::uint32_t(cfg.m)}, i, x);
            if (i + 1 > n_burn && (i + 1) % cfg.sample_stride == 0) {
                sum += x[0] * x[0] + x[1] * x[1];
                ++count;
            }
        }
        if (count == 0) throw ConfigError("ensemble: baseline produced no samples");
        r.mean_ifr = sum / double(count);
    }
    if (!(r.mean_ifr > 0.0)) throw DomainError("ensemble: baseline intensity is zero");

    r.ratio = r.mean_im / (double(cfg.m) * double(cfg.m) * r.mean_ifr);
    r.histogram = histogram_im(r.im_samples, cfg.histogram_bins);
    r.sync_class = classify_sync(r.ratio, cfg.m);
    return r;
}

std::vector<ForcingCurvePoint> sweep_forcing_strength(const LaserParams& p,
                                                      const EnsembleConfig& cfg_template,
                                                      const std::vector<double>& strengths,
                                                      std::uint64_t seed, ExecPolicy policy) {
    if (cfg_template.forcing.kind == ForcingKind::none)
        throw ConfigError("sweep_forcing_strength: template must select a forcing axis");
    for (double s : strengths)
        if (!(s >= 0.0)) throw ConfigError("sweep_forcing_strength: strengths must be >= 0");

    std::vector<ForcingCurvePoint> out(strengths.size());
    parallel_for(policy, strengths.size(), [&](std::size_t i) {
        EnsembleConfig c = cfg_template;
        if (c.forcing.kind == ForcingKind::monochromatic) c.forcing.k = strengths[i];
        else c.forcing.d_ext = strengths[i];
        ForcingCurvePoint& pt = out[i];
        pt.strength = strengths[i];
        try {
            const OrderParameterResult r =
                run_ensemble(p, c, splitmix64(seed + 0x9E3779B97F4A7C15ULL * (i + 1)),
                             ExecPolicy::serial);
            pt.mean_im = r.mean_im;
            pt.mean_ifr = r.mean_ifr;
            pt.ratio = r.ratio;
            pt.sync_class = r.sync_class;
        } catch (const BlowUpError& e) {
            pt.failed = true;
            pt.fail_time = e.time();
        }
    });
    return out;
}

}  // namespace shearsync
