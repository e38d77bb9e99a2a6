#pragma once

#include <cstdint>
#include <vector>

#include "shearsync/integrate.hpp"
#include "shearsync/models.hpp"
#include "shearsync/parallel.hpp"

namespace shearsync {

enum class ForcingKind { none, monochromatic, white_noise };

const char* to_string(ForcingKind f);

struct EnsembleForcing {
    ForcingKind kind = ForcingKind::none;
    double k = 0.0;       // monochromatic amplitude
    double nu_ext = 0.0;  // monochromatic frequency (fixed frame)
    double d_ext = 0.0;   // white-noise intensity
};

struct EnsembleConfig {
    int m = 50;
    EnsembleForcing forcing;
    double d_e = 0.05;     // intrinsic field noise, per component
    double d_n = 3.5e-8;   // intrinsic inversion noise
    double horizon = 200.0;
    double burn_in = 50.0;
    IntegratorConfig integ;
    int sample_stride = 8;    // order-parameter sampling cadence, in steps
    int histogram_bins = 64;

    void validate() const;
};

enum class SyncClass { synchronised, partial, unsynchronised, trivial };

const char* to_string(SyncClass s);

struct Histogram {
    std::vector<double> edges;  // bins + 1
    std::vector<double> mass;   // bins, sums to 1
};

struct OrderParameterResult {
    int m = 0;
    double mean_im = 0.0;   // time average of |sum_j E_j|^2 after burn-in
    double mean_ifr = 0.0;  // unforced single-laser average intensity
    double ratio = 0.0;     // mean_im / (m^2 * mean_ifr)
    double im_min = 0.0, im_max = 0.0;
    std::vector<double> im_samples;  // decimated I_M(t) record
    double sample_dt = 0.0;
    Histogram histogram;
    SyncClass sync_class = SyncClass::unsynchronised;
    std::vector<State> final_states;
};

// Deterministic seeding of ensemble members (uniform ring around the cycle);
// member index cfg.m is the unforced baseline run.
State ensemble_initial_state(const LaserParams& p, std::uint64_t seed, int member);

// M identical lasers share the external forcing channels and carry
// independent intrinsic channels; I_M(t) accumulates after burn-in and the
// baseline intensity comes from a separate unforced single-laser run with
// the same intrinsic intensities.
OrderParameterResult run_ensemble(const LaserParams& p, const EnsembleConfig& cfg,
                                  std::uint64_t seed, ExecPolicy policy = ExecPolicy::serial);

SyncClass classify_sync(double ratio, int m);

Histogram histogram_im(const std::vector<double>& samples, int bins);

struct ForcingCurvePoint {
    double strength = 0.0;
    double mean_im = 0.0, mean_ifr = 0.0, ratio = 0.0;
    SyncClass sync_class = SyncClass::unsynchronised;
    bool failed = false;   // blow-up at this point
    double fail_time = 0.0;
};

// Ratio-vs-strength curve along the template's forcing axis (K for
// monochromatic, D_ext for white noise). Per-point blow-ups are recorded and
// the sweep continues.
std::vector<ForcingCurvePoint> sweep_forcing_strength(const LaserParams& p,
                                                      const EnsembleConfig& cfg_template,
                                                      const std::vector<double>& strengths,
                                                      std::uint64_t seed,
                                                      ExecPolicy policy = ExecPolicy::serial);

}  // namespace shearsync
