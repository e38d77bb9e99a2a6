#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shearsync/models.hpp"
#include "shearsync/parallel.hpp"

namespace shearsync {

enum class ExperimentKind {
    lyapunov,
    pullback,
    bifurcation_sweep,
    ensemble,
    kicks,
    floquet,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// One flat bag of knobs covering every experiment kind. Fields irrelevant to
// the selected kind are carried along untouched so a config file round-trips
// losslessly through parse/serialize. All defaults are the desk-scale ones;
// presets override what they need.
struct ExperimentConfig {
    std::string experiment = "lyapunov";
    std::string model = "laser";
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = all logical cores
    std::string exec = "openmp";

    // model parameters (delta is the detuning in the active model's time unit)
    double j = 1.0;
    double delta = 0.0;
    double alpha = 0.0;
    double gamma = 500.0;
    double g = 2.765;

    // noise intensities
    double d_ext = 0.0;
    double d_e = 0.0;
    double d_n = 0.0;

    // integrator (dt = 0 picks the per-model default or the sweep policy)
    double dt = 0.0;
    std::string scheme = "stochastic_heun";
    int record_stride = 1;
    int substeps_per_cell = 1;
    int cells_per_step = 1;

    // largest-exponent estimation
    double horizon = 500.0;
    double burn_in = -1.0;  // < 0 = automatic from the contraction rate
    int renorm_every = 10;
    int n_blocks = 25;
    int bootstrap_resamples = 200;
    double resolve_sigma = 3.0;
    int max_horizon_factor = 16;

    // pullback snapshots
    double t_snapshot = 30.0;
    std::vector<double> t0_list;
    int n_points = 2500;
    double box_half_width = -1.0;  // <= 0 = 2 sqrt(J)
    double ic_n_value = 0.0;
    double cluster_radius = -1.0;  // <= 0 = 1e-3 sqrt(J)

    // parameter-plane sweeps / crossing location / model comparison
    std::string sweep_mode = "sweep";  // sweep | locate | alpha-min | compare
    std::vector<double> d_axis;
    std::vector<double> j_axis;
    std::vector<double> alpha_axis;
    std::string bisect_axis = "j";
    double rel_tol = 0.02;
    double weak_forcing_tol = 0.10;
    double alpha_lo = 4.0;
    double alpha_hi = 7.0;
    double alpha_tol = 0.1;
    double uplift_j = 0.0;  // > 0 enables the fixed-J uplift scan in compare mode
    std::vector<double> uplift_d_axis;

    // ensemble order parameter
    int m = 50;
    std::string forcing = "none";  // none | monochromatic | white_noise
    double k_amp = 0.0;
    double nu_ext = 0.0;
    double ens_horizon = 200.0;
    double ens_burn_in = 50.0;
    int sample_stride = 8;
    int histogram_bins = 64;
    std::vector<double> strength_axis;  // non-empty = forcing-strength curve
    int write_histograms = 0;

    // kicked circle sets and phase-difference bookkeeping
    std::string kick_experiment = "set";  // set | phase-diff
    std::vector<double> kick_times;
    double kick_amplitude = 0.8;
    int kick_wavenumber = 4;
    std::string kick_mode = "multiplicative";
    int kick_points = 15000;
    double kick_t_end = 1.0;
    std::vector<double> kick_snapshots;
    double pd_r1 = 0.5;  // initial radii in units of sqrt(J)
    double pd_r2 = 1.5;
    double pd_t_end = 8.0;

    ExperimentKind kind() const { return experiment_kind_from_string(experiment); }
    ModelKind model_kind() const { return model_kind_from_string(model); }
    ExecPolicy policy() const;
    LaserParams laser_params() const;
    LandauStuartParams ls_params() const;

    // Structural validation of the fields every kind shares; per-module
    // configs run their own validate() when the experiment is assembled.
    void validate() const;
};

// Native config format: "key = value" lines grouped under "[section]"
// headers, values rendered with %.17g and lists comma-separated, so
// parse(serialize(cfg)) reproduces cfg bit for bit. serialize_config_json
// emits the same fields as a nested JSON object (the manifest embedding).
std::string serialize_config(const ExperimentConfig& cfg);
std::string serialize_config_json(const ExperimentConfig& cfg);

// Parses either format: text starting with '{' is JSON (flat, dotted, or
// nested one level by section), anything else is the native key/value format.
// Unknown or mistyped keys throw ConfigError naming the key (and line in the
// native format); fields not mentioned keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Applies one "key=value" override (lists as comma-separated values). Keys
// may be flat ("m") or section-qualified ("ensemble.m").
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// All recognized keys as "section.name", in declaration order.
std::vector<std::string> config_keys();

}  // namespace shearsync
