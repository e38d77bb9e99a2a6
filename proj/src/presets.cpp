#include "shearsync/presets.hpp"

#include <cmath>

#include "shearsync/errors.hpp"

namespace shearsync {

namespace {

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    const double la = std::log10(lo), lb = std::log10(hi);
    for (int i = 0; i < n; ++i)
        v[i] = std::pow(10.0, la + (lb - la) * i / double(n - 1));
    return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / double(n - 1);
    return v;
}

Preset make_fig2(const std::string& name, const std::string& forcing,
                 std::vector<double> strengths, const std::string& summary) {
    Preset p;
    p.name = name;
    p.summary = summary;
    ExperimentConfig& c = p.config;
    c.experiment = "ensemble";
    c.model = "laser";
    c.out_dir = "out/" + name;
    c.j = 5.0;
    c.alpha_axis = {0.0, 3.0};
    c.forcing = forcing;
    c.strength_axis = std::move(strengths);
    c.m = 50;
    c.d_e = 0.05;
    c.d_n = 3.5e-8;
    c.ens_horizon = 120.0;
    c.ens_burn_in = 30.0;
    return p;
}

Preset make_fig4(const std::string& name, double alpha) {
    Preset p;
    p.name = name;
    p.summary = "largest-exponent sign over the (D_ext, J) plane, alpha = " +
                std::to_string(int(alpha));
    ExperimentConfig& c = p.config;
    c.experiment = "bifurcation-sweep";
    c.model = "laser";
    c.out_dir = "out/" + name;
    c.sweep_mode = "sweep";
    c.alpha_axis = {alpha};
    c.d_axis = logspace(1e-3, 1e3, 12);
    c.j_axis = logspace(1e-4, 10.0, 12);
    c.horizon = 60.0;
    return p;
}

Preset make_fig5(const std::string& name, double d_ext, const std::string& summary) {
    Preset p;
    p.name = name;
    p.summary = summary;
    ExperimentConfig& c = p.config;
    c.experiment = "pullback";
    c.model = "laser";
    c.out_dir = "out/" + name;
    c.j = 1.0;
    c.alpha = 3.0;
    c.d_ext = d_ext;
    c.t_snapshot = 30.0;
    c.t0_list = {29.0, 28.0, 0.0};
    c.n_points = 2500;
    return p;
}

std::vector<Preset> build() {
    std::vector<Preset> out;

    out.push_back(make_fig2(
        "fig2a", "monochromatic", logspace(1e-3, 10.0, 7),
        "ensemble order-parameter ratio vs resonant injection amplitude, alpha in {0, 3}"));
    out.push_back(make_fig2(
        "fig2b", "white_noise", logspace(1e-4, 100.0, 7),
        "ensemble order-parameter ratio vs external noise intensity, alpha in {0, 3}"));

    {
        Preset p = make_fig2("fig3", "white_noise", {1.0, 10.0},
                             "stationary intensity histograms under strong external noise");
        p.config.write_histograms = 1;
        out.push_back(p);
    }

    out.push_back(make_fig4("fig4a", 0.0));
    out.push_back(make_fig4("fig4b", 3.0));

    out.push_back(make_fig5("fig5-sink", 0.1,
                            "pullback snapshots collapsing onto a random sink (negative exponent)"));
    out.push_back(make_fig5("fig5-rsa", 0.5,
                            "pullback snapshots spreading over a random strange attractor"));

    {
        Preset p;
        p.name = "fig6a";
        p.summary =
            "phase-model d-bifurcation locus in the (D, J) plane at alpha = 6, with "
            "power-law fits";
        ExperimentConfig& c = p.config;
        c.experiment = "bifurcation-sweep";
        c.model = "landau_stuart";
        c.out_dir = "out/fig6a";
        c.sweep_mode = "locate";
        c.bisect_axis = "j";
        c.alpha_axis = {6.0};
        c.d_axis = {3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
        c.j_axis = logspace(1e-3, 1.0, 13);
        c.resolve_sigma = 2.0;
        // the exponent inside the tongue is a few 1e-3 in rescaled time, so
        // resolving its sign takes long horizons (cheap at dt~1e-2)
        c.horizon = 20000.0;
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig6b";
        p.summary = "smallest shear alpha that opens a positive-exponent region (phase model)";
        ExperimentConfig& c = p.config;
        c.experiment = "bifurcation-sweep";
        c.model = "landau_stuart";
        c.out_dir = "out/fig6b";
        c.sweep_mode = "alpha-min";
        c.alpha_lo = 4.0;
        c.alpha_hi = 7.0;
        c.alpha_tol = 0.1;
        c.resolve_sigma = 2.0;
        c.horizon = 20000.0;
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig6c";
        p.summary =
            "below-threshold pump: noise-driven positive-exponent windows vs D_ext, laser "
            "against its phase reduction";
        ExperimentConfig& c = p.config;
        c.experiment = "bifurcation-sweep";
        c.model = "laser";
        c.out_dir = "out/fig6c";
        c.sweep_mode = "compare";
        c.alpha = 3.0;
        c.uplift_j = 5e-5;
        c.uplift_d_axis = logspace(1e-2, 1e2, 17);
        c.resolve_sigma = 2.0;
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig6d";
        p.summary = "sign map comparison, full laser vs phase reduction, alpha = 3";
        ExperimentConfig& c = p.config;
        c.experiment = "bifurcation-sweep";
        c.model = "laser";
        c.out_dir = "out/fig6d";
        c.sweep_mode = "compare";
        c.alpha = 3.0;
        c.d_axis = logspace(1e-2, 1e2, 5);
        c.j_axis = logspace(1e-2, 10.0, 4);
        c.resolve_sigma = 2.0;
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig7";
        p.summary = "relaxation-oscillation exponents vs pump, closed form across both regimes";
        ExperimentConfig& c = p.config;
        c.experiment = "floquet";
        c.model = "laser";
        c.out_dir = "out/fig7";
        c.j_axis = logspace(1e-5, 2000.0, 49);
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig9";
        p.summary = "kicked circle set developing folds under shear (alpha = 2)";
        ExperimentConfig& c = p.config;
        c.experiment = "kicks";
        c.model = "laser";
        c.out_dir = "out/fig9";
        c.kick_experiment = "set";
        c.j = 1.0;
        c.alpha = 2.0;
        c.scheme = "rk4_deterministic";
        c.kick_times = {0.0, 0.25, 0.5, 0.75};
        c.kick_points = 15000;
        c.kick_t_end = 1.0;
        c.kick_snapshots = linspace(0.1, 1.0, 10);
        out.push_back(p);
    }
    {
        Preset p;
        p.name = "fig10";
        p.summary =
            "isochrone-phase bookkeeping: asymptotic phase difference equals the initial "
            "isochrone offset";
        ExperimentConfig& c = p.config;
        c.experiment = "kicks";
        c.model = "laser";
        c.out_dir = "out/fig10";
        c.kick_experiment = "phase-diff";
        c.j = 1.0;
        c.alpha = 3.0;
        c.scheme = "rk4_deterministic";
        c.record_stride = 20;
        c.pd_r1 = 0.5;
        c.pd_r2 = 1.5;
        c.pd_t_end = 8.0;
        out.push_back(p);
    }
    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = build();
    return table;
}

ExperimentConfig preset_config(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p.config;
    std::string names;
    for (const auto& p : presets()) {
        if (!names.empty()) names += ", ";
        names += p.name;
    }
    throw ConfigError("unknown preset '" + name + "' (available: " + names + ")");
}

}  // namespace shearsync
