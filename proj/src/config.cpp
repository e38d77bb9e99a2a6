#include "shearsync/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "shearsync/errors.hpp"
#include "shearsync/io.hpp"

namespace shearsync {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::lyapunov: return "lyapunov";
        case ExperimentKind::pullback: return "pullback";
        case ExperimentKind::bifurcation_sweep: return "bifurcation-sweep";
        case ExperimentKind::ensemble: return "ensemble";
        case ExperimentKind::kicks: return "kicks";
        case ExperimentKind::floquet: return "floquet";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "lyapunov") return ExperimentKind::lyapunov;
    if (s == "pullback") return ExperimentKind::pullback;
    if (s == "bifurcation-sweep" || s == "bifurcation_sweep")
        return ExperimentKind::bifurcation_sweep;
    if (s == "ensemble") return ExperimentKind::ensemble;
    if (s == "kicks") return ExperimentKind::kicks;
    if (s == "floquet") return ExperimentKind::floquet;
    throw ConfigError("unknown experiment kind '" + s +
                      "' (expected lyapunov, pullback, bifurcation-sweep, ensemble, kicks, "
                      "or floquet)");
}

ExecPolicy ExperimentConfig::policy() const {
    if (exec == "serial") return ExecPolicy::serial;
    if (exec == "openmp") return ExecPolicy::openmp;
    throw ConfigError("unknown exec policy '" + exec + "' (expected serial or openmp)");
}

LaserParams ExperimentConfig::laser_params() const {
    LaserParams p;
    p.j = j;
    p.delta = delta;
    p.alpha = alpha;
    p.gamma = gamma;
    p.g = g;
    return p;
}

LandauStuartParams ExperimentConfig::ls_params() const {
    LandauStuartParams p;
    p.j = j;
    p.delta_tilde = delta;
    p.alpha = alpha;
    return p;
}

void ExperimentConfig::validate() const {
    kind();
    model_kind();
    policy();
    if (workers < 0) throw ConfigError("workers must be >= 0");
    if (!(j > 0.0)) throw ConfigError("j must be > 0");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
    if (!(g > 0.0)) throw ConfigError("g must be > 0");
    if (d_ext < 0.0 || d_e < 0.0 || d_n < 0.0)
        throw ConfigError("noise intensities must be >= 0");
    if (dt < 0.0) throw ConfigError("dt must be >= 0 (0 = automatic)");
    scheme_from_string(scheme);
    if (sweep_mode != "sweep" && sweep_mode != "locate" && sweep_mode != "alpha-min" &&
        sweep_mode != "compare")
        throw ConfigError("unknown sweep_mode '" + sweep_mode +
                          "' (expected sweep, locate, alpha-min, or compare)");
    if (bisect_axis != "d_ext" && bisect_axis != "j" && bisect_axis != "alpha")
        throw ConfigError("unknown bisect_axis '" + bisect_axis +
                          "' (expected d_ext, j, or alpha)");
    if (forcing != "none" && forcing != "monochromatic" && forcing != "white_noise")
        throw ConfigError("unknown forcing '" + forcing +
                          "' (expected none, monochromatic, or white_noise)");
    if (kick_mode != "multiplicative" && kick_mode != "additive")
        throw ConfigError("unknown kick_mode '" + kick_mode +
                          "' (expected multiplicative or additive)");
    if (kick_experiment != "set" && kick_experiment != "phase-diff")
        throw ConfigError("unknown kick_experiment '" + kick_experiment +
                          "' (expected set or phase-diff)");
    if (write_histograms != 0 && write_histograms != 1)
        throw ConfigError("write_histograms must be 0 or 1");
}

namespace {

enum class FieldType { f64, i32, u64, str, f64list };

struct BoundField {
    const char* section;
    const char* name;
    FieldType type;
    double* f = nullptr;
    int* i = nullptr;
    std::uint64_t* u = nullptr;
    std::string* s = nullptr;
    std::vector<double>* list = nullptr;
};

BoundField fd(const char* sec, const char* name, double& v) {
    BoundField b{sec, name, FieldType::f64};
    b.f = &v;
    return b;
}
BoundField fi(const char* sec, const char* name, int& v) {
    BoundField b{sec, name, FieldType::i32};
    b.i = &v;
    return b;
}
BoundField fu(const char* sec, const char* name, std::uint64_t& v) {
    BoundField b{sec, name, FieldType::u64};
    b.u = &v;
    return b;
}
BoundField fs(const char* sec, const char* name, std::string& v) {
    BoundField b{sec, name, FieldType::str};
    b.s = &v;
    return b;
}
BoundField fl(const char* sec, const char* name, std::vector<double>& v) {
    BoundField b{sec, name, FieldType::f64list};
    b.list = &v;
    return b;
}

std::vector<BoundField> bind_fields(ExperimentConfig& c) {
    return {
        fs("run", "experiment", c.experiment),
        fs("run", "model", c.model),
        fs("run", "out_dir", c.out_dir),
        fu("run", "seed", c.seed),
        fi("run", "workers", c.workers),
        fs("run", "exec", c.exec),

        fd("params", "j", c.j),
        fd("params", "delta", c.delta),
        fd("params", "alpha", c.alpha),
        fd("params", "gamma", c.gamma),
        fd("params", "g", c.g),

        fd("noise", "d_ext", c.d_ext),
        fd("noise", "d_e", c.d_e),
        fd("noise", "d_n", c.d_n),

        fd("integrator", "dt", c.dt),
        fs("integrator", "scheme", c.scheme),
        fi("integrator", "record_stride", c.record_stride),
        fi("integrator", "substeps_per_cell", c.substeps_per_cell),
        fi("integrator", "cells_per_step", c.cells_per_step),

        fd("lyapunov", "horizon", c.horizon),
        fd("lyapunov", "burn_in", c.burn_in),
        fi("lyapunov", "renorm_every", c.renorm_every),
        fi("lyapunov", "n_blocks", c.n_blocks),
        fi("lyapunov", "bootstrap_resamples", c.bootstrap_resamples),
        fd("lyapunov", "resolve_sigma", c.resolve_sigma),
        fi("lyapunov", "max_horizon_factor", c.max_horizon_factor),

        fd("pullback", "t_snapshot", c.t_snapshot),
        fl("pullback", "t0_list", c.t0_list),
        fi("pullback", "n_points", c.n_points),
        fd("pullback", "box_half_width", c.box_half_width),
        fd("pullback", "ic_n_value", c.ic_n_value),
        fd("pullback", "cluster_radius", c.cluster_radius),

        fs("sweep", "sweep_mode", c.sweep_mode),
        fl("sweep", "d_axis", c.d_axis),
        fl("sweep", "j_axis", c.j_axis),
        fl("sweep", "alpha_axis", c.alpha_axis),
        fs("sweep", "bisect_axis", c.bisect_axis),
        fd("sweep", "rel_tol", c.rel_tol),
        fd("sweep", "weak_forcing_tol", c.weak_forcing_tol),
        fd("sweep", "alpha_lo", c.alpha_lo),
        fd("sweep", "alpha_hi", c.alpha_hi),
        fd("sweep", "alpha_tol", c.alpha_tol),
        fd("sweep", "uplift_j", c.uplift_j),
        fl("sweep", "uplift_d_axis", c.uplift_d_axis),

        fi("ensemble", "m", c.m),
        fs("ensemble", "forcing", c.forcing),
        fd("ensemble", "k_amp", c.k_amp),
        fd("ensemble", "nu_ext", c.nu_ext),
        fd("ensemble", "ens_horizon", c.ens_horizon),
        fd("ensemble", "ens_burn_in", c.ens_burn_in),
        fi("ensemble", "sample_stride", c.sample_stride),
        fi("ensemble", "histogram_bins", c.histogram_bins),
        fl("ensemble", "strength_axis", c.strength_axis),
        fi("ensemble", "write_histograms", c.write_histograms),

        fs("kicks", "kick_experiment", c.kick_experiment),
        fl("kicks", "kick_times", c.kick_times),
        fd("kicks", "kick_amplitude", c.kick_amplitude),
        fi("kicks", "kick_wavenumber", c.kick_wavenumber),
        fs("kicks", "kick_mode", c.kick_mode),
        fi("kicks", "kick_points", c.kick_points),
        fd("kicks", "kick_t_end", c.kick_t_end),
        fl("kicks", "kick_snapshots", c.kick_snapshots),
        fd("kicks", "pd_r1", c.pd_r1),
        fd("kicks", "pd_r2", c.pd_r2),
        fd("kicks", "pd_t_end", c.pd_t_end),
    };
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_f64(const std::string& v, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    return x;
}

long long parse_i64(const std::string& v, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return x;
}

std::vector<double> parse_list(const std::string& v, const std::string& where) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            if (out.empty() && in.peek() == EOF) break;  // bare "" = empty list
            throw ConfigError(where + ": empty list element");
        }
        out.push_back(parse_f64(item, where));
    }
    return out;
}

void assign(BoundField& f, const std::string& value, const std::string& where) {
    switch (f.type) {
        case FieldType::f64: *f.f = parse_f64(value, where); return;
        case FieldType::i32: {
            const long long x = parse_i64(value, where);
            if (x < INT32_MIN || x > INT32_MAX)
                throw ConfigError(where + ": integer out of range");
            *f.i = static_cast<int>(x);
            return;
        }
        case FieldType::u64: {
            errno = 0;
            char* end = nullptr;
            const unsigned long long x = std::strtoull(value.c_str(), &end, 10);
            if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
                value.find('-') != std::string::npos)
                throw ConfigError(where + ": expected an unsigned integer, got '" + value +
                                  "'");
            *f.u = x;
            return;
        }
        case FieldType::str: *f.s = value; return;
        case FieldType::f64list: *f.list = parse_list(value, where); return;
    }
}

std::string render(const BoundField& f) {
    switch (f.type) {
        case FieldType::f64: return format_g17(*f.f);
        case FieldType::i32: return std::to_string(*f.i);
        case FieldType::u64: return std::to_string(*f.u);
        case FieldType::str: return *f.s;
        case FieldType::f64list: {
            std::string out;
            for (std::size_t i = 0; i < f.list->size(); ++i) {
                if (i) out += ',';
                out += format_g17((*f.list)[i]);
            }
            return out;
        }
    }
    return "";
}

// Finds a field by flat name or "section.name"; nullptr if unknown.
BoundField* find_field(std::vector<BoundField>& fields, const std::string& key) {
    std::string section, name = key;
    const std::size_t dot = key.find('.');
    if (dot != std::string::npos) {
        section = key.substr(0, dot);
        name = key.substr(dot + 1);
    }
    for (auto& f : fields) {
        if (name != f.name) continue;
        if (!section.empty() && section != f.section) continue;
        return &f;
    }
    return nullptr;
}

void assign_key(std::vector<BoundField>& fields, const std::string& key,
                const std::string& value, const std::string& where) {
    BoundField* f = find_field(fields, key);
    if (f == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
    assign(*f, value, where + ", key '" + key + "'");
}

void assign_json_value(std::vector<BoundField>& fields, const std::string& key,
                       const nlohmann::json& v) {
    BoundField* f = find_field(fields, key);
    if (f == nullptr) throw ConfigError("config: unknown key '" + key + "'");
    const std::string where = "config key '" + key + "'";
    switch (f->type) {
        case FieldType::f64:
            if (!v.is_number()) throw ConfigError(where + ": expected a number");
            *f->f = v.get<double>();
            return;
        case FieldType::i32:
            if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
            *f->i = v.get<int>();
            return;
        case FieldType::u64:
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                throw ConfigError(where + ": expected an unsigned integer");
            *f->u = v.get<std::uint64_t>();
            return;
        case FieldType::str:
            if (!v.is_string()) throw ConfigError(where + ": expected a string");
            *f->s = v.get<std::string>();
            return;
        case FieldType::f64list: {
            if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
            std::vector<double> list;
            for (const auto& item : v) {
                if (!item.is_number())
                    throw ConfigError(where + ": expected an array of numbers");
                list.push_back(item.get<double>());
            }
            *f->list = std::move(list);
            return;
        }
    }
}

void parse_json_config(ExperimentConfig& cfg, const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config JSON must be an object");
    auto fields = bind_fields(cfg);
    for (const auto& [key, value] : doc.items()) {
        if (value.is_object()) {
            for (const auto& [leaf, v] : value.items())
                assign_json_value(fields, key + "." + leaf, v);
        } else {
            assign_json_value(fields, key, value);
        }
    }
}

void parse_native_config(ExperimentConfig& cfg, const std::string& text) {
    auto fields = bind_fields(cfg);
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        assign_key(fields, key, value, where);
    }
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    auto fields = bind_fields(const_cast<ExperimentConfig&>(cfg));
    std::string out;
    std::string section;
    for (const auto& f : fields) {
        if (section != f.section) {
            if (!out.empty()) out += '\n';
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.name) + " = " + render(f) + "\n";
    }
    return out;
}

std::string serialize_config_json(const ExperimentConfig& cfg) {
    auto fields = bind_fields(const_cast<ExperimentConfig&>(cfg));
    nlohmann::ordered_json doc;
    for (const auto& f : fields) {
        nlohmann::ordered_json& slot = doc[f.section][f.name];
        switch (f.type) {
            case FieldType::f64: slot = *f.f; break;
            case FieldType::i32: slot = *f.i; break;
            case FieldType::u64: slot = *f.u; break;
            case FieldType::str: slot = *f.s; break;
            case FieldType::f64list: slot = *f.list; break;
        }
    }
    return doc.dump(2);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        parse_json_config(cfg, text);
    else
        parse_native_config(cfg, text);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    if (!file_exists(path)) throw ConfigError("config file not found: " + path);
    return parse_config(read_text_file(path));
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty())
        throw ConfigError("override '" + assignment + "' has an empty key");
    auto fields = bind_fields(cfg);
    assign_key(fields, key, value, "override");
}

std::vector<std::string> config_keys() {
    ExperimentConfig cfg;
    auto fields = bind_fields(cfg);
    std::vector<std::string> keys;
    keys.reserve(fields.size());
    for (const auto& f : fields) keys.push_back(std::string(f.section) + "." + f.name);
    return keys;
}

}  // namespace shearsync
