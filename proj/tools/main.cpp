#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shearsync/config.hpp"
#include "shearsync/errors.hpp"
#include "shearsync/experiments.hpp"
#include "shearsync/presets.hpp"
#include "shearsync/version.hpp"

namespace {

using namespace shearsync;

bool is_kind_name(const std::string& s) {
    try {
        experiment_kind_from_string(s);
        return true;
    } catch (const ConfigError&) {
        return false;
    }
}

// A leading bare token (no "--", no '=') names the config file or experiment
// kind; everything after it is an override.
std::string split_target(std::vector<std::string>& extras) {
    if (extras.empty()) return "";
    const std::string& first = extras.front();
    if (first.rfind("--", 0) == 0 || first.find('=') != std::string::npos) return "";
    std::string target = first;
    extras.erase(extras.begin());
    return target;
}

// Leftover tokens become config overrides: either key=value or --key value.
void apply_extras(ExperimentConfig& cfg, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) == 0) {
            const std::string key = tok.substr(2);
            if (key.find('=') != std::string::npos) {
                apply_override(cfg, key);
                continue;
            }
            if (i + 1 >= extras.size())
                throw ConfigError("option '" + tok + "' is missing a value");
            apply_override(cfg, key + "=" + extras[++i]);
        } else if (tok.find('=') != std::string::npos) {
            apply_override(cfg, tok);
        } else {
            throw ConfigError("unexpected argument '" + tok +
                              "' (overrides are key=value or --key value)");
        }
    }
}

struct CommonArgs {
    std::string target;  // config file or experiment kind
    std::string preset;
    std::string out_dir;
    bool serial = false;
    bool quiet = false;
    std::uint64_t max_cells = 0;  // 0 = unlimited
    int workers = -1;             // -1 = leave config value
};

ExperimentConfig assemble_config(const CommonArgs& a,
                                 const std::vector<std::string>& extras) {
    ExperimentConfig cfg;
    if (!a.preset.empty() && !a.target.empty() && !is_kind_name(a.target))
        throw ConfigError("give either a config file or --preset, not both");
    if (!a.preset.empty()) cfg = preset_config(a.preset);
    if (!a.target.empty()) {
        if (is_kind_name(a.target)) cfg.experiment = a.target;
        else cfg = load_config_file(a.target);
    }
    apply_extras(cfg, extras);
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    if (a.serial) cfg.exec = "serial";
    if (a.workers >= 0) cfg.workers = a.workers;
    cfg.validate();
    return cfg;
}

RunOptions run_options(const CommonArgs& a) {
    RunOptions opt;
    if (a.max_cells > 0) opt.max_cells = a.max_cells;
    opt.log = a.quiet ? nullptr : &std::cout;
    return opt;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"stochastic laser / limit-cycle laboratory"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonArgs a;

    CLI::App* run = app.add_subcommand(
        "run", "execute an experiment from a config file, preset, or kind name");
    run->allow_extras();
    run->add_option("--preset", a.preset, "start from a shipped preset");
    run->add_option("--out", a.out_dir, "output directory (overrides the config)");
    run->add_option("--max-cells", a.max_cells,
                    "stop a sweep after this many cells (checkpoint retained)");
    run->add_option("--workers", a.workers, "worker threads (0 = all logical cores)");
    run->add_flag("--serial", a.serial, "force the serial reference path");
    run->add_flag("--quiet", a.quiet, "suppress progress output");
    bool resume_flag = false;
    run->add_flag("--resume", resume_flag, "resume this config's sweep checkpoint");

    std::string resume_path;
    CLI::App* resume = app.add_subcommand(
        "resume", "continue an interrupted sweep from its output directory");
    resume->add_option("path", resume_path, "output directory (or a file inside it)")
        ->required();
    resume->add_option("--max-cells", a.max_cells,
                       "stop again after this many additional cells");
    resume->add_flag("--quiet", a.quiet, "suppress progress output");

    CLI::App* list = app.add_subcommand("list-presets", "list shipped presets");

    CLI::App* validate = app.add_subcommand(
        "validate-config", "parse and validate a config, print the resolved form");
    validate->allow_extras();
    validate->add_option("--preset", a.preset, "start from a shipped preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a config error
    }

    if (list->parsed()) {
        for (const Preset& p : presets())
            std::cout << p.name << ": " << p.summary << '\n';
        return 0;
    }

    if (validate->parsed()) {
        std::vector<std::string> extras = validate->remaining();
        a.target = split_target(extras);
        const ExperimentConfig cfg = assemble_config(a, extras);
        std::cout << serialize_config(cfg);
        std::cout << "ok\n";
        return 0;
    }

    if (resume->parsed()) {
        const RunOutcome out = resume_experiment(resume_path, run_options(a));
        if (!a.quiet)
            std::cout << (out.sweep_partial ? "partial, checkpoint retained: "
                                            : "resumed: ")
                      << out.out_dir << '\n';
        return 0;
    }

    std::vector<std::string> extras = run->remaining();
    a.target = split_target(extras);
    const ExperimentConfig cfg = assemble_config(a, extras);
    RunOptions opt = run_options(a);
    opt.resume = resume_flag;
    const RunOutcome out = run_experiment(cfg, opt);
    if (!a.quiet)
        std::cout << (out.sweep_partial ? "partial, checkpoint retained: " : "wrote: ")
                  << out.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const CheckpointMismatchError& e) {
        std::cerr << "checkpoint mismatch: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const BlowUpError& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 1;
    }
}
