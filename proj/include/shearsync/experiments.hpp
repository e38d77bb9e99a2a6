#pragma once

#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "shearsync/config.hpp"

namespace shearsync {

struct RunOptions {
    bool resume = false;  // pick up an existing sweep checkpoint
    std::size_t max_cells = std::numeric_limits<std::size_t>::max();
    std::ostream* log = nullptr;  // progress + headline results; null = silent
};

struct RunOutcome {
    std::string out_dir;                 // resolved output directory
    std::vector<std::string> artifacts;  // file names relative to out_dir
    bool sweep_partial = false;  // stopped at max_cells, checkpoint retained
};

// Executes the experiment the config names and writes its artifacts plus
// manifest.json (config echo, seed, version, wall time). Artifacts other than
// the manifest are bitwise reproducible from the same config. Throws
// ConfigError / CheckpointMismatchError / BlowUpError / IoError; the CLI maps
// them to exit codes.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Reads <out_dir>/manifest.json (or the manifest next to a checkpoint file)
// and re-runs its embedded config with resume semantics.
RunOutcome resume_experiment(const std::string& path, const RunOptions& opt = {});

}  // namespace shearsync
