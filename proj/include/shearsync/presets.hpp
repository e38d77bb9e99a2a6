#pragma once

#include <string>
#include <vector>

#include "shearsync/config.hpp"

namespace shearsync {

struct Preset {
    std::string name;
    std::string summary;
    ExperimentConfig config;
};

// Shipped desk-scale experiment definitions, in presentation order.
const std::vector<Preset>& presets();

// Throws ConfigError with the list of valid names when unknown.
ExperimentConfig preset_config(const std::string& name);

}  // namespace shearsync
