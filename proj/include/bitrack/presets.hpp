#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bitrack/dynamics.hpp"

namespace bitrack {

// Directory holding the checked-in preset configs. BITRACK_PRESETS in the
// environment wins; otherwise the source-tree path baked in at build time.
std::filesystem::path preset_dir();

std::vector<std::string> preset_names();

ScenarioSpec load_preset(const std::string& name);

}  // namespace bitrack
