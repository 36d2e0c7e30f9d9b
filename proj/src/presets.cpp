#include "bitrack/presets.hpp"

#include <cstdlib>

#include "bitrack/io.hpp"

#ifndef BITRACK_PRESET_DIR
#define BITRACK_PRESET_DIR "presets"
#endif

namespace bitrack {

std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("BITRACK_PRESETS")) return env;
    return BITRACK_PRESET_DIR;
}

std::vector<std::string> preset_names() {
    return {"example-3.4", "example-4.5", "example-5.7", "example-6.4",
            "example-8.2", "example-12.7", "example-13.3"};
}

ScenarioSpec load_preset(const std::string& name) {
    auto path = preset_dir() / (name + ".json");
    if (!std::filesystem::exists(path))
        throw ConfigError("unknown preset \"" + name + "\" (no file " + path.string() + ")");
    return spec_from_json(load_json_file(path));
}

}  // namespace bitrack
