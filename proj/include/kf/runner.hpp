#pragma once

#include <string>
#include <vector>

#include "kf/config.hpp"

namespace kf {

struct RunOutput {
    int exit_code = 0;
    std::string manifest_path;
    std::string manifest_text;
    std::vector<std::string> artifacts;
};

// Executes the configured action, writes artifacts and a manifest under the
// output directory. Throws with module-qualified messages on hard errors.
RunOutput run_job(const JobConfig& cfg);

// Manifest text with the volatile keys (timestamp, wall_ms) removed; two runs
// of the same config and seed compare equal on this.
std::string manifest_stable_text(const std::string& manifest);

}  // namespace kf
