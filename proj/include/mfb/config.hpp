#pragma once

#include <string>
#include <vector>

#include "mfb/experiment.hpp"

namespace mfb {

// Config files are flat `dotted.key = value` lines. Values are numbers,
// booleans, double-quoted or bare strings, or `[a, b, c]` lists. `#` starts a
// comment. A `preset` key, if present, is applied first and the remaining keys
// override it regardless of their position in the file.

const std::vector<std::string>& preset_names();

/// Preset by name; ConfigError if unknown.
ExperimentConfig preset_config(const std::string& name);

/// Parses config text. Unknown keys and malformed values throw ConfigError
/// with the line number. The result is validated.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
/// When include_runtime is false the output directory and jobs are omitted
/// (used for the run digest, which must not depend on where output goes).
std::string to_config_text(const ExperimentConfig& config, bool include_runtime = true);

/// Parses "a..b" (inclusive) into first/count.
void apply_seed_range(ExperimentConfig& config, const std::string& range);

}  // namespace mfb
