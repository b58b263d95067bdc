#pragma once

// Flat key/value experiment configuration. The same keys are used by
// config files (`key = value` per line, '#' comments), by `--set key=value`
// overrides and by the built-in presets. See docs/config.md.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "sparselms/harness.hpp"

namespace sparselms {

using ConfigMap = std::map<std::string, std::string>;

struct ConfigKey {
  std::string_view key;
  std::string_view default_value;
  std::string_view description;
};

std::span<const ConfigKey> config_keys();
ConfigMap default_config();

/// Sets a known key; unknown keys raise UsageError listing the valid ones.
void set_config_value(ConfigMap& config, std::string_view key, std::string_view value);
/// Parses and applies one `key=value` assignment.
void apply_override(ConfigMap& config, std::string_view assignment);

ConfigMap parse_config_text(std::string_view text, ConfigMap base = default_config());
ConfigMap load_config_file(const std::string& path, ConfigMap base = default_config());
std::string format_config(const ConfigMap& config);

/// Where (and whether) to estimate alpha'/beta' for the reweighted-l1 filter.
struct AnalysisSettings {
  bool enabled = false;
  std::size_t iteration = 0;  // 1-based
};

struct ResolvedExperiment {
  Experiment experiment;
  AnalysisSettings analysis;
};

/// Type-checks every value and builds the harness experiment.
ResolvedExperiment build_experiment(const ConfigMap& config);

}  // namespace sparselms
