#pragma once

// Named experiment presets and the runner shared by the CLI and the
// acceptance tests.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparselms/config.hpp"
#include "sparselms/report.hpp"

namespace sparselms {

struct PresetCase {
  std::string label;
  ConfigMap config;  // fully resolved, every key present
};

enum class PresetTable { None, SparsitySweep, AlphaTable };

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetCase> cases;
  PresetTable table = PresetTable::None;
};

std::vector<std::string> preset_names();

/// Throws UsageError listing the known names.
Preset get_preset(std::string_view name);

struct RunOptions {
  std::vector<std::string> overrides;  // "key=value", applied to every case in order
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> iterations;
};

/// Applies overrides to every case of a preset. An --iters value below a
/// baked analysis.iteration moves the estimate to the last iteration unless
/// analysis.iteration is overridden explicitly.
Preset resolve_preset(std::string_view name, const RunOptions& options);

/// `[case]` headers followed by `key = value` lines.
std::string format_preset(const Preset& preset);

/// Runs every case. wall_time_s is always filled in.
Report run_preset(std::string_view name, const RunOptions& options = {});
Report run_resolved(const Preset& preset);

/// A single-case run from a free-form config (name "custom").
Report run_config(const ConfigMap& config, const RunOptions& options = {});

}  // namespace sparselms
