#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "contact_opt/harness.hpp"

namespace contact {

/// Experiment configuration <-> JSON. Keys:
///   objective.{name,dim,seed}
///   init.{kind,lo,hi,pattern}        kind: fixed | box | pattern
///   optimizers[].kind
///   optimizers[].ranges.{tau,epsilon,mu,delta}       each [lo, hi]
///   optimizers[].sampling.{tau,epsilon,mu,delta}     uniform | log_uniform
///   search_trials, mc_runs, iters, master_seed
/// Unknown keys are rejected; ConfigError messages carry the JSON path.
ExperimentSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::filesystem::path& path);

enum class Scale { desk, paper };

/// Benchmark presets with the published search ranges: quadratic, quartic,
/// camelback, rosenbrock.
std::vector<std::string> preset_names();
ExperimentSpec preset_spec(std::string_view name, Scale scale);

}  // namespace contact
