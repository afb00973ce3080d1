#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contact_opt/objectives.hpp"
#include "contact_opt/optimizers.hpp"

namespace contact {

enum class SamplingLaw { uniform, log_uniform };

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  /// Unset: log-uniform when lo > 0 and the interval spans >= 2 decades, else uniform.
  std::optional<SamplingLaw> law;

  SamplingLaw effective_law(bool scale_param) const;
};

/// Closed search intervals; parameters left unset keep OptimizerConfig defaults.
struct SearchRanges {
  std::optional<ParamRange> tau;
  std::optional<ParamRange> epsilon;
  std::optional<ParamRange> mu;
  std::optional<ParamRange> delta;
};

struct OptimizerEntry {
  OptimizerKind kind = OptimizerKind::gd;
  SearchRanges ranges;
};

struct ObjectiveSpec {
  std::string name = "quadratic";
  int dim = 2;
  std::uint64_t seed = 0;
};

enum class InitKind { fixed, box, pattern };

/// fixed: `values` has length dim (or 1, broadcast); pattern: `values` repeated
/// cyclically; box: iid uniform in [lo, hi].
struct InitSpec {
  InitKind kind = InitKind::fixed;
  std::vector<double> values{1.0};
  double lo = -1.0;
  double hi = 1.0;

  Vec make(int dim, std::uint64_t seed) const;
  bool is_random() const { return kind == InitKind::box; }
};

struct ExperimentSpec {
  ObjectiveSpec objective;
  InitSpec init;
  std::vector<OptimizerEntry> optimizers;
  int search_trials = 1;
  int mc_runs = 1;
  int iters = 1;
  std::uint64_t master_seed = 0;

  void validate() const;
};

/// Worker count for the parallel kernels; <= 0 means the OpenMP default.
struct Execution {
  int jobs = 0;
};

/// splitmix64 finalizer and the derived per-trial / per-run seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t trial_seed(std::uint64_t master, OptimizerKind kind, int trial);
std::uint64_t run_seed(std::uint64_t master, int run_index);

/// Draws one parameter tuple for the entry from the given seed.
OptimizerConfig sample_config(const OptimizerEntry& entry, std::uint64_t seed);

struct SearchResult {
  OptimizerKind kind = OptimizerKind::gd;
  /// Unset when every trial diverged (no viable parameters).
  std::optional<OptimizerConfig> best;
  double best_gap = 0.0;
  int best_trial = -1;
  std::vector<RunRecord> trials;
};

/// Seeded random search; the lowest final gap wins, ties to the lower trial index.
SearchResult random_search(const ExperimentSpec& spec, const OptimizerEntry& entry,
                           Execution exec = {});
/// Single-threaded reference for random_search; results are identical.
SearchResult random_search_serial(const ExperimentSpec& spec, const OptimizerEntry& entry);

struct QuantileBand {
  std::string optimizer;
  std::vector<double> median;
  std::vector<double> q025;
  std::vector<double> q975;

  std::size_t size() const { return median.size(); }
};

/// Empirical quantile of sorted data, linear interpolation between order statistics.
double quantile_sorted(std::span<const double> sorted, double q);

/// Per-iteration quantiles; shorter (diverged) traces are padded with +inf.
QuantileBand quantile_band(const std::string& name, const std::vector<RunRecord>& runs,
                           std::size_t length);

struct MonteCarloResult {
  QuantileBand band;
  std::vector<RunRecord> runs;
};

MonteCarloResult monte_carlo(const ExperimentSpec& spec, const OptimizerConfig& params,
                             Execution exec = {});
MonteCarloResult monte_carlo_serial(const ExperimentSpec& spec, const OptimizerConfig& params);

/// p in f_k ~ k^{-p}, least squares over k in [k_lo, k_hi].
double estimate_rate(std::span<const double> trace, int k_lo, int k_hi);

/// The objective used by search (spec seed) and by Monte-Carlo run i.
Objective search_objective(const ExperimentSpec& spec);
Objective run_objective(const ExperimentSpec& spec, int run_index);
Vec search_init(const ExperimentSpec& spec);
Vec run_init(const ExperimentSpec& spec, int run_index);

}  // namespace contact
