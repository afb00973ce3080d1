#include "contact_opt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "contact_opt/errors.hpp"
#include "parallel.hpp"

namespace contact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream tags keep the search-init and run-init draws apart from trial seeds.
constexpr std::uint64_t kSearchInitTag = 0x5ea4c41417ULL;
constexpr std::uint64_t kRunInitTag = 0x1417b0c5ULL;
constexpr std::uint64_t kRunObjectiveTag = 0x0b1ec71fULL;

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw(const ParamRange& r, bool scale_param, std::mt19937_64& rng) {
  const double u = unit_draw(rng);
  double v;
  if (r.effective_law(scale_param) == SamplingLaw::log_uniform) {
    const double llo = std::log(r.lo), lhi = std::log(r.hi);
    v = std::exp(llo + u * (lhi - llo));
  } else {
    v = r.lo + u * (r.hi - r.lo);
  }
  return std::clamp(v, r.lo, r.hi);
}

double final_gap(const RunRecord& rec) {
  if (rec.diverged || rec.trace.empty()) return kInf;
  const double g = rec.trace.back();
  return std::isfinite(g) ? g : kInf;
}

void check_range(const std::optional<ParamRange>& r, const char* name) {
  if (!r) return;
  if (!std::isfinite(r->lo) || !std::isfinite(r->hi) || r->lo > r->hi)
    throw InvalidParameter(std::string("search range '") + name + "' must be finite with lo <= hi");
  if (r->law == SamplingLaw::log_uniform && !(r->lo > 0.0))
    throw InvalidParameter(std::string("search range '") + name + "': log_uniform needs lo > 0");
}

SearchResult select_best(OptimizerKind kind, std::vector<RunRecord> trials) {
  SearchResult res;
  res.kind = kind;
  res.best_gap = kInf;
  for (const auto& rec : trials) {
    const double g = final_gap(rec);
    if (g < res.best_gap) {
      res.best_gap = g;
      res.best_trial = rec.trial;
      res.best = rec.params;
    }
  }
  res.trials = std::move(trials);
  return res;
}

template <class ForEach>
SearchResult search_impl(const ExperimentSpec& spec, const OptimizerEntry& entry,
                         ForEach&& for_each) {
  spec.validate();
  const Objective obj = search_objective(spec);
  const Vec x0 = search_init(spec);
  std::vector<RunRecord> trials(static_cast<std::size_t>(spec.search_trials));
  for_each(spec.search_trials, [&](int i) {
    const std::uint64_t seed = trial_seed(spec.master_seed, entry.kind, i);
    const OptimizerConfig cfg = sample_config(entry, seed);
    RunRecord rec;
    try {
      rec = run(obj, cfg, x0, spec.iters);
    } catch (const InvalidParameter&) {
      // A draw on the boundary of a closed range (e.g. epsilon = 0) is not a
      // valid optimizer; score it like a divergent run.
      rec.kind = cfg.kind;
      rec.params = cfg;
      rec.trace = {kInf};
      rec.diverged = true;
    }
    rec.trial = i;
    rec.trial_seed = seed;
    trials[static_cast<std::size_t>(i)] = std::move(rec);
  });
  return select_best(entry.kind, std::move(trials));
}

template <class ForEach>
MonteCarloResult monte_carlo_impl(const ExperimentSpec& spec, const OptimizerConfig& params,
                                  ForEach&& for_each) {
  spec.validate();
  params.validate();
  const bool random_objective = spec.objective.name == "quadratic";
  std::optional<Objective> shared;
  if (!random_objective) shared = search_objective(spec);

  MonteCarloResult res;
  res.runs.resize(static_cast<std::size_t>(spec.mc_runs));
  for_each(spec.mc_runs, [&](int i) {
    const Objective obj = random_objective ? run_objective(spec, i) : *shared;
    RunRecord rec = run(obj, params, run_init(spec, i), spec.iters);
    rec.trial = i;
    rec.trial_seed = run_seed(spec.master_seed, i);
    res.runs[static_cast<std::size_t>(i)] = std::move(rec);
  });
  res.band = quantile_band(std::string(to_string(params.kind)), res.runs,
                           static_cast<std::size_t>(spec.iters) + 1);
  return res;
}

struct SerialLoop {
  template <class Body>
  void operator()(int n, Body&& body) const {
    for (int i = 0; i < n; ++i) body(i);
  }
};

struct ParallelLoop {
  int jobs;
  template <class Body>
  void operator()(int n, Body&& body) const {
    detail::parallel_for(n, jobs, std::forward<Body>(body));
  }
};

}  // namespace

SamplingLaw ParamRange::effective_law(bool scale_param) const {
  if (law) return *law;
  if (scale_param && lo > 0.0 && hi / lo >= 100.0) return SamplingLaw::log_uniform;
  return SamplingLaw::uniform;
}

Vec InitSpec::make(int dim, std::uint64_t seed) const {
  Vec x(dim);
  switch (kind) {
    case InitKind::fixed:
      if (values.size() == 1) {
        x.setConstant(values[0]);
      } else if (values.size() == static_cast<std::size_t>(dim)) {
        for (int i = 0; i < dim; ++i) x[i] = values[static_cast<std::size_t>(i)];
      } else {
        throw InvalidParameter("init: fixed vector length differs from objective dim");
      }
      break;
    case InitKind::pattern:
      if (values.empty()) throw InvalidParameter("init: empty pattern");
      for (int i = 0; i < dim; ++i) x[i] = values[static_cast<std::size_t>(i) % values.size()];
      break;
    case InitKind::box: {
      std::mt19937_64 rng(seed);
      for (int i = 0; i < dim; ++i) x[i] = lo + unit_draw(rng) * (hi - lo);
      break;
    }
  }
  return x;
}

void ExperimentSpec::validate() const {
  if (search_trials < 1) throw InvalidParameter("search_trials must be >= 1");
  if (mc_runs < 1) throw InvalidParameter("mc_runs must be >= 1");
  if (iters < 1) throw InvalidParameter("iters must be >= 1");
  if (objective.dim < 1) throw InvalidParameter("objective.dim must be >= 1");
  if (init.kind == InitKind::box && !(init.lo < init.hi))
    throw InvalidParameter("init box needs lo < hi");
  if (init.kind != InitKind::box && init.values.empty())
    throw InvalidParameter("init needs at least one value");
  for (const auto& e : optimizers) {
    check_range(e.ranges.tau, "tau");
    check_range(e.ranges.epsilon, "epsilon");
    check_range(e.ranges.mu, "mu");
    check_range(e.ranges.delta, "delta");
  }
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, OptimizerKind kind, int trial) {
  std::uint64_t h = mix_seed(master);
  h = mix_seed(h ^ (static_cast<std::uint64_t>(kind) + 1));
  return mix_seed(h ^ static_cast<std::uint64_t>(trial));
}

std::uint64_t run_seed(std::uint64_t master, int run_index) {
  return mix_seed(master ^ static_cast<std::uint64_t>(run_index));
}

OptimizerConfig sample_config(const OptimizerEntry& entry, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OptimizerConfig cfg;
  cfg.kind = entry.kind;
  // Draw in a fixed order so a trial's parameters depend only on its seed.
  if (entry.ranges.tau) cfg.tau = draw(*entry.ranges.tau, true, rng);
  if (entry.ranges.epsilon) cfg.epsilon = draw(*entry.ranges.epsilon, true, rng);
  if (entry.ranges.mu) cfg.mu = draw(*entry.ranges.mu, false, rng);
  if (entry.ranges.delta) cfg.delta = draw(*entry.ranges.delta, false, rng);
  return cfg;
}

Objective search_objective(const ExperimentSpec& spec) {
  return make_objective(spec.objective.name, spec.objective.dim, spec.objective.seed);
}

Objective run_objective(const ExperimentSpec& spec, int run_index) {
  if (spec.objective.name != "quadratic") return search_objective(spec);
  const std::uint64_t seed =
      mix_seed(spec.objective.seed ^ run_seed(spec.master_seed, run_index) ^ kRunObjectiveTag);
  return make_objective(spec.objective.name, spec.objective.dim, seed);
}

Vec search_init(const ExperimentSpec& spec) {
  return spec.init.make(spec.objective.dim, mix_seed(spec.master_seed ^ kSearchInitTag));
}

Vec run_init(const ExperimentSpec& spec, int run_index) {
  return spec.init.make(spec.objective.dim,
                        mix_seed(run_seed(spec.master_seed, run_index) ^ kRunInitTag));
}

SearchResult random_search(const ExperimentSpec& spec, const OptimizerEntry& entry,
                           Execution exec) {
  return search_impl(spec, entry, ParallelLoop{exec.jobs});
}

SearchResult random_search_serial(const ExperimentSpec& spec, const OptimizerEntry& entry) {
  return search_impl(spec, entry, SerialLoop{});
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidParameter("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size() || frac == 0.0) return sorted[std::min(lo, sorted.size() - 1)];
  const double a = sorted[lo], b = sorted[lo + 1];
  if (std::isinf(b)) return b;
  return std::clamp(a + frac * (b - a), a, b);
}

QuantileBand quantile_band(const std::string& name, const std::vector<RunRecord>& runs,
                           std::size_t length) {
  QuantileBand band;
  band.optimizer = name;
  band.median.resize(length);
  band.q025.resize(length);
  band.q975.resize(length);
  std::vector<double> column(runs.size());
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& tr = runs[r].trace;
      const double v = k < tr.size() ? tr[k] : kInf;
      column[r] = std::isnan(v) ? kInf : v;
    }
    std::sort(column.begin(), column.end());
    band.q025[k] = quantile_sorted(column, 0.025);
    band.median[k] = quantile_sorted(column, 0.5);
    band.q975[k] = quantile_sorted(column, 0.975);
  }
  return band;
}

MonteCarloResult monte_carlo(const ExperimentSpec& spec, const OptimizerConfig& params,
                             Execution exec) {
  return monte_carlo_impl(spec, params, ParallelLoop{exec.jobs});
}

MonteCarloResult monte_carlo_serial(const ExperimentSpec& spec, const OptimizerConfig& params) {
  return monte_carlo_impl(spec, params, SerialLoop{});
}

double estimate_rate(std::span<const double> trace, int k_lo, int k_hi) {
  if (k_lo < 1) throw InvalidParameter("estimate_rate: k_lo must be >= 1");
  if (k_hi <= k_lo) throw InvalidParameter("estimate_rate: window needs at least two points");
  if (static_cast<std::size_t>(k_hi) >= trace.size())
    throw InvalidParameter("estimate_rate: window extends past the trace");
  const int n = k_hi - k_lo + 1;
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (int k = k_lo; k <= k_hi; ++k) {
    const double f = trace[static_cast<std::size_t>(k)];
    if (!(f > 0.0) || !std::isfinite(f))
      throw RateUndefined("estimate_rate: non-positive or non-finite value at k=" + std::to_string(k));
    const auto idx = static_cast<std::size_t>(k - k_lo);
    xs[idx] = std::log(static_cast<double>(k));
    ys[idx] = std::log(f);
    sx += xs[idx];
    sy += ys[idx];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return 0.0 - sxy / sxx;
}

}  // namespace contact
