#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contact_opt/config.hpp"
#include "contact_opt/errors.hpp"
#include "contact_opt/export.hpp"
#include "contact_opt/harness.hpp"
#include "contact_opt/integrators.hpp"
#include "contact_opt/objectives.hpp"
#include "contact_opt/optimizers.hpp"
#include "contact_opt/selfcheck.hpp"

namespace {

using namespace contact;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDiverged = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

InitSpec parse_init(const std::string& text) {
  InitSpec init;
  const auto colon = text.find(':');
  const std::string kind = colon == std::string::npos ? "vec" : text.substr(0, colon);
  const std::string body = colon == std::string::npos ? text : text.substr(colon + 1);
  const std::vector<double> values = parse_list(body);
  if (kind == "const") {
    if (values.size() != 1) throw UsageError("--init const: takes one value");
    init.kind = InitKind::fixed;
    init.values = values;
  } else if (kind == "vec") {
    init.kind = InitKind::fixed;
    init.values = values;
  } else if (kind == "alt") {
    init.kind = InitKind::pattern;
    init.values = values;
  } else if (kind == "box") {
    if (values.size() != 2 || !(values[0] < values[1]))
      throw UsageError("--init box: takes lo,hi with lo < hi");
    init.kind = InitKind::box;
    init.values.clear();
    init.lo = values[0];
    init.hi = values[1];
  } else {
    throw UsageError("unknown --init kind '" + kind + "' (valid: const, vec, alt, box)");
  }
  return init;
}

OptimizerKind parse_kind(const std::string& name) {
  if (auto k = parse_optimizer_kind(name)) return *k;
  throw UsageError("unknown optimizer '" + name + "' (valid: " + join(optimizer_names()) + ")");
}

void require_objective(const std::string& name) {
  for (const auto& n : objective_names())
    if (n == name) return;
  throw UsageError("unknown objective '" + name + "' (valid: " + join(objective_names()) + ")");
}

std::string params_for(const OptimizerConfig& c) {
  std::ostringstream os;
  switch (c.kind) {
    case OptimizerKind::gd: os << "tau=" << format_double(c.tau); break;
    case OptimizerKind::cm:
    case OptimizerKind::nag: os << "tau=" << format_double(c.tau) << " mu=" << format_double(c.mu); break;
    case OptimizerKind::rgd:
    case OptimizerKind::crgd:
      os << "epsilon=" << format_double(c.epsilon) << " mu=" << format_double(c.mu)
         << " delta=" << format_double(c.delta);
      break;
  }
  return os.str();
}

// ---- run --------------------------------------------------------------------

struct RunArgs {
  std::string objective = "quadratic";
  int dim = 2;
  std::uint64_t seed = 0;
  std::string optimizer = "gd";
  double tau = 1e-2;
  double epsilon = 1e-2;
  double mu = 0.9;
  double delta = 0.0;
  std::string schedule = "constant";
  std::string clock = "iteration";
  int iters = 100;
  std::string init = "const:1";
  std::string integrator;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  require_objective(a.objective);
  OptimizerConfig cfg;
  cfg.kind = parse_kind(a.optimizer);
  cfg.tau = a.tau;
  cfg.epsilon = a.epsilon;
  cfg.mu = a.mu;
  cfg.delta = a.delta;
  if (a.schedule == "constant") cfg.momentum_schedule = MomentumSchedule::constant;
  else if (a.schedule == "nesterov") cfg.momentum_schedule = MomentumSchedule::nesterov_k;
  else throw UsageError("unknown --schedule '" + a.schedule + "' (valid: constant, nesterov)");
  if (a.clock == "iteration") cfg.clock = ClockMode::iteration;
  else if (a.clock == "physical") cfg.clock = ClockMode::physical;
  else throw UsageError("unknown --clock '" + a.clock + "' (valid: iteration, physical)");
  if (a.iters < 1) throw UsageError("--iters must be >= 1");

  const Objective obj = make_objective(a.objective, a.dim, a.seed);
  const Vec x0 = parse_init(a.init).make(obj.dim, a.seed);
  RunRecord rec;
  if (!a.integrator.empty()) {
    if (cfg.kind != OptimizerKind::rgd && cfg.kind != OptimizerKind::crgd)
      throw UsageError("--integrator applies to rgd and crgd only");
    SplitFlowPlan plan;
    try {
      plan = plan_from_name(a.integrator);
    } catch (const InvalidParameter&) {
      throw UsageError("unknown integrator '" + a.integrator + "' (valid: " + join(integrator_names()) + ")");
    }
    rec = run_split(obj, cfg, x0, a.iters, plan);
  } else {
    rec = run(obj, cfg, x0, a.iters);
  }
  if (!a.out.empty()) export_trace_csv({rec}, a.out);
  std::cout << to_string(cfg.kind) << " final_gap=" << format_double(rec.trace.back())
            << (rec.diverged ? " diverged" : "") << "\n";
  return rec.diverged ? kDiverged : kOk;
}

// ---- search / bench ---------------------------------------------------------

struct ExperimentArgs {
  std::string preset;
  std::string config;
  std::string scale = "desk";
  std::optional<std::uint64_t> seed;
  std::string init;
  std::vector<std::string> optimizers;
  int jobs = 0;
  std::string out;
  std::string svg;
  std::string traces;
};

ExperimentSpec experiment_from(const ExperimentArgs& a) {
  ExperimentSpec spec;
  if (!a.config.empty()) {
    spec = load_spec(a.config);
  } else {
    Scale scale;
    if (a.scale == "desk") scale = Scale::desk;
    else if (a.scale == "paper") scale = Scale::paper;
    else throw UsageError("unknown --scale '" + a.scale + "' (valid: desk, paper)");
    const std::string name = a.preset.empty() ? "quadratic" : a.preset;
    bool known = false;
    for (const auto& p : preset_names()) known = known || p == name;
    if (!known) throw UsageError("unknown preset '" + name + "' (valid: " + join(preset_names()) + ")");
    spec = preset_spec(name, scale);
  }
  if (a.seed) {
    spec.master_seed = *a.seed;
  } else if (const char* env = std::getenv("CONTACT_OPT_SEED")) {
    try {
      spec.master_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("CONTACT_OPT_SEED is not an unsigned integer: ") + env);
    }
  }
  if (!a.init.empty()) spec.init = parse_init(a.init);
  if (!a.optimizers.empty()) {
    std::vector<OptimizerEntry> kept;
    for (const auto& name : a.optimizers) {
      const OptimizerKind k = parse_kind(name);
      bool found = false;
      for (const auto& e : spec.optimizers)
        if (e.kind == k) {
          kept.push_back(e);
          found = true;
        }
      if (!found) throw UsageError("optimizer '" + name + "' is not part of this experiment");
    }
    spec.optimizers = kept;
  }
  spec.validate();
  return spec;
}

int cmd_search(const ExperimentArgs& a) {
  const ExperimentSpec spec = experiment_from(a);
  std::vector<RunRecord> best;
  for (const auto& entry : spec.optimizers) {
    const SearchResult r = random_search(spec, entry, Execution{a.jobs});
    if (!r.best) {
      std::cout << to_string(entry.kind) << " no viable parameters\n";
      continue;
    }
    std::cout << to_string(entry.kind) << " " << params_for(*r.best) << " final_gap="
              << format_double(r.best_gap) << " trial=" << r.best_trial << "\n";
    best.push_back(r.trials[static_cast<std::size_t>(r.best_trial)]);
  }
  if (!a.out.empty()) export_trace_csv(best, a.out);
  return kOk;
}

int cmd_bench(const ExperimentArgs& a) {
  const ExperimentSpec spec = experiment_from(a);
  std::vector<QuantileBand> bands;
  std::vector<RunRecord> traces;
  for (const auto& entry : spec.optimizers) {
    const SearchResult r = random_search(spec, entry, Execution{a.jobs});
    if (!r.best) {
      std::cout << to_string(entry.kind) << " no viable parameters\n";
      continue;
    }
    const MonteCarloResult mc = monte_carlo(spec, *r.best, Execution{a.jobs});
    std::cout << to_string(entry.kind) << " " << params_for(*r.best)
              << " search_gap=" << format_double(r.best_gap)
              << " median_final_gap=" << format_double(mc.band.median.back()) << "\n";
    bands.push_back(mc.band);
    traces.insert(traces.end(), mc.runs.begin(), mc.runs.end());
  }
  export_band_csv(bands, a.out.empty() ? "bands.csv" : a.out);
  if (!a.traces.empty()) export_trace_csv(traces, a.traces);
  if (!a.svg.empty() && !bands.empty()) {
    SvgOptions opt;
    opt.title = spec.objective.name + " (dim " + std::to_string(spec.objective.dim) + ")";
    export_svg(bands, a.svg, opt);
  }
  return kOk;
}

// ---- rates ------------------------------------------------------------------

std::vector<std::pair<int, int>> parse_windows(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw UsageError("window '" + item + "' is not lo-hi");
    try {
      std::size_t used = 0;
      const int lo = std::stoi(item.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument("lo");
      const std::string hs = item.substr(dash + 1);
      const int hi = std::stoi(hs, &used);
      if (used != hs.size()) throw std::invalid_argument("hi");
      if (lo < 0 || hi <= lo) throw std::invalid_argument("order");
      out.emplace_back(lo, hi);
    } catch (const std::exception&) {
      throw UsageError("window '" + item + "' is not lo-hi with 0 <= lo < hi");
    }
  }
  if (out.empty()) throw UsageError("no rate windows given");
  return out;
}

int cmd_rates(const std::string& path, const std::string& windows_text) {
  const auto windows = parse_windows(windows_text);
  const auto series = read_trace_csv(path);
  std::cout << "optimizer,trial,window,p\n";
  for (const auto& s : series) {
    for (const auto& [lo, hi] : windows) {
      std::string p = "n/a";
      const int k_lo = std::max(lo, 1);
      const int k_hi = std::min<int>(hi, static_cast<int>(s.trace.size()) - 1);
      if (k_hi > k_lo) {
        try {
          std::ostringstream os;
          os << std::fixed << std::setprecision(2) << estimate_rate(s.trace, k_lo, k_hi);
          p = os.str();
        } catch (const RateUndefined&) {
        }
      }
      std::cout << s.optimizer << "," << s.trial << "," << lo << "-" << hi << "," << p << "\n";
    }
  }
  return kOk;
}

// ---- check / list -----------------------------------------------------------

int cmd_check(const std::optional<std::string>& only, std::uint64_t seed) {
  CheckOptions opt;
  opt.seed = seed;
  opt.only = only;
  if (only) {
    bool known = false;
    for (const auto& f : check_families()) known = known || f == *only;
    if (!known) throw UsageError("unknown check family '" + *only + "' (valid: " + join(check_families()) + ")");
  }
  const auto results = run_checks(opt);
  int failed = 0;
  for (const auto& r : results) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << r.value;
    std::ostringstream tol;
    tol << std::setprecision(1) << std::scientific << r.tolerance;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.family << ": " << r.name << "  value=" << os.str()
              << (r.detail.empty() ? "  tol=" + tol.str() : "  " + r.detail) << "\n";
    failed += r.pass ? 0 : 1;
  }
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kOk : kUsage;
}

int cmd_list(const std::string& preset, const std::string& scale) {
  if (!preset.empty()) {
    ExperimentArgs a;
    a.preset = preset;
    a.scale = scale;
    std::cout << spec_to_json(experiment_from(a)).dump(2) << "\n";
    return kOk;
  }
  std::cout << "objectives: " << join(objective_names()) << "\n";
  std::cout << "optimizers: " << join(optimizer_names()) << "\n";
  std::cout << "integrators: " << join(integrator_names()) << "\n";
  std::cout << "check families: " << join(check_families()) << "\n";
  std::cout << "presets: " << join(preset_names()) << "\n";
  for (const auto& name : preset_names())
    std::cout << "\n[" << name << "]\n" << spec_to_json(preset_spec(name, Scale::desk)).dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-Hamiltonian optimization: runs, searches, benchmarks and self-checks"};
  app.require_subcommand(1, 1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run one optimizer and write its trace CSV");
  run_cmd->add_option("--objective", ra.objective, "quadratic | quartic | camelback | rosenbrock");
  run_cmd->add_option("--dim", ra.dim, "Objective dimension");
  run_cmd->add_option("--seed", ra.seed, "Objective seed (quadratic draw, box init)");
  run_cmd->add_option("--optimizer", ra.optimizer, "gd | cm | nag | rgd | crgd");
  run_cmd->add_option("--tau", ra.tau, "Step size (gd, cm, nag)");
  run_cmd->add_option("--epsilon", ra.epsilon, "Step parameter (rgd, crgd)");
  run_cmd->add_option("--mu", ra.mu, "Momentum / damping factor");
  run_cmd->add_option("--delta", ra.delta, "Relativistic normalization (rgd, crgd)");
  run_cmd->add_option("--schedule", ra.schedule, "NAG momentum: constant | nesterov");
  run_cmd->add_option("--clock", ra.clock, "CRGD dissipation clock: iteration | physical");
  run_cmd->add_option("--iters", ra.iters, "Iterations");
  run_cmd->add_option("--init", ra.init, "const:v | vec:a,b,.. | alt:a,b | box:lo,hi");
  run_cmd->add_option("--integrator", ra.integrator, "Composition for rgd/crgd: strang | jump4 | suzuki4 | jump6");
  run_cmd->add_option("--out", ra.out, "Trace CSV path");

  ExperimentArgs sa;
  auto* search_cmd = app.add_subcommand("search", "Random hyperparameter search");
  ExperimentArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Search, then Monte-Carlo bands per optimizer");
  for (auto [cmd, args] : {std::pair{search_cmd, &sa}, std::pair{bench_cmd, &ba}}) {
    auto* preset = cmd->add_option("--preset", args->preset, "quadratic | quartic | camelback | rosenbrock");
    auto* config = cmd->add_option("--config", args->config, "Experiment JSON");
    preset->excludes(config);
    config->excludes(preset);
    cmd->add_option("--scale", args->scale, "desk | paper");
    cmd->add_option("--seed", args->seed, "Master seed (fallback: CONTACT_OPT_SEED)");
    cmd->add_option("--init", args->init, "Override the initialization");
    cmd->add_option("--optimizers", args->optimizers, "Restrict to these optimizers")->delimiter(',');
    cmd->add_option("--jobs", args->jobs, "Worker threads (0: all)");
  }
  search_cmd->add_option("--out", sa.out, "Trace CSV of the best trial per optimizer");
  bench_cmd->add_option("--out", ba.out, "Band CSV path")->default_str("bands.csv");
  bench_cmd->add_option("--svg", ba.svg, "SVG figure path");
  bench_cmd->add_option("--traces", ba.traces, "Trace CSV of every Monte-Carlo run");

  std::string rate_path;
  std::string windows = "0-50,50-150,150-300";
  auto* rates_cmd = app.add_subcommand("rates", "Fit power-law rates to a trace CSV");
  rates_cmd->add_option("--trace", rate_path, "Trace CSV")->required();
  rates_cmd->add_option("--windows", windows, "Comma list of lo-hi iteration windows");

  std::optional<std::string> only;
  std::uint64_t check_seed = 1;
  auto* check_cmd = app.add_subcommand("check", "Geometric and numerical self-checks");
  check_cmd->add_option("--only", only, "Run one family");
  check_cmd->add_option("--seed", check_seed, "Seed for random states");

  std::string list_preset;
  std::string list_scale = "desk";
  auto* list_cmd = app.add_subcommand("list", "List names and preset configs");
  list_cmd->add_option("--preset", list_preset, "Print only this preset as a config file");
  list_cmd->add_option("--scale", list_scale, "desk | paper");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(ra);
    if (*search_cmd) return cmd_search(sa);
    if (*bench_cmd) return cmd_bench(ba);
    if (*rates_cmd) return cmd_rates(rate_path, windows);
    if (*check_cmd) return cmd_check(only, check_seed);
    if (*list_cmd) return cmd_list(list_preset, list_scale);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
