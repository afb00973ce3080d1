#include "contact_opt/config.hpp"

#include <fstream>
#include <set>

#include "contact_opt/errors.hpp"

namespace contact {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required key");
  return *it;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

long long get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::uint64_t get_seed(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return static_cast<std::uint64_t>(v.get<long long>());
  fail(path, "expected a non-negative integer");
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

ParamRange parse_interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [lo, hi]");
  ParamRange r{get_number(v[0], path + "[0]"), get_number(v[1], path + "[1]"), std::nullopt};
  if (r.lo > r.hi) fail(path, "lo must not exceed hi");
  return r;
}

SamplingLaw parse_law(const json& v, const std::string& path) {
  const auto s = get_string(v, path);
  if (s == "uniform") return SamplingLaw::uniform;
  if (s == "log_uniform") return SamplingLaw::log_uniform;
  fail(path, "expected \"uniform\" or \"log_uniform\"");
}

const char* law_name(SamplingLaw law) {
  return law == SamplingLaw::uniform ? "uniform" : "log_uniform";
}

const char* init_name(InitKind k) {
  switch (k) {
    case InitKind::fixed: return "fixed";
    case InitKind::box: return "box";
    case InitKind::pattern: return "pattern";
  }
  return "?";
}

constexpr const char* kParamNames[] = {"tau", "epsilon", "mu", "delta"};

std::optional<ParamRange>& range_slot(SearchRanges& r, std::string_view name) {
  if (name == "tau") return r.tau;
  if (name == "epsilon") return r.epsilon;
  if (name == "mu") return r.mu;
  return r.delta;
}

const std::optional<ParamRange>& range_slot(const SearchRanges& r, std::string_view name) {
  return range_slot(const_cast<SearchRanges&>(r), name);
}

OptimizerEntry parse_entry(const json& e, const std::string& path) {
  reject_unknown(e, path, {"kind", "ranges", "sampling"});
  OptimizerEntry entry;
  const auto kind_path = path + ".kind";
  const auto kind = parse_optimizer_kind(get_string(require(e, path, "kind"), kind_path));
  if (!kind) fail(kind_path, "unknown optimizer kind");
  entry.kind = *kind;

  if (auto it = e.find("ranges"); it != e.end()) {
    const auto rpath = path + ".ranges";
    reject_unknown(*it, rpath, {"tau", "epsilon", "mu", "delta"});
    for (const char* p : kParamNames)
      if (auto r = it->find(p); r != it->end())
        range_slot(entry.ranges, p) = parse_interval(*r, rpath + "." + p);
  }
  if (auto it = e.find("sampling"); it != e.end()) {
    const auto spath = path + ".sampling";
    reject_unknown(*it, spath, {"tau", "epsilon", "mu", "delta"});
    for (const char* p : kParamNames) {
      auto law = it->find(p);
      if (law == it->end()) continue;
      auto& slot = range_slot(entry.ranges, p);
      if (!slot) fail(spath + "." + p, "sampling law given for a parameter without a range");
      slot->law = parse_law(*law, spath + "." + p);
      if (slot->law == SamplingLaw::log_uniform && !(slot->lo > 0.0))
        fail(spath + "." + p, "log_uniform needs a positive lower bound");
    }
  }
  return entry;
}

int positive_int(const json& doc, const char* key) {
  const std::string path = std::string("$.") + key;
  const auto v = get_int(require(doc, "$", key), path);
  if (v < 1 || v > 100000000) fail(path, "must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

ExperimentSpec spec_from_json(const json& doc) {
  reject_unknown(doc, "$",
                 {"objective", "init", "optimizers", "search_trials", "mc_runs", "iters",
                  "master_seed"});
  ExperimentSpec spec;

  const auto& obj = require(doc, "$", "objective");
  reject_unknown(obj, "$.objective", {"name", "dim", "seed"});
  spec.objective.name = get_string(require(obj, "$.objective", "name"), "$.objective.name");
  {
    bool known = false;
    for (const auto& n : objective_names()) known = known || n == spec.objective.name;
    if (!known) fail("$.objective.name", "unknown objective '" + spec.objective.name + "'");
  }
  const auto dim = get_int(require(obj, "$.objective", "dim"), "$.objective.dim");
  if (dim < 1) fail("$.objective.dim", "must be >= 1");
  spec.objective.dim = static_cast<int>(dim);
  if (auto it = obj.find("seed"); it != obj.end())
    spec.objective.seed = get_seed(*it, "$.objective.seed");

  const auto& init = require(doc, "$", "init");
  reject_unknown(init, "$.init", {"kind", "lo", "hi", "pattern"});
  const auto kind = get_string(require(init, "$.init", "kind"), "$.init.kind");
  if (kind == "box") {
    spec.init.kind = InitKind::box;
    spec.init.lo = get_number(require(init, "$.init", "lo"), "$.init.lo");
    spec.init.hi = get_number(require(init, "$.init", "hi"), "$.init.hi");
    if (!(spec.init.lo < spec.init.hi)) fail("$.init", "box needs lo < hi");
  } else if (kind == "fixed" || kind == "pattern") {
    spec.init.kind = kind == "fixed" ? InitKind::fixed : InitKind::pattern;
    const auto& pat = require(init, "$.init", "pattern");
    if (!pat.is_array() || pat.empty()) fail("$.init.pattern", "expected a non-empty array");
    spec.init.values.clear();
    for (std::size_t i = 0; i < pat.size(); ++i)
      spec.init.values.push_back(get_number(pat[i], "$.init.pattern[" + std::to_string(i) + "]"));
    if (spec.init.kind == InitKind::fixed && spec.init.values.size() != 1 &&
        spec.init.values.size() != static_cast<std::size_t>(spec.objective.dim))
      fail("$.init.pattern", "fixed init needs 1 or dim values");
  } else {
    fail("$.init.kind", "expected \"fixed\", \"box\" or \"pattern\"");
  }

  const auto& opts = require(doc, "$", "optimizers");
  if (!opts.is_array() || opts.empty()) fail("$.optimizers", "expected a non-empty array");
  for (std::size_t i = 0; i < opts.size(); ++i)
    spec.optimizers.push_back(parse_entry(opts[i], "$.optimizers[" + std::to_string(i) + "]"));

  spec.search_trials = positive_int(doc, "search_trials");
  spec.mc_runs = positive_int(doc, "mc_runs");
  spec.iters = positive_int(doc, "iters");
  if (auto it = doc.find("master_seed"); it != doc.end())
    spec.master_seed = get_seed(*it, "$.master_seed");
  return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
  json doc;
  doc["objective"] = {{"name", spec.objective.name},
                      {"dim", spec.objective.dim},
                      {"seed", spec.objective.seed}};
  json init;
  init["kind"] = init_name(spec.init.kind);
  if (spec.init.kind == InitKind::box) {
    init["lo"] = spec.init.lo;
    init["hi"] = spec.init.hi;
  } else {
    init["pattern"] = spec.init.values;
  }
  doc["init"] = init;
  json opts = json::array();
  for (const auto& e : spec.optimizers) {
    json entry;
    entry["kind"] = std::string(to_string(e.kind));
    json ranges = json::object(), sampling = json::object();
    for (const char* p : kParamNames) {
      const auto& slot = range_slot(e.ranges, p);
      if (!slot) continue;
      ranges[p] = {slot->lo, slot->hi};
      if (slot->law) sampling[p] = law_name(*slot->law);
    }
    entry["ranges"] = ranges;
    if (!sampling.empty()) entry["sampling"] = sampling;
    opts.push_back(entry);
  }
  doc["optimizers"] = opts;
  doc["search_trials"] = spec.search_trials;
  doc["mc_runs"] = spec.mc_runs;
  doc["iters"] = spec.iters;
  doc["master_seed"] = spec.master_seed;
  return doc;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return spec_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> preset_names() { return {"quadratic", "quartic", "camelback", "rosenbrock"}; }

namespace {

ParamRange rng(double lo, double hi) { return ParamRange{lo, hi, std::nullopt}; }

OptimizerEntry momentum_entry(OptimizerKind kind, ParamRange tau, ParamRange mu) {
  OptimizerEntry e;
  e.kind = kind;
  e.ranges.tau = tau;
  e.ranges.mu = mu;
  return e;
}

OptimizerEntry relativistic_entry(OptimizerKind kind, ParamRange eps, ParamRange mu,
                                  ParamRange delta) {
  OptimizerEntry e;
  e.kind = kind;
  e.ranges.epsilon = eps;
  e.ranges.mu = mu;
  e.ranges.delta = delta;
  return e;
}

}  // namespace

ExperimentSpec preset_spec(std::string_view name, Scale scale) {
  const bool paper = scale == Scale::paper;
  ExperimentSpec s;
  s.master_seed = 0;
  if (name == "quadratic") {
    s.objective = {"quadratic", paper ? 500 : 50, 1};
    s.init = InitSpec{InitKind::fixed, {1.0}, -1.0, 1.0};
    s.optimizers = {
        momentum_entry(OptimizerKind::cm, rng(1e-2, 8e-1), rng(0.8, 0.99)),
        momentum_entry(OptimizerKind::nag, rng(1e-3, 5e-1), rng(0.8, 0.99)),
        relativistic_entry(OptimizerKind::rgd, rng(0.0, 6e-1), rng(0.49, 0.95), rng(0.0, 20.0)),
        relativistic_entry(OptimizerKind::crgd, rng(0.0, 6e-1), rng(0.49, 0.95), rng(0.0, 20.0)),
    };
    s.search_trials = 150;
    s.mc_runs = paper ? 50 : 10;
    s.iters = 200;
  } else if (name == "quartic") {
    s.objective = {"quartic", 50, 0};
    s.init = InitSpec{InitKind::fixed, {2.0}, -1.0, 1.0};
    s.optimizers = {
        momentum_entry(OptimizerKind::cm, rng(1e-5, 1e-1), rng(0.8, 0.99)),
        momentum_entry(OptimizerKind::nag, rng(1e-5, 1e-1), rng(0.8, 0.99)),
        relativistic_entry(OptimizerKind::rgd, rng(1e-5, 1e-2), rng(0.6, 0.99), rng(0.0, 30.0)),
        relativistic_entry(OptimizerKind::crgd, rng(1e-5, 1e-2), rng(0.6, 0.99), rng(0.0, 30.0)),
    };
    s.search_trials = paper ? 1000 : 300;
    s.mc_runs = 1;
    s.iters = 500;
  } else if (name == "camelback") {
    s.objective = {"camelback", 2, 0};
    s.init = InitSpec{InitKind::fixed, {5.0, 5.0}, -5.0, 5.0};
    s.optimizers = {
        momentum_entry(OptimizerKind::cm, rng(1e-5, 1e-3), rng(0.8, 0.999)),
        momentum_entry(OptimizerKind::nag, rng(1e-5, 1e-3), rng(0.8, 0.999)),
        relativistic_entry(OptimizerKind::rgd, rng(1e-1, 1.0), rng(0.1, 0.8), rng(0.0, 20.0)),
        relativistic_entry(OptimizerKind::crgd, rng(1e-1, 1.0), rng(0.1, 0.8), rng(0.0, 20.0)),
    };
    s.search_trials = paper ? 1500 : 300;
    s.mc_runs = 1;
    s.iters = 300;
  } else if (name == "rosenbrock") {
    s.objective = {"rosenbrock", 100, 0};
    s.init = InitSpec{InitKind::pattern, {-1.2, 1.0}, -2.048, 2.048};
    s.optimizers = {
        momentum_entry(OptimizerKind::cm, rng(2e-4, 4e-4), rng(0.94, 0.98)),
        momentum_entry(OptimizerKind::nag, rng(2e-4, 4e-4), rng(0.94, 0.98)),
        relativistic_entry(OptimizerKind::rgd, rng(1e-3, 1e-2), rng(0.9, 0.99), rng(0.0, 20.0)),
        relativistic_entry(OptimizerKind::crgd, rng(1e-3, 1e-2), rng(0.9, 0.99), rng(0.0, 20.0)),
    };
    s.search_trials = paper ? 500 : 100;
    s.mc_runs = 1;
    s.iters = 1200;
  } else {
    throw InvalidParameter("unknown preset '" + std::string(name) + "'");
  }
  return s;
}

}  // namespace contact
