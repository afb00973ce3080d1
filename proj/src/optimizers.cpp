#include "contact_opt/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contact_opt/errors.hpp"

namespace contact {

namespace {

bool finite_iterate(const OptState& s) {
  constexpr double bound = 1e300;
  auto ok = [](const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!std::isfinite(v[i]) || std::abs(v[i]) > bound) return false;
    return true;
  };
  return ok(s.X) && ok(s.V) && std::isfinite(s.S);
}

OptState finish(OptState next, const OptState& prev) {
  next.X_prev = prev.X;
  next.k = prev.k + 1;
  next.diverged = prev.diverged || !finite_iterate(next);
  return next;
}

// Shared body of rgd and crgd, parameterized by the per-step factor
// mu_eff (mu for rgd, mu_{t+1/2} for crgd).
OptState relativistic_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg,
                           double mu_eff) {
  const double sq = std::sqrt(mu_eff);
  const double eps = cfg.epsilon;
  const double delta = cfg.delta;

  const double a = std::sqrt(mu_eff * delta * s.V.squaredNorm() + 1.0);
  OptState next;
  const Vec x_half = s.X + (sq / a) * s.V;
  const Vec v_half = sq * s.V - eps * obj.grad(x_half);
  const double b = std::sqrt(delta * v_half.squaredNorm() + 1.0);
  next.X = x_half + v_half / b;
  next.V = sq * v_half;

  // S is decoupled; its drift terms carry the rest energy m c^2 = 2/(tau^2 delta)
  // (m = 1), and fall back to the Newtonian kinetic term when delta = 0.
  const double tau = std::sqrt(2.0 * eps);
  const double f_half = obj.eval(x_half);
  double drift;
  if (delta > 0.0) {
    drift = -(1.0 / (eps * delta)) * (1.0 / a + 1.0 / b);
  } else {
    drift = (mu_eff * s.V.squaredNorm() + v_half.squaredNorm()) / (tau * tau);
  }
  next.S = mu_eff * s.S + sq * tau * (drift - f_half);
  return finish(std::move(next), s);
}

}  // namespace

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::gd: return "gd";
    case OptimizerKind::cm: return "cm";
    case OptimizerKind::nag: return "nag";
    case OptimizerKind::rgd: return "rgd";
    case OptimizerKind::crgd: return "crgd";
  }
  return "?";
}

std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name) {
  for (auto k : {OptimizerKind::gd, OptimizerKind::cm, OptimizerKind::nag, OptimizerKind::rgd,
                 OptimizerKind::crgd})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::vector<std::string> optimizer_names() { return {"gd", "cm", "nag", "rgd", "crgd"}; }

void OptimizerConfig::validate() const {
  switch (kind) {
    case OptimizerKind::gd:
    case OptimizerKind::cm:
    case OptimizerKind::nag:
      if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be positive");
      break;
    case OptimizerKind::rgd:
    case OptimizerKind::crgd:
      if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidParameter("epsilon must be positive");
      if (!(delta >= 0.0) || !std::isfinite(delta))
        throw InvalidParameter("delta must be non-negative");
      break;
  }
  if (kind != OptimizerKind::gd && !(mu > 0.0 && mu <= 1.0))
    throw InvalidParameter("mu must lie in (0, 1]");
}

OptState initial_state(OptimizerKind kind, const Vec& x0) {
  OptState s;
  s.X = x0;
  s.V = kind == OptimizerKind::nag ? x0 : Vec::Zero(x0.size());
  s.X_prev = x0;
  return s;
}

OptState gd_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  OptState next = s;
  next.X = s.X - cfg.tau * obj.grad(s.X);
  return finish(std::move(next), s);
}

OptState cm_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  OptState next = s;
  next.V = cfg.mu * s.V - cfg.tau * obj.grad(s.X);
  next.X = s.X + next.V;
  return finish(std::move(next), s);
}

double nag_momentum(std::int64_t k, const OptimizerConfig& cfg) {
  if (cfg.momentum_schedule == MomentumSchedule::constant) return cfg.mu;
  const auto kk = static_cast<double>(k + 1);
  return (kk - 1.0) / (kk + 2.0);
}

OptState nag_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  const double coef = nag_momentum(s.k, cfg);
  OptState next = s;
  next.X = s.V - cfg.tau * obj.grad(s.V);
  next.V = next.X + coef * (next.X - s.X);
  return finish(std::move(next), s);
}

ContactState nag_contact_map(const ContactState& s, double coef) {
  ContactState out = s;
  out.X = s.P;
  out.P = s.P + coef * (s.P - s.X);
  out.S = coef * s.S;
  return out;
}

Mat nag_contact_map_jacobian(int dim, double coef) {
  const int n = dim;
  Mat j = Mat::Zero(2 * n + 1, 2 * n + 1);
  const Mat id = Mat::Identity(n, n);
  j.block(0, n, n, n) = id;
  j.block(n, 0, n, n) = -coef * id;
  j.block(n, n, n, n) = (1.0 + coef) * id;
  j(2 * n, 2 * n) = coef;
  return j;
}

OptState nag_decomposed_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  const double coef = nag_momentum(s.k, cfg);
  ContactState c;
  c.X = s.X;
  c.P = s.V;
  c.S = s.S;
  c = nag_contact_map(c, coef);
  OptState next = s;
  next.X = c.X - cfg.tau * obj.grad(c.X);
  next.V = c.P;
  next.S = c.S;
  return finish(std::move(next), s);
}

NagComparison compare_nag_decomposition(const Objective& obj, const OptimizerConfig& cfg,
                                        const Vec& x0, int iters) {
  OptState a = initial_state(OptimizerKind::nag, x0);
  OptState b = a;
  NagComparison cmp;
  const double fstar = obj.known_min_value.value_or(0.0);
  for (int i = 0; i < iters; ++i) {
    a = nag_step(a, obj, cfg);
    b = nag_decomposed_step(b, obj, cfg);
    if (a.diverged || b.diverged) {
      cmp.max_deviation = std::numeric_limits<double>::infinity();
      break;
    }
    cmp.max_deviation = std::max(cmp.max_deviation, (a.X - b.X).cwiseAbs().maxCoeff());
  }
  cmp.final_gap_nag = obj.eval(a.X) - fstar;
  cmp.final_gap_decomposed = obj.eval(b.X) - fstar;
  return cmp;
}

double dissipation_factor(double mu, double clock) { return std::pow(mu, 1.0 + 1.0 / clock); }

double physical_step(const OptimizerConfig& cfg) { return std::sqrt(2.0 * cfg.epsilon); }

double crgd_midpoint_clock(std::int64_t k, const OptimizerConfig& cfg) {
  const double mid = static_cast<double>(k) + 0.5;
  return cfg.clock == ClockMode::iteration ? mid : mid * physical_step(cfg);
}

OptState rgd_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  return relativistic_step(s, obj, cfg, cfg.mu);
}

OptState crgd_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  return relativistic_step(s, obj, cfg, dissipation_factor(cfg.mu, crgd_midpoint_clock(s.k, cfg)));
}

OptState step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg) {
  switch (cfg.kind) {
    case OptimizerKind::gd: return gd_step(s, obj, cfg);
    case OptimizerKind::cm: return cm_step(s, obj, cfg);
    case OptimizerKind::nag: return nag_step(s, obj, cfg);
    case OptimizerKind::rgd: return rgd_step(s, obj, cfg);
    case OptimizerKind::crgd: return crgd_step(s, obj, cfg);
  }
  return s;
}

RelativisticParams relativistic_params_for(const OptimizerConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw InvalidParameter("splitting form needs delta > 0");
  const double tau = physical_step(cfg);
  RelativisticParams p;
  p.m = 1.0;
  p.c = 2.0 / (tau * std::sqrt(cfg.delta));
  p.gamma = -std::log(cfg.mu) / tau;
  p.schedule = cfg.kind == OptimizerKind::crgd ? DissipationSchedule::nag_like
                                               : DissipationSchedule::constant;
  p.clock_unit = cfg.clock == ClockMode::iteration ? tau : 1.0;
  return p;
}

ContactState to_contact_state(const OptState& s, const OptimizerConfig& cfg) {
  const double tau = physical_step(cfg);
  ContactState c;
  c.X = s.X;
  c.P = (2.0 / tau) * s.V;
  c.S = s.S;
  c.t = static_cast<double>(s.k) * tau;
  c.clock = cfg.clock == ClockMode::iteration ? static_cast<double>(s.k) : c.t;
  return c;
}

OptState from_contact_state(const ContactState& c, const OptimizerConfig& cfg, std::int64_t k) {
  const double tau = physical_step(cfg);
  OptState s;
  s.X = c.X;
  s.V = (0.5 * tau) * c.P;
  s.S = c.S;
  s.k = k;
  s.X_prev = c.X;
  return s;
}

namespace {

template <class Advance>
RunRecord run_with(const Objective& obj, const OptimizerConfig& cfg, const Vec& x0, int iters,
                   Advance&& advance) {
  if (iters < 1) throw InvalidParameter("run: iters must be >= 1");
  if (x0.size() != obj.dim) throw DimensionMismatch("run: initial point has wrong dimension");
  cfg.validate();
  const double fstar = obj.known_min_value.value_or(0.0);
  RunRecord rec;
  rec.kind = cfg.kind;
  rec.params = cfg;
  rec.trace.reserve(static_cast<std::size_t>(iters) + 1);
  rec.trace.push_back(obj.eval(x0) - fstar);
  OptState s = initial_state(cfg.kind, x0);
  for (int i = 0; i < iters; ++i) {
    s = advance(s);
    const double gap = s.diverged ? std::numeric_limits<double>::infinity() : obj.eval(s.X) - fstar;
    if (s.diverged || !std::isfinite(gap) || std::abs(gap) > 1e300) {
      rec.trace.push_back(std::numeric_limits<double>::infinity());
      rec.diverged = true;
      break;
    }
    rec.trace.push_back(gap);
  }
  return rec;
}

}  // namespace

RunRecord run(const Objective& obj, const OptimizerConfig& cfg, const Vec& x0, int iters) {
  return run_with(obj, cfg, x0, iters, [&](const OptState& s) { return step(s, obj, cfg); });
}

RunRecord run_split(const Objective& obj, const OptimizerConfig& cfg, const Vec& x0, int iters,
                    const SplitFlowPlan& plan) {
  if (cfg.kind != OptimizerKind::rgd && cfg.kind != OptimizerKind::crgd)
    throw InvalidParameter("run_split: only rgd and crgd have a splitting form");
  plan.validate();
  const RelativisticParams p = relativistic_params_for(cfg);
  const double tau = physical_step(cfg);
  return run_with(obj, cfg, x0, iters, [&](const OptState& s) {
    ContactState c = compose_step(to_contact_state(s, cfg), tau, obj, p, plan);
    OptState next = from_contact_state(c, cfg, s.k + 1);
    next.X_prev = s.X;
    next.diverged = is_diverged(c);
    return next;
  });
}

}  // namespace contact
