#include "contact_opt/integrators.hpp"

#include <cmath>
#include <numeric>

#include "contact_opt/errors.hpp"

namespace contact {

void RelativisticParams::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidParameter("relativistic params: m must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("relativistic params: c must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw InvalidParameter("relativistic params: gamma must be non-negative");
  if (!(clock_unit > 0.0)) throw InvalidParameter("relativistic params: clock_unit must be positive");
}

double RelativisticParams::h(double clock) const {
  if (schedule == DissipationSchedule::constant) return gamma;
  return gamma * (1.0 + 1.0 / clock);
}

ContactState flow_phi1(const ContactState& s, double dtau, const RelativisticParams& p) {
  if (p.schedule == DissipationSchedule::nag_like && !(s.clock > 0.0))
    throw InvalidParameter("flow_phi1: nag_like damping needs a positive dissipation clock");
  const double factor = std::exp(-p.h(s.clock) * dtau);
  ContactState out = s;
  out.P *= factor;
  out.S *= factor;
  return out;
}

Mat flow_phi1_jacobian(const ContactState& s, double dtau, const RelativisticParams& p) {
  const int n = s.dim();
  const double factor = std::exp(-p.h(s.clock) * dtau);
  Vec d(2 * n + 1);
  d.head(n).setOnes();
  d.tail(n + 1).setConstant(factor);
  return d.asDiagonal();
}

ContactState flow_phi2(const ContactState& s, double dtau, const Objective& obj) {
  if (s.X.size() != obj.dim) throw DimensionMismatch("flow_phi2: state and objective differ in dim");
  ContactState out = s;
  out.P -= dtau * obj.grad(s.X);
  out.S -= dtau * obj.eval(s.X);
  return out;
}

ContactState flow_phi3(const ContactState& s, double dtau, const RelativisticParams& p) {
  const double mc = p.m * p.c;
  const double r = std::sqrt(s.P.squaredNorm() + mc * mc);
  ContactState out = s;
  out.X += (p.c * dtau / r) * s.P;
  out.S -= p.c * p.c * p.c * p.m * p.m * dtau / r;
  return out;
}

ContactState time_shift(const ContactState& s, double dtau, double clock_unit) {
  ContactState out = s;
  out.t += dtau;
  out.clock += dtau / clock_unit;
  return out;
}

ContactState strang_step(const ContactState& s, double tau, const Objective& obj,
                         const RelativisticParams& p) {
  const double half = 0.5 * tau;
  ContactState x = time_shift(s, half, p.clock_unit);
  x = flow_phi1(x, half, p);
  x = flow_phi3(x, half, p);
  x = flow_phi2(x, tau, obj);
  x = flow_phi3(x, half, p);
  x = flow_phi1(x, half, p);
  return time_shift(x, half, p.clock_unit);
}

std::pair<double, double> triple_jump_coefficients(int n) {
  if (n < 1) throw InvalidParameter("triple_jump_coefficients: n must be >= 1");
  const double root = std::pow(2.0, 1.0 / (2.0 * n + 1.0));
  return {-root / (2.0 - root), 1.0 / (2.0 - root)};
}

void SplitFlowPlan::validate() const {
  const auto& w = stage_weights;
  if (w.empty()) throw InvalidParameter("split plan: no stages");
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!std::isfinite(w[j])) throw InvalidParameter("split plan: non-finite weight");
    if (std::abs(w[j] - w[w.size() - 1 - j]) > 1e-15)
      throw InvalidParameter("split plan: weights are not palindromic");
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("split plan: weights do not sum to 1");
  if (base_order < 2 || base_order % 2 != 0)
    throw InvalidParameter("split plan: order must be an even integer >= 2");
}

SplitFlowPlan SplitFlowPlan::strang() { return SplitFlowPlan{{1.0}, 2}; }

SplitFlowPlan SplitFlowPlan::triple_jump(const SplitFlowPlan& inner) {
  const auto [z0, z1] = triple_jump_coefficients(inner.base_order / 2);
  return nest(SplitFlowPlan{{z1, z0, z1}, inner.base_order + 2}, inner);
}

SplitFlowPlan SplitFlowPlan::suzuki4() {
  const double w1 = 1.0 / (4.0 - std::cbrt(4.0));
  const double w0 = 1.0 - 4.0 * w1;
  return SplitFlowPlan{{w1, w1, w0, w1, w1}, 4};
}

SplitFlowPlan SplitFlowPlan::nest(const SplitFlowPlan& outer, const SplitFlowPlan& inner) {
  SplitFlowPlan out;
  out.base_order = outer.base_order;
  out.stage_weights.clear();
  out.stage_weights.reserve(outer.stage_weights.size() * inner.stage_weights.size());
  for (double wo : outer.stage_weights)
    for (double wi : inner.stage_weights) out.stage_weights.push_back(wo * wi);
  return out;
}

std::vector<std::string> integrator_names() { return {"strang", "jump4", "suzuki4", "jump6"}; }

SplitFlowPlan plan_from_name(std::string_view name) {
  if (name == "strang") return SplitFlowPlan::strang();
  if (name == "jump4") return SplitFlowPlan::triple_jump(SplitFlowPlan::strang());
  if (name == "suzuki4") return SplitFlowPlan::suzuki4();
  if (name == "jump6")
    return SplitFlowPlan::triple_jump(SplitFlowPlan::triple_jump(SplitFlowPlan::strang()));
  throw InvalidParameter("unknown integrator '" + std::string(name) + "'");
}

ContactState compose_step(const ContactState& s, double tau, const Objective& obj,
                          const RelativisticParams& p, const SplitFlowPlan& plan) {
  plan.validate();
  ContactState x = s;
  for (double w : plan.stage_weights) x = strang_step(x, w * tau, obj, p);
  return x;
}

ContactHamiltonian crgd_hamiltonian(const Objective& obj, const RelativisticParams& p) {
  p.validate();
  const double mc = p.m * p.c;
  ContactHamiltonian H;
  H.value = [obj, p, mc](const ContactState& s) {
    return p.c * std::sqrt(s.P.squaredNorm() + mc * mc) + obj.eval(s.X) + p.h(s.t) * s.S;
  };
  H.grad_X = [obj](const ContactState& s) -> Vec { return obj.grad(s.X); };
  H.grad_P = [p, mc](const ContactState& s) -> Vec {
    return (p.c / std::sqrt(s.P.squaredNorm() + mc * mc)) * s.P;
  };
  H.dS = [p](const ContactState& s) { return p.h(s.t); };
  H.dt = [p](const ContactState& s) {
    if (p.schedule == DissipationSchedule::constant) return 0.0;
    return -p.gamma * s.S / (s.t * s.t);
  };
  H.requires_positive_time = p.schedule == DissipationSchedule::nag_like;
  return H;
}

}  // namespace contact
