#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contact_opt/contact_core.hpp"
#include "contact_opt/integrators.hpp"
#include "contact_opt/objectives.hpp"

namespace contact {

enum class OptimizerKind { gd, cm, nag, rgd, crgd };
enum class MomentumSchedule { constant, nesterov_k };
enum class ClockMode { iteration, physical };

std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name);
std::vector<std::string> optimizer_names();

/// Hyperparameters of every optimizer kind; each kind reads only its own.
///   gd: tau            cm: tau, mu           nag: tau, mu, momentum_schedule
///   rgd: epsilon, mu, delta                  crgd: epsilon, mu, delta, clock
/// with epsilon = tau^2/2m, mu = exp(-gamma tau), delta = 4/(c tau)^2.
struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::gd;
  double tau = 1e-2;
  double epsilon = 1e-2;
  double mu = 0.9;
  double delta = 0.0;
  MomentumSchedule momentum_schedule = MomentumSchedule::constant;
  ClockMode clock = ClockMode::iteration;

  void validate() const;
};

/// Iterate of a discrete optimizer.
///
/// V is the velocity for cm/rgd/crgd and the look-ahead point P of NAG.
/// S is the action variable traced by crgd/rgd and the decomposed NAG.
struct OptState {
  Vec X;
  Vec V;
  double S = 0.0;
  std::int64_t k = 0;
  Vec X_prev;
  bool diverged = false;
};

/// X = x0, S = 0, k = 0; V = 0 except for NAG, whose look-ahead starts at x0.
OptState initial_state(OptimizerKind kind, const Vec& x0);

OptState gd_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);
/// Heavy ball: V+ = mu V - tau grad f(X), X+ = X + V+.
OptState cm_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);
/// X+ = P - tau grad f(P), P+ = X+ + c_k (X+ - X) with c_k = mu or (k-1)/(k+2), k = s.k + 1.
OptState nag_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);
OptState rgd_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);
OptState crgd_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);
OptState step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);

/// NAG momentum coefficient for the step leaving iteration s.k.
double nag_momentum(std::int64_t k, const OptimizerConfig& cfg);

/// Contact stage of the NAG decomposition in std2 coordinates:
/// X+ = P, P+ = P + coef (P - X), S+ = coef S. Affine with factor `coef`.
ContactState nag_contact_map(const ContactState& s, double coef);
Mat nag_contact_map_jacobian(int dim, double coef);

/// Contact stage followed by a gradient step on X; momentum index as in nag_step.
OptState nag_decomposed_step(const OptState& s, const Objective& obj, const OptimizerConfig& cfg);

/// Max |X_k(nag) - X_k(decomposed)| over a run. Reported, not asserted.
struct NagComparison {
  double max_deviation = 0.0;
  double final_gap_nag = 0.0;
  double final_gap_decomposed = 0.0;
};
NagComparison compare_nag_decomposition(const Objective& obj, const OptimizerConfig& cfg,
                                        const Vec& x0, int iters);

/// mu_t = mu^{1 + 1/t}.
double dissipation_factor(double mu, double clock);
/// Clock value at the midpoint of step k: k + 1/2, or (k + 1/2) sqrt(2 epsilon)
/// under the physical clock (m = 1).
double crgd_midpoint_clock(std::int64_t k, const OptimizerConfig& cfg);

/// Physical step size behind an rgd/crgd config under the m = 1 convention:
/// tau = sqrt(2 epsilon).
double physical_step(const OptimizerConfig& cfg);

/// Splitting parameters equivalent to an rgd/crgd config: m = 1, tau = sqrt(2 epsilon),
/// c = 2 / (tau sqrt(delta)), gamma = -ln(mu) / tau. Requires delta > 0.
RelativisticParams relativistic_params_for(const OptimizerConfig& cfg);
/// Maps (X, V, S, k) to the contact state (X, P = 2V/tau, S, t = k tau) and back.
ContactState to_contact_state(const OptState& s, const OptimizerConfig& cfg);
OptState from_contact_state(const ContactState& c, const OptimizerConfig& cfg, std::int64_t k);

/// Per-iteration objective-gap trace of one run.
struct RunRecord {
  OptimizerKind kind = OptimizerKind::gd;
  OptimizerConfig params;
  std::vector<double> trace;
  bool diverged = false;
  int trial = 0;
  std::uint64_t trial_seed = 0;
};

/// iters steps from x0; trace[k] = f(X_k) - f*. A divergent step appends +inf
/// and ends the trace. Without a known minimum the raw f values are traced.
RunRecord run(const Objective& obj, const OptimizerConfig& cfg, const Vec& x0, int iters);

/// As run(), but advancing rgd/crgd with a composed splitting plan at
/// tau = sqrt(2 epsilon) (m = 1). Requires delta > 0.
RunRecord run_split(const Objective& obj, const OptimizerConfig& cfg, const Vec& x0, int iters,
                    const SplitFlowPlan& plan);

}  // namespace contact
