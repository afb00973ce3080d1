#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contact_opt/contact_core.hpp"
#include "contact_opt/objectives.hpp"

namespace contact {

/// h(t) = gamma (constant) or h(t) = gamma (1 + 1/t) (nag_like).
enum class DissipationSchedule { constant, nag_like };

/// Physical constants of H = c sqrt(|P|^2 + (mc)^2) + f(X) + h(t) S.
struct RelativisticParams {
  double m = 1.0;
  double c = 1.0;
  double gamma = 0.0;
  DissipationSchedule schedule = DissipationSchedule::constant;
  /// Physical time per dissipation-clock tick. 1 gives the physical clock;
  /// the optimizer step tau gives the iteration clock.
  double clock_unit = 1.0;

  void validate() const;
  /// Damping rate at the given clock value.
  double h(double clock) const;
};

/// (X, P e^{-h dtau}, S e^{-h dtau}, t), h read from the state's clock.
ContactState flow_phi1(const ContactState& s, double dtau, const RelativisticParams& p);
/// (X, P - grad f(X) dtau, S - f(X) dtau, t)
ContactState flow_phi2(const ContactState& s, double dtau, const Objective& obj);
/// Relativistic drift: X += c P dtau / r, S -= c^3 m^2 dtau / r, r = sqrt(|P|^2 + (mc)^2).
ContactState flow_phi3(const ContactState& s, double dtau, const RelativisticParams& p);
/// t += dtau and clock += dtau / clock_unit.
ContactState time_shift(const ContactState& s, double dtau, double clock_unit = 1.0);

/// Exact (X, P, S) Jacobian of flow_phi1 at s (diagonal).
Mat flow_phi1_jacobian(const ContactState& s, double dtau, const RelativisticParams& p);

/// One palindromic second-order step:
/// shift(tau/2) phi1(tau/2) phi3(tau/2) phi2(tau) phi3(tau/2) phi1(tau/2) shift(tau/2).
ContactState strang_step(const ContactState& s, double tau, const Objective& obj,
                         const RelativisticParams& p);

/// z0(n) = -2^{1/(2n+1)} / (2 - 2^{1/(2n+1)}), z1(n) = 1 / (2 - 2^{1/(2n+1)}).
std::pair<double, double> triple_jump_coefficients(int n);

/// Palindromic list of Strang substep weights making up one composed step.
struct SplitFlowPlan {
  std::vector<double> stage_weights{1.0};
  int base_order = 2;

  /// Throws InvalidParameter if not palindromic (1e-15) or weights do not sum to 1 (1e-12).
  void validate() const;

  static SplitFlowPlan strang();
  /// Raises an order-2n plan to order 2n+2 with weights (z1, z0, z1).
  static SplitFlowPlan triple_jump(const SplitFlowPlan& inner);
  /// Suzuki's 5-stage fourth-order set w1 = w2 = 1/(4 - 4^{1/3}), w0 = 1 - 4 w1.
  static SplitFlowPlan suzuki4();
  /// Nests `inner` inside every stage of `outer`.
  static SplitFlowPlan nest(const SplitFlowPlan& outer, const SplitFlowPlan& inner);
};

/// Preset names: "strang", "jump4", "suzuki4", "jump6".
std::vector<std::string> integrator_names();
SplitFlowPlan plan_from_name(std::string_view name);

ContactState compose_step(const ContactState& s, double tau, const Objective& obj,
                          const RelativisticParams& p, const SplitFlowPlan& plan);

/// The CRGD contact Hamiltonian with h evaluated at the physical time t.
ContactHamiltonian crgd_hamiltonian(const Objective& obj, const RelativisticParams& p);

}  // namespace contact
