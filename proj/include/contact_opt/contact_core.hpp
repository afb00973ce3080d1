#pragma once

#include <functional>
#include <vector>

#include "contact_opt/objectives.hpp"

namespace contact {

/// Point (X, P, S, t) of the time-extended contact phase space.
///
/// `clock` is the dissipation clock read by time-dependent damping. Under
/// the physical clock it equals t; under the iteration clock it counts
/// optimizer steps (one full step advances it by 1).
struct ContactState {
  Vec X;
  Vec P;
  double S = 0.0;
  double t = 0.0;
  double clock = 0.0;

  int dim() const { return static_cast<int>(X.size()); }
};

ContactState make_state(Vec x, Vec p, double s = 0.0, double t = 0.0);

bool is_finite(const ContactState& s);
/// Non-finite component or any magnitude above 1e300.
bool is_diverged(const ContactState& s);

/// Tangent vector (dX, dP, dS); the t direction is not part of the contact form.
struct Tangent {
  Vec dX;
  Vec dP;
  double dS = 0.0;
};

enum class ContactForm { std1, std2 };

/// dS - <P, dX>
double eta_std1(const ContactState& s, const Tangent& v);
/// dS - 1/2 <P, dX> + 1/2 <X, dP>
double eta_std2(const ContactState& s, const Tangent& v);
double eta(ContactForm form, const ContactState& s, const Tangent& v);

/// Coefficients of the form at s in (dX, dP, dS) ordering, length 2n+1.
Vec form_covector(ContactForm form, const ContactState& s);

/// Contactomorphism from std1 to std2 coordinates:
/// (X, P, S) -> (X + P, (P - X)/2, S - <X, P>/2). t and clock pass through.
ContactState map_F(const ContactState& s);
/// Exact Jacobian of map_F in (X, P, S) ordering.
Mat map_F_jacobian(const ContactState& s);

/// Pushforward of a tangent through a (2n+1)x(2n+1) Jacobian.
Tangent push_forward(const Mat& jacobian, const Tangent& v);

/// Generic, possibly time-dependent contact Hamiltonian H(X, P, S, t).
struct ContactHamiltonian {
  std::function<double(const ContactState&)> value;
  std::function<Vec(const ContactState&)> grad_X;
  std::function<Vec(const ContactState&)> grad_P;
  std::function<double(const ContactState&)> dS;
  std::function<double(const ContactState&)> dt;
  /// Set for Hamiltonians with 1/t terms; integration must start at t > 0.
  bool requires_positive_time = false;
};

/// Time derivative of a state along a contact vector field; dt is always 1.
struct StateRate {
  Vec dX;
  Vec dP;
  double dS = 0.0;
  double dt = 1.0;
};

/// Xdot = grad_P H, Pdot = -grad_X H - P dH/dS, Sdot = <grad_P H, P> - H.
StateRate contact_field_std1(const ContactHamiltonian& H, const ContactState& s);
/// Xdot = grad_P H - X/2 dH/dS, Pdot = -grad_X H - P/2 dH/dS,
/// Sdot = (<X, grad_X H> + <P, grad_P H>)/2 - H.
StateRate contact_field_std2(const ContactHamiltonian& H, const ContactState& s);
StateRate contact_field(const ContactHamiltonian& H, ContactForm coords, const ContactState& s);

struct Trajectory {
  std::vector<ContactState> states;
  double dt = 0.0;
  /// Set when a component went non-finite or above 1e300; `states` stops there.
  bool diverged = false;
};

/// Classical RK4 on the chosen contact field, n steps of size dt.
Trajectory reference_integrate(const ContactHamiltonian& H, ContactForm coords,
                               const ContactState& s0, double dt, int n);

/// Max relative residual of dH/dt = -(dH/dS) H + dH/dt along a uniform
/// trajectory, using centered differences of H.
double dissipation_residual(const ContactHamiltonian& H, const Trajectory& traj);

/// A state map with an optional exact Jacobian in (X, P, S) ordering.
struct ContactMap {
  std::function<ContactState(const ContactState&)> apply;
  std::function<Mat(const ContactState&)> jacobian;
};

/// Central-difference Jacobian, step 1e-6 * max(1, |coordinate|).
Mat fd_jacobian(const std::function<ContactState(const ContactState&)>& map,
                const ContactState& s);

struct ConformalFit {
  double lambda = 0.0;
  double residual = 0.0;
};

/// Least-squares fit of map^* eta_target = lambda * eta_source over all 2n+1
/// covector components. Throws DegenerateMap when |lambda| < 1e-10.
ConformalFit conformal_factor(const ContactMap& map, ContactForm source, ContactForm target,
                              const ContactState& s);
ConformalFit conformal_factor(const ContactMap& map, ContactForm form, const ContactState& s);

}  // namespace contact
