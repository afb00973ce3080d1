#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contact_opt/integrators.hpp"

namespace contact {

/// One named geometric or numerical invariant with its measured value.
struct CheckResult {
  std::string family;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  /// Restrict to one family: gradients, conformal, dissipation, orders,
  /// equivalence, specialization.
  std::optional<std::string> only;
};

std::vector<std::string> check_families();
std::vector<CheckResult> run_checks(const CheckOptions& options);

/// Final-time errors of `plan` against a fine RK4 solution of the CRGD
/// Hamiltonian (m = c = 1, gamma = 0.1, nag_like damping, physical clock,
/// random quadratic of dim 4 with eigenvalues in [0.1, 1]) from t = 1 to 2.
std::vector<double> splitting_errors(const SplitFlowPlan& plan, std::span<const double> taus,
                                     std::uint64_t seed);
/// Least-squares slope of log(error) against log(step).
double observed_order(std::span<const double> steps, std::span<const double> errors);

}  // namespace contact
