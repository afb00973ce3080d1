#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace contact {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Differentiable scalar objective with an analytic gradient.
///
/// Objectives are immutable once built. The evaluation callables capture
/// their data by shared ownership, so copies are cheap and evaluation is
/// safe from many threads.
struct Objective {
  std::string name;
  int dim = 0;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::optional<double> known_min_value;
  std::optional<Vec> known_minimizer;

  double operator()(const Vec& x) const { return eval(x); }
};

/// f(X) = 1/2 X^T A X with A = Q diag(lambda) Q^T, lambda_i ~ U[eigen_lo, eigen_hi]
/// and Q the sign-fixed orthogonal QR factor of a seeded Gaussian matrix.
struct QuadraticSpec {
  Mat matrix;
  std::uint64_t seed = 0;
  double eigen_lo = 0.0;
  double eigen_hi = 0.0;
};

QuadraticSpec make_quadratic_spec(std::uint64_t seed, int dim, double eigen_lo,
                                  double eigen_hi);
Objective quadratic_from_spec(const QuadraticSpec& spec);
Objective make_random_quadratic(std::uint64_t seed, int dim, double eigen_lo = 1e-3,
                                double eigen_hi = 1.0);

/// sum_i i * x_i^4 (1-based i).
Objective quartic(int dim);

/// 2x1^2 - 1.05x1^4 + x1^6/6 + x1x2 + x2^2.
Objective camelback();

/// Chained Rosenbrock, coefficient 100, minimum 0 at (1,...,1).
Objective rosenbrock(int dim);

/// f(X) = <c, X>. Used to sanity-check the gradient checker.
Objective linear(Vec c);

/// Worst componentwise central-difference error, each component scaled by
/// max(1, |analytic component|).
double check_gradient(const Objective& obj, const Vec& x, double h = 1e-5);

/// Built-in objectives selectable by name.
std::vector<std::string> objective_names();
Objective make_objective(std::string_view name, int dim, std::uint64_t seed);

}  // namespace contact
