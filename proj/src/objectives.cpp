#include "contact_opt/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "contact_opt/errors.hpp"

namespace contact {

QuadraticSpec make_quadratic_spec(std::uint64_t seed, int dim, double eigen_lo,
                                  double eigen_hi) {
  if (dim < 1) throw InvalidParameter("quadratic: dim must be >= 1");
  if (!(eigen_lo > 0.0)) throw InvalidParameter("quadratic: eigen_lo must be positive");
  if (!(eigen_lo <= eigen_hi)) throw InvalidParameter("quadratic: eigen_lo > eigen_hi");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = gauss(rng);

  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign-fix so diag(R) > 0; this makes Q Haar-distributed and unique.
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);

  std::uniform_real_distribution<double> unif(eigen_lo, eigen_hi);
  Vec lambda(dim);
  for (int i = 0; i < dim; ++i) lambda[i] = unif(rng);

  Mat a = q * lambda.asDiagonal() * q.transpose();
  // Symmetrize exactly: copy the upper triangle onto the lower.
  for (int j = 0; j < dim; ++j)
    for (int i = j + 1; i < dim; ++i) a(i, j) = a(j, i);

  return QuadraticSpec{std::move(a), seed, eigen_lo, eigen_hi};
}

Objective quadratic_from_spec(const QuadraticSpec& spec) {
  auto a = std::make_shared<const Mat>(spec.matrix);
  const int dim = static_cast<int>(a->rows());
  Objective obj;
  obj.name = "quadratic";
  obj.dim = dim;
  obj.eval = [a](const Vec& x) { return 0.5 * x.dot(*a * x); };
  obj.grad = [a](const Vec& x) -> Vec { return *a * x; };
  obj.known_min_value = 0.0;
  obj.known_minimizer = Vec::Zero(dim);
  return obj;
}

Objective make_random_quadratic(std::uint64_t seed, int dim, double eigen_lo,
                                double eigen_hi) {
  return quadratic_from_spec(make_quadratic_spec(seed, dim, eigen_lo, eigen_hi));
}

Objective quartic(int dim) {
  if (dim < 1) throw InvalidParameter("quartic: dim must be >= 1");
  Objective obj;
  obj.name = "quartic";
  obj.dim = dim;
  obj.eval = [](const Vec& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double x2 = x[i] * x[i];
      s += static_cast<double>(i + 1) * x2 * x2;
    }
    return s;
  };
  obj.grad = [](const Vec& x) -> Vec {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      g[i] = 4.0 * static_cast<double>(i + 1) * x[i] * x[i] * x[i];
    return g;
  };
  obj.known_min_value = 0.0;
  obj.known_minimizer = Vec::Zero(dim);
  return obj;
}

Objective camelback() {
  Objective obj;
  obj.name = "camelback";
  obj.dim = 2;
  obj.eval = [](const Vec& x) {
    const double a = x[0], b = x[1];
    const double a2 = a * a;
    return 2.0 * a2 - 1.05 * a2 * a2 + a2 * a2 * a2 / 6.0 + a * b + b * b;
  };
  obj.grad = [](const Vec& x) -> Vec {
    const double a = x[0], b = x[1];
    const double a2 = a * a;
    Vec g(2);
    g[0] = 4.0 * a - 4.2 * a2 * a + a2 * a2 * a + b;
    g[1] = a + 2.0 * b;
    return g;
  };
  obj.known_min_value = 0.0;
  obj.known_minimizer = Vec::Zero(2);
  return obj;
}

Objective rosenbrock(int dim) {
  if (dim < 2) throw InvalidParameter("rosenbrock: dim must be >= 2");
  Objective obj;
  obj.name = "rosenbrock";
  obj.dim = dim;
  obj.eval = [](const Vec& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double u = x[i + 1] - x[i] * x[i];
      const double v = 1.0 - x[i];
      s += 100.0 * u * u + v * v;
    }
    return s;
  };
  obj.grad = [](const Vec& x) -> Vec {
    const Eigen::Index n = x.size();
    Vec g = Vec::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double u = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * u - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * u;
    }
    return g;
  };
  obj.known_min_value = 0.0;
  obj.known_minimizer = Vec::Ones(dim);
  return obj;
}

Objective linear(Vec c) {
  auto coef = std::make_shared<const Vec>(std::move(c));
  Objective obj;
  obj.name = "linear";
  obj.dim = static_cast<int>(coef->size());
  obj.eval = [coef](const Vec& x) { return coef->dot(x); };
  obj.grad = [coef](const Vec&) -> Vec { return *coef; };
  return obj;
}

double check_gradient(const Objective& obj, const Vec& x, double h) {
  if (!(h > 0.0)) throw InvalidParameter("check_gradient: h must be positive");
  if (x.size() != obj.dim) throw DimensionMismatch("check_gradient: point has wrong dimension");
  const Vec g = obj.grad(x);
  double worst = 0.0;
  Vec xp = x;
  for (int i = 0; i < obj.dim; ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = obj.eval(xp);
    xp[i] = xi - h;
    const double fm = obj.eval(xp);
    xp[i] = xi;
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst;
}

std::vector<std::string> objective_names() {
  return {"quadratic", "quartic", "camelback", "rosenbrock"};
}

Objective make_objective(std::string_view name, int dim, std::uint64_t seed) {
  if (name == "quadratic") return make_random_quadratic(seed, dim);
  if (name == "quartic") return quartic(dim);
  if (name == "camelback") {
    if (dim != 2) throw InvalidParameter("camelback: dim is fixed at 2");
    return camelback();
  }
  if (name == "rosenbrock") return rosenbrock(dim);
  throw InvalidParameter("unknown objective '" + std::string(name) + "'");
}

}  // namespace contact
