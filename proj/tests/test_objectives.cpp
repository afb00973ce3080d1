#include <doctest.h>

#include <random>

#include "contact_opt/errors.hpp"
#include "contact_opt/objectives.hpp"

using namespace contact;

namespace {

Vec random_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST_CASE("random quadratic spectrum and symmetry") {
  const QuadraticSpec spec = make_quadratic_spec(1, 500, 1e-3, 1.0);
  CHECK(spec.matrix == spec.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(spec.matrix);
  CHECK(es.eigenvalues().minCoeff() >= 1e-3 - 1e-10);
  CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("random quadratic is reproducible and zero at the origin") {
  const auto a = make_quadratic_spec(42, 20, 0.1, 2.0);
  const auto b = make_quadratic_spec(42, 20, 0.1, 2.0);
  CHECK(a.matrix == b.matrix);
  CHECK(make_quadratic_spec(43, 20, 0.1, 2.0).matrix != a.matrix);
  for (std::uint64_t seed : {0, 1, 7, 99}) {
    const Objective f = make_random_quadratic(seed, 8);
    CHECK(f.eval(Vec::Zero(8)) == 0.0);
  }
}

TEST_CASE("random quadratic gradient matches finite differences") {
  const Objective f = make_random_quadratic(7, 3);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) CHECK(check_gradient(f, random_point(rng, 3, -2, 2)) < 1e-7);
}

TEST_CASE("random quadratic rejects bad parameters") {
  CHECK_THROWS_AS(make_random_quadratic(1, 4, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(make_random_quadratic(1, 4, -1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(make_random_quadratic(1, 4, 2.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(make_random_quadratic(1, 0), InvalidParameter);
}

TEST_CASE("quartic values") {
  const Objective f = quartic(50);
  CHECK(f.eval(Vec::Ones(50)) == doctest::Approx(1275.0).epsilon(1e-15));
  CHECK(f.eval(Vec::Zero(50)) == 0.0);
  const Vec g = quartic(3).grad(Vec::Ones(3));
  CHECK(g[0] == 4.0);
  CHECK(g[1] == 8.0);
  CHECK(g[2] == 12.0);
  CHECK(check_gradient(quartic(3), Vec::Ones(3)) < 1e-7);
}

TEST_CASE("camelback values") {
  const Objective f = camelback();
  CHECK(f.eval(Vec::Zero(2)) == 0.0);
  CHECK(f.grad(Vec::Zero(2)).norm() == 0.0);
  CHECK(std::abs(f.eval(Vec{{-1.75, 0.87}}) - 0.30) < 0.01);
  // (1.8, -0.9) evaluates to 0.316224 exactly in decimal arithmetic.
  CHECK(f.eval(Vec{{1.8, -0.9}}) == doctest::Approx(0.316224).epsilon(1e-12));
  CHECK(check_gradient(f, Vec{{0.3, -0.2}}) < 1e-7);
  CHECK_THROWS_AS(make_objective("camelback", 3, 0), InvalidParameter);
}

TEST_CASE("rosenbrock values") {
  CHECK(rosenbrock(100).eval(Vec::Ones(100)) == 0.0);
  CHECK(rosenbrock(2).eval(Vec{{-1.2, 1.0}}) == doctest::Approx(24.2).epsilon(1e-14));
  std::mt19937_64 rng(11);
  CHECK(check_gradient(rosenbrock(100), random_point(rng, 100, -2, 2)) < 1e-6);
  CHECK_THROWS_AS(rosenbrock(1), InvalidParameter);
}

TEST_CASE("linear objective has exact central differences") {
  const Vec c{{1.5, -2.0, 0.25, 3.0}};
  const Objective f = linear(c);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) CHECK(check_gradient(f, random_point(rng, 4, -10, 10), 0.5) < 1e-12);
}

TEST_CASE("check_gradient errors") {
  CHECK_THROWS_AS(check_gradient(quartic(3), Vec::Ones(2)), DimensionMismatch);
  CHECK_THROWS_AS(check_gradient(quartic(3), Vec::Ones(3), 0.0), InvalidParameter);
}

TEST_CASE("built-in objectives: gradients, minimizers, non-negativity") {
  std::mt19937_64 rng(2024);
  for (const auto& name : objective_names()) {
    CAPTURE(name);
    const int dim = name == "camelback" ? 2 : 10;
    const Objective f = make_objective(name, dim, 3);
    CHECK(f.dim == dim);
    for (int i = 0; i < 100; ++i) {
      const Vec x = random_point(rng, dim, -2, 2);
      CHECK(f.grad(x).size() == dim);
      CHECK(check_gradient(f, x) < 1e-6);
      if (name == "quartic" || name == "quadratic") CHECK(f.eval(x) >= 0.0);
    }
    REQUIRE(f.known_minimizer);
    CHECK(f.grad(*f.known_minimizer).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(f.known_min_value.value_or(-1.0) == 0.0);
  }
  CHECK_THROWS_AS(make_objective("bogus", 2, 0), InvalidParameter);
}
