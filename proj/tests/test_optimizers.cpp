#include <doctest.h>

#include <cmath>
#include <random>

#include "contact_opt/errors.hpp"
#include "contact_opt/optimizers.hpp"

using namespace contact;

namespace {

const Objective half_square = make_random_quadratic(0, 1, 1.0, 1.0);

OptimizerConfig config(OptimizerKind kind) {
  OptimizerConfig c;
  c.kind = kind;
  return c;
}

OptState one_d(double x, double v = 0.0) {
  OptState s;
  s.X = Vec::Constant(1, x);
  s.V = Vec::Constant(1, v);
  s.X_prev = s.X;
  return s;
}

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t s) : g(s) {}
  double u(double lo = -1, double hi = 1) { return std::uniform_real_distribution<double>(lo, hi)(g); }
  Vec v(int n, double lo = -1, double hi = 1) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = u(lo, hi);
    return x;
  }
};

}  // namespace

TEST_CASE("unit quadratic helper is x^2/2") {
  CHECK(half_square.eval(Vec::Constant(1, 2.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("names round-trip") {
  for (const auto& n : optimizer_names()) {
    const auto k = parse_optimizer_kind(n);
    REQUIRE(k);
    CHECK(to_string(*k) == n);
  }
  CHECK_FALSE(parse_optimizer_kind("adam"));
}

TEST_CASE("config validation") {
  auto c = config(OptimizerKind::gd);
  c.tau = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = config(OptimizerKind::cm);
  c.mu = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = config(OptimizerKind::crgd);
  c.epsilon = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = config(OptimizerKind::rgd);
  c.delta = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = config(OptimizerKind::rgd);
  c.mu = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c.mu = 1.0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("gd") {
  auto c = config(OptimizerKind::gd);
  c.tau = 0.1;
  OptState s = one_d(1.0);
  CHECK(gd_step(s, half_square, c).X[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(gd_step(one_d(0.0), half_square, c).X[0] == 0.0);
  for (int k = 1; k <= 100; ++k) {
    s = gd_step(s, half_square, c);
    CHECK(s.X[0] == doctest::Approx(std::pow(0.9, k)).epsilon(1e-12));
  }
}

TEST_CASE("gd trace is monotone below the stability bound") {
  const Objective f = make_random_quadratic(4, 20);
  auto c = config(OptimizerKind::gd);
  c.tau = 1.9;
  const auto rec = run(f, c, Vec::Ones(20), 200);
  for (std::size_t i = 1; i < rec.trace.size(); ++i) CHECK(rec.trace[i] <= rec.trace[i - 1]);
}

TEST_CASE("cm heavy ball") {
  auto c = config(OptimizerKind::cm);
  c.tau = 0.1;
  c.mu = 0.9;
  OptState s = one_d(1.0);
  s = cm_step(s, half_square, c);
  CHECK(s.X[0] == doctest::Approx(0.9).epsilon(1e-15));
  s = cm_step(s, half_square, c);
  CHECK(s.X[0] == doctest::Approx(0.72).epsilon(1e-14));
  CHECK(cm_step(one_d(0.0), half_square, c).X[0] == 0.0);

  auto g = config(OptimizerKind::gd);
  g.tau = 0.1;
  c.mu = 0.0;
  const auto a = cm_step(one_d(0.7), half_square, c);
  CHECK(a.X[0] == gd_step(one_d(0.7), half_square, g).X[0]);
}

TEST_CASE("nag with constant momentum") {
  auto c = config(OptimizerKind::nag);
  c.tau = 0.1;
  c.mu = 0.5;
  const OptState s0 = initial_state(OptimizerKind::nag, Vec::Ones(1));
  CHECK(s0.V[0] == 1.0);
  const OptState s1 = nag_step(s0, half_square, c);
  CHECK(s1.X[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s1.V[0] == doctest::Approx(0.85).epsilon(1e-15));

  const Objective flat = linear(Vec::Zero(2));
  OptState s = initial_state(OptimizerKind::nag, Vec{{0.3, -0.2}});
  for (int i = 0; i < 10; ++i) s = nag_step(s, flat, c);
  CHECK(s.X == Vec{{0.3, -0.2}});
  CHECK(s.V == Vec{{0.3, -0.2}});
}

TEST_CASE("nag nesterov schedule") {
  auto c = config(OptimizerKind::nag);
  c.momentum_schedule = MomentumSchedule::nesterov_k;
  CHECK(nag_momentum(0, c) == 0.0);
  CHECK(nag_momentum(2, c) == doctest::Approx(2.0 / 5.0));
  c.tau = 0.1;
  OptState s = initial_state(OptimizerKind::nag, Vec::Ones(1));
  s.V[0] = 2.0;
  const OptState a = nag_step(s, half_square, c);
  CHECK(a.X[0] == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(a.V[0] == a.X[0]);
}

TEST_CASE("nag contact map") {
  const ContactState s = make_state(Vec{{1.0, 2.0}}, Vec{{3.0, -1.0}}, 4.0, 1.0);
  const ContactState a = nag_contact_map(s, 0.0);
  CHECK(a.X == s.P);
  CHECK(a.P == a.X);
  CHECK(a.S == 0.0);
  for (int k = 2; k <= 50; ++k) {
    const double coef = (k - 1.0) / (k + 2.0);
    const auto fit = conformal_factor(
        ContactMap{[coef](const ContactState& x) { return nag_contact_map(x, coef); },
                   [coef](const ContactState& x) { return nag_contact_map_jacobian(x.dim(), coef); }},
        ContactForm::std2, s);
    CHECK(std::abs(fit.lambda - coef) < 1e-12);
    CHECK(fit.residual < 1e-12);
  }
  const ContactState mid = make_state(Vec::Zero(2), Vec::Zero(2), 0.5, 1.0);
  CHECK((fd_jacobian([](const ContactState& x) { return nag_contact_map(x, 0.3); }, mid) -
         nag_contact_map_jacobian(2, 0.3))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("nag decomposed step") {
  auto c = config(OptimizerKind::nag);
  c.momentum_schedule = MomentumSchedule::nesterov_k;
  c.tau = 0.05;
  const Objective f = make_random_quadratic(2, 3, 0.1, 1.0);
  OptState s = initial_state(OptimizerKind::nag, Vec{{1.0, -0.5, 0.3}});
  s.S = 2.0;
  OptState first = nag_decomposed_step(s, f, c);
  CHECK(first.V == s.V);
  double product = 2.0;
  for (int i = 0; i < 30; ++i) {
    s = nag_decomposed_step(s, f, c);
    const double j = static_cast<double>(i + 1);
    product *= (j - 1.0) / (j + 2.0);
    CHECK(s.S == doctest::Approx(product).epsilon(1e-14));
  }

  OptState h;
  h.X = Vec::Constant(1, 1.0);
  h.V = Vec::Constant(1, 0.6);
  h.k = 2;
  h.X_prev = h.X;
  const OptState one = nag_decomposed_step(h, half_square, c);
  const double coef = 2.0 / 5.0;
  CHECK(one.X[0] == doctest::Approx(0.6 - 0.05 * 0.6).epsilon(1e-15));
  CHECK(one.V[0] == doctest::Approx(0.6 + coef * (0.6 - 1.0)).epsilon(1e-15));

  // Sequence-level agreement with nag_step is reported, not assumed.
  const auto cmp = compare_nag_decomposition(f, c, Vec{{1.0, -0.5, 0.3}}, 100);
  CHECK(cmp.max_deviation > 0.0);
  CHECK(cmp.final_gap_nag < f.eval(Vec{{1.0, -0.5, 0.3}}));
}

TEST_CASE("rgd examples") {
  auto c = config(OptimizerKind::rgd);
  c.epsilon = 0.1;
  c.mu = 0.81;
  c.delta = 1.0;
  const OptState s = rgd_step(one_d(1.0), half_square, c);
  CHECK(s.X[0] == doctest::Approx(1.0 - 0.1 / std::sqrt(1.01)).epsilon(1e-15));
  CHECK(s.V[0] == doctest::Approx(0.9 * -0.1).epsilon(1e-15));

  // delta = 0, mu = 1: velocity-Verlet-like conservative step
  c.delta = 0.0;
  c.mu = 1.0;
  const OptState v = rgd_step(one_d(1.0, 0.2), half_square, c);
  CHECK(v.X[0] == doctest::Approx(1.2 + (0.2 - 0.1 * 1.2)).epsilon(1e-15));
  CHECK(v.V[0] == doctest::Approx(0.2 - 0.1 * 1.2).epsilon(1e-15));
}

TEST_CASE("relativistic steps have bounded travel") {
  Rng r(9);
  const Objective f = quartic(4);
  for (auto kind : {OptimizerKind::rgd, OptimizerKind::crgd}) {
    auto c = config(kind);
    for (int i = 0; i < 200; ++i) {
      c.epsilon = std::pow(10.0, r.u(-4, 0));
      c.mu = r.u(0.1, 1.0);
      c.delta = std::pow(10.0, r.u(-2, 2));
      OptState s;
      s.X = r.v(4, -2, 2);
      s.V = r.v(4) * std::pow(10.0, r.u(-3, 4));
      s.X_prev = s.X;
      s.k = static_cast<std::int64_t>(r.u(0, 100));
      const OptState n = step(s, f, c);
      CHECK((n.X - s.X).norm() <= 2.0 / std::sqrt(c.delta) * (1 + 1e-12));
    }
  }
}

TEST_CASE("crgd: dissipation clock and reduction to rgd") {
  auto c = config(OptimizerKind::crgd);
  c.mu = 0.9;
  CHECK(dissipation_factor(c.mu, crgd_midpoint_clock(0, c)) == doctest::Approx(0.9 * 0.9 * 0.9).epsilon(1e-15));
  double prev = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double m = dissipation_factor(c.mu, crgd_midpoint_clock(k, c));
    CHECK(m > prev);
    prev = m;
  }
  CHECK(std::abs(dissipation_factor(c.mu, crgd_midpoint_clock(1000000, c)) - 0.9) < 1e-6);
  CHECK(dissipation_factor(1.0, 0.5) == 1.0);
  CHECK(dissipation_factor(1.0, 7.5) == 1.0);

  c.epsilon = 0.1;
  c.delta = 1.0;
  const OptState s = crgd_step(one_d(1.0), half_square, c);
  CHECK(s.X[0] == doctest::Approx(1.0 - 0.1 / std::sqrt(1.01)).epsilon(1e-15));
  CHECK(s.V[0] == doctest::Approx(-0.1 * std::pow(0.9, 1.5)).epsilon(1e-15));

  Rng r(10);
  const Objective f = quartic(3);
  c.mu = 1.0;
  auto g = c;
  g.kind = OptimizerKind::rgd;
  for (int i = 0; i < 20; ++i) {
    OptState x;
    x.X = r.v(3);
    x.V = r.v(3);
    x.S = r.u();
    x.k = i;
    x.X_prev = x.X;
    const auto a = crgd_step(x, f, c), b = rgd_step(x, f, g);
    CHECK(a.X == b.X);
    CHECK(a.V == b.V);
    CHECK(a.S == b.S);
  }
}

TEST_CASE("crgd matches the strang splitting") {
  Rng r(11);
  const Objective f = make_random_quadratic(5, 4, 0.1, 2.0);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
  for (auto clock : {ClockMode::iteration, ClockMode::physical}) {
    for (int draw = 0; draw < 5; ++draw) {
      auto c = config(OptimizerKind::crgd);
      c.clock = clock;
      c.epsilon = std::pow(10.0, r.u(-3, -0.3));
      c.mu = r.u(0.5, 0.99);
      c.delta = r.u(0.1, 20);
      for (int i = 0; i < 20; ++i) {
        OptState s;
        s.X = r.v(4, -2, 2);
        s.V = r.v(4, -0.5, 0.5);
        s.S = r.u();
        s.k = static_cast<std::int64_t>(r.u(0, 40));
        s.X_prev = s.X;
        const OptState a = crgd_step(s, f, c);
        const OptState b = from_contact_state(
            strang_step(to_contact_state(s, c), physical_step(c), f, relativistic_params_for(c)), c, s.k + 1);
        CHECK(rel(a.S, b.S) < 1e-12);
        for (int j = 0; j < 4; ++j) {
          CHECK(rel(a.X[j], b.X[j]) < 1e-12);
          CHECK(rel(a.V[j], b.V[j]) < 1e-12);
        }
      }
    }
  }
  auto z = config(OptimizerKind::crgd);
  z.delta = 0.0;
  CHECK_THROWS_AS(relativistic_params_for(z), InvalidParameter);
}

TEST_CASE("run records") {
  const Objective f = quartic(5);
  for (const auto& name : optimizer_names()) {
    CAPTURE(name);
    auto c = config(*parse_optimizer_kind(name));
    c.tau = 1e-3;
    c.epsilon = 1e-3;
    c.delta = 1.0;
    const auto one = run(f, c, Vec::Ones(5), 1);
    CHECK(one.trace.size() == 2);
    CHECK(one.trace[0] == 15.0);
    const auto many = run(f, c, Vec::Ones(5), 50);
    CHECK(many.trace.size() == 51);
    CHECK_FALSE(many.diverged);
  }
  auto g = config(OptimizerKind::gd);
  g.tau = 10.0;
  const auto bad = run(make_random_quadratic(1, 3, 0.5, 1.0), g, Vec::Ones(3), 5000);
  CHECK(bad.diverged);
  CHECK(std::isinf(bad.trace.back()));
  CHECK(bad.trace.size() < 5001);
  for (std::size_t i = 0; i + 1 < bad.trace.size(); ++i) CHECK(std::isfinite(bad.trace[i]));
  CHECK_THROWS_AS(run(f, g, Vec::Ones(5), 0), InvalidParameter);
  CHECK_THROWS_AS(run(f, g, Vec::Ones(4), 3), DimensionMismatch);
}

TEST_CASE("crgd on the quartic drops the gap by six orders of magnitude") {
  auto c = config(OptimizerKind::crgd);
  c.epsilon = 1e-2;
  c.mu = 0.95;
  c.delta = 1.0;
  const auto rec = run(quartic(50), c, Vec::Constant(50, 2.0), 500);
  CHECK(rec.trace.back() < 1e-6 * rec.trace.front());
}

TEST_CASE("run_split with the strang plan follows the direct step") {
  const Objective f = make_random_quadratic(8, 6, 0.1, 1.0);
  auto c = config(OptimizerKind::crgd);
  c.epsilon = 0.05;
  c.mu = 0.9;
  c.delta = 2.0;
  const auto a = run(f, c, Vec::Ones(6), 100);
  const auto b = run_split(f, c, Vec::Ones(6), 100, SplitFlowPlan::strang());
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    CHECK(std::abs(a.trace[i] - b.trace[i]) <= 1e-10 * std::max(1.0, a.trace[i]));
  const auto j = run_split(f, c, Vec::Ones(6), 100, plan_from_name("jump4"));
  CHECK(j.trace.back() < j.trace.front());
  auto g = config(OptimizerKind::cm);
  CHECK_THROWS_AS(run_split(f, g, Vec::Ones(6), 10, SplitFlowPlan::strang()), InvalidParameter);
}
