#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contact_opt/contact_core.hpp"
#include "contact_opt/errors.hpp"
#include "contact_opt/integrators.hpp"
#include "contact_opt/optimizers.hpp"

using namespace contact;

namespace {

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t s) : g(s) {}
  double u(double lo = -1, double hi = 1) { return std::uniform_real_distribution<double>(lo, hi)(g); }
  Vec v(int n) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = u();
    return x;
  }
  ContactState state(int n) { return make_state(v(n), v(n), u(), u(0.5, 2.0)); }
  Tangent tangent(int n) { return Tangent{v(n), v(n), u()}; }
};

Tangent combine(double a, const Tangent& v, double b, const Tangent& w) {
  return Tangent{a * v.dX + b * w.dX, a * v.dP + b * w.dP, a * v.dS + b * w.dS};
}

ContactHamiltonian harmonic(double s_coef = 0.0) {
  ContactHamiltonian H;
  H.value = [s_coef](const ContactState& s) {
    return 0.5 * (s.P.squaredNorm() + s.X.squaredNorm()) + s_coef * s.S;
  };
  H.grad_X = [](const ContactState& s) -> Vec { return s.X; };
  H.grad_P = [](const ContactState& s) -> Vec { return s.P; };
  H.dS = [s_coef](const ContactState&) { return s_coef; };
  H.dt = [](const ContactState&) { return 0.0; };
  return H;
}

}  // namespace

TEST_CASE("state validity") {
  ContactState s = make_state(Vec::Ones(2), Vec::Zero(2));
  CHECK(is_finite(s));
  CHECK_FALSE(is_diverged(s));
  s.P[1] = std::nan("");
  CHECK_FALSE(is_finite(s));
  CHECK(is_diverged(s));
  CHECK_THROWS_AS(make_state(Vec::Ones(2), Vec::Ones(3)), DimensionMismatch);
}

TEST_CASE("eta_std1 values and linearity") {
  const ContactState zero = make_state(Vec::Zero(1), Vec::Zero(1));
  CHECK(eta_std1(zero, Tangent{Vec::Constant(1, 5.0), Vec::Constant(1, -3.0), 1.0}) == 1.0);
  const ContactState s = make_state(Vec::Zero(1), Vec::Constant(1, 2.0));
  CHECK(eta_std1(s, Tangent{Vec::Constant(1, 3.0), Vec::Zero(1), 0.0}) == -6.0);
  Rng r(1);
  for (int i = 0; i < 20; ++i) {
    const auto st = r.state(3);
    const auto v = r.tangent(3), w = r.tangent(3);
    const double a = r.u(), b = r.u();
    for (ContactForm f : {ContactForm::std1, ContactForm::std2}) {
      const double lhs = eta(f, st, combine(a, v, b, w));
      const double rhs = a * eta(f, st, v) + b * eta(f, st, w);
      CHECK(std::abs(lhs - rhs) < 1e-14);
    }
  }
}

TEST_CASE("eta_std2 values") {
  const Tangent v{Vec::Constant(1, 1.0), Vec::Constant(1, 1.0), 0.0};
  CHECK(eta_std2(make_state(Vec::Ones(1), Vec::Ones(1)), v) == 0.0);
  const Tangent w{Vec::Constant(1, 4.0), Vec::Constant(1, -2.0), 0.75};
  CHECK(eta_std2(make_state(Vec::Zero(1), Vec::Zero(1)), w) == 0.75);
}

TEST_CASE("map F values and pullback") {
  const ContactState o = map_F(make_state(Vec::Zero(2), Vec::Zero(2)));
  CHECK(o.X.norm() == 0.0);
  CHECK(o.P.norm() == 0.0);
  CHECK(o.S == 0.0);
  const ContactState a = map_F(make_state(Vec::Ones(1), Vec::Ones(1)));
  CHECK(a.X[0] == 2.0);
  CHECK(a.P[0] == 0.0);
  CHECK(a.S == -0.5);

  Rng r(2);
  for (int i = 0; i < 50; ++i) {
    const auto s = r.state(3);
    const auto v = r.tangent(3);
    const Tangent pushed = push_forward(map_F_jacobian(s), v);
    CHECK(std::abs(eta_std2(map_F(s), pushed) - eta_std1(s, v)) < 1e-12);
    const auto fit = conformal_factor(ContactMap{map_F, map_F_jacobian}, ContactForm::std1,
                                      ContactForm::std2, s);
    CHECK(std::abs(fit.lambda - 1.0) < 1e-10);
    CHECK(fit.residual < 1e-10);
  }
}

TEST_CASE("finite-difference Jacobian of map F matches the exact one") {
  Rng r(3);
  const auto s = r.state(2);
  CHECK((fd_jacobian(map_F, s) - map_F_jacobian(s)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("conformal factor of simple maps") {
  Rng r(4);
  const auto s = r.state(3);
  const auto id = conformal_factor(ContactMap{[](const ContactState& x) { return x; }, {}},
                                   ContactForm::std1, s);
  CHECK(std::abs(id.lambda - 1.0) < 1e-12);
  CHECK(id.residual < 1e-12);

  ContactMap nag{[](const ContactState& x) { return nag_contact_map(x, 0.4); },
                 [](const ContactState& x) { return nag_contact_map_jacobian(x.dim(), 0.4); }};
  const auto fit = conformal_factor(nag, ContactForm::std2, s);
  CHECK(fit.lambda == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
  CHECK(fit.residual < 1e-14);

  ContactMap collapse{[](const ContactState& x) {
                        ContactState y = x;
                        y.X.setZero();
                        y.P.setZero();
                        y.S = 0.0;
                        return y;
                      },
                      {}};
  CHECK_THROWS_AS(conformal_factor(collapse, ContactForm::std1, s), DegenerateMap);
}

TEST_CASE("Hamiltonian partials match finite differences of the value") {
  RelativisticParams p;
  p.gamma = 0.3;
  p.c = 1.5;
  p.schedule = DissipationSchedule::nag_like;
  const Objective f = quartic(3);
  const ContactHamiltonian H = crgd_hamiltonian(f, p);
  Rng r(5);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (int i = 0; i < 20; ++i) {
    ContactState s = r.state(3);
    s.clock = s.t;
    const double h = 1e-6;
    const Vec gx = H.grad_X(s), gp = H.grad_P(s);
    for (int j = 0; j < 3; ++j) {
      ContactState a = s, b = s;
      a.X[j] += h;
      b.X[j] -= h;
      CHECK(rel((H.value(a) - H.value(b)) / (2 * h), gx[j]) < 1e-5);
      a = s;
      b = s;
      a.P[j] += h;
      b.P[j] -= h;
      CHECK(rel((H.value(a) - H.value(b)) / (2 * h), gp[j]) < 1e-5);
    }
    ContactState a = s, b = s;
    a.S += h;
    b.S -= h;
    CHECK(rel((H.value(a) - H.value(b)) / (2 * h), H.dS(s)) < 1e-5);
    a = s;
    b = s;
    a.t += h;
    a.clock += h;
    b.t -= h;
    b.clock -= h;
    CHECK(rel((H.value(a) - H.value(b)) / (2 * h), H.dt(s)) < 1e-5);
  }
}

TEST_CASE("std2 field of a quadratic Hamiltonian is the expected linear map") {
  const ContactHamiltonian H = harmonic(2.0);
  Rng r(6);
  for (int i = 0; i < 10; ++i) {
    const auto s = r.state(2);
    const StateRate d = contact_field_std2(H, s);
    CHECK((d.dX - (s.P - s.X)).norm() < 1e-15);
    CHECK((d.dP - (-s.X - s.P)).norm() < 1e-15);
    CHECK(std::abs(d.dS - (-2.0 * s.S)) < 1e-14);
    CHECK(d.dt == 1.0);
  }
}

TEST_CASE("S-free Hamiltonian gives the same motion in both coordinate systems") {
  const ContactHamiltonian H = harmonic();
  Rng r(7);
  const auto s = r.state(3);
  const StateRate a = contact_field_std1(H, s), b = contact_field_std2(H, s);
  CHECK((a.dX - b.dX).norm() == 0.0);
  CHECK((a.dP - b.dP).norm() == 0.0);
  CHECK((a.dX - s.P).norm() == 0.0);
  CHECK((a.dP + s.X).norm() == 0.0);
}

TEST_CASE("reference integration: free particle is exact") {
  ContactHamiltonian H;
  H.value = [](const ContactState& s) { return 0.5 * s.P.squaredNorm(); };
  H.grad_X = [](const ContactState& s) -> Vec { return Vec::Zero(s.dim()); };
  H.grad_P = [](const ContactState& s) -> Vec { return s.P; };
  H.dS = [](const ContactState&) { return 0.0; };
  H.dt = [](const ContactState&) { return 0.0; };
  const ContactState s0 = make_state(Vec{{1.0, -2.0}}, Vec{{0.5, 3.0}});
  const auto tr = reference_integrate(H, ContactForm::std1, s0, 1e-3, 1000);
  REQUIRE(tr.states.size() == 1001);
  CHECK((tr.states.back().X - (s0.X + s0.P)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(tr.states.back().t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reference integration: harmonic energy drift over ten periods") {
  const ContactHamiltonian H = harmonic();
  const ContactState s0 = make_state(Vec::Ones(1), Vec::Zero(1));
  const int n = static_cast<int>(std::lround(20.0 * std::numbers::pi / 1e-3));
  const auto tr = reference_integrate(H, ContactForm::std1, s0, 1e-3, n);
  double drift = 0.0;
  for (const auto& s : tr.states) drift = std::max(drift, std::abs(H.value(s) - H.value(s0)));
  CHECK(drift < 1e-8);
}

TEST_CASE("reference integration rejects non-positive time for singular Hamiltonians") {
  RelativisticParams p;
  p.gamma = 0.1;
  p.schedule = DissipationSchedule::nag_like;
  const ContactHamiltonian H = crgd_hamiltonian(quartic(2), p);
  CHECK_THROWS_AS(reference_integrate(H, ContactForm::std1, make_state(Vec::Ones(2), Vec::Zero(2), 0, 0),
                                      1e-3, 10),
                  InvalidParameter);
}

TEST_CASE("dissipation identity") {
  const ContactHamiltonian cons = harmonic();
  const ContactState s0 = make_state(Vec{{0.3, -0.4}}, Vec{{1.0, 0.2}}, 0.5, 1.0);
  CHECK(dissipation_residual(cons, reference_integrate(cons, ContactForm::std1, s0, 1e-3, 1000)) < 1e-6);

  RelativisticParams p;
  p.gamma = 0.1;
  p.schedule = DissipationSchedule::nag_like;
  const ContactHamiltonian H = crgd_hamiltonian(make_random_quadratic(3, 2, 0.1, 1.0), p);
  CHECK(dissipation_residual(H, reference_integrate(H, ContactForm::std1, s0, 1e-3, 1000)) < 1e-4);
  CHECK(dissipation_residual(H, reference_integrate(H, ContactForm::std2, s0, 1e-3, 1000)) < 1e-4);
}
