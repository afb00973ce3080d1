#include "contact_opt/selfcheck.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "contact_opt/contact_core.hpp"
#include "contact_opt/errors.hpp"
#include "contact_opt/objectives.hpp"
#include "contact_opt/optimizers.hpp"

namespace contact {

namespace {

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
  Vec vec(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  ContactState state(int n, double t_lo = 0.5, double t_hi = 3.0) {
    ContactState s = make_state(vec(n, -1.0, 1.0), vec(n, -1.0, 1.0), uniform(-1.0, 1.0),
                                uniform(t_lo, t_hi));
    return s;
  }
};

double max_abs_diff(const ContactState& a, const ContactState& b) {
  double d = std::abs(a.S - b.S);
  if (a.X.size()) d = std::max(d, (a.X - b.X).cwiseAbs().maxCoeff());
  if (a.P.size()) d = std::max(d, (a.P - b.P).cwiseAbs().maxCoeff());
  return d;
}

CheckResult below(std::string family, std::string name, double value, double tol,
                  std::string detail = {}) {
  return CheckResult{std::move(family), std::move(name), value, tol, value < tol, std::move(detail)};
}

CheckResult within(std::string family, std::string name, double value, double target, double tol) {
  std::ostringstream os;
  os << "target " << target << " +/- " << tol;
  return CheckResult{std::move(family), std::move(name), value, tol,
                     std::abs(value - target) <= tol, os.str()};
}

// H = 1/2 |P|^2 + f(X) + g(t) S with optional time dependence of the S coefficient.
ContactHamiltonian mechanical(const Objective& f, std::function<double(double)> s_coef,
                              std::function<double(double)> s_coef_dt, bool singular) {
  ContactHamiltonian H;
  H.value = [f, s_coef](const ContactState& s) {
    return 0.5 * s.P.squaredNorm() + f.eval(s.X) + s_coef(s.t) * s.S;
  };
  H.grad_X = [f](const ContactState& s) -> Vec { return f.grad(s.X); };
  H.grad_P = [](const ContactState& s) -> Vec { return s.P; };
  H.dS = [s_coef](const ContactState& s) { return s_coef(s.t); };
  H.dt = [s_coef_dt](const ContactState& s) { return s_coef_dt(s.t) * s.S; };
  H.requires_positive_time = singular;
  return H;
}

// ---- gradients -------------------------------------------------------------

void gradient_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  Sampler smp(seed);
  const std::vector<Objective> objs{make_random_quadratic(seed, 10), quartic(10), camelback(),
                                    rosenbrock(10)};
  for (const auto& obj : objs) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, check_gradient(obj, smp.vec(obj.dim, -2.0, 2.0)));
    out.push_back(below("gradients", obj.name + " analytic vs central differences", worst, 1e-6));
  }
}

// ---- conformal -------------------------------------------------------------

void conformal_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  Sampler smp(seed ^ 0xc0f0);
  const int n = 3;
  const Objective f = quartic(n);
  RelativisticParams p;
  p.gamma = 0.3;
  p.schedule = DissipationSchedule::nag_like;
  const double dtau = 0.1;
  const SplitFlowPlan jump4 = plan_from_name("jump4");

  struct Case {
    std::string name;
    ContactMap map;
  };
  std::vector<Case> cases{
      {"phi1", {[&](const ContactState& s) { return flow_phi1(s, dtau, p); },
                [&](const ContactState& s) { return flow_phi1_jacobian(s, dtau, p); }}},
      {"phi2", {[&](const ContactState& s) { return flow_phi2(s, dtau, f); }, {}}},
      {"phi3", {[&](const ContactState& s) { return flow_phi3(s, dtau, p); }, {}}},
      {"time shift", {[&](const ContactState& s) { return time_shift(s, dtau); }, {}}},
      {"strang step", {[&](const ContactState& s) { return strang_step(s, dtau, f, p); }, {}}},
      {"triple-jump step",
       {[&](const ContactState& s) { return compose_step(s, dtau, f, p, jump4); }, {}}},
  };
  for (const auto& c : cases) {
    double worst = 0.0;
    double lambda_err = 0.0;
    for (int i = 0; i < 20; ++i) {
      const ContactState s = smp.state(n);
      const ConformalFit fit = conformal_factor(c.map, ContactForm::std1, s);
      worst = std::max(worst, fit.residual);
      if (c.name == "phi1")
        lambda_err = std::max(lambda_err, std::abs(fit.lambda - std::exp(-p.h(s.clock) * dtau)));
    }
    out.push_back(below("conformal", c.name + " pullback residual", worst, 1e-8));
    if (c.name == "phi1")
      out.push_back(below("conformal", "phi1 factor equals exp(-h dtau)", lambda_err, 1e-12));
  }

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ContactState s = smp.state(n);
    const auto fit = conformal_factor(ContactMap{map_F, map_F_jacobian}, ContactForm::std1,
                                      ContactForm::std2, s);
    worst = std::max({worst, fit.residual, std::abs(fit.lambda - 1.0)});
  }
  out.push_back(below("conformal", "map F pulls eta_std2 back to eta_std1", worst, 1e-10));

  double nag_res = 0.0, nag_lambda = 0.0;
  for (int k = 2; k <= 50; ++k) {
    const double coef = (k - 1.0) / (k + 2.0);
    ContactMap m{[coef](const ContactState& s) { return nag_contact_map(s, coef); },
                 [coef, n](const ContactState&) { return nag_contact_map_jacobian(n, coef); }};
    for (int i = 0; i < 20; ++i) {
      const auto fit = conformal_factor(m, ContactForm::std2, smp.state(n));
      nag_res = std::max(nag_res, fit.residual);
      nag_lambda = std::max(nag_lambda, std::abs(fit.lambda - coef));
    }
  }
  out.push_back(below("conformal", "NAG contact map residual (k=2..50)", nag_res, 1e-8));
  out.push_back(below("conformal", "NAG contact map factor equals (k-1)/(k+2)", nag_lambda, 1e-12));
}

// ---- dissipation -----------------------------------------------------------

void dissipation_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  Sampler smp(seed ^ 0xd155);
  const Objective f = make_random_quadratic(seed, 3, 0.1, 1.0);
  RelativisticParams p;
  p.gamma = 0.1;
  p.schedule = DissipationSchedule::nag_like;
  const ContactHamiltonian H = crgd_hamiltonian(f, p);
  ContactState s0 = make_state(smp.vec(3, -1, 1), smp.vec(3, -1, 1), 0.5, 1.0);
  const Trajectory tr = reference_integrate(H, ContactForm::std1, s0, 1e-3, 1000);
  out.push_back(below("dissipation", "CRGD Hamiltonian identity residual", dissipation_residual(H, tr), 1e-4));

  const ContactHamiltonian cons = mechanical(
      f, [](double) { return 0.0; }, [](double) { return 0.0; }, false);
  const Trajectory tc = reference_integrate(cons, ContactForm::std1, s0, 1e-3, 1000);
  out.push_back(below("dissipation", "conservative Hamiltonian residual", dissipation_residual(cons, tc), 1e-6));

  const double c = 0.7;
  ContactHamiltonian lin;
  lin.value = [c](const ContactState& s) { return c * s.S; };
  lin.grad_X = [](const ContactState& s) -> Vec { return Vec::Zero(s.dim()); };
  lin.grad_P = [](const ContactState& s) -> Vec { return Vec::Zero(s.dim()); };
  lin.dS = [c](const ContactState&) { return c; };
  lin.dt = [](const ContactState&) { return 0.0; };
  const Trajectory tl = reference_integrate(lin, ContactForm::std1, s0, 1e-3, 1000);
  const double h0 = lin.value(s0);
  double worst = 0.0;
  for (std::size_t i = 0; i < tl.states.size(); ++i) {
    const double exact = h0 * std::exp(-c * 1e-3 * static_cast<double>(i));
    worst = std::max(worst, std::abs(lin.value(tl.states[i]) - exact) / std::abs(exact));
  }
  out.push_back(below("dissipation", "H = cS decays as exp(-ct)", worst, 1e-6));
}

// ---- orders ----------------------------------------------------------------

Objective order_objective(std::uint64_t seed) { return make_random_quadratic(seed, 4, 0.1, 1.0); }

RelativisticParams order_params() {
  RelativisticParams p;
  p.gamma = 0.1;
  p.schedule = DissipationSchedule::nag_like;
  return p;
}

ContactState order_start(std::uint64_t seed) {
  Sampler smp(seed ^ 0x0d0e);
  return make_state(smp.vec(4, -1, 1), smp.vec(4, -1, 1), 0.5, 1.0);
}

void order_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  const std::vector<double> taus{0.1, 0.05, 0.025, 0.0125};
  struct Target {
    const char* name;
    double order;
    double tol;
  };
  for (const Target& t : {Target{"strang", 2.0, 0.1}, Target{"jump4", 4.0, 0.2},
                          Target{"suzuki4", 4.0, 0.2}}) {
    const auto errs = splitting_errors(plan_from_name(t.name), taus, seed);
    out.push_back(within("orders", std::string(t.name) + " global order", observed_order(taus, errs),
                         t.order, t.tol));
  }

  // RK4 self-convergence against a much finer RK4 solution.
  const Objective f = order_objective(seed);
  const ContactHamiltonian H = crgd_hamiltonian(f, order_params());
  const ContactState s0 = order_start(seed);
  const auto fine = reference_integrate(H, ContactForm::std1, s0, 1.0 / 6400.0, 6400);
  const std::vector<double> dts{0.1, 0.05, 0.025, 0.0125, 0.00625};
  std::vector<double> errs;
  for (double dt : dts) {
    const int n = static_cast<int>(std::lround(1.0 / dt));
    const auto tr = reference_integrate(H, ContactForm::std1, s0, dt, n);
    errs.push_back(max_abs_diff(tr.states.back(), fine.states.back()));
  }
  out.push_back(within("orders", "RK4 reference self-convergence", observed_order(dts, errs), 4.0, 0.2));
}

// ---- equivalence -----------------------------------------------------------

double rel_dev(const OptState& a, const OptState& b) {
  auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(x)); };
  double d = rel(a.S, b.S);
  for (Eigen::Index i = 0; i < a.X.size(); ++i) d = std::max({d, rel(a.X[i], b.X[i]), rel(a.V[i], b.V[i])});
  return d;
}

void equivalence_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  Sampler smp(seed ^ 0xe9e9);
  const Objective f = make_random_quadratic(seed, 5, 0.1, 2.0);
  double worst_crgd = 0.0, worst_rgd = 0.0, worst_phys = 0.0;
  bool mu_one_identical = true;
  for (int draw = 0; draw < 10; ++draw) {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::crgd;
    cfg.epsilon = std::exp(smp.uniform(std::log(1e-3), std::log(0.5)));
    cfg.mu = smp.uniform(0.5, 0.99);
    cfg.delta = smp.uniform(0.1, 20.0);
    OptimizerConfig rgd = cfg;
    rgd.kind = OptimizerKind::rgd;
    OptimizerConfig phys = cfg;
    phys.clock = ClockMode::physical;
    for (int i = 0; i < 100; ++i) {
      OptState s;
      s.X = smp.vec(5, -2, 2);
      s.V = smp.vec(5, -0.5, 0.5);
      s.S = smp.uniform(-1, 1);
      s.k = static_cast<std::int64_t>(smp.uniform(0, 50));
      s.X_prev = s.X;
      for (auto* c : {&cfg, &rgd, &phys}) {
        const OptState direct = step(s, f, *c);
        const ContactState split =
            strang_step(to_contact_state(s, *c), physical_step(*c), f, relativistic_params_for(*c));
        const double d = rel_dev(direct, from_contact_state(split, *c, s.k + 1));
        double& w = c == &cfg ? worst_crgd : (c == &rgd ? worst_rgd : worst_phys);
        w = std::max(w, d);
      }
      OptimizerConfig one = cfg;
      one.mu = 1.0;
      OptimizerConfig one_rgd = one;
      one_rgd.kind = OptimizerKind::rgd;
      const OptState a = crgd_step(s, f, one), b = rgd_step(s, f, one_rgd);
      mu_one_identical = mu_one_identical && a.X == b.X && a.V == b.V && a.S == b.S;
    }
  }
  out.push_back(below("equivalence", "crgd_step == strang_step (iteration clock)", worst_crgd, 1e-12));
  out.push_back(below("equivalence", "crgd_step == strang_step (physical clock)", worst_phys, 1e-12));
  out.push_back(below("equivalence", "rgd_step == strang_step (constant damping)", worst_rgd, 1e-12));
  out.push_back(CheckResult{"equivalence", "rgd_step == crgd_step bitwise at mu = 1",
                            mu_one_identical ? 0.0 : 1.0, 0.5, mu_one_identical, {}});
}

// ---- specialization --------------------------------------------------------

void specialization_checks(std::uint64_t seed, std::vector<CheckResult>& out) {
  Sampler smp(seed ^ 0x5bec);
  const int n = 3;
  const Objective f = make_random_quadratic(seed, n, 0.2, 1.5);
  const double c = 0.8;
  const Vec xstar = smp.vec(n, -1, 1), pstar = smp.vec(n, -1, 1);

  // H0 = 1/2 |P|^2 + f(X)
  const ContactHamiltonian free_s = mechanical(
      f, [](double) { return 0.0; }, [](double) { return 0.0; }, false);
  const ContactHamiltonian conformal = mechanical(
      f, [c](double) { return c; }, [](double) { return 0.0; }, false);
  ContactHamiltonian descent;
  descent.value = [f, xstar, pstar](const ContactState& s) {
    return 0.5 * s.P.squaredNorm() + f.eval(s.X) + xstar.dot(s.P) - pstar.dot(s.X) + 2.0 * s.S;
  };
  descent.grad_X = [f, pstar](const ContactState& s) -> Vec { return f.grad(s.X) - pstar; };
  descent.grad_P = [xstar](const ContactState& s) -> Vec { return s.P + xstar; };
  descent.dS = [](const ContactState&) { return 2.0; };
  descent.dt = [](const ContactState&) { return 0.0; };

  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  for (int i = 0; i < 50; ++i) {
    const ContactState s = smp.state(n);
    const StateRate a = contact_field_std1(free_s, s);
    r1 = std::max({r1, (a.dX - s.P).cwiseAbs().maxCoeff(), (a.dP + f.grad(s.X)).cwiseAbs().maxCoeff()});
    const StateRate b = contact_field_std1(conformal, s);
    r2 = std::max({r2, (b.dX - s.P).cwiseAbs().maxCoeff(),
                   (b.dP - (-f.grad(s.X) - c * s.P)).cwiseAbs().maxCoeff()});
    const StateRate d = contact_field_std2(descent, s);
    r3 = std::max({r3, (d.dX - (s.P + xstar - s.X)).cwiseAbs().maxCoeff(),
                   (d.dP - (-f.grad(s.X) + pstar - s.P)).cwiseAbs().maxCoeff()});
  }
  out.push_back(below("specialization", "S-free H gives Hamilton's equations", r1, 1e-8));
  out.push_back(below("specialization", "H0 + cS gives conformally symplectic equations", r2, 1e-8));
  out.push_back(below("specialization", "std2 field gives Hamiltonian descent", r3, 1e-8));

  // NAG ODE: H = 1/2 |P|^2 + f + (3/t) S, residual of X'' + (3/t) X' + grad f along RK4.
  const ContactHamiltonian nag = mechanical(
      f, [](double t) { return 3.0 / t; }, [](double t) { return -3.0 / (t * t); }, true);
  const double dt = 1e-3;
  const auto tr = reference_integrate(nag, ContactForm::std1, make_state(smp.vec(n, -1, 1), Vec::Zero(n), 0.0, 1.0),
                                      dt, 2000);
  double r4 = 0.0;
  for (std::size_t i = 1; i + 1 < tr.states.size(); ++i) {
    const auto& xm = tr.states[i - 1].X;
    const auto& x0 = tr.states[i].X;
    const auto& xp = tr.states[i + 1].X;
    const Vec acc = (xp - 2.0 * x0 + xm) / (dt * dt);
    const Vec vel = (xp - xm) / (2.0 * dt);
    r4 = std::max(r4, (acc + (3.0 / tr.states[i].t) * vel + f.grad(x0)).cwiseAbs().maxCoeff());
  }
  out.push_back(below("specialization", "NAG ODE residual along trajectory from t=1", r4, 1e-6));
}

}  // namespace

std::vector<std::string> check_families() {
  return {"gradients", "conformal", "dissipation", "orders", "equivalence", "specialization"};
}

std::vector<CheckResult> run_checks(const CheckOptions& options) {
  if (options.only) {
    bool known = false;
    for (const auto& f : check_families()) known = known || f == *options.only;
    if (!known) throw InvalidParameter("unknown check family '" + *options.only + "'");
  }
  auto wanted = [&](const char* fam) { return !options.only || *options.only == fam; };
  std::vector<CheckResult> out;
  if (wanted("gradients")) gradient_checks(options.seed, out);
  if (wanted("conformal")) conformal_checks(options.seed, out);
  if (wanted("dissipation")) dissipation_checks(options.seed, out);
  if (wanted("orders")) order_checks(options.seed, out);
  if (wanted("equivalence")) equivalence_checks(options.seed, out);
  if (wanted("specialization")) specialization_checks(options.seed, out);
  return out;
}

std::vector<double> splitting_errors(const SplitFlowPlan& plan, std::span<const double> taus,
                                     std::uint64_t seed) {
  const Objective f = order_objective(seed);
  const RelativisticParams p = order_params();
  const ContactState s0 = order_start(seed);
  const double horizon = 1.0;
  std::vector<double> errs;
  for (double tau : taus) {
    const int steps = static_cast<int>(std::lround(horizon / tau));
    if (std::abs(steps * tau - horizon) > 1e-12)
      throw InvalidParameter("splitting_errors: step must divide the unit horizon");
    ContactState s = s0;
    for (int i = 0; i < steps; ++i) s = compose_step(s, tau, f, p, plan);
    const int ref_steps = steps * 100;
    const auto ref = reference_integrate(crgd_hamiltonian(f, p), ContactForm::std1, s0,
                                         horizon / ref_steps, ref_steps);
    errs.push_back(max_abs_diff(s, ref.states.back()));
  }
  return errs;
}

double observed_order(std::span<const double> steps, std::span<const double> errors) {
  const std::size_t n = steps.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(steps[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(steps[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace contact
