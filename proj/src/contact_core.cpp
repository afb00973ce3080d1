#include "contact_opt/contact_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "contact_opt/errors.hpp"

namespace contact {

namespace {

constexpr double kDivergenceBound = 1e300;

void require_same_dim(const ContactState& s, const Tangent& v, const char* what) {
  if (s.X.size() != s.P.size() || v.dX.size() != s.X.size() || v.dP.size() != s.X.size())
    throw DimensionMismatch(std::string(what) + ": dimension mismatch");
}

bool vec_ok(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || std::abs(v[i]) > kDivergenceBound) return false;
  return true;
}

bool scalar_ok(double x) { return std::isfinite(x) && std::abs(x) <= kDivergenceBound; }

// Flattens (X, P, S) into one coordinate vector.
Vec pack(const ContactState& s) {
  const int n = s.dim();
  Vec z(2 * n + 1);
  z.head(n) = s.X;
  z.segment(n, n) = s.P;
  z[2 * n] = s.S;
  return z;
}

void unpack(const Vec& z, ContactState& s) {
  const int n = s.dim();
  s.X = z.head(n);
  s.P = z.segment(n, n);
  s.S = z[2 * n];
}

ContactState advance(const ContactState& s, const StateRate& r, double h) {
  ContactState out = s;
  out.X += h * r.dX;
  out.P += h * r.dP;
  out.S += h * r.dS;
  out.t += h * r.dt;
  out.clock += h * r.dt;
  return out;
}

}  // namespace

ContactState make_state(Vec x, Vec p, double s, double t) {
  if (x.size() != p.size()) throw DimensionMismatch("make_state: X and P differ in length");
  ContactState st;
  st.X = std::move(x);
  st.P = std::move(p);
  st.S = s;
  st.t = t;
  st.clock = t;
  return st;
}

bool is_finite(const ContactState& s) {
  return s.X.allFinite() && s.P.allFinite() && std::isfinite(s.S) && std::isfinite(s.t);
}

bool is_diverged(const ContactState& s) {
  return !(vec_ok(s.X) && vec_ok(s.P) && scalar_ok(s.S) && scalar_ok(s.t));
}

double eta_std1(const ContactState& s, const Tangent& v) {
  require_same_dim(s, v, "eta_std1");
  return v.dS - s.P.dot(v.dX);
}

double eta_std2(const ContactState& s, const Tangent& v) {
  require_same_dim(s, v, "eta_std2");
  return v.dS - 0.5 * s.P.dot(v.dX) + 0.5 * s.X.dot(v.dP);
}

double eta(ContactForm form, const ContactState& s, const Tangent& v) {
  return form == ContactForm::std1 ? eta_std1(s, v) : eta_std2(s, v);
}

Vec form_covector(ContactForm form, const ContactState& s) {
  const int n = s.dim();
  Vec a(2 * n + 1);
  if (form == ContactForm::std1) {
    a.head(n) = -s.P;
    a.segment(n, n).setZero();
  } else {
    a.head(n) = -0.5 * s.P;
    a.segment(n, n) = 0.5 * s.X;
  }
  a[2 * n] = 1.0;
  return a;
}

ContactState map_F(const ContactState& s) {
  ContactState out = s;
  out.X = s.X + s.P;
  out.P = 0.5 * (s.P - s.X);
  out.S = s.S - 0.5 * s.X.dot(s.P);
  return out;
}

Mat map_F_jacobian(const ContactState& s) {
  const int n = s.dim();
  Mat j = Mat::Zero(2 * n + 1, 2 * n + 1);
  const Mat id = Mat::Identity(n, n);
  j.block(0, 0, n, n) = id;
  j.block(0, n, n, n) = id;
  j.block(n, 0, n, n) = -0.5 * id;
  j.block(n, n, n, n) = 0.5 * id;
  j.block(2 * n, 0, 1, n) = -0.5 * s.P.transpose();
  j.block(2 * n, n, 1, n) = -0.5 * s.X.transpose();
  j(2 * n, 2 * n) = 1.0;
  return j;
}

Tangent push_forward(const Mat& jacobian, const Tangent& v) {
  const auto n = v.dX.size();
  Vec z(2 * n + 1);
  z.head(n) = v.dX;
  z.segment(n, n) = v.dP;
  z[2 * n] = v.dS;
  const Vec w = jacobian * z;
  return Tangent{w.head(n), w.segment(n, n), w[2 * n]};
}

StateRate contact_field_std1(const ContactHamiltonian& H, const ContactState& s) {
  const Vec gx = H.grad_X(s);
  const Vec gp = H.grad_P(s);
  if (gx.size() != s.X.size() || gp.size() != s.P.size())
    throw DimensionMismatch("contact_field_std1: gradient length differs from state");
  const double hs = H.dS(s);
  StateRate r;
  r.dX = gp;
  r.dP = -gx - hs * s.P;
  r.dS = gp.dot(s.P) - H.value(s);
  return r;
}

StateRate contact_field_std2(const ContactHamiltonian& H, const ContactState& s) {
  const Vec gx = H.grad_X(s);
  const Vec gp = H.grad_P(s);
  if (gx.size() != s.X.size() || gp.size() != s.P.size())
    throw DimensionMismatch("contact_field_std2: gradient length differs from state");
  const double hs = H.dS(s);
  StateRate r;
  r.dX = gp - 0.5 * hs * s.X;
  r.dP = -gx - 0.5 * hs * s.P;
  r.dS = 0.5 * (s.X.dot(gx) + s.P.dot(gp)) - H.value(s);
  return r;
}

StateRate contact_field(const ContactHamiltonian& H, ContactForm coords, const ContactState& s) {
  return coords == ContactForm::std1 ? contact_field_std1(H, s) : contact_field_std2(H, s);
}

Trajectory reference_integrate(const ContactHamiltonian& H, ContactForm coords,
                               const ContactState& s0, double dt, int n) {
  if (!(dt > 0.0)) throw InvalidParameter("reference_integrate: dt must be positive");
  if (n < 1) throw InvalidParameter("reference_integrate: n must be >= 1");
  if (H.requires_positive_time && !(s0.t > 0.0))
    throw InvalidParameter("reference_integrate: Hamiltonian is singular at t = 0, start at t > 0");
  if (s0.X.size() != s0.P.size()) throw DimensionMismatch("reference_integrate: X/P length");

  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(static_cast<std::size_t>(n) + 1);
  traj.states.push_back(s0);
  if (is_diverged(s0)) {
    traj.diverged = true;
    return traj;
  }
  ContactState s = s0;
  for (int i = 0; i < n; ++i) {
    const StateRate k1 = contact_field(H, coords, s);
    const StateRate k2 = contact_field(H, coords, advance(s, k1, 0.5 * dt));
    const StateRate k3 = contact_field(H, coords, advance(s, k2, 0.5 * dt));
    const StateRate k4 = contact_field(H, coords, advance(s, k3, dt));
    ContactState next = s;
    next.X += dt / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
    next.P += dt / 6.0 * (k1.dP + 2.0 * k2.dP + 2.0 * k3.dP + k4.dP);
    next.S += dt / 6.0 * (k1.dS + 2.0 * k2.dS + 2.0 * k3.dS + k4.dS);
    // t is advanced by multiplication to avoid accumulating round-off.
    next.t = s0.t + static_cast<double>(i + 1) * dt;
    next.clock = s0.clock + static_cast<double>(i + 1) * dt;
    if (is_diverged(next)) {
      traj.diverged = true;
      return traj;
    }
    traj.states.push_back(next);
    s = std::move(next);
  }
  return traj;
}

double dissipation_residual(const ContactHamiltonian& H, const Trajectory& traj) {
  const auto& st = traj.states;
  if (st.size() < 3 || !(traj.dt > 0.0)) return 0.0;
  double worst = 0.0;
  double h_prev = H.value(st[0]);
  double h_cur = H.value(st[1]);
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    const double h_next = H.value(st[i + 1]);
    const double lhs = (h_next - h_prev) / (2.0 * traj.dt);
    const double rhs = -H.dS(st[i]) * h_cur + H.dt(st[i]);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    h_prev = h_cur;
    h_cur = h_next;
  }
  return worst;
}

Mat fd_jacobian(const std::function<ContactState(const ContactState&)>& map,
                const ContactState& s) {
  const Vec z0 = pack(s);
  const auto m = z0.size();
  Mat j(m, m);
  ContactState probe = s;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double step = 1e-6 * std::max(1.0, std::abs(z0[k]));
    Vec zp = z0, zm = z0;
    zp[k] += step;
    zm[k] -= step;
    unpack(zp, probe);
    const Vec fp = pack(map(probe));
    unpack(zm, probe);
    const Vec fm = pack(map(probe));
    // Divide by the representable step actually taken.
    j.col(k) = (fp - fm) / (zp[k] - zm[k]);
  }
  return j;
}

ConformalFit conformal_factor(const ContactMap& map, ContactForm source, ContactForm target,
                              const ContactState& s) {
  const ContactState image = map.apply(s);
  const Mat j = map.jacobian ? map.jacobian(s) : fd_jacobian(map.apply, s);
  const Vec a_src = form_covector(source, s);
  const Vec pulled = j.transpose() * form_covector(target, image);
  ConformalFit fit;
  fit.lambda = pulled.dot(a_src) / a_src.squaredNorm();
  if (std::abs(fit.lambda) < 1e-10) throw DegenerateMap("conformal_factor: lambda vanishes");
  fit.residual = (pulled - fit.lambda * a_src).cwiseAbs().maxCoeff();
  return fit;
}

ConformalFit conformal_factor(const ContactMap& map, ContactForm form, const ContactState& s) {
  return conformal_factor(map, form, form, s);
}

}  // namespace contact
