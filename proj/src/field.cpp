#include "latsym/field.hpp"

#include <cmath>

namespace latsym {

SymmetryField SymmetryField::from_exprs(const Expr& tau_e, const Expr& a_e,
                                        const Expr& lambda_e,
                                        std::string name) {
  SymmetryField f;
  f.name = std::move(name);
  f.tau = [tau_e](double t, int order) { return tau_e.eval_taylor(t, order); };
  f.a = [a_e](Site s) { return a_e.eval_site(s.n, s.m); };
  f.lambda = [lambda_e](Site s, double t, int order) {
    return lambda_e.eval_taylor(t, order, s.n, s.m);
  };
  f.tau_zero = tau_e.is_literal(0.0);
  f.tau_one = tau_e.is_literal(1.0);
  f.a_zero = a_e.is_literal(0.0);
  f.lambda_zero = lambda_e.is_literal(0.0);
  f.lambda_time_independent = !lambda_e.uses_var("t");
  return f;
}

SymmetryField SymmetryField::zero() {
  return from_exprs(Expr::literal(0), Expr::literal(0), Expr::literal(0),
                    "0");
}

EvalCoefficients eval_coefficients(const SymmetryField& X, Site s, double t,
                                   double u) {
  EvalCoefficients out;
  out.tau = X.tau(t, 3).jet3();
  out.lambda = X.lambda(s, t, 3).jet3();
  out.phi_u = out.tau.v1 / 2 + X.a(s);
  out.phi = out.phi_u * u + out.lambda.v0;
  return out;
}

SymmetryField bracket(const SymmetryField& X, const SymmetryField& Y) {
  SymmetryField r;
  r.name = "[" + X.name + "," + Y.name + "]";
  auto tx = X.tau, ty = Y.tau;
  r.tau = [tx, ty](double t, int order) {
    Taylor a = tx(t, order + 1), b = ty(t, order + 1);
    return a * b.derivative() - b * a.derivative();
  };
  r.a = [](Site) { return 0.0; };
  r.a_zero = true;
  auto ax = X.a, ay = Y.a;
  auto lx = X.lambda, ly = Y.lambda;
  r.lambda = [tx, ty, ax, ay, lx, ly](Site s, double t, int order) {
    Taylor txj = tx(t, order + 1), tyj = ty(t, order + 1);
    Taylor lxj = lx(s, t, order + 1), lyj = ly(s, t, order + 1);
    Taylor half = Taylor::constant(0.5, order);
    Taylor cy = half * tyj.derivative() + Taylor::constant(ay(s), order);
    Taylor cx = half * txj.derivative() + Taylor::constant(ax(s), order);
    return txj * lyj.derivative() - tyj * lxj.derivative() + cy * lxj -
           cx * lyj;
  };
  return r;
}

double phi_tt(const SymmetryField& X, Site s, double t, double u,
              double uddot) {
  Jet3 tau = X.tau(t, 3).jet3();
  Jet3 lam = X.lambda(s, t, 3).jet3();
  return tau.v3 / 2 * u + lam.v2 + (X.a(s) - 1.5 * tau.v1) * uddot;
}

double phi_tt_generic(const SymmetryField& X, Site s, double t, double u,
                      double udot, double uddot) {
  Jet3 tau = X.tau(t, 3).jet3();
  Jet3 lam = X.lambda(s, t, 3).jet3();
  double a = X.a(s);
  // phi(t,u) = (tau'/2 + a) u + lambda(t)
  double phi_t_t = tau.v3 / 2 * u + lam.v2;
  double phi_t_u = tau.v2 / 2;
  double phi_u = tau.v1 / 2 + a;
  double dt2_phi = phi_t_t + 2 * phi_t_u * udot + phi_u * uddot;
  return dt2_phi - tau.v2 * udot - 2 * tau.v1 * uddot;
}

namespace {

struct FlowRhs {
  const SymmetryField& X;
  Site s;
  void operator()(double /*eps*/, const double y[2], double dy[2]) const {
    Taylor tj = X.tau(y[0], 1);
    dy[0] = tj.value();
    dy[1] = (tj.deriv(1) / 2 + X.a(s)) * y[1] + X.lambda(s, y[0], 0).value();
  }
};

void rk4_step(const FlowRhs& f, double e, const double y[2], double h,
              double out[2]) {
  double k1[2], k2[2], k3[2], k4[2], tmp[2];
  f(e, y, k1);
  for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h / 2 * k1[i];
  f(e + h / 2, tmp, k2);
  for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h / 2 * k2[i];
  f(e + h / 2, tmp, k3);
  for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * k3[i];
  f(e + h, tmp, k4);
  for (int i = 0; i < 2; ++i)
    out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

}  // namespace

FlowPoint flow(const SymmetryField& X, double epsilon, Site s, double t0,
               double u0) {
  if (X.tau_zero && X.lambda_time_independent) {
    double as = X.a(s);
    if (as == 0) {
      double lam = X.lambda(s, t0, 0).value();
      return {t0, u0 + epsilon * lam};
    }
  }
  if (X.tau_one && X.lambda_zero)
    return {t0 + epsilon, u0 * std::exp(X.a(s) * epsilon)};

  FlowRhs rhs{X, s};
  double y[2] = {t0, u0};
  double e = 0;
  double remaining = epsilon;
  double dir = epsilon >= 0 ? 1.0 : -1.0;
  double h = dir * std::min(0.05, std::fabs(epsilon));
  if (epsilon == 0) return {t0, u0};
  const double tol = 1e-12;
  int guard = 0;
  try {
    while (dir * remaining > 0) {
      if (++guard > 100000) throw FlowError("flow failed to converge", e);
      if (std::fabs(h) > std::fabs(remaining)) h = remaining;
      double big[2], half1[2], small[2];
      rk4_step(rhs, e, y, h, big);
      rk4_step(rhs, e, y, h / 2, half1);
      rk4_step(rhs, e + h / 2, half1, h / 2, small);
      double err = 0;
      for (int i = 0; i < 2; ++i)
        err = std::max(
            err, std::fabs(small[i] - big[i]) / 15 / (1 + std::fabs(small[i])));
      if (err < tol) {
        // fifth-order local extrapolation
        for (int i = 0; i < 2; ++i)
          y[i] = small[i] + (small[i] - big[i]) / 15;
        e += h;
        remaining = epsilon - e;
        if (err < tol / 32) h *= 2;
      } else {
        h /= 2;
        if (std::fabs(h) < 1e-14)
          throw FlowError("flow step underflow (domain boundary?)", e);
      }
    }
  } catch (const DomainError& de) {
    throw FlowError(std::string("flow left the expression domain: ") +
                        de.what(),
                    e);
  }
  return {y[0], y[1]};
}

TransformedTriplet apply_allowed(const SymmetryField& X,
                                 const AllowedTransformation& T, Site s,
                                 double t) {
  Jet3 tt = T.ttilde.eval_time(t, s.n, s.m);
  if (tt.v1 <= 0)
    throw DomainError(
        "allowed transformation needs dt~/dt > 0 on the working interval");
  double p = T.P.eval_site(s.n, s.m);
  if (p == 0) throw DomainError("allowed transformation needs P_nm != 0");
  Jet3 q = T.Q.eval_time(t, s.n, s.m);
  Jet3 tau = X.tau(t, 3).jet3();
  Jet3 lam = X.lambda(s, t, 3).jet3();
  double a = X.a(s);
  TransformedTriplet out;
  out.t_image = tt.v0;
  out.tau_tilde = tau.v0 * tt.v1;
  out.a_tilde = a;
  out.lambda_tilde = std::sqrt(tt.v1) / p *
                     ((tau.v1 / 2 + a) * q.v0 + lam.v0 - tau.v0 * q.v1);
  return out;
}

}  // namespace latsym
