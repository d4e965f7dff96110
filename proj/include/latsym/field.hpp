#pragma once

#include <functional>
#include <string>

#include "latsym/lattice.hpp"

namespace latsym {

struct FlowError : std::runtime_error {
  double epsilon_at_failure;
  FlowError(const std::string& msg, double eps)
      : std::runtime_error(msg), epsilon_at_failure(eps) {}
};

/// Restricted vector field tau(t) d_t + [(tau'/2 + a_nm) u_nm + lambda_nm(t)] d_u.
/// The triplet is stored as jet-producing closures so that brackets of
/// brackets keep exact derivatives at any order the callers need.
struct SymmetryField {
  std::string name;
  std::function<Taylor(double t, int order)> tau;
  std::function<double(Site)> a;
  std::function<Taylor(Site s, double t, int order)> lambda;

  // structural facts recorded at construction; used for closed-form flows
  bool tau_zero = false;
  bool tau_one = false;
  bool a_zero = false;
  bool lambda_zero = false;
  bool lambda_time_independent = false;

  /// Build from expressions: tau over t; a over n,m; lambda over t,n,m.
  static SymmetryField from_exprs(const Expr& tau, const Expr& a,
                                  const Expr& lambda, std::string name);
  static SymmetryField zero();

  double phi(Site s, double t, double u) const {
    Taylor tj = tau(t, 1);
    return (tj.deriv(1) / 2 + a(s)) * u + lambda(s, t, 0).value();
  }
};

struct EvalCoefficients {
  Jet3 tau;
  double phi;
  double phi_u;
  Jet3 lambda;
};

EvalCoefficients eval_coefficients(const SymmetryField& X, Site s, double t,
                                   double u);

/// Commutator [X, Y].  Closed in the restricted class, with zero
/// a-component:
/// tau3 = tau_X tau_Y' - tau_Y tau_X',
/// lambda3 = tau_X lam_Y' - tau_Y lam_X' + (tau_Y'/2 + a_Y) lam_X
///           - (tau_X'/2 + a_X) lam_Y.
SymmetryField bracket(const SymmetryField& X, const SymmetryField& Y);

/// ddot-u coefficient of the second prolongation, specialized to
/// restricted fields, where the udot terms cancel identically.
double phi_tt(const SymmetryField& X, Site s, double t, double u,
              double uddot);

/// The same coefficient evaluated from the unspecialized total-derivative
/// formula; kept as an independent cross-check that udot drops out.
double phi_tt_generic(const SymmetryField& X, Site s, double t, double u,
                      double udot, double uddot);

struct FlowPoint {
  double t;
  double u;
};

/// One-parameter group flow: integrate dt/de = tau(t),
/// du/de = (tau'/2 + a_s) u + lambda_s(t) from (t0, u0) to e = epsilon.
/// Closed forms for pure shifts and for tau = 1 with lambda = 0; adaptive
/// RK4 with local tolerance 1e-12 otherwise.
FlowPoint flow(const SymmetryField& X, double epsilon, Site s, double t0,
               double u0);

/// Fiber-preserving change of variables t~ = t~(t), u = P_nm t~'^{-1/2} u~ + Q_nm(t).
struct AllowedTransformation {
  Expr ttilde;  // over t
  Expr P;       // over n,m; nonzero
  Expr Q;       // over t,n,m
};

struct TransformedTriplet {
  double t_image;       // t~(t)
  double tau_tilde;     // tau~(t~)
  double a_tilde;       // = a_nm
  double lambda_tilde;  // lambda~_nm(t~)
};

/// Evaluate the transformed triplet at the image of time t.  Requires
/// t~'(t) > 0; non-positive values are a domain error (orientation and the
/// square root both fail).
TransformedTriplet apply_allowed(const SymmetryField& X,
                                 const AllowedTransformation& T, Site s,
                                 double t);

}  // namespace latsym
