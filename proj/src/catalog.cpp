#include "latsym/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "latsym/rng.hpp"

namespace latsym {

namespace {

using FG = FGrad;

FG fgc(double v) { return FG::constant(v); }
FG fg_u(const FContext& c, int slot) { return FG::seeded(c.u[slot], slot); }
FG fg_t(const FContext& c) { return FG::seeded(c.t, 7); }
// time-function value with its explicit t-derivative in slot 7
FG fg_val(const Jet3& j) {
  FG g;
  g.v = j.v0;
  g.d[7] = j.v1;
  return g;
}
// second derivative of a time function, again tracking d/dt
FG fg_dd(const Jet3& j) {
  FG g;
  g.v = j.v2;
  g.d[7] = j.v3;
  return g;
}

Site gsite(const FContext& c, int slot) {
  return c.patch.wrap(
      {c.s.n + kNeighborhood[slot].n, c.s.m + kNeighborhood[slot].m});
}

double site_val(const Expr& e, const FContext& c, int slot) {
  Site w = gsite(c, slot);
  return e.eval_site(w.n, w.m);
}

Jet3 time_jet(const Expr& e, const FContext& c, int slot) {
  Site w = gsite(c, slot);
  return e.eval_time(c.t, w.n, w.m);
}

// K x K determinant of site functions over a slot list (doubles; no u, no t)
double slot_det(const std::vector<Expr>& family, const std::vector<int>& slots,
                const FContext& c) {
  size_t k = family.size();
  std::vector<std::vector<double>> m(k, std::vector<double>(k));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) m[i][j] = site_val(family[i], c, slots[j]);
  return det_matrix<double>(std::move(m));
}

// signed cofactor exponents: e_j = sigma * (-1)^j * minor_j, where minor_j
// deletes site j from the slot list.  slots.size() == family.size() + 1.
std::vector<double> cofactor_exponents(const std::vector<Expr>& family,
                                       const std::vector<int>& slots,
                                       double sigma, const FContext& c) {
  std::vector<double> e(slots.size());
  for (size_t j = 0; j < slots.size(); ++j) {
    std::vector<int> sub;
    for (size_t i = 0; i < slots.size(); ++i)
      if (i != j) sub.push_back(slots[i]);
    double minor = family.empty() ? 1.0 : slot_det(family, sub, c);
    e[j] = sigma * (j % 2 == 0 ? minor : -minor);
  }
  return e;
}

// rows for FG determinants --------------------------------------------------

std::vector<FG> row_u(const FContext& c, const std::vector<int>& slots) {
  std::vector<FG> r;
  for (int s : slots) r.push_back(fg_u(c, s));
  return r;
}
std::vector<FG> row_time(const Expr& e, const FContext& c,
                         const std::vector<int>& slots) {
  std::vector<FG> r;
  for (int s : slots) r.push_back(fg_val(time_jet(e, c, s)));
  return r;
}
std::vector<FG> row_site(const Expr& e, const FContext& c,
                         const std::vector<int>& slots) {
  std::vector<FG> r;
  for (int s : slots) r.push_back(fgc(site_val(e, c, s)));
  return r;
}
std::vector<FG> row_one(size_t k) { return std::vector<FG>(k, fgc(1.0)); }

// det over [u-row, time/site rows..., optional 1-row]
FG det_u_rows(const FContext& c, const std::vector<int>& slots,
              const std::vector<Expr>& time_rows, bool trailing_one,
              bool rows_are_site_fns = false) {
  std::vector<std::vector<FG>> m;
  m.push_back(row_u(c, slots));
  for (const Expr& e : time_rows)
    m.push_back(rows_are_site_fns ? row_site(e, c, slots)
                                  : row_time(e, c, slots));
  if (trailing_one) m.push_back(row_one(slots.size()));
  return det_matrix<FG>(std::move(m));
}

FG apply_f(const Expr& f, const FContext& c, const std::vector<FG>& xs) {
  std::vector<std::pair<std::string, FG>> vars;
  vars.reserve(xs.size() + 1);
  for (size_t i = 0; i < xs.size(); ++i)
    vars.emplace_back("x" + std::to_string(i + 1), xs[i]);
  vars.emplace_back("t", fg_t(c));
  return f.eval<FG>(vars);
}

std::vector<int> iota_slots(int count) {
  std::vector<int> s(count);
  for (int i = 0; i < count; ++i) s[i] = i;
  return s;
}

std::string slot_name(int slot) {
  static const char* names[7] = {"(n,m)",    "(n+1,m)", "(n,m+1)", "(n-1,m+1)",
                                 "(n-1,m)", "(n,m-1)", "(n+1,m-1)"};
  return names[slot];
}

// generators -----------------------------------------------------------------

Expr lit0() { return Expr::literal(0); }
Expr lit1() { return Expr::literal(1); }
Expr var_t() { return Expr::var("t"); }

SymmetryField gen_dt_scaling(const Expr& a, const std::string& name) {
  return SymmetryField::from_exprs(lit1(), a, lit0(), name);
}
SymmetryField gen_scaling(const Expr& a, const std::string& name) {
  return SymmetryField::from_exprs(lit0(), a, lit0(), name);
}
SymmetryField gen_shift(const Expr& lambda, const std::string& name) {
  return SymmetryField::from_exprs(lit0(), lit0(), lambda, name);
}

std::vector<SymmetryField> sl2_triple() {
  return {SymmetryField::from_exprs(lit1(), lit0(), lit0(), "X1"),
          SymmetryField::from_exprs(var_t(), lit0(), lit0(), "X2"),
          SymmetryField::from_exprs(Expr::parse("t^2"), lit0(), lit0(), "X3")};
}

Expr omega_lambda_sum(const std::vector<std::vector<Expr>>& omega,
                      const std::vector<Expr>& lambdas, int k,
                      const Expr* sigma) {
  Expr acc;
  for (size_t j = 0; j < lambdas.size(); ++j) {
    const Expr& w = omega[k][j];
    if (w.is_literal(0.0)) continue;
    Expr term = w * lambdas[j];
    acc = acc.empty() ? term : acc + term;
  }
  if (sigma && !sigma->is_literal(0.0))
    acc = acc.empty() ? *sigma : acc + *sigma;
  if (acc.empty()) acc = lit0();
  return acc;
}

// conditions ----------------------------------------------------------------

using CheckFn = std::function<ConditionResult(
    const LatticePatch&, const std::vector<double>&, const std::vector<VSample>&)>;

ConditionSpec make_cond(std::string name, CheckFn fn, bool hard = true) {
  return ConditionSpec{std::move(name), hard, std::move(fn)};
}

FContext ctx_at(const LatticePatch& patch, Site s, double t) {
  FContext c;
  c.patch = patch;
  c.s = patch.wrap(s);
  c.t = t;
  return c;
}

ConditionSpec cond_site_distinct(const std::string& name, Expr fn, int dn,
                                 int dm) {
  return make_cond(name, [fn, dn, dm](const LatticePatch& patch,
                                      const std::vector<double>&,
                                      const std::vector<VSample>&) {
    for (int idx = 0; idx < patch.size(); ++idx) {
      Site s = patch.site(idx);
      Site sh = patch.wrap({s.n + dn, s.m + dm});
      double v0 = fn.eval_site(s.n, s.m);
      double v1 = fn.eval_site(sh.n, sh.m);
      if (std::fabs(v1 - v0) <= 1e-9 * std::max(1.0, std::fabs(v0)))
        return ConditionResult{
            "", false,
            "equal values at site (" + std::to_string(s.n) + "," +
                std::to_string(s.m) + ")"};
    }
    return ConditionResult{"", true, ""};
  });
}

// determinant of site functions over the fixed slot prefix, at every site
ConditionSpec cond_site_det(const std::string& name, std::vector<Expr> family,
                            std::vector<int> slots) {
  return make_cond(name, [family, slots](const LatticePatch& patch,
                                         const std::vector<double>&,
                                         const std::vector<VSample>&) {
    for (int idx = 0; idx < patch.size(); ++idx) {
      FContext c = ctx_at(patch, patch.site(idx), 0.0);
      size_t k = family.size();
      std::vector<std::vector<double>> rows(k, std::vector<double>(k));
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
          rows[i][j] = site_val(family[i], c, slots[j]);
      double det = det_matrix<double>(rows);
      if (!det_nonzero(det, rows))
        return ConditionResult{"", false,
                               "vanishes at site (" +
                                   std::to_string(c.s.n) + "," +
                                   std::to_string(c.s.m) + ")"};
    }
    return ConditionResult{"", true, ""};
  });
}

// determinant of time-dependent lambda rows over slots, at sites x times
ConditionSpec cond_time_det(const std::string& name, std::vector<Expr> family,
                            std::vector<int> slots) {
  return make_cond(name, [family, slots](const LatticePatch& patch,
                                         const std::vector<double>& times,
                                         const std::vector<VSample>&) {
    for (int idx = 0; idx < patch.size(); ++idx)
      for (double t : times) {
        FContext c = ctx_at(patch, patch.site(idx), t);
        size_t k = family.size();
        std::vector<std::vector<double>> rows(k, std::vector<double>(k));
        for (size_t i = 0; i < k; ++i)
          for (size_t j = 0; j < k; ++j)
            rows[i][j] = time_jet(family[i], c, slots[j]).v0;
        double det = det_matrix<double>(rows);
        if (!det_nonzero(det, rows)) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "vanishes at site (%d,%d), t=%g",
                        c.s.n, c.s.m, t);
          return ConditionResult{"", false, buf};
        }
      }
    return ConditionResult{"", true, ""};
  });
}

ConditionSpec cond_expr_nonzero(const std::string& name, Expr fn) {
  return make_cond(name, [fn](const LatticePatch& patch,
                              const std::vector<double>& times,
                              const std::vector<VSample>&) {
    for (int idx = 0; idx < patch.size(); ++idx) {
      Site s = patch.site(idx);
      for (double t : times) {
        double v = fn.eval_time(t, s.n, s.m).v0;
        if (std::fabs(v) < 1e-9) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "vanishes at site (%d,%d), t=%g",
                        s.n, s.m, t);
          return ConditionResult{"", false, buf};
        }
      }
    }
    return ConditionResult{"", true, ""};
  });
}

ConditionSpec cond_omega_ode(const std::string& name,
                             std::vector<std::vector<Expr>> omega,
                             std::vector<Expr> lambdas,
                             std::vector<Expr> sigmas) {
  return make_cond(name, [omega, lambdas, sigmas](
                             const LatticePatch& patch,
                             const std::vector<double>& times,
                             const std::vector<VSample>&) {
    for (size_t k = 0; k < omega.size(); ++k)
      for (int idx = 0; idx < patch.size(); ++idx) {
        Site s = patch.site(idx);
        for (double t : times) {
          double res = 0, scale = 1;
          for (size_t j = 0; j < lambdas.size(); ++j) {
            Jet3 w = omega[k][j].eval_time(t);
            Jet3 l = lambdas[j].eval_time(t, s.n, s.m);
            res += w.v2 * l.v0 + 2 * w.v1 * l.v1;
            scale += std::fabs(w.v2 * l.v0) + std::fabs(2 * w.v1 * l.v1);
          }
          if (!sigmas.empty()) {
            Jet3 sg = sigmas[k].eval_time(t);
            res += sg.v2;
            scale += std::fabs(sg.v2);
          }
          if (std::fabs(res) > 1e-9 * scale) {
            char buf[120];
            std::snprintf(buf, sizeof buf,
                          "residual %g at site (%d,%d), t=%g (row %zu)", res,
                          s.n, s.m, t, k + 1);
            return ConditionResult{"", false, buf};
          }
        }
      }
    return ConditionResult{"", true, ""};
  });
}

ConditionSpec cond_omega_det(const std::string& name,
                             std::vector<std::vector<Expr>> omega) {
  return make_cond(name, [omega](const LatticePatch&,
                                 const std::vector<double>& times,
                                 const std::vector<VSample>&) {
    size_t k = omega.size();
    for (double t : times) {
      std::vector<std::vector<double>> rows(k, std::vector<double>(k));
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) rows[i][j] = omega[i][j].eval_time(t).v1;
      double det = det_matrix<double>(rows);
      if (!det_nonzero(det, rows)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "det(omega') vanishes at t=%g", t);
        return ConditionResult{"", false, buf};
      }
    }
    return ConditionResult{"", true, ""};
  });
}

ConditionSpec cond_expr_positive(const std::string& name, Expr fn,
                                 int deriv_order) {
  return make_cond(name, [fn, deriv_order](const LatticePatch&,
                                           const std::vector<double>& times,
                                           const std::vector<VSample>&) {
    for (double t : times) {
      Jet3 j = fn.eval_time(t);
      double v = deriv_order == 0 ? j.v0 : j.v1;
      if (v <= 0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "non-positive (%g) at t=%g", v, t);
        return ConditionResult{"", false, buf};
      }
    }
    return ConditionResult{"", true, ""};
  });
}

// assumption (ii): nonlinear and coupled, checked on samples relative to
// the interaction's own scale
ConditionSpec cond_coupling(const std::string& name, InteractionFn F) {
  return make_cond(
      name,
      [F](const LatticePatch& patch, const std::vector<double>&,
          const std::vector<VSample>& samples) {
        std::array<bool, 7> seen{};
        bool mixed = false;
        for (const VSample& smp : samples) {
          FContext c;
          c.patch = patch;
          c.s = smp.s;
          c.t = smp.t;
          c.u = smp.u;
          FG f0;
          try {
            f0 = F(c);
          } catch (const DomainError&) {
            continue;
          }
          double scale = std::fabs(f0.v);
          for (int j = 0; j < 7; ++j)
            scale = std::max(scale, std::fabs(c.u[j] * f0.d[j]));
          if (scale == 0) continue;
          for (int j = 0; j < 7; ++j)
            if (std::fabs(c.u[j] * f0.d[j]) > 1e-7 * scale) seen[j] = true;
          if (!mixed) {
            for (int p = 0; p < 7 && !mixed; ++p)
              for (int q = 0; q < 7 && !mixed; ++q) {
                if (p == q) continue;
                const double h = 1e-4 * c.u[q];
                try {
                  FContext cp = c, cm = c;
                  cp.u[q] += h;
                  cm.u[q] -= h;
                  double d2 = (F(cp).d[p] - F(cm).d[p]) / (2 * h);
                  if (std::fabs(c.u[p] * c.u[q] * d2) > 1e-6 * scale)
                    mixed = true;
                } catch (const DomainError&) {
                }
              }
          }
        }
        for (int j = 0; j < 7; ++j)
          if (!seen[j])
            return ConditionResult{
                "", false,
                "dF/du vanished on all samples at offset " + slot_name(j)};
        if (!mixed)
          return ConditionResult{"", false,
                                 "no nonzero mixed second partial found"};
        return ConditionResult{"", true, ""};
      },
      /*hard=*/false);
}

// sampled non-degeneracy of a u-dependent determinant (ratio denominators)
ConditionSpec cond_sampled_nonzero(const std::string& name, InteractionFn den) {
  return make_cond(name, [den](const LatticePatch& patch,
                               const std::vector<double>&,
                               const std::vector<VSample>& samples) {
    int bad = 0;
    for (const VSample& smp : samples) {
      FContext c;
      c.patch = patch;
      c.s = smp.s;
      c.t = smp.t;
      c.u = smp.u;
      double v;
      try {
        v = den(c).v;
      } catch (const DomainError&) {
        ++bad;
        continue;
      }
      if (std::fabs(v) < 1e-12) ++bad;
    }
    if (bad * 10 > (int)samples.size())
      return ConditionResult{
          "", false,
          "denominator vanished on " + std::to_string(bad) + " samples"};
    return ConditionResult{"", true, ""};
  });
}

// interaction builders -------------------------------------------------------

// Scaling classes: F = u_nm f([exp factor] prod u^cofactor).
struct ScalingSpec {
  int n_a;            // number of a^{(i)}
  bool first_has_dt;  // X1 = d_t + a1 u d_u
  double sigma;       // exponent orientation
};

InteractionFn make_scaling_F(const ScalingSpec& spec, const FreeData& data) {
  int anchors = spec.n_a - (spec.first_has_dt ? 1 : 0);
  std::vector<Expr> fam(data.a_list.begin() + (spec.first_has_dt ? 1 : 0),
                        data.a_list.end());
  std::vector<Expr> exp_fam = data.a_list;  // a1 on top
  Expr f = data.f;
  double sigma = spec.sigma;
  bool has_dt = spec.first_has_dt;
  return [=](const FContext& c) -> FG {
    std::vector<FG> xs;
    for (int q = anchors; q < 7; ++q) {
      std::vector<int> slots = iota_slots(anchors);
      slots.push_back(q);
      std::vector<double> e = cofactor_exponents(fam, slots, sigma, c);
      FG xi = fgc(1.0);
      for (size_t i = 0; i < slots.size(); ++i)
        xi = xi * pow(fg_u(c, slots[i]), fgc(e[i]));
      if (has_dt) {
        double D = slot_det(exp_fam, slots, c);
        xi = xi * exp(fgc(-sigma * D) * fg_t(c));
      }
      xs.push_back(xi);
    }
    return fg_u(c, 0) * apply_f(f, c, xs);
  };
}

std::vector<InteractionFn> make_scaling_invariants(const ScalingSpec& spec,
                                                   const FreeData& data) {
  int anchors = spec.n_a - (spec.first_has_dt ? 1 : 0);
  std::vector<Expr> fam(data.a_list.begin() + (spec.first_has_dt ? 1 : 0),
                        data.a_list.end());
  std::vector<Expr> exp_fam = data.a_list;
  double sigma = spec.sigma;
  bool has_dt = spec.first_has_dt;
  std::vector<InteractionFn> out;
  for (int q = anchors; q < 7; ++q)
    out.push_back([=](const FContext& c) -> FG {
      std::vector<int> slots = iota_slots(anchors);
      slots.push_back(q);
      std::vector<double> e = cofactor_exponents(fam, slots, sigma, c);
      FG xi = fgc(1.0);
      for (size_t i = 0; i < slots.size(); ++i)
        xi = xi * pow(fg_u(c, slots[i]), fgc(e[i]));
      if (has_dt) {
        double D = slot_det(exp_fam, slots, c);
        xi = xi * exp(fgc(-sigma * D) * fg_t(c));
      }
      return xi;
    });
  return out;
}

// Nonsolvable scaling classes: F = u_nm P^{4/D_alpha} f(xi).
struct NsScalingSpec {
  int n_a;
};

InteractionFn make_ns_scaling_F(const NsScalingSpec& spec,
                                const FreeData& data) {
  int na = spec.n_a;
  double sig_pref = (na % 2 == 0) ? -1.0 : 1.0;  // (-1)^{na+1}
  double sig_xi = (na % 2 == 0) ? 1.0 : -1.0;    // (-1)^{na}
  std::vector<Expr> afam = data.a_list;
  std::vector<Expr> afam1 = data.a_list;
  afam1.push_back(lit1());
  Expr f = data.f;
  return [=](const FContext& c) -> FG {
    std::vector<int> pre = iota_slots(na + 1);
    std::vector<double> ep = cofactor_exponents(afam, pre, sig_pref, c);
    FG P = fgc(1.0);
    for (size_t i = 0; i < pre.size(); ++i)
      P = P * pow(fg_u(c, pre[i]), fgc(ep[i]));
    double Da = slot_det(afam1, pre, c);
    if (Da == 0) throw DomainError("degenerate alpha denominator");
    std::vector<FG> xs;
    for (int q = na + 1; q < 7; ++q) {
      std::vector<int> slots = iota_slots(na + 1);
      slots.push_back(q);
      std::vector<double> e = cofactor_exponents(afam1, slots, sig_xi, c);
      FG xi = fgc(1.0);
      for (size_t i = 0; i < slots.size(); ++i)
        xi = xi * pow(fg_u(c, slots[i]), fgc(e[i]));
      xs.push_back(xi);
    }
    return fg_u(c, 0) * pow(P, fgc(4.0 / Da)) * apply_f(f, c, xs);
  };
}

std::vector<InteractionFn> make_ns_scaling_invariants(const NsScalingSpec& spec,
                                                      const FreeData& data) {
  int na = spec.n_a;
  double sig_xi = (na % 2 == 0) ? 1.0 : -1.0;
  std::vector<Expr> afam1 = data.a_list;
  afam1.push_back(lit1());
  std::vector<InteractionFn> out;
  for (int q = na + 1; q < 7; ++q)
    out.push_back([=](const FContext& c) -> FG {
      std::vector<int> slots = iota_slots(na + 1);
      slots.push_back(q);
      std::vector<double> e = cofactor_exponents(afam1, slots, sig_xi, c);
      FG xi = fgc(1.0);
      for (size_t i = 0; i < slots.size(); ++i)
        xi = xi * pow(fg_u(c, slots[i]), fgc(e[i]));
      return xi;
    });
  return out;
}

// Exponential classes: F = a^2 u + e^{at} f(D[u e^{-at}, kappa..., 1_pq]).
InteractionFn make_exp_F(int n_kappa, const FreeData& data) {
  Expr a = data.a_list.at(0);
  std::vector<Expr> kappas = data.kappa_list;
  Expr f = data.f;
  return [=](const FContext& c) -> FG {
    double a0 = site_val(a, c, 0);
    FG eat = exp(fgc(a0) * fg_t(c));
    std::vector<FG> xs;
    for (int q = n_kappa + 1; q < 7; ++q) {
      std::vector<int> slots = iota_slots(n_kappa + 1);
      slots.push_back(q);
      std::vector<std::vector<FG>> m;
      std::vector<FG> g;
      for (int s : slots)
        g.push_back(fg_u(c, s) * exp(fgc(-site_val(a, c, s)) * fg_t(c)));
      m.push_back(g);
      for (const Expr& k : kappas) m.push_back(row_site(k, c, slots));
      m.push_back(row_one(slots.size()));
      xs.push_back(det_matrix<FG>(std::move(m)));
    }
    return fgc(a0 * a0) * fg_u(c, 0) + eat * apply_f(f, c, xs);
  };
}

std::vector<InteractionFn> make_exp_invariants(int n_kappa,
                                               const FreeData& data) {
  Expr a = data.a_list.at(0);
  std::vector<Expr> kappas = data.kappa_list;
  std::vector<InteractionFn> out;
  for (int q = n_kappa + 1; q < 7; ++q)
    out.push_back([=](const FContext& c) -> FG {
      std::vector<int> slots = iota_slots(n_kappa + 1);
      slots.push_back(q);
      std::vector<std::vector<FG>> m;
      std::vector<FG> g;
      for (int s : slots)
        g.push_back(fg_u(c, s) * exp(fgc(-site_val(a, c, s)) * fg_t(c)));
      m.push_back(g);
      for (const Expr& k : kappas) m.push_back(row_site(k, c, slots));
      m.push_back(row_one(slots.size()));
      return det_matrix<FG>(std::move(m));
    });
  return out;
}

// Bordered-determinant classes A_{2r,*}: F = 1 + B(u)/D_norm + f.
InteractionFn make_bordered_F(int r, const FreeData& data) {
  std::vector<Expr> lambdas = data.lambda_list;
  Expr f = data.f;
  return [=](const FContext& c) -> FG {
    std::vector<int> head = iota_slots(r);  // s0..s_{r-1}
    std::vector<std::vector<FG>> B;
    {
      std::vector<FG> row0;
      row0.push_back(fg_u(c, 0));
      row0.push_back(fgc(1.0));
      for (int j = 1; j < r; ++j) row0.push_back(fg_u(c, j));
      B.push_back(row0);
      for (int i = 0; i < r; ++i) {
        std::vector<FG> row;
        Jet3 at0 = time_jet(lambdas[i], c, 0);
        row.push_back(fg_val(at0));
        row.push_back(fg_dd(at0));
        for (int j = 1; j < r; ++j)
          row.push_back(fg_val(time_jet(lambdas[i], c, j)));
        B.push_back(row);
      }
    }
    std::vector<std::vector<FG>> Dn;
    for (int i = 0; i < r; ++i) Dn.push_back(row_time(lambdas[i], c, head));
    FG Fv = fgc(1.0) + det_matrix<FG>(std::move(B)) /
                           det_matrix<FG>(std::move(Dn));
    std::vector<FG> xs;
    for (int q = r; q < 7; ++q) {
      std::vector<int> slots = head;
      slots.push_back(q);
      xs.push_back(det_u_rows(c, slots, lambdas, false));
    }
    return Fv + apply_f(f, c, xs);
  };
}

std::vector<InteractionFn> make_bordered_invariants(int r,
                                                    const FreeData& data) {
  std::vector<Expr> lambdas = data.lambda_list;
  std::vector<InteractionFn> out;
  for (int q = r; q < 7; ++q)
    out.push_back([=](const FContext& c) -> FG {
      std::vector<int> slots = iota_slots(r);
      slots.push_back(q);
      return det_u_rows(c, slots, lambdas, false);
    });
  return out;
}

// Sigma classes A_{2r+2,*}: d_u and t d_u plus r lambda shifts; the linear
// part is the unique combination of the nested determinants B_k(u) whose
// response to each lambda^{(i)} is the second derivative of lambda^{(i)}.
// The (triangular) response conditions are solved at evaluation time, which
// also keeps the coefficient stack correct for every r.
struct SigmaParts {
  // lambda jets per (which, slot); provider abstracts A_4_5's derived lambda
  std::function<Jet3(int which, const FContext&, int slot)> lam;
  int r;
};

FG sigma_structural(const SigmaParts& parts, const FContext& c) {
  int r = parts.r;
  // B_k(u) and responses r_{k,i}
  std::vector<FG> B(r + 1), gamma(r + 1);
  std::vector<std::vector<FG>> resp(r + 1, std::vector<FG>(r + 1));
  for (int k = 1; k <= r; ++k) {
    std::vector<int> slots = iota_slots(k + 1);  // s0..sk
    std::vector<std::vector<FG>> m;
    m.push_back(row_u(c, slots));
    for (int j = 1; j < k; ++j) {
      std::vector<FG> row;
      for (int s : slots) row.push_back(fg_val(parts.lam(j, c, s)));
      m.push_back(row);
    }
    m.push_back(row_one(slots.size()));
    B[k] = det_matrix<FG>(m);
    for (int i = k; i <= r; ++i) {
      std::vector<std::vector<FG>> mi = m;
      std::vector<FG> top;
      for (int s : slots) top.push_back(fg_val(parts.lam(i, c, s)));
      mi[0] = top;
      resp[k][i] = det_matrix<FG>(std::move(mi));
    }
  }
  FG F0 = fgc(0.0);
  for (int i = 1; i <= r; ++i) {
    FG need = fg_dd(parts.lam(i, c, 0));
    for (int k = 1; k < i; ++k) need = need - gamma[k] * resp[k][i];
    gamma[i] = need / resp[i][i];
    F0 = F0 + gamma[i] * B[i];
  }
  return F0;
}

SigmaParts sigma_parts_from_exprs(const std::vector<Expr>& lambdas) {
  SigmaParts p;
  p.r = (int)lambdas.size();
  p.lam = [lambdas](int which, const FContext& c, int slot) {
    return time_jet(lambdas[which - 1], c, slot);
  };
  return p;
}

InteractionFn make_sigma_F(const SigmaParts& parts, const FreeData& data) {
  Expr f = data.f;
  SigmaParts p = parts;
  return [=](const FContext& c) -> FG {
    FG F0 = sigma_structural(p, c);
    std::vector<FG> xs;
    for (int q = p.r + 1; q < 7; ++q) {
      std::vector<int> slots = iota_slots(p.r + 1);
      slots.push_back(q);
      std::vector<std::vector<FG>> m;
      m.push_back(row_u(c, slots));
      for (int j = 1; j <= p.r; ++j) {
        std::vector<FG> row;
        for (int s : slots) row.push_back(fg_val(p.lam(j, c, s)));
        m.push_back(row);
      }
      m.push_back(row_one(slots.size()));
      xs.push_back(det_matrix<FG>(std::move(m)));
    }
    return F0 + apply_f(f, c, xs);
  };
}

std::vector<InteractionFn> make_sigma_invariants(const SigmaParts& parts) {
  std::vector<InteractionFn> out;
  SigmaParts p = parts;
  for (int q = p.r + 1; q < 7; ++q)
    out.push_back([=](const FContext& c) -> FG {
      std::vector<int> slots = iota_slots(p.r + 1);
      slots.push_back(q);
      std::vector<std::vector<FG>> m;
      m.push_back(row_u(c, slots));
      for (int j = 1; j <= p.r; ++j) {
        std::vector<FG> row;
        for (int s : slots) row.push_back(fg_val(p.lam(j, c, s)));
        m.push_back(row);
      }
      m.push_back(row_one(slots.size()));
      return det_matrix<FG>(std::move(m));
    });
  return out;
}

// A_12_2 with the linear part assembled from the explicit nested-fraction
// form, under its two candidate readings.  Kept so the verifier can report
// which reading satisfies the determining equation.
InteractionFn make_a12_2_explicit_F(const FreeData& data, bool d1_is_a65) {
  std::vector<Expr> lam = data.lambda_list;
  Expr f = data.f;
  return [=](const FContext& c) -> FG {
    auto lj = [&](int which, int slot) { return time_jet(lam[which - 1], c, slot); };
    auto det3 = [&](std::initializer_list<std::initializer_list<FG>> rows) {
      std::vector<std::vector<FG>> m;
      for (auto& r : rows) m.push_back(r);
      return det_matrix<FG>(std::move(m));
    };
    // D_i = | l1'' l1(s0) l1(s1) ; li'' li(s0) li(s1) ; 0 1 1 |
    auto Di = [&](int i) {
      Jet3 l1_0 = lj(1, 0), l1_1 = lj(1, 1), li_0 = lj(i, 0), li_1 = lj(i, 1);
      return det3({{fg_dd(l1_0), fg_val(l1_0), fg_val(l1_1)},
                   {fg_dd(li_0), fg_val(li_0), fg_val(li_1)},
                   {fgc(0), fgc(1), fgc(1)}});
    };
    auto lrow = [&](std::vector<int> which, std::vector<int> slots,
                    bool trailing_one) {
      std::vector<std::vector<FG>> m;
      for (size_t i = 0; i < which.size(); ++i) {
        std::vector<FG> row;
        for (int s : slots) row.push_back(fg_val(lj(which[i], s)));
        m.push_back(row);
      }
      if (trailing_one) m.push_back(row_one(slots.size()));
      return det_matrix<FG>(std::move(m));
    };
    auto urow_det = [&](std::vector<int> which, std::vector<int> slots) {
      std::vector<std::vector<FG>> m;
      m.push_back(row_u(c, slots));
      for (int w : which) {
        std::vector<FG> row;
        for (int s : slots) row.push_back(fg_val(lj(w, s)));
        m.push_back(row);
      }
      m.push_back(row_one(slots.size()));
      return det_matrix<FG>(std::move(m));
    };
    FG s = fg_val(lj(1, 1)) - fg_val(lj(1, 0));
    FG D12 = lrow({1, 2}, {0, 1, 2}, true);
    FG D123 = lrow({1, 2, 3}, {0, 1, 2, 3}, true);
    FG D1234 = lrow({1, 2, 3, 4}, {0, 1, 2, 3, 4}, true);
    FG D12345 = lrow({1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5}, true);
    FG G3 = lrow({1, 3}, {0, 1, 2}, true);
    FG G4 = lrow({1, 4}, {0, 1, 2}, true);
    FG G5 = lrow({1, 5}, {0, 1, 2}, true);
    FG H4 = lrow({1, 2, 4}, {0, 1, 2, 3}, true);
    FG H5 = lrow({1, 2, 5}, {0, 1, 2, 3}, true);
    FG K5 = lrow({1, 2, 3, 5}, {0, 1, 2, 3, 4}, true);
    FG D2 = Di(2), D3 = Di(3), D4 = Di(4), D5 = Di(5);
    FG B2 = urow_det({1}, {0, 1, 2});
    FG B3 = urow_det({1, 2}, {0, 1, 2, 3});
    FG B4 = urow_det({1, 2, 3}, {0, 1, 2, 3, 4});
    FG B5 = urow_det({1, 2, 3, 4}, {0, 1, 2, 3, 4, 5});
    FG Z = B4 / (s * D1234);
    FG Z1 = B5 / (s * D12345);
    FG c4 = (D4 - D3 * G4 / D12 - D2 * H4 / D123) +
            D3 * G3 * H4 / (D12 * D123);
    FG Fv = fg_dd(lj(1, 0)) * (fg_u(c, 1) - fg_u(c, 0)) / s -
            D3 * B2 / (s * D12) + (D2 - D3 * G3 / D12) * B3 / (s * D123) +
            c4 * Z + c4 * K5 * Z1 - (D2 - D3 * G3 / D12) * H5 * Z1 +
            (D5 - (d1_is_a65 ? D2 : D3) * G5 / D12) * Z1;
    std::vector<int> slots = {0, 1, 2, 3, 4, 5, 6};
    std::vector<std::vector<FG>> m;
    m.push_back(row_u(c, slots));
    for (int j = 1; j <= 5; ++j) {
      std::vector<FG> row;
      for (int s2 : slots) row.push_back(fg_val(lj(j, s2)));
      m.push_back(row);
    }
    m.push_back(row_one(slots.size()));
    std::vector<FG> xs = {det_matrix<FG>(std::move(m))};
    return Fv + apply_f(f, c, xs);
  };
}

// Nonsolvable ratio classes: F = D_den(u)^{-3} f(D_num/D_den).
InteractionFn make_ns_ratio_F(int n_kappa, const FreeData& data) {
  std::vector<Expr> kappas = data.kappa_list;
  Expr f = data.f;
  return [=](const FContext& c) -> FG {
    std::vector<int> den_slots = iota_slots(n_kappa + 2);
    FG den = det_u_rows(c, den_slots, kappas, true, true);
    if (den.v == 0) throw DomainError("ratio denominator vanished at sample");
    std::vector<FG> xs;
    for (int q = n_kappa + 2; q < 7; ++q) {
      std::vector<int> slots = iota_slots(n_kappa + 1);
      slots.push_back(q);
      xs.push_back(det_u_rows(c, slots, kappas, true, true) / den);
    }
    return pow_int(den, -3) * apply_f(f, c, xs);
  };
}

std::vector<InteractionFn> make_ns_ratio_invariants(int n_kappa,
                                                    const FreeData& data) {
  std::vector<Expr> kappas = data.kappa_list;
  std::vector<InteractionFn> out;
  for (int q = n_kappa + 2; q < 7; ++q)
    out.push_back([=](const FContext& c) -> FG {
      std::vector<int> den_slots = iota_slots(n_kappa + 2);
      FG den = det_u_rows(c, den_slots, kappas, true, true);
      if (den.v == 0) throw DomainError("ratio denominator vanished at sample");
      std::vector<int> slots = iota_slots(n_kappa + 1);
      slots.push_back(q);
      return det_u_rows(c, slots, kappas, true, true) / den;
    });
  return out;
}

InteractionFn ns_ratio_denominator(int n_kappa, const FreeData& data) {
  std::vector<Expr> kappas = data.kappa_list;
  return [=](const FContext& c) -> FG {
    return det_u_rows(c, iota_slots(n_kappa + 2), kappas, true, true);
  };
}

// A_4_5: lambda_nm(t) = (c_nm - (1/2) int_0^t sigma''/sqrt(omega') ds)
//                        / sqrt(omega'(t)).
double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double b, double tol, int depth = 0) {
  double m = (a + b) / 2;
  double fa = g(a), fm = g(m), fb = g(b);
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  double lm = (a + m) / 2, rm = (m + b) / 2;
  double left = (m - a) / 6 * (fa + 4 * g(lm) + fm);
  double right = (b - m) / 6 * (fm + 4 * g(rm) + fb);
  if (depth > 40 || std::fabs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(g, a, m, tol / 2, depth + 1) +
         adaptive_simpson(g, m, b, tol / 2, depth + 1);
}

Taylor a45_lambda_taylor(const Expr& omega, const Expr& sigma, double c_site,
                         double t, int order) {
  // needs one extra order of omega for the outer 1/sqrt(omega') factor
  Taylor w = omega.eval_taylor(t, order + 1);
  Taylor wd = w.derivative();
  if (wd.value() <= 0) throw DomainError("A_4_5 requires omega' > 0");
  Taylor half_integral = Taylor::constant(0.0, order);
  if (!sigma.is_literal(0.0)) {
    // H' = sigma''/sqrt(omega'); the series of H comes from the integrand's
    // series, the constant term from adaptive quadrature.
    auto g = [&](double s) {
      double sdd = sigma.eval_taylor(s, 2).deriv(2);
      double od = omega.eval_taylor(s, 1).deriv(1);
      if (od <= 0) throw DomainError("A_4_5 requires omega' > 0");
      return sdd / std::sqrt(od);
    };
    std::vector<double> hc(order + 1, 0.0);
    hc[0] = adaptive_simpson(g, 0.0, t, 1e-13);
    if (order >= 1) {
      Taylor sj = sigma.eval_taylor(t, order + 1);
      Taylor integrand = sj.derivative().derivative() / sqrt(wd);
      for (int k = 1; k <= order; ++k) hc[k] = integrand.coeff(k - 1) / k;
    }
    half_integral = 0.5 * Taylor::from_coeffs(hc.data(), order);
  }
  return (Taylor::constant(c_site, order) - half_integral) / sqrt(wd);
}

SymmetryField a45_field(const Expr& omega, const Expr& sigma,
                        const Expr& c_expr, bool with_omega_factor,
                        const std::string& name) {
  SymmetryField f;
  f.name = name;
  f.tau = [](double, int order) { return Taylor::constant(0.0, order); };
  f.a = [](Site) { return 0.0; };
  f.tau_zero = true;
  f.a_zero = true;
  f.lambda = [omega, sigma, c_expr, with_omega_factor](Site s, double t,
                                                       int order) {
    double cs = c_expr.eval_site(s.n, s.m);
    Taylor lam = a45_lambda_taylor(omega, sigma, cs, t, order);
    if (!with_omega_factor) return lam;
    Taylor res = omega.eval_taylor(t, order) * lam;
    if (!sigma.is_literal(0.0)) res = res + sigma.eval_taylor(t, order);
    return res;
  };
  return f;
}

SigmaParts sigma_parts_a45(const Expr& omega, const Expr& sigma,
                           const Expr& c_expr) {
  SigmaParts p;
  p.r = 1;
  p.lam = [omega, sigma, c_expr](int, const FContext& c, int slot) {
    Site w = gsite(c, slot);
    double cs = c_expr.eval_site(w.n, w.m);
    return a45_lambda_taylor(omega, sigma, cs, c.t, 3).jet3();
  };
  return p;
}

// per-class assembly ---------------------------------------------------------

std::vector<std::string> xi_names(int first_slot, bool center_last = false) {
  std::vector<std::string> names;
  for (int q = first_slot; q < 7; ++q) names.push_back("xi" + slot_name(q));
  if (center_last) names.push_back("xi" + slot_name(0));
  return names;
}

CatalogEntry assemble_scaling(const ClassId& id, const ScalingSpec& spec,
                              const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if ((int)data.a_list.size() != spec.n_a)
    throw BuildError(id.str() + " needs " + std::to_string(spec.n_a) +
                     " site functions in a_list");
  if (data.f.empty()) throw BuildError(id.str() + " needs f");
  e.F = make_scaling_F(spec, data);
  e.invariants = make_scaling_invariants(spec, data);
  e.invariant_names = xi_names(spec.n_a - (spec.first_has_dt ? 1 : 0));
  for (int i = 0; i < spec.n_a; ++i) {
    std::string name = "X" + std::to_string(i + 1);
    if (i == 0 && spec.first_has_dt)
      e.generators.push_back(gen_dt_scaling(data.a_list[i], name));
    else
      e.generators.push_back(gen_scaling(data.a_list[i], name));
  }
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_ns_scaling(const ClassId& id, int n_a,
                                 const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if ((int)data.a_list.size() != n_a)
    throw BuildError(id.str() + " needs " + std::to_string(n_a) +
                     " site functions in a_list");
  if (data.f.empty()) throw BuildError(id.str() + " needs f");
  NsScalingSpec spec{n_a};
  e.F = make_ns_scaling_F(spec, data);
  e.invariants = make_ns_scaling_invariants(spec, data);
  e.invariant_names = xi_names(n_a + 1);
  e.generators = sl2_triple();
  for (int i = 0; i < n_a; ++i)
    e.generators.push_back(
        gen_scaling(data.a_list[i], "Y" + std::to_string(i + 1)));
  std::vector<Expr> afam1 = data.a_list;
  afam1.push_back(lit1());
  e.conditions.push_back(cond_site_det("alpha_denominator_nonzero", afam1,
                                       iota_slots(n_a + 1)));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_exp(const ClassId& id, int n_kappa,
                          const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if (data.a_list.size() != 1)
    throw BuildError(id.str() + " needs one site function in a_list");
  if ((int)data.kappa_list.size() != n_kappa)
    throw BuildError(id.str() + " needs " + std::to_string(n_kappa) +
                     " site functions in kappa_list");
  if (data.f.empty()) throw BuildError(id.str() + " needs f");
  e.F = make_exp_F(n_kappa, data);
  e.invariants = make_exp_invariants(n_kappa, data);
  e.invariant_names = xi_names(n_kappa + 1);
  const Expr& a = data.a_list[0];
  Expr eat = Expr::call(Fn::Exp, a * var_t());
  e.generators.push_back(gen_dt_scaling(a, "X1"));
  e.generators.push_back(gen_shift(eat, "X2"));
  for (int i = 0; i < n_kappa; ++i)
    e.generators.push_back(
        gen_shift(data.kappa_list[i] * eat, "X" + std::to_string(i + 3)));
  for (int i = 0; i < n_kappa; ++i) {
    std::string base = "kappa" + std::to_string(i + 1);
    e.conditions.push_back(
        cond_site_distinct(base + "_distinct_n", data.kappa_list[i], 1, 0));
    e.conditions.push_back(
        cond_site_distinct(base + "_distinct_m", data.kappa_list[i], 0, 1));
  }
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_bordered(const ClassId& id, int r,
                               const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if ((int)data.lambda_list.size() != r)
    throw BuildError(id.str() + " needs " + std::to_string(r) +
                     " functions in lambda_list");
  if ((int)data.omega.size() != r)
    throw BuildError(id.str() + " needs an " + std::to_string(r) + "x" +
                     std::to_string(r) + " omega matrix");
  for (const auto& row : data.omega)
    if ((int)row.size() != r) throw BuildError(id.str() + ": ragged omega");
  if (data.f.empty()) throw BuildError(id.str() + " needs f");
  e.F = make_bordered_F(r, data);
  e.invariants = make_bordered_invariants(r, data);
  e.invariant_names = xi_names(r);
  for (int i = 0; i < r; ++i)
    e.generators.push_back(
        gen_shift(data.lambda_list[i], "X" + std::to_string(i + 1)));
  for (int k = 0; k < r; ++k)
    e.generators.push_back(
        gen_shift(omega_lambda_sum(data.omega, data.lambda_list, k, nullptr),
                  "Y" + std::to_string(k + 1)));
  for (int k = 2; k <= r; ++k) {
    std::vector<Expr> fam(data.lambda_list.begin(),
                          data.lambda_list.begin() + k);
    e.conditions.push_back(cond_time_det(
        "det_lambda_1_to_" + std::to_string(k) + "_nonzero", fam,
        iota_slots(k)));
  }
  e.conditions.push_back(
      cond_omega_ode("omega_ode", data.omega, data.lambda_list, {}));
  e.conditions.push_back(cond_omega_det("omega_dot_det_nonzero", data.omega));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_sigma(const ClassId& id, int r, const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if ((int)data.lambda_list.size() != r)
    throw BuildError(id.str() + " needs " + std::to_string(r) +
                     " functions in lambda_list");
  if ((int)data.omega.size() != r || (int)data.sigma_list.size() != r)
    throw BuildError(id.str() + " needs omega (" + std::to_string(r) + "x" +
                     std::to_string(r) + ") and sigma_list");
  if (data.f.empty()) throw BuildError(id.str() + " needs f");
  SigmaParts parts = sigma_parts_from_exprs(data.lambda_list);
  bool explicit_form = id == ClassId{Family::A, 12, 2} &&
                       data.a12_2_reading != "derived";
  if (explicit_form)
    e.F = make_a12_2_explicit_F(data, data.a12_2_reading == "a65");
  else
    e.F = make_sigma_F(parts, data);
  e.invariants = make_sigma_invariants(parts);
  e.invariant_names = xi_names(r + 1);
  e.generators.push_back(gen_shift(lit1(), "X1"));
  e.generators.push_back(gen_shift(var_t(), "X2"));
  for (int i = 0; i < r; ++i)
    e.generators.push_back(
        gen_shift(data.lambda_list[i], "X" + std::to_string(i + 3)));
  for (int k = 0; k < r; ++k)
    e.generators.push_back(gen_shift(
        omega_lambda_sum(data.omega, data.lambda_list, k, &data.sigma_list[k]),
        "Y" + std::to_string(k + 1)));
  for (int k = 1; k <= r; ++k) {
    std::vector<Expr> fam(data.lambda_list.begin(),
                          data.lambda_list.begin() + k);
    fam.push_back(lit1());
    e.conditions.push_back(cond_time_det(
        "det_lambda_1_to_" + std::to_string(k) + "_with_1_nonzero", fam,
        iota_slots(k + 1)));
  }
  e.conditions.push_back(
      cond_omega_ode("omega_ode", data.omega, data.lambda_list,
                     data.sigma_list));
  e.conditions.push_back(cond_omega_det("omega_dot_det_nonzero", data.omega));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_a45(const ClassId& id, const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if (data.omega.empty() || data.omega[0].empty())
    throw BuildError("A_4_5 needs omega");
  if (data.sigma_list.empty()) throw BuildError("A_4_5 needs sigma_list");
  if (data.c.empty()) throw BuildError("A_4_5 needs c");
  if (data.f.empty()) throw BuildError("A_4_5 needs f");
  Expr omega = data.omega[0][0], sigma = data.sigma_list[0], c_expr = data.c;
  SigmaParts parts = sigma_parts_a45(omega, sigma, c_expr);
  e.F = make_sigma_F(parts, data);
  e.invariants = make_sigma_invariants(parts);
  e.invariant_names = xi_names(2);
  e.generators.push_back(gen_shift(lit1(), "X1"));
  e.generators.push_back(gen_shift(var_t(), "X2"));
  e.generators.push_back(a45_field(omega, sigma, c_expr, false, "X3"));
  e.generators.push_back(a45_field(omega, sigma, c_expr, true, "X4"));
  e.conditions.push_back(cond_expr_positive("omega_dot_positive", omega, 1));
  e.conditions.push_back(make_cond(
      "lambda_shift_distinct",
      [omega, sigma, c_expr](const LatticePatch& patch,
                             const std::vector<double>& times,
                             const std::vector<VSample>&) {
        for (int idx = 0; idx < patch.size(); ++idx) {
          Site s = patch.site(idx);
          Site sp = patch.wrap({s.n + 1, s.m});
          for (double t : times) {
            double l0 = a45_lambda_taylor(omega, sigma,
                                          c_expr.eval_site(s.n, s.m), t, 0)
                            .value();
            double l1 = a45_lambda_taylor(omega, sigma,
                                          c_expr.eval_site(sp.n, sp.m), t, 0)
                            .value();
            if (std::fabs(l1 - l0) <= 1e-9 * std::max(1.0, std::fabs(l0))) {
              char buf[96];
              std::snprintf(buf, sizeof buf,
                            "lambda equal across n-shift at (%d,%d), t=%g",
                            s.n, s.m, t);
              return ConditionResult{"", false, buf};
            }
          }
        }
        return ConditionResult{"", true, ""};
      }));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_ns_ratio(const ClassId& id, int n_kappa,
                               const FreeData& data, bool kappa_distinct) {
  CatalogEntry e;
  e.id = id;
  if ((int)data.kappa_list.size() != n_kappa)
    throw BuildError(id.str() + " needs " + std::to_string(n_kappa) +
                     " site functions in kappa_list");
  if (data.f.empty()) throw BuildError(id.str() + " needs f");
  e.F = make_ns_ratio_F(n_kappa, data);
  e.invariants = make_ns_ratio_invariants(n_kappa, data);
  e.invariant_names = xi_names(n_kappa + 2);
  e.generators = sl2_triple();
  e.generators.push_back(gen_shift(lit1(), "Y1"));
  e.generators.push_back(gen_shift(var_t(), "Y2"));
  for (int i = 0; i < n_kappa; ++i) {
    e.generators.push_back(gen_shift(data.kappa_list[i],
                                     "Y" + std::to_string(2 * i + 3)));
    e.generators.push_back(gen_shift(data.kappa_list[i] * var_t(),
                                     "Y" + std::to_string(2 * i + 4)));
  }
  if (kappa_distinct)
    for (int i = 0; i < n_kappa; ++i) {
      std::string base = "kappa" + std::to_string(i + 1);
      e.conditions.push_back(
          cond_site_distinct(base + "_distinct_n", data.kappa_list[i], 1, 0));
      e.conditions.push_back(
          cond_site_distinct(base + "_distinct_m", data.kappa_list[i], 0, 1));
    }
  e.conditions.push_back(cond_sampled_nonzero(
      "denominator_nondegenerate", ns_ratio_denominator(n_kappa, data)));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_A11(const ClassId& id, const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if (data.a_list.size() != 1) throw BuildError("A_1_1 needs one a");
  if (data.f.empty()) throw BuildError("A_1_1 needs f");
  Expr a = data.a_list[0], f = data.f;
  // invariants xi_pq = u_pq e^{-a_pq t}, neighbors first, center last
  std::vector<int> order = {1, 2, 3, 4, 5, 6, 0};
  for (int q : order)
    e.invariants.push_back([a, q](const FContext& c) -> FG {
      return fg_u(c, q) * exp(fgc(-site_val(a, c, q)) * fg_t(c));
    });
  e.invariant_names = xi_names(1, true);
  e.F = [a, f, order](const FContext& c) -> FG {
    std::vector<FG> xs;
    for (int q : order)
      xs.push_back(fg_u(c, q) * exp(fgc(-site_val(a, c, q)) * fg_t(c)));
    return exp(fgc(site_val(a, c, 0)) * fg_t(c)) * apply_f(f, c, xs);
  };
  e.generators.push_back(gen_dt_scaling(a, "X1"));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_A13(const ClassId& id, const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if (data.lambda_list.size() != 1)
    throw BuildError("A_1_3 needs one lambda");
  if (data.f.empty()) throw BuildError("A_1_3 needs f");
  Expr lam = data.lambda_list[0], f = data.f;
  e.F = [lam, f](const FContext& c) -> FG {
    Jet3 l0 = time_jet(lam, c, 0);
    if (l0.v0 == 0) throw DomainError("A_1_3 lambda vanished");
    std::vector<FG> xs;
    for (int q = 1; q < 7; ++q)
      xs.push_back(det_u_rows(c, {0, q}, {lam}, false));
    return fg_dd(l0) / fg_val(l0) * fg_u(c, 0) + apply_f(f, c, xs);
  };
  for (int q = 1; q < 7; ++q)
    e.invariants.push_back([lam, q](const FContext& c) -> FG {
      return det_u_rows(c, {0, q}, {lam}, false);
    });
  e.invariant_names = xi_names(1);
  e.generators.push_back(gen_shift(lam, "X1"));
  e.conditions.push_back(cond_expr_nonzero("lambda_nonzero", lam));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_A24(const ClassId& id, const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if (data.f.empty()) throw BuildError("A_2_4 needs f");
  Expr f = data.f;
  e.F = [f](const FContext& c) -> FG {
    std::vector<FG> xs;
    for (int q = 1; q < 7; ++q) xs.push_back(fg_u(c, 0) - fg_u(c, q));
    return apply_f(f, c, xs);
  };
  for (int q = 1; q < 7; ++q)
    e.invariants.push_back(
        [q](const FContext& c) -> FG { return fg_u(c, 0) - fg_u(c, q); });
  e.invariant_names = xi_names(1);
  e.generators.push_back(gen_shift(lit1(), "X1"));
  e.generators.push_back(gen_shift(var_t(), "X2"));
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

CatalogEntry assemble_NS31(const ClassId& id, const FreeData& data) {
  CatalogEntry e;
  e.id = id;
  if (data.f.empty()) throw BuildError("NS_3_1 needs f");
  Expr f = data.f;
  e.F = [f](const FContext& c) -> FG {
    std::vector<FG> xs;
    for (int q = 1; q < 7; ++q) xs.push_back(fg_u(c, q) / fg_u(c, 0));
    return pow_int(fg_u(c, 0), -3) * apply_f(f, c, xs);
  };
  for (int q = 1; q < 7; ++q)
    e.invariants.push_back(
        [q](const FContext& c) -> FG { return fg_u(c, q) / fg_u(c, 0); });
  e.invariant_names = xi_names(1);
  e.generators = sl2_triple();
  e.conditions.push_back(cond_coupling("nonlinear_coupled", e.F));
  return e;
}

// defaults --------------------------------------------------------------

Expr P(const char* s) { return Expr::parse(s); }

const std::vector<Expr>& a_pool() {
  static const std::vector<Expr> pool = {
      P("0.31 + 0.17*n - 0.23*m"),      P("0.52 - 0.19*n + 0.11*m"),
      P("0.27 + 0.13*n*m - 0.07*m"),    P("0.41 + 0.09*n*n - 0.15*m"),
      P("0.18 - 0.12*n + 0.21*m*m"),    P("0.63 - 0.08*n*m + 0.06*n*n"),
      P("0.22 + 0.05*n*n*m - 0.09*m*m")};
  return pool;
}

const std::vector<Expr>& kappa_pool() {
  // each varies along both axes at every site, including across the wrap
  static const std::vector<Expr> pool = {
      P("0.1*n + 0.2*m"), P("0.2*n - 0.1*m"),
      P("0.1*n*m + 0.1*n + 0.2*m"), P("0.1*n*n + 0.1*m"),
      P("0.1*m*m + 0.3*n")};
  return pool;
}

const std::vector<Expr>& nu_pool() {
  // strongly independent over every wrapped 7-site window, so the chain
  // determinants stay well away from zero even on a 3x3 patch
  static const std::vector<Expr> pool = {
      P("0.6 + 0.5*n - 0.3*m"),
      P("0.7 - 0.4*n + 0.6*m"),
      P("0.5 + 0.7*n*m - 0.2*n"),
      P("0.9 + 0.6*n*n - 0.4*m"),
      P("0.4 - 0.5*m*m + 0.7*n"),
      P("0.8 + 0.45*n*n*m - 0.35*m*m + 0.15*n")};
  return pool;
}

// separable time factors with closed-form omega solving the constraint
// sum_j (omega''_kj lambda_j + 2 omega'_kj lambda'_j) = 0 for diagonal omega
struct MuOmega {
  const char* mu;
  const char* omega;
};
const std::vector<MuOmega>& mu_pool_plain() {
  static const std::vector<MuOmega> pool = {
      {"1", "t"},
      {"t", "-(1/t)"},
      {"exp(t)", "-(exp(-2*t)/2)"},
      {"exp(-t)", "exp(2*t)/2"},
      {"t*t", "-(1/(3*t^3))"},
      {"exp(2*t)", "-(exp(-4*t)/4)"}};
  return pool;
}
const std::vector<MuOmega>& mu_pool_sigma() {
  static const std::vector<MuOmega> pool = {
      {"exp(t)", "-(exp(-2*t)/2)"},
      {"exp(-t)", "exp(2*t)/2"},
      {"t*t", "-(1/(3*t^3))"},
      {"exp(2*t)", "-(exp(-4*t)/4)"},
      {"exp(-2*t)", "exp(4*t)/4"}};
  return pool;
}

Expr default_f(int n_args) {
  std::string s = "x1";
  for (int i = 2; i <= n_args; ++i) s += " + x" + std::to_string(i);
  if (n_args >= 2)
    s += " + 0.3*x1*x2";
  else
    s += " + 0.2*x1*x1";
  return Expr::parse(s);
}

FreeData defaults_a(int count, int n_args) {
  FreeData d;
  for (int i = 0; i < count; ++i) d.a_list.push_back(a_pool()[i]);
  d.f = default_f(n_args);
  return d;
}

FreeData defaults_exp(int n_kappa, int n_args) {
  FreeData d;
  d.a_list.push_back(P("0.2 + 0.1*n + 0.15*m"));
  for (int i = 0; i < n_kappa; ++i) d.kappa_list.push_back(kappa_pool()[i]);
  d.f = default_f(n_args);
  return d;
}

FreeData defaults_lambda(int r, int n_args, bool with_sigma) {
  FreeData d;
  const auto& mus = with_sigma ? mu_pool_sigma() : mu_pool_plain();
  for (int i = 0; i < r; ++i) {
    d.lambda_list.push_back(nu_pool()[i] * P(mus[i].mu));
    std::vector<Expr> row(r, Expr::literal(0));
    row[i] = P(mus[i].omega);
    d.omega.push_back(row);
    if (with_sigma) d.sigma_list.push_back(Expr::literal(0));
  }
  d.f = default_f(n_args);
  return d;
}

FreeData defaults_ns_ratio(const ClassId& id, int n_kappa, int n_args) {
  FreeData d;
  if (id.dim == 13) {
    d.kappa_list = {P("n"), P("m"), P("n*m"), P("n*n + m")};
  } else {
    for (int i = 0; i < n_kappa; ++i) d.kappa_list.push_back(kappa_pool()[i]);
  }
  d.f = default_f(n_args);
  return d;
}

// registry --------------------------------------------------------------

struct ClassDef {
  ClassId id;
  std::vector<std::string> fields;
  std::function<CatalogEntry(const FreeData&)> assemble;
  std::function<FreeData()> defaults;
};

ClassId aid(int dim, int index) { return {Family::A, dim, index}; }
ClassId nsid(int dim, int index) { return {Family::NS, dim, index}; }

std::vector<ClassDef> build_registry() {
  std::vector<ClassDef> r;
  auto add = [&r](ClassId id, std::vector<std::string> fields,
                  std::function<CatalogEntry(const FreeData&)> fn,
                  std::function<FreeData()> def) {
    r.push_back({id, std::move(fields), std::move(fn), std::move(def)});
  };
  auto scaling = [](ClassId id, ScalingSpec spec) {
    return [id, spec](const FreeData& d) {
      return assemble_scaling(id, spec, d);
    };
  };

  add(aid(1, 1), {"a_list(1)", "f(x1..x7)"},
      [](const FreeData& d) { return assemble_A11(aid(1, 1), d); },
      [] { return defaults_a(1, 7); });
  add(aid(1, 2), {"a_list(1)", "f(t,x1..x6)"},
      scaling(aid(1, 2), {1, false, 1.0}), [] { return defaults_a(1, 6); });
  add(aid(1, 3), {"lambda_list(1)", "f(t,x1..x6)"},
      [](const FreeData& d) { return assemble_A13(aid(1, 3), d); },
      [] {
        FreeData d;
        // lambda must stay away from zero on the whole window
        d.lambda_list.push_back(P("(1 + 0.3*n + 0.2*m) * exp(t)"));
        d.f = default_f(6);
        return d;
      });

  add(aid(2, 1), {"a_list(2)", "f(x1..x6)"},
      scaling(aid(2, 1), {2, true, -1.0}), [] { return defaults_a(2, 6); });
  add(aid(2, 2), {"a_list(1)", "f(x1..x6)"},
      [](const FreeData& d) { return assemble_exp(aid(2, 2), 0, d); },
      [] { return defaults_exp(0, 6); });
  add(aid(2, 3), {"a_list(2)", "f(t,x1..x5)"},
      scaling(aid(2, 3), {2, false, -1.0}), [] { return defaults_a(2, 5); });
  add(aid(2, 4), {"f(t,x1..x6)"},
      [](const FreeData& d) { return assemble_A24(aid(2, 4), d); },
      [] {
        FreeData d;
        d.f = default_f(6);
        return d;
      });

  add(aid(3, 1), {"a_list(3)", "f(x1..x5)"},
      scaling(aid(3, 1), {3, true, 1.0}), [] { return defaults_a(3, 5); });
  add(aid(3, 2), {"a_list(1)", "kappa_list(1)", "f(x1..x5)"},
      [](const FreeData& d) { return assemble_exp(aid(3, 2), 1, d); },
      [] { return defaults_exp(1, 5); });
  add(aid(3, 3), {"a_list(3)", "f(t,x1..x4)"},
      scaling(aid(3, 3), {3, false, 1.0}), [] { return defaults_a(3, 4); });

  add(aid(4, 1), {"a_list(4)", "f(x1..x4)"},
      scaling(aid(4, 1), {4, true, 1.0}), [] { return defaults_a(4, 4); });
  add(aid(4, 2), {"a_list(1)", "kappa_list(2)", "f(x1..x4)"},
      [](const FreeData& d) { return assemble_exp(aid(4, 2), 2, d); },
      [] { return defaults_exp(2, 4); });
  add(aid(4, 3), {"a_list(4)", "f(t,x1..x3)"},
      scaling(aid(4, 3), {4, false, -1.0}), [] { return defaults_a(4, 3); });
  add(aid(4, 4), {"lambda_list(2)", "omega(2x2)", "f(t,x1..x5)"},
      [](const FreeData& d) { return assemble_bordered(aid(4, 4), 2, d); },
      [] { return defaults_lambda(2, 5, false); });
  add(aid(4, 5), {"omega(1x1)", "sigma_list(1)", "c", "f(t,x1..x5)"},
      [](const FreeData& d) { return assemble_a45(aid(4, 5), d); },
      [] {
        FreeData d;
        d.omega = {{P("t")}};
        d.sigma_list = {Expr::literal(0)};
        d.c = P("n + 3*m");
        d.f = default_f(5);
        return d;
      });

  add(aid(5, 1), {"a_list(5)", "f(x1..x3)"},
      scaling(aid(5, 1), {5, true, 1.0}), [] { return defaults_a(5, 3); });
  add(aid(5, 2), {"a_list(1)", "kappa_list(3)", "f(x1..x3)"},
      [](const FreeData& d) { return assemble_exp(aid(5, 2), 3, d); },
      [] { return defaults_exp(3, 3); });
  add(aid(5, 3), {"a_list(5)", "f(t,x1..x2)"},
      scaling(aid(5, 3), {5, false, -1.0}), [] { return defaults_a(5, 2); });

  add(aid(6, 1), {"a_list(6)", "f(x1..x2)"},
      scaling(aid(6, 1), {6, true, 1.0}), [] { return defaults_a(6, 2); });
  add(aid(6, 2), {"a_list(1)", "kappa_list(4)", "f(x1..x2)"},
      [](const FreeData& d) { return assemble_exp(aid(6, 2), 4, d); },
      [] { return defaults_exp(4, 2); });
  add(aid(6, 3), {"a_list(6)", "f(t,x1)"},
      scaling(aid(6, 3), {6, false, -1.0}), [] { return defaults_a(6, 1); });
  add(aid(6, 4), {"lambda_list(3)", "omega(3x3)", "f(t,x1..x4)"},
      [](const FreeData& d) { return assemble_bordered(aid(6, 4), 3, d); },
      [] { return defaults_lambda(3, 4, false); });
  add(aid(6, 5),
      {"lambda_list(2)", "omega(2x2)", "sigma_list(2)", "f(t,x1..x4)"},
      [](const FreeData& d) { return assemble_sigma(aid(6, 5), 2, d); },
      [] { return defaults_lambda(2, 4, true); });

  add(aid(7, 1), {"a_list(7)", "f(x1)"},
      scaling(aid(7, 1), {7, true, -1.0}), [] { return defaults_a(7, 1); });
  add(aid(7, 2), {"a_list(1)", "kappa_list(5)", "f(x1)"},
      [](const FreeData& d) { return assemble_exp(aid(7, 2), 5, d); },
      [] { return defaults_exp(5, 1); });

  add(aid(8, 1), {"lambda_list(4)", "omega(4x4)", "f(t,x1..x3)"},
      [](const FreeData& d) { return assemble_bordered(aid(8, 1), 4, d); },
      [] { return defaults_lambda(4, 3, false); });
  add(aid(8, 2),
      {"lambda_list(3)", "omega(3x3)", "sigma_list(3)", "f(t,x1..x3)"},
      [](const FreeData& d) { return assemble_sigma(aid(8, 2), 3, d); },
      [] { return defaults_lambda(3, 3, true); });

  add(aid(10, 1), {"lambda_list(5)", "omega(5x5)", "f(t,x1..x2)"},
      [](const FreeData& d) { return assemble_bordered(aid(10, 1), 5, d); },
      [] { return defaults_lambda(5, 2, false); });
  add(aid(10, 2),
      {"lambda_list(4)", "omega(4x4)", "sigma_list(4)", "f(t,x1..x2)"},
      [](const FreeData& d) { return assemble_sigma(aid(10, 2), 4, d); },
      [] { return defaults_lambda(4, 2, true); });

  add(aid(12, 1), {"lambda_list(6)", "omega(6x6)", "f(t,x1)"},
      [](const FreeData& d) { return assemble_bordered(aid(12, 1), 6, d); },
      [] { return defaults_lambda(6, 1, false); });
  add(aid(12, 2),
      {"lambda_list(5)", "omega(5x5)", "sigma_list(5)", "f(t,x1)",
       "a12_2_reading"},
      [](const FreeData& d) { return assemble_sigma(aid(12, 2), 5, d); },
      [] { return defaults_lambda(5, 1, true); });

  add(nsid(3, 1), {"f(x1..x6)"},
      [](const FreeData& d) { return assemble_NS31(nsid(3, 1), d); },
      [] {
        FreeData d;
        d.f = default_f(6);
        return d;
      });
  add(nsid(4, 1), {"a_list(1)", "f(x1..x5)"},
      [](const FreeData& d) { return assemble_ns_scaling(nsid(4, 1), 1, d); },
      [] { return defaults_a(1, 5); });
  add(nsid(5, 1), {"a_list(2)", "f(x1..x4)"},
      [](const FreeData& d) { return assemble_ns_scaling(nsid(5, 1), 2, d); },
      [] { return defaults_a(2, 4); });
  add(nsid(5, 2), {"f(x1..x5)"},
      [](const FreeData& d) {
        return assemble_ns_ratio(nsid(5, 2), 0, d, false);
      },
      [] {
        FreeData d;
        d.f = default_f(5);
        return d;
      });
  add(nsid(6, 1), {"a_list(3)", "f(x1..x3)"},
      [](const FreeData& d) { return assemble_ns_scaling(nsid(6, 1), 3, d); },
      [] { return defaults_a(3, 3); });
  add(nsid(7, 1), {"a_list(4)", "f(x1..x2)"},
      [](const FreeData& d) { return assemble_ns_scaling(nsid(7, 1), 4, d); },
      [] { return defaults_a(4, 2); });
  add(nsid(7, 2), {"kappa_list(1)", "f(x1..x4)"},
      [](const FreeData& d) {
        return assemble_ns_ratio(nsid(7, 2), 1, d, true);
      },
      [] { return defaults_ns_ratio(nsid(7, 2), 1, 4); });
  add(nsid(8, 1), {"a_list(5)", "f(x1)"},
      [](const FreeData& d) { return assemble_ns_scaling(nsid(8, 1), 5, d); },
      [] { return defaults_a(5, 1); });
  add(nsid(9, 1), {"kappa_list(2)", "f(x1..x3)"},
      [](const FreeData& d) {
        return assemble_ns_ratio(nsid(9, 1), 2, d, true);
      },
      [] { return defaults_ns_ratio(nsid(9, 1), 2, 3); });
  add(nsid(11, 1), {"kappa_list(3)", "f(x1..x2)"},
      [](const FreeData& d) {
        return assemble_ns_ratio(nsid(11, 1), 3, d, false);
      },
      [] { return defaults_ns_ratio(nsid(11, 1), 3, 2); });
  add(nsid(13, 1), {"kappa_list(4)", "f(x1)"},
      [](const FreeData& d) {
        return assemble_ns_ratio(nsid(13, 1), 4, d, false);
      },
      [] { return defaults_ns_ratio(nsid(13, 1), 4, 1); });
  return r;
}

const std::vector<ClassDef>& registry() {
  static const std::vector<ClassDef> r = build_registry();
  return r;
}

const ClassDef* find_class(const ClassId& id) {
  for (const ClassDef& d : registry())
    if (d.id == id) return &d;
  return nullptr;
}

}  // namespace

// public API -----------------------------------------------------------------

std::string ClassId::str() const {
  return std::string(family == Family::A ? "A" : "NS") + "_" +
         std::to_string(dim) + "_" + std::to_string(index);
}

std::optional<ClassId> ClassId::parse(std::string_view text) {
  ClassId id;
  size_t p1 = text.find('_');
  if (p1 == std::string_view::npos) return std::nullopt;
  std::string_view fam = text.substr(0, p1);
  if (fam == "A")
    id.family = Family::A;
  else if (fam == "NS")
    id.family = Family::NS;
  else
    return std::nullopt;
  size_t p2 = text.find('_', p1 + 1);
  if (p2 == std::string_view::npos) return std::nullopt;
  try {
    id.dim = std::stoi(std::string(text.substr(p1 + 1, p2 - p1 - 1)));
    id.index = std::stoi(std::string(text.substr(p2 + 1)));
  } catch (...) {
    return std::nullopt;
  }
  return id;
}

const std::vector<ClassInfo>& list_classes() {
  static const std::vector<ClassInfo> infos = [] {
    std::vector<ClassInfo> out;
    for (const ClassDef& d : registry()) {
      ClassInfo info;
      info.id = d.id;
      info.freedata_fields = d.fields;
      CatalogEntry probe = d.assemble(d.defaults());
      for (const ConditionSpec& c : probe.conditions)
        info.condition_names.push_back(c.name);
      out.push_back(std::move(info));
    }
    return out;
  }();
  return infos;
}

bool is_known_class(const ClassId& id) { return find_class(id) != nullptr; }

FreeData default_freedata(const ClassId& id) {
  const ClassDef* d = find_class(id);
  if (!d) throw BuildError("unknown class " + id.str());
  return d->defaults();
}

std::vector<double> default_time_grid() {
  std::vector<double> g;
  for (int i = 0; i < 8; ++i) g.push_back(0.1 + i * (1.9 / 7));
  return g;
}

std::vector<VSample> make_condition_samples(const LatticePatch& patch,
                                            uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<VSample> out;
  for (int i = 0; i < count; ++i) {
    VSample s;
    s.s = patch.site(i % patch.size());
    s.t = rng.uniform(0.1, 2.0);
    for (int j = 0; j < 7; ++j) s.u[j] = rng.uniform(0.5, 2.0);
    out.push_back(s);
  }
  return out;
}

std::vector<ConditionResult> validate(const ClassId& id, const FreeData& data,
                                      const LatticePatch& patch) {
  const ClassDef* d = find_class(id);
  if (!d) throw BuildError("unknown class " + id.str());
  CatalogEntry entry;
  try {
    entry = d->assemble(data);
  } catch (const std::exception& e) {
    return {{"assemble", false, e.what()}};
  }
  std::vector<double> times = default_time_grid();
  std::vector<VSample> samples = make_condition_samples(patch, 0x5eedULL, 40);
  std::vector<ConditionResult> out;
  for (const ConditionSpec& c : entry.conditions) {
    ConditionResult r;
    try {
      r = c.check(patch, times, samples);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.name = c.name;
    r.hard = c.hard;
    out.push_back(std::move(r));
  }
  return out;
}

CatalogEntry build(const ClassId& id, const FreeData& data,
                   const LatticePatch& patch) {
  const ClassDef* d = find_class(id);
  if (!d) throw BuildError("unknown class " + id.str());
  std::vector<ConditionResult> results = validate(id, data, patch);
  std::vector<ConditionResult> failures;
  for (const ConditionResult& r : results)
    if (!r.pass && r.hard) failures.push_back(r);
  if (!failures.empty()) {
    std::string msg = id.str() + " free data failed validation:";
    for (const ConditionResult& r : failures)
      msg += " [" + r.name + ": " + r.detail + "]";
    BuildError err(msg);
    err.failures = std::move(failures);
    throw err;
  }
  CatalogEntry entry = d->assemble(data);
  if ((int)entry.generators.size() != id.dim)
    throw BuildError(id.str() + ": generator count does not match dimension");
  return entry;
}

}  // namespace latsym
