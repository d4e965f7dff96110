#include "latsym/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "latsym/rng.hpp"

namespace latsym {

std::vector<VSample> draw_samples(const SamplePlan& plan) {
  Rng rng(plan.seed);
  std::vector<VSample> out;
  out.reserve(plan.count);
  for (int i = 0; i < plan.count; ++i) {
    VSample s;
    s.s = plan.patch.site(i % plan.patch.size());
    s.t = rng.uniform(plan.t_lo, plan.t_hi);
    for (int j = 0; j < 7; ++j) s.u[j] = rng.uniform(plan.u_lo, plan.u_hi);
    out.push_back(s);
  }
  return out;
}

namespace {

FContext to_ctx(const LatticePatch& patch, const VSample& s) {
  FContext c;
  c.patch = patch;
  c.s = s.s;
  c.t = s.t;
  c.u = s.u;
  return c;
}

}  // namespace

namespace {

double residual_core(const CatalogEntry& entry, const SymmetryField& X,
                     const FContext& ctx, double* scale_out) {
  FGrad F = entry.F(ctx);
  Jet3 tau = X.tau(ctx.t, 3).jet3();
  std::array<Site, 7> sites = ctx.patch.neighbors(ctx.s);
  Jet3 lam0 = X.lambda(sites[0], ctx.t, 3).jet3();
  double a0 = X.a(sites[0]);
  double res = tau.v3 / 2 * ctx.u[0] + lam0.v2 + (a0 - 1.5 * tau.v1) * F.v -
               tau.v0 * F.d[7];
  double scale = std::fabs(F.v);
  for (int j = 0; j < 7; ++j) {
    double a_j = X.a(sites[j]);
    double lam_j = X.lambda(sites[j], ctx.t, 0).value();
    res -= ((tau.v1 / 2 + a_j) * ctx.u[j] + lam_j) * F.d[j];
    scale += std::fabs(ctx.u[j] * F.d[j]);
  }
  if (scale_out) *scale_out = scale;
  return res;
}

}  // namespace

double determining_residual(const CatalogEntry& entry, const SymmetryField& X,
                            const FContext& ctx) {
  return residual_core(entry, X, ctx, nullptr);
}

double determining_residual_normalized(const CatalogEntry& entry,
                                       const SymmetryField& X,
                                       const FContext& ctx, double* absolute) {
  double scale = 0;
  double res = residual_core(entry, X, ctx, &scale);
  if (absolute) *absolute = std::fabs(res);
  return std::fabs(res) / std::max(1.0, scale);
}

GeneratorStats verify_generator(const CatalogEntry& entry,
                                const SymmetryField& X, const SamplePlan& plan,
                                double tol_rel) {
  GeneratorStats st;
  st.name = X.name;
  std::vector<VSample> samples = draw_samples(plan);
  double sum = 0;
  for (const VSample& s : samples) {
    FContext ctx = to_ctx(plan.patch, s);
    try {
      double abs_res = 0;
      double r = determining_residual_normalized(entry, X, ctx, &abs_res);
      st.max_normalized = std::max(st.max_normalized, r);
      st.max_absolute = std::max(st.max_absolute, abs_res);
      sum += r;
      ++st.samples;
    } catch (const DomainError&) {
      ++st.skipped;
    }
  }
  st.mean_normalized = st.samples ? sum / st.samples : 0.0;
  st.pass = st.samples > 0 && st.max_normalized < tol_rel &&
            st.skipped * 10 <= (int)samples.size();
  return st;
}

std::vector<GeneratorStats> verify_symmetry(const CatalogEntry& entry,
                                            const SamplePlan& plan,
                                            double tol_rel) {
  std::vector<GeneratorStats> out;
  for (const SymmetryField& X : entry.generators)
    out.push_back(verify_generator(entry, X, plan, tol_rel));
  return out;
}

std::vector<double> lstsq_svd(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& rhs, double rcond,
                              double* max_fit_error, bool* rank_deficient) {
  const int m = (int)rows.size();
  const int n = m ? (int)rows[0].size() : 0;
  // one-sided Jacobi: rotate columns of A until pairwise orthogonal,
  // accumulating the rotations in V.
  std::vector<std::vector<double>> a(rows);
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) v[i][i] = 1.0;
  auto col_dot = [&](int p, int q) {
    double s = 0;
    for (int r = 0; r < m; ++r) s += a[r][p] * a[r][q];
    return s;
  };
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double app = col_dot(p, p), aqq = col_dot(q, q), apq = col_dot(p, q);
        if (std::fabs(apq) <= 1e-30 ||
            std::fabs(apq) <= 1e-17 * std::sqrt(app * aqq))
          continue;
        off = std::max(off, std::fabs(apq) / std::sqrt(app * aqq + 1e-300));
        double tau = (aqq - app) / (2 * apq);
        double t = (tau >= 0 ? 1.0 : -1.0) /
                   (std::fabs(tau) + std::sqrt(1 + tau * tau));
        double c = 1 / std::sqrt(1 + t * t), s = c * t;
        for (int r = 0; r < m; ++r) {
          double x = a[r][p], y = a[r][q];
          a[r][p] = c * x - s * y;
          a[r][q] = s * x + c * y;
        }
        for (int r = 0; r < n; ++r) {
          double x = v[r][p], y = v[r][q];
          v[r][p] = c * x - s * y;
          v[r][q] = s * x + c * y;
        }
      }
    if (off < 1e-15) break;
  }
  std::vector<double> sigma(n, 0.0);
  double smax = 0;
  for (int j = 0; j < n; ++j) {
    sigma[j] = std::sqrt(std::max(0.0, col_dot(j, j)));
    smax = std::max(smax, sigma[j]);
  }
  bool deficient = false;
  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (sigma[j] <= rcond * smax || sigma[j] == 0) {
      deficient = true;
      continue;
    }
    double uj_b = 0;
    for (int r = 0; r < m; ++r) uj_b += a[r][j] / sigma[j] * rhs[r];
    double coef = uj_b / sigma[j];
    for (int i = 0; i < n; ++i) x[i] += v[i][j] * coef;
  }
  if (max_fit_error) {
    double err = 0;
    for (int r = 0; r < m; ++r) {
      double pred = 0;
      for (int i = 0; i < n; ++i) pred += rows[r][i] * x[i];
      err = std::max(err, std::fabs(pred - rhs[r]));
    }
    *max_fit_error = err;
  }
  if (rank_deficient) *rank_deficient = deficient;
  return x;
}

std::vector<BracketCell> bracket_table(
    const std::vector<SymmetryField>& generators, const SamplePlan& plan) {
  const int dim = (int)generators.size();
  std::vector<VSample> samples = draw_samples(plan);
  // basis matrix: two rows (tau channel, phi channel) per sample
  std::vector<std::vector<double>> basis;
  basis.reserve(2 * samples.size());
  for (const VSample& s : samples) {
    std::vector<double> row_tau(dim), row_phi(dim);
    for (int k = 0; k < dim; ++k) {
      row_tau[k] = generators[k].tau(s.t, 0).value();
      row_phi[k] = generators[k].phi(s.s, s.t, s.u[0]);
    }
    basis.push_back(std::move(row_tau));
    basis.push_back(std::move(row_phi));
  }
  std::vector<BracketCell> table;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      SymmetryField b = bracket(generators[i], generators[j]);
      std::vector<double> rhs;
      rhs.reserve(2 * samples.size());
      for (const VSample& s : samples) {
        rhs.push_back(b.tau(s.t, 0).value());
        rhs.push_back(b.phi(s.s, s.t, s.u[0]));
      }
      BracketCell cell;
      cell.i = i;
      cell.j = j;
      cell.coeffs =
          lstsq_svd(basis, rhs, 1e-10, &cell.residual, &cell.indeterminate);
      table.push_back(std::move(cell));
    }
  return table;
}

const char* verdict_str(StructureVerdict v) {
  switch (v) {
    case StructureVerdict::Abelian:
      return "abelian";
    case StructureVerdict::NonsolvableSl2:
      return "nonsolvable-with-sl2";
    default:
      return "inconsistent";
  }
}

StructureVerdict classify_structure(const std::vector<BracketCell>& table,
                                    Family family, int dim) {
  auto cell_at = [&](int i, int j) -> const BracketCell* {
    for (const BracketCell& c : table)
      if (c.i == i && c.j == j) return &c;
    return nullptr;
  };
  if (family == Family::A) {
    for (const BracketCell& c : table) {
      if (c.indeterminate || c.residual > 1e-10)
        return StructureVerdict::Inconsistent;
      for (double x : c.coeffs)
        if (std::fabs(x) > 1e-10) return StructureVerdict::Inconsistent;
    }
    return StructureVerdict::Abelian;
  }
  // nonsolvable: sl(2,R) block plus [S,R] and [R,R] inside the radical span
  auto expect = [&](int i, int j, int k, double value) {
    const BracketCell* c = cell_at(i, j);
    if (!c || c->indeterminate || c->residual > 1e-10) return false;
    for (int idx = 0; idx < (int)c->coeffs.size(); ++idx) {
      double want = idx == k ? value : 0.0;
      if (std::fabs(c->coeffs[idx] - want) > 1e-10) return false;
    }
    return true;
  };
  if (!expect(0, 1, 0, 1.0)) return StructureVerdict::Inconsistent;
  if (!expect(0, 2, 1, 2.0)) return StructureVerdict::Inconsistent;
  if (!expect(1, 2, 2, 1.0)) return StructureVerdict::Inconsistent;
  for (const BracketCell& c : table) {
    if (c.j < 3) continue;  // sl(2) block handled above
    if (c.indeterminate || c.residual > 1e-8)
      return StructureVerdict::Inconsistent;
    for (int idx = 0; idx < 3 && idx < (int)c.coeffs.size(); ++idx)
      if (std::fabs(c.coeffs[idx]) > 1e-9)
        return StructureVerdict::Inconsistent;
  }
  (void)dim;
  return StructureVerdict::NonsolvableSl2;
}

double invariant_residual(const CatalogEntry& entry, const SymmetryField& X,
                          int xi_index, const FContext& ctx) {
  FGrad xi = entry.invariants.at(xi_index)(ctx);
  Jet3 tau = X.tau(ctx.t, 3).jet3();
  std::array<Site, 7> sites = ctx.patch.neighbors(ctx.s);
  double res = tau.v0 * xi.d[7];
  for (int j = 0; j < 7; ++j) {
    double phi = (tau.v1 / 2 + X.a(sites[j])) * ctx.u[j] +
                 X.lambda(sites[j], ctx.t, 0).value();
    res += phi * xi.d[j];
  }
  return res;
}

InvariantStats verify_invariants(const CatalogEntry& entry,
                                 const SamplePlan& plan) {
  InvariantStats st;
  std::vector<VSample> samples = draw_samples(plan);
  for (const VSample& s : samples) {
    FContext ctx = to_ctx(plan.patch, s);
    bool ok = true;
    for (size_t k = 0; k < entry.invariants.size() && ok; ++k) {
      for (const SymmetryField& X : entry.generators) {
        try {
          FGrad xi = entry.invariants[k](ctx);
          double scale = std::fabs(xi.v) + std::fabs(xi.d[7]);
          for (int j = 0; j < 7; ++j) scale += std::fabs(ctx.u[j] * xi.d[j]);
          double r = invariant_residual(entry, X, (int)k, ctx);
          st.max_normalized =
              std::max(st.max_normalized, std::fabs(r) / std::max(1.0, scale));
        } catch (const DomainError&) {
          ok = false;
          ++st.skipped;
          break;
        }
      }
    }
    if (ok) ++st.samples;
  }
  return st;
}

VerificationReport run_verification(const ClassId& id, const FreeData& data,
                                    const SamplePlan& plan,
                                    const Tolerances& tol) {
  VerificationReport rep;
  rep.id = id;
  rep.conditions = validate(id, data, plan.patch);
  bool conditions_ok = true;
  for (const ConditionResult& c : rep.conditions)
    if (!c.pass) conditions_ok = false;
  if (!conditions_ok) {
    rep.pass = false;
    rep.error = "free data failed validation";
    return rep;
  }
  CatalogEntry entry;
  try {
    entry = build(id, data, plan.patch);
  } catch (const std::exception& e) {
    rep.pass = false;
    rep.error = e.what();
    return rep;
  }
  rep.generators = verify_symmetry(entry, plan, tol.determining);
  rep.table = bracket_table(entry.generators, plan);
  rep.verdict = classify_structure(rep.table, id.family, id.dim);
  rep.invariants = verify_invariants(entry, plan);
  bool gens_ok = true;
  for (const GeneratorStats& g : rep.generators)
    if (!g.pass) gens_ok = false;
  bool structure_ok =
      (id.family == Family::A && rep.verdict == StructureVerdict::Abelian) ||
      (id.family == Family::NS &&
       rep.verdict == StructureVerdict::NonsolvableSl2);
  rep.pass = gens_ok && structure_ok &&
             rep.invariants.max_normalized < tol.invariant;
  return rep;
}

}  // namespace latsym
