#pragma once

#include "latsym/catalog.hpp"

namespace latsym {

struct SamplePlan {
  LatticePatch patch;
  int count = 100;
  double u_lo = 0.5, u_hi = 2.0;
  double t_lo = 0.1, t_hi = 2.0;
  uint64_t seed = 7;
};

/// Deterministic sample stream: sites cycle the patch row-major, t and the
/// seven u values are drawn from a SplitMix64 stream.
std::vector<VSample> draw_samples(const SamplePlan& plan);

/// Left-hand minus right-hand side of the determining equation at one
/// sample, all derivatives exact:
///   tau'''/2 u + lambda'' + (a - 3/2 tau') F - tau dF/dt
///   - sum_pq [(tau'/2 + a_pq) u_pq + lambda_pq] dF/du_pq.
double determining_residual(const CatalogEntry& entry, const SymmetryField& X,
                            const FContext& ctx);

/// Same, divided by max(1, |F| + sum |u_pq dF/du_pq|).
double determining_residual_normalized(const CatalogEntry& entry,
                                       const SymmetryField& X,
                                       const FContext& ctx,
                                       double* absolute = nullptr);

struct GeneratorStats {
  std::string name;
  double max_normalized = 0;
  double mean_normalized = 0;
  double max_absolute = 0;
  int samples = 0;
  int skipped = 0;
  bool pass = false;
};

GeneratorStats verify_generator(const CatalogEntry& entry,
                                const SymmetryField& X, const SamplePlan& plan,
                                double tol_rel);

/// Every generator of the entry against the determining equation.  A
/// generator passes when all normalized residuals stay below tol_rel and at
/// most 10% of samples hit expression-domain errors.
std::vector<GeneratorStats> verify_symmetry(const CatalogEntry& entry,
                                            const SamplePlan& plan,
                                            double tol_rel = 1e-8);

struct BracketCell {
  int i = 0, j = 0;
  std::vector<double> coeffs;  // decomposition over the generator basis
  double residual = 0;         // max |fit error| over sampled evaluations
  bool indeterminate = false;  // sampled basis was rank deficient
};

std::vector<BracketCell> bracket_table(
    const std::vector<SymmetryField>& generators, const SamplePlan& plan);

enum class StructureVerdict { Abelian, NonsolvableSl2, Inconsistent };
const char* verdict_str(StructureVerdict v);

/// Abelian iff every cell is zero.  Nonsolvable iff the first three
/// generators satisfy the sl(2,R) constants [X1,X2]=X1, [X1,X3]=2X2,
/// [X2,X3]=X3 and every other bracket decomposes inside the radical span.
StructureVerdict classify_structure(const std::vector<BracketCell>& table,
                                    Family family, int dim);

/// tau d_t xi + sum phi_pq d xi/du_pq at one sample (exact derivatives).
double invariant_residual(const CatalogEntry& entry, const SymmetryField& X,
                          int xi_index, const FContext& ctx);

struct InvariantStats {
  double max_normalized = 0;
  int samples = 0;
  int skipped = 0;
};

InvariantStats verify_invariants(const CatalogEntry& entry,
                                 const SamplePlan& plan);

struct VerificationReport {
  ClassId id;
  std::vector<ConditionResult> conditions;
  std::vector<GeneratorStats> generators;
  std::vector<BracketCell> table;
  StructureVerdict verdict = StructureVerdict::Inconsistent;
  InvariantStats invariants;
  bool pass = false;
  std::string error;  // set when build/validation failed
};

struct Tolerances {
  double determining = 1e-8;
  double bracket = 1e-10;
  double radical = 1e-8;
  double invariant = 1e-9;
};

VerificationReport run_verification(const ClassId& id, const FreeData& data,
                                    const SamplePlan& plan,
                                    const Tolerances& tol = {});

/// Least squares via one-sided Jacobi SVD with singular-value cutoff
/// rcond * sigma_max; exposed for tests.
std::vector<double> lstsq_svd(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& rhs, double rcond,
                              double* max_fit_error, bool* rank_deficient);

}  // namespace latsym
