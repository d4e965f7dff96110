#pragma once

#include <optional>

#include "latsym/field.hpp"

namespace latsym {

enum class Family { A, NS };

/// One of the 42 classified (interaction, symmetry algebra) pairs.
/// Abelian dimensions skip 9 and 11; nonsolvable dimensions skip 10 and 12.
struct ClassId {
  Family family = Family::A;
  int dim = 1;
  int index = 1;

  std::string str() const;  // e.g. "A_4_5", "NS_13_1"
  static std::optional<ClassId> parse(std::string_view text);
  friend bool operator==(const ClassId& a, const ClassId& b) {
    return a.family == b.family && a.dim == b.dim && a.index == b.index;
  }
};

/// The arbitrary functions a class leaves unspecified.  Only the fields a
/// given class consumes need to be present; build() validates them.
struct FreeData {
  std::vector<Expr> a_list;
  std::vector<Expr> kappa_list;
  std::vector<Expr> lambda_list;
  std::vector<std::vector<Expr>> omega;
  std::vector<Expr> sigma_list;
  Expr c;
  Expr f;
  // A_12_2 only.  "derived" (default) solves the linear part's coefficient
  // conditions directly; "a65" and "d3" assemble the explicit nested-
  // fraction form under its two candidate readings of one determinant
  // symbol, so the verifier can report which one holds.
  std::string a12_2_reading = "derived";
};

/// Point at which an interaction or invariant closure is evaluated:
/// base site s (canonical patch coordinates), time t, and the seven
/// displacements on Gamma(s) in kNeighborhood order.
struct FContext {
  LatticePatch patch;
  Site s;
  double t = 0;
  std::array<double, 7> u{};
};

/// Interaction values carry exact partials: slots 0..6 are d/du over the
/// neighborhood, slot 7 is the explicit d/dt.
using FGrad = Grad<8>;
using InteractionFn = std::function<FGrad(const FContext&)>;

struct VSample {
  Site s;
  double t = 0;
  std::array<double, 7> u{};
};

struct ConditionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  bool hard = true;
};

struct ConditionSpec {
  std::string name;
  // hard conditions are the class's nondegeneracy requirements and block
  // build(); soft ones (the sampled nonlinear/coupled check on the
  // configured f) are reported but do not reject free data.
  bool hard = true;
  std::function<ConditionResult(const LatticePatch&,
                                const std::vector<double>& t_samples,
                                const std::vector<VSample>& u_samples)>
      check;
};

struct CatalogEntry {
  ClassId id;
  InteractionFn F;
  std::vector<SymmetryField> generators;
  std::vector<InteractionFn> invariants;
  std::vector<std::string> invariant_names;
  std::vector<ConditionSpec> conditions;
};

struct ClassInfo {
  ClassId id;
  std::vector<std::string> freedata_fields;
  std::vector<std::string> condition_names;
};

struct BuildError : std::runtime_error {
  std::vector<ConditionResult> failures;
  explicit BuildError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The full census, in catalog order (abelian by dimension then index,
/// then nonsolvable).
const std::vector<ClassInfo>& list_classes();

bool is_known_class(const ClassId& id);

/// Deterministic desk-scale free data satisfying every condition of the
/// class on patches of extent >= 3.
FreeData default_freedata(const ClassId& id);

std::vector<double> default_time_grid();
std::vector<VSample> make_condition_samples(const LatticePatch& patch,
                                            uint64_t seed, int count);

std::vector<ConditionResult> validate(const ClassId& id, const FreeData& data,
                                      const LatticePatch& patch);

/// Assemble interaction, generators, invariants and conditions from the
/// class's defining formulas.  Throws BuildError when validation fails.
CatalogEntry build(const ClassId& id, const FreeData& data,
                   const LatticePatch& patch);

}  // namespace latsym
