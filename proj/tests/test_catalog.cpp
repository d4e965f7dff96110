#include <doctest.h>

#include <cmath>
#include <map>

#include "latsym/catalog.hpp"
#include "latsym/verifier.hpp"
#include "test_util.hpp"

using namespace latsym;

namespace {

const LatticePatch kPatch(5, 5);

FContext ctx_of(Site s, double t, std::array<double, 7> u) {
  FContext c;
  c.patch = kPatch;
  c.s = s;
  c.t = t;
  c.u = u;
  return c;
}

CatalogEntry build_default(const char* cls) {
  ClassId id = *ClassId::parse(cls);
  return build(id, default_freedata(id), kPatch);
}

}  // namespace

TEST_CASE("census matches the classification table") {
  std::map<int, int> abelian, nonsolvable;
  int total = 0;
  for (const ClassInfo& info : list_classes()) {
    ++total;
    if (info.id.family == Family::A)
      ++abelian[info.id.dim];
    else
      ++nonsolvable[info.id.dim];
  }
  CHECK(total == 42);
  std::map<int, int> want_a = {{1, 3}, {2, 4}, {3, 3}, {4, 5},  {5, 3},
                               {6, 5}, {7, 2}, {8, 2}, {10, 2}, {12, 2}};
  std::map<int, int> want_ns = {{3, 1}, {4, 1}, {5, 2},  {6, 1}, {7, 2},
                                {8, 1}, {9, 1}, {11, 1}, {13, 1}};
  CHECK(abelian == want_a);
  CHECK(nonsolvable == want_ns);
  CHECK(abelian.count(9) == 0);
  CHECK(abelian.count(11) == 0);
  CHECK(nonsolvable.count(10) == 0);
  CHECK(nonsolvable.count(12) == 0);
}

TEST_CASE("class id parsing") {
  CHECK(ClassId::parse("A_4_5")->str() == "A_4_5");
  CHECK(ClassId::parse("NS_13_1")->str() == "NS_13_1");
  CHECK(!ClassId::parse("B_1_1").has_value());
  CHECK(!ClassId::parse("A_x").has_value());
  CHECK(is_known_class(*ClassId::parse("A_10_2")));
  CHECK(!is_known_class(*ClassId::parse("A_9_1")));
  CHECK(!is_known_class(*ClassId::parse("NS_10_1")));
}

TEST_CASE("unknown classes are rejected by build") {
  CHECK_THROWS_AS(build(*ClassId::parse("A_9_1"), FreeData{}, kPatch),
                  BuildError);
}

TEST_CASE("build A_1_1 with a=0, f=x1 gives F = u_{n+1,m}") {
  ClassId id = *ClassId::parse("A_1_1");
  FreeData d;
  d.a_list = {Expr::literal(0)};
  d.f = Expr::parse("x1 + 0.0001*x1*x2");  // keep it coupled
  CatalogEntry e = build(id, d, kPatch);
  FContext c = ctx_of({2, 2}, 0.7, {1.1, 1.9, 1.2, 1.3, 1.4, 1.5, 1.6});
  FGrad F = e.F(c);
  // x1 binds the (n+1,m) invariant; with a = 0 that is u_{n+1,m}
  CHECK(F.v == doctest::Approx(1.9 + 0.0001 * 1.9 * 1.2));
  CHECK(F.d[1] == doctest::Approx(1.0 + 0.0001 * 1.2));
  CHECK(F.d[0] == doctest::Approx(0.0));
}

TEST_CASE("build NS_3_1 with f=x1 gives F = u^{-3} (u_{n+1,m}/u_nm)") {
  ClassId id = *ClassId::parse("NS_3_1");
  FreeData d;
  d.f = Expr::parse("x1 + 0.0001*x1*x2");
  CatalogEntry e = build(id, d, kPatch);
  FContext c = ctx_of({1, 1}, 0.5, {2.0, 1.5, 1.0, 1.0, 1.0, 1.0, 1.0});
  double want = std::pow(2.0, -3) * (1.5 / 2.0 + 0.0001 * (1.5 / 2) * (1.0 / 2));
  CHECK(e.F(c).v == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("A_1_2 invariant spot value") {
  // a(nm)=1, a(n+1m)=2 via a = 1+n at base site (0,0); u_nm=2, u_pq=4
  ClassId id = *ClassId::parse("A_1_2");
  FreeData d;
  d.a_list = {Expr::parse("1 + n")};
  d.f = Expr::parse("x1 + 0.1*x1*x2");
  CatalogEntry e = build(id, d, kPatch);
  FContext c = ctx_of({0, 0}, 1.0, {2.0, 4.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  // xi_{n+1,m} = u_nm^{a_{n+1m}} / u_pq^{a_nm} = 2^2 / 4^1 = 1
  FGrad xi = e.invariants[0](c);
  CHECK(xi.v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validate flags A_3_2 kappa that ignores m") {
  ClassId id = *ClassId::parse("A_3_2");
  FreeData d = default_freedata(id);
  d.kappa_list = {Expr::parse("n")};
  std::vector<ConditionResult> res = validate(id, d, kPatch);
  bool n_ok = false, m_bad = false;
  for (const ConditionResult& r : res) {
    if (r.name == "kappa1_distinct_n") n_ok = r.pass;
    if (r.name == "kappa1_distinct_m") m_bad = !r.pass;
  }
  CHECK(n_ok);
  CHECK(m_bad);

  d.kappa_list = {Expr::parse("n + 2*m")};
  for (const ConditionResult& r : validate(id, d, kPatch)) CHECK(r.pass);
}

TEST_CASE("A_10_1 defaults satisfy the omega constraint") {
  ClassId id = *ClassId::parse("A_10_1");
  FreeData d = default_freedata(id);
  for (const ConditionResult& r : validate(id, d, kPatch)) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("every class builds from defaults with zero failed conditions") {
  for (const ClassInfo& info : list_classes()) {
    INFO("class ", info.id.str());
    FreeData d = default_freedata(info.id);
    std::vector<ConditionResult> res = validate(info.id, d, kPatch);
    for (const ConditionResult& r : res) {
      INFO(info.id.str(), " condition ", r.name, ": ", r.detail);
      CHECK(r.pass);
    }
    CatalogEntry e = build(info.id, d, kPatch);
    CHECK((int)e.generators.size() == info.id.dim);
    CHECK(e.invariants.size() == e.invariant_names.size());
  }
}

TEST_CASE("defaults also validate on the minimum 3x3 patch") {
  LatticePatch small(3, 3);
  for (const ClassInfo& info : list_classes()) {
    INFO("class ", info.id.str());
    for (const ConditionResult& r :
         validate(info.id, default_freedata(info.id), small)) {
      INFO(info.id.str(), " condition ", r.name, ": ", r.detail);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("rectangular patches are supported") {
  LatticePatch rect(5, 3);
  for (const char* cls : {"A_4_4", "NS_13_1", "A_7_1"}) {
    ClassId id = *ClassId::parse(cls);
    CatalogEntry e = build(id, default_freedata(id), rect);
    SamplePlan plan;
    plan.patch = rect;
    plan.count = 20;
    plan.seed = 6;
    for (const GeneratorStats& g : verify_symmetry(e, plan, 1e-8)) {
      INFO(cls, " ", g.name);
      CHECK(g.pass);
    }
  }
}

TEST_CASE("interaction partials match central finite differences") {
  SamplePlan plan;
  plan.patch = kPatch;
  plan.count = 6;
  plan.seed = 0xabcd;
  std::vector<VSample> samples = draw_samples(plan);
  for (const ClassInfo& info : list_classes()) {
    INFO("class ", info.id.str());
    CatalogEntry e = build(info.id, default_freedata(info.id), kPatch);
    const double h = 1e-6;
    for (const VSample& smp : samples) {
      FContext c = ctx_of(smp.s, smp.t, smp.u);
      FGrad F = e.F(c);
      for (int j = 0; j < 7; ++j) {
        FContext hi = c, lo = c;
        hi.u[j] += h;
        lo.u[j] -= h;
        double fd = (e.F(hi).v - e.F(lo).v) / (2 * h);
        double tol = 1e-5 * std::max(1.0, std::fabs(F.d[j]));
        CHECK(std::fabs(fd - F.d[j]) <= tol);
      }
      // explicit time partial
      FContext hi = c, lo = c;
      hi.t += h;
      lo.t -= h;
      double fd = (e.F(hi).v - e.F(lo).v) / (2 * h);
      CHECK(std::fabs(fd - F.d[7]) <= 2e-5 * std::max(1.0, std::fabs(F.d[7])));
    }
  }
}

TEST_CASE("invariant annihilation spot checks") {
  // A_1_2: X = a u d_u on xi = u_nm^{a_pq} u_pq^{-a_nm}
  CatalogEntry e12 = build_default("A_1_2");
  FContext c = ctx_of({1, 2}, 0.9, {1.2, 0.7, 1.9, 0.8, 1.4, 0.6, 1.1});
  for (int k = 0; k < (int)e12.invariants.size(); ++k)
    CHECK(std::fabs(invariant_residual(e12, e12.generators[0], k, c)) < 1e-12);
  // A_2_4: X1 = d_u on xi = u_nm - u_pq
  CatalogEntry e24 = build_default("A_2_4");
  for (int k = 0; k < (int)e24.invariants.size(); ++k)
    CHECK(std::fabs(invariant_residual(e24, e24.generators[0], k, c)) == 0.0);
  // NS_3_1: X2 annihilates u_pq/u_nm by weight cancellation
  CatalogEntry e31 = build_default("NS_3_1");
  for (int k = 0; k < (int)e31.invariants.size(); ++k)
    CHECK(std::fabs(invariant_residual(e31, e31.generators[1], k, c)) < 1e-15);
}

TEST_CASE("A_2_2 interaction value by hand") {
  // constant a: F = a^2 u + e^{at} f(xi), xi_q = e^{-at}(u_nm - u_q)
  ClassId id = *ClassId::parse("A_2_2");
  FreeData d = default_freedata(id);
  d.a_list = {Expr::parse("0.5")};
  d.f = Expr::parse("x1");
  CatalogEntry e = build(id, d, kPatch);
  FContext c = ctx_of({1, 1}, 0.4, {1.4, 0.9, 1.7, 0.8, 1.2, 1.1, 0.5});
  double want = 0.25 * 1.4 + (1.4 - 0.9);  // exponentials cancel
  CHECK(e.F(c).v == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("NS_4_1 interaction value by hand") {
  ClassId id = *ClassId::parse("NS_4_1");
  FreeData d = default_freedata(id);
  d.a_list = {Expr::parse("0.1*n + 0.2*m")};
  d.f = Expr::parse("x1");
  CatalogEntry e = build(id, d, kPatch);
  double u0 = 1.2, u1 = 0.9, u2 = 1.3;
  FContext c = ctx_of({1, 1}, 0.7, {u0, u1, u2, 1.0, 1.1, 0.8, 0.6});
  double a0 = 0.3, a1 = 0.4, a2 = 0.5;  // at (1,1), (2,1), (1,2)
  double P = std::pow(u0, a1) * std::pow(u1, -a0);
  double xi1 = std::pow(u0, -(a1 - a2)) * std::pow(u1, a0 - a2) *
               std::pow(u2, -(a0 - a1));
  double want = u0 * std::pow(P, 4.0 / (a0 - a1)) * xi1;
  CHECK(e.F(c).v == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("A_4_4 interaction value against an inline reassembly") {
  ClassId id = *ClassId::parse("A_4_4");
  FreeData d;
  d.lambda_list = {Expr::parse("(1 + n)*exp(t)"),
                   Expr::parse("(1 + 2*m)*t^2")};
  d.omega = {{Expr::parse("-(exp(-2*t)/2)"), Expr::literal(0)},
             {Expr::literal(0), Expr::parse("-(1/(3*t^3))")}};
  d.f = Expr::parse("x1 + 0.1*x1*x2");
  CatalogEntry e = build(id, d, kPatch);
  double t = 0.8;
  FContext c = ctx_of({2, 2}, t, {1.4, 0.9, 1.7, 0.8, 1.2, 1.1, 0.5});
  auto l1 = [&](int n) { return (1.0 + n) * std::exp(t); };
  auto l2 = [&](int m) { return (1.0 + 2 * m) * t * t; };
  // sites: s0=(2,2) s1=(3,2); lambda'' at s0
  double dd1 = l1(2);            // (1+n) e^t twice differentiated
  double dd2 = 2.0 * (1 + 2 * 2);  // (1+2m) * 2
  double bordered = testutil::det_laplace(
      {{1.4, 1.0, 0.9}, {l1(2), dd1, l1(3)}, {l2(2), dd2, l2(2)}});
  double dnorm =
      testutil::det_laplace({{l1(2), l1(3)}, {l2(2), l2(2)}});
  // xi_q = D[u_nm, l1_{n+1,m}, l2_q] over sites (2,2), (3,2), q
  auto xi = [&](double uq, int qn, int qm) {
    return testutil::det_laplace(
        {{1.4, 0.9, uq}, {l1(2), l1(3), l1(qn)}, {l2(2), l2(2), l2(qm)}});
  };
  double x1 = xi(1.7, 2, 3);  // q = (2,3)
  double x2 = xi(0.8, 1, 3);  // q = (1,3)
  double want = 1.0 + bordered / dnorm + (x1 + 0.1 * x1 * x2);
  CHECK(e.F(c).v == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("A_3_2 interaction value by hand") {
  // F = a^2 u + e^{at} f(D[u e^{-at}, kappa_{n+1,m}, 1_q])
  ClassId id = *ClassId::parse("A_3_2");
  FreeData d = default_freedata(id);
  d.a_list = {Expr::parse("0.5")};
  d.kappa_list = {Expr::parse("0.1*n + 0.2*m")};
  d.f = Expr::parse("x1");
  CatalogEntry e = build(id, d, kPatch);
  double t = 0.3, g = std::exp(-0.5 * t);
  FContext c = ctx_of({1, 1}, t, {1.4, 0.9, 1.7, 0.8, 1.2, 1.1, 0.5});
  double k0 = 0.3, k1 = 0.4, k2 = 0.5;  // kappa at (1,1), (2,1), (1,2)
  double xi1 = testutil::det_laplace(
      {{1.4 * g, 0.9 * g, 1.7 * g}, {k0, k1, k2}, {1, 1, 1}});
  double want = 0.25 * 1.4 + std::exp(0.5 * t) * xi1;
  CHECK(e.F(c).v == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("NS_5_2 interaction value by hand") {
  ClassId id = *ClassId::parse("NS_5_2");
  FreeData d = default_freedata(id);
  d.f = Expr::parse("x1");
  CatalogEntry e = build(id, d, kPatch);
  FContext c = ctx_of({0, 0}, 0.9, {1.8, 1.1, 0.6, 1.3, 0.7, 1.5, 0.9});
  double den = 1.8 - 1.1;  // u_nm - u_{n+1,m}
  double want = std::pow(den, -3) * ((1.8 - 0.6) / den);
  CHECK(e.F(c).v == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("A_6_5 with nonzero sigma still verifies") {
  ClassId id = *ClassId::parse("A_6_5");
  FreeData d = default_freedata(id);
  d.sigma_list = {Expr::parse("1 + 2*t"), Expr::parse("0.5*t")};
  CatalogEntry e = build(id, d, kPatch);
  SamplePlan plan;
  plan.patch = kPatch;
  plan.count = 30;
  plan.seed = 15;
  for (const GeneratorStats& g : verify_symmetry(e, plan, 1e-8)) {
    INFO(g.name);
    CHECK(g.pass);
  }
  CHECK(verify_invariants(e, plan).max_normalized < 1e-9);
}

TEST_CASE("A_4_5 general sigma uses the quadrature path") {
  ClassId id = *ClassId::parse("A_4_5");
  FreeData d = default_freedata(id);
  d.omega = {{Expr::parse("t")}};
  d.sigma_list = {Expr::parse("t^3")};
  // lambda = c_nm - (3/2) t^2: check through the determining equation
  CatalogEntry e = build(id, d, kPatch);
  SamplePlan plan;
  plan.patch = kPatch;
  plan.count = 30;
  plan.seed = 5;
  for (const GeneratorStats& g : verify_symmetry(e, plan, 1e-8)) {
    INFO(g.name);
    CHECK(g.pass);
  }
}

TEST_CASE("A_12_2 exposes both readings of its explicit form") {
  ClassId id = *ClassId::parse("A_12_2");
  SamplePlan plan;
  plan.patch = kPatch;
  plan.count = 12;
  plan.seed = 31;
  FreeData derived = default_freedata(id);
  CatalogEntry e = build(id, derived, kPatch);
  double worst_derived = 0;
  for (const GeneratorStats& g : verify_symmetry(e, plan, 1e-8))
    worst_derived = std::max(worst_derived, g.max_normalized);
  CHECK(worst_derived < 1e-8);

  for (const char* reading : {"a65", "d3"}) {
    FreeData alt = default_freedata(id);
    alt.a12_2_reading = reading;
    CatalogEntry ea = build(id, alt, kPatch);
    double worst = 0;
    for (const GeneratorStats& g : verify_symmetry(ea, plan, 1e-8))
      worst = std::max(worst, g.max_normalized);
    // the explicit nested form is reported, not asserted; the derived form
    // is the one the acceptance suite relies on
    MESSAGE("A_12_2 reading ", std::string(reading), " worst residual ",
            worst);
    CHECK(std::isfinite(worst));
  }
}

TEST_CASE("build rejects free data that fails validation") {
  ClassId id = *ClassId::parse("A_3_2");
  FreeData d = default_freedata(id);
  d.kappa_list = {Expr::parse("n")};
  CHECK_THROWS_AS(build(id, d, kPatch), BuildError);
}
