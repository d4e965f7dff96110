// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "latsym/config.hpp"
#include "test_util.hpp"

using namespace latsym;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

SamplePlan plan100() {
  SamplePlan plan;
  plan.patch = LatticePatch(5, 5);
  plan.count = 100;
  plan.seed = 7;
  return plan;
}

// ---- criterion 1: census --------------------------------------------------

void criterion_census() {
  auto t0 = std::chrono::steady_clock::now();
  std::map<int, int> abelian, nonsolvable;
  int total = 0;
  for (const ClassInfo& info : list_classes()) {
    ++total;
    (info.id.family == Family::A ? abelian : nonsolvable)[info.id.dim]++;
  }
  std::map<int, int> want_a = {{1, 3}, {2, 4}, {3, 3}, {4, 5},  {5, 3},
                               {6, 5}, {7, 2}, {8, 2}, {10, 2}, {12, 2}};
  std::map<int, int> want_ns = {{3, 1}, {4, 1}, {5, 2},  {6, 1}, {7, 2},
                                {8, 1}, {9, 1}, {11, 1}, {13, 1}};
  double dt = seconds_since(t0);
  bool pass = total == 42 && abelian == want_a && nonsolvable == want_ns &&
              dt < 1.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "(42 classes, %.3fs)", dt);
  report(1, pass, buf);
}

// ---- criterion 2: determining equations ------------------------------------

void criterion_determining() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::string worst_at = "-";
  bool pass = true;
  for (const ClassInfo& info : list_classes()) {
    CatalogEntry entry =
        build(info.id, default_freedata(info.id), plan100().patch);
    for (const GeneratorStats& g : verify_symmetry(entry, plan100(), 1e-8)) {
      if (g.max_normalized > worst) {
        worst = g.max_normalized;
        worst_at = info.id.str() + "/" + g.name;
      }
      if (!g.pass) pass = false;
    }
  }
  double dt = seconds_since(t0);
  if (dt >= 60.0) pass = false;
  char buf[160];
  std::snprintf(buf, sizeof buf, "(worst residual %.2e at %s, %.1fs)", worst,
                worst_at.c_str(), dt);
  report(2, pass, buf);
}

// ---- criterion 3: negative controls ----------------------------------------

SymmetryField lambda_bumped(const SymmetryField& X) {
  SymmetryField bad = X;
  bad.name = X.name + "+bump";
  auto lam = X.lambda;
  bad.lambda = [lam](Site s, double t, int order) {
    Taylor extra =
        Taylor::constant(2.0, order) +
        3.0 * (Taylor::variable(t, order) * Taylor::variable(t, order));
    return lam(s, t, order) + extra;
  };
  bad.lambda_zero = false;
  bad.lambda_time_independent = false;
  return bad;
}

SymmetryField a_bumped(const SymmetryField& X) {
  SymmetryField bad = X;
  bad.name = X.name + "+abump";
  auto a = X.a;
  bad.a = [a](Site s) { return a(s) + 1.0; };
  bad.a_zero = false;
  return bad;
}

InteractionFn interaction_bumped(const InteractionFn& F) {
  return [F](const FContext& c) {
    FGrad u0 = FGrad::seeded(c.u[0], 0);
    FGrad t = FGrad::seeded(c.t, 7);
    return F(c) + u0 * u0 * t + FGrad::constant(2.0);
  };
}

double detection_rate(const CatalogEntry& entry, const SymmetryField& X) {
  std::vector<VSample> samples = draw_samples(plan100());
  int loud = 0, n = 0;
  for (const VSample& s : samples) {
    FContext c;
    c.patch = plan100().patch;
    c.s = s.s;
    c.t = s.t;
    c.u = s.u;
    try {
      if (std::fabs(determining_residual(entry, X, c)) > 1e-3) ++loud;
      ++n;
    } catch (const DomainError&) {
    }
  }
  return n ? (double)loud / n : 0.0;
}

void criterion_controls() {
  bool pass = true;
  double worst_gen = 1.0, worst_int = 1.0;
  std::string worst_gen_at = "-", worst_int_at = "-";
  for (const ClassInfo& info : list_classes()) {
    CatalogEntry entry =
        build(info.id, default_freedata(info.id), plan100().patch);
    // perturbed generator: a global lambda bump breaks every class whose
    // interaction sees shifts; classes built purely from scalings respond
    // to an a bump instead
    SymmetryField bad_gen = lambda_bumped(entry.generators[0]);
    double rate = detection_rate(entry, bad_gen);
    double rate_a = 0;
    if (rate < 0.9) {
      bad_gen = a_bumped(entry.generators[0]);
      rate_a = detection_rate(entry, bad_gen);
      rate = std::max(rate, rate_a);
    }
    if (rate < worst_gen) {
      worst_gen = rate;
      worst_gen_at = info.id.str();
    }
    if (rate < 0.9) pass = false;

    CatalogEntry corrupted = entry;
    corrupted.F = interaction_bumped(entry.F);
    // the corruption must be loud for at least one generator; take the max
    double best = 0;
    for (const SymmetryField& X : entry.generators)
      best = std::max(best, detection_rate(corrupted, X));
    if (best < worst_int) {
      worst_int = best;
      worst_int_at = info.id.str();
    }
    if (best < 0.9) pass = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "(weakest generator control %.0f%% at %s, weakest interaction "
                "control %.0f%% at %s)",
                100 * worst_gen, worst_gen_at.c_str(), 100 * worst_int,
                worst_int_at.c_str());
  report(3, pass, buf);
}

// ---- criterion 4: algebra structure ----------------------------------------

void criterion_structure() {
  bool pass = true;
  std::string detail;
  for (const ClassInfo& info : list_classes()) {
    CatalogEntry entry =
        build(info.id, default_freedata(info.id), plan100().patch);
    std::vector<BracketCell> table =
        bracket_table(entry.generators, plan100());
    StructureVerdict v = classify_structure(table, info.id.family,
                                            (int)entry.generators.size());
    bool ok = (info.id.family == Family::A && v == StructureVerdict::Abelian) ||
              (info.id.family == Family::NS &&
               v == StructureVerdict::NonsolvableSl2);
    if (!ok) {
      pass = false;
      detail += " " + info.id.str() + "=" + verdict_str(v);
    }
  }
  report(4, pass, detail.empty() ? "(all 42 verdicts match)" : detail);
}

// ---- criterion 5: invariants ------------------------------------------------

void criterion_invariants() {
  double worst = 0;
  std::string at = "-";
  for (const ClassInfo& info : list_classes()) {
    CatalogEntry entry =
        build(info.id, default_freedata(info.id), plan100().patch);
    InvariantStats st = verify_invariants(entry, plan100());
    if (st.max_normalized > worst) {
      worst = st.max_normalized;
      at = info.id.str();
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "(worst annihilation residual %.2e at %s)",
                worst, at.c_str());
  report(5, worst < 1e-9, buf);
}

// ---- criterion 6: numerics ---------------------------------------------------

void criterion_numerics() {
  bool pass = true;
  std::string detail;
  // RK4 order on the harmonic stub
  LatticePatch patch(5, 5);
  ForceFn harmonic = [](const FContext& c) { return -c.u[0]; };
  auto err_at = [&](double h) {
    LatticeState st(patch, 0.0);
    for (int i = 0; i < patch.size(); ++i) st.u[i] = 1.0;
    Trajectory tr = integrate(harmonic, st, 1.0, h);
    return std::fabs(tr.states.back().u[0] - std::cos(1.0));
  };
  double ratio = err_at(0.02) / err_at(0.01);
  if (!(ratio >= 12 && ratio <= 20)) {
    pass = false;
    detail += " rk4-ratio=" + std::to_string(ratio);
  }
  // eval_grad against central differences on 100 random expressions
  Rng rng(0x600dcafe);
  std::vector<std::string> vars = {"x1", "x2", "x3"};
  const double h = 1e-6;
  for (int i = 0; i < 100 && pass; ++i) {
    Expr e = Expr::parse(testutil::random_expr(rng, vars, 3));
    std::vector<std::pair<std::string, double>> at = {
        {"x1", rng.uniform(0.5, 2.0)},
        {"x2", rng.uniform(0.5, 2.0)},
        {"x3", rng.uniform(0.5, 2.0)}};
    Gradient g = eval_grad(e, at);
    for (size_t v = 0; v < at.size(); ++v) {
      auto hi = at, lo = at;
      hi[v].second += h;
      lo[v].second -= h;
      double fd = (e.eval<double>(hi) - e.eval<double>(lo)) / (2 * h);
      if (std::fabs(fd - g.partials[v].second) >
          1e-6 * std::max(1.0, std::fabs(g.partials[v].second))) {
        pass = false;
        detail += " grad-mismatch(" + e.str() + ")";
      }
    }
  }
  // detfun against the Laplace oracle, exact on integer families
  Rng rng2(17);
  for (int k = 1; k <= 5; ++k)
    for (int rep = 0; rep < 25; ++rep) {
      std::vector<std::vector<double>> m(k, std::vector<double>(k));
      SiteFunctionFamily fam;
      std::vector<Site> sites;
      for (int j = 0; j < k; ++j) sites.push_back({j, 0});
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) m[i][j] = (double)(int)rng2.below(9) - 4;
        auto row = m[i];
        fam.fns.push_back([row](Site s) { return row[s.n]; });
      }
      if (detfun(fam, sites) != testutil::det_laplace(m)) {
        pass = false;
        detail += " detfun-mismatch";
      }
    }
  report(6, pass, detail.empty() ? "(rk4 order, gradients, determinants)"
                                 : detail);
}

// ---- criterion 7: dynamic symmetry demonstration ----------------------------

void criterion_orbits() {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  LatticePatch patch(5, 5);
  const double h = 0.005, t_end = 1.0, eps = 0.02;
  struct Case {
    const char* cls;
    bool control_scaling;  // control field: u d_u if true, else d_u
    const char* f;         // demo shape function; nullptr = class default
    bool gradient_init;    // pole-avoiding initial profile (ratio classes)
  };
  const Case cases[] = {
      {"A_1_1", false, nullptr, false},
      {"A_2_4", true, nullptr, false},
      // the default coupling feeds back into the neighbor differences hard
      // enough to blow up before t_end; a gentler f demonstrates the same
      // symmetry property on a tame trajectory
      {"A_4_5", true, "0.1*(x1 + x2 + x3 + x4 + x5) + 0.02*x1*x2", false},
      {"NS_3_1", false, nullptr, false},
      {"NS_5_2", true, "0.02*(x1 + x2 + x3 + x4 + x5) + 0.005*x1*x2", true}};
  for (const Case& cs : cases) {
    ClassId id = *ClassId::parse(cs.cls);
    FreeData data = default_freedata(id);
    if (cs.f) data.f = Expr::parse(cs.f);
    CatalogEntry entry = build(id, data, patch);
    LatticeState init = default_initial_state(patch, 2024, 0.0);
    if (cs.gradient_init) {
      // keep every neighbor difference away from the interaction's pole
      Rng rng(1);
      for (int i = 0; i < patch.size(); ++i) {
        Site s = patch.site(i);
        init.u[i] =
            1.0 + 0.6 * s.n + 0.3 * s.m + 0.01 * rng.uniform(-1.0, 1.0);
        init.v[i] = 0.01 * rng.uniform(-1.0, 1.0);
      }
    }
    Trajectory traj;
    try {
      traj = integrate(entry, init, t_end, h);
    } catch (const BlowupError& e) {
      (void)e;
      pass = false;
      detail += std::string(" ") + cs.cls + "-blowup";
      continue;
    }
    double base = trajectory_residual(entry, traj);
    for (const SymmetryField& X : entry.generators) {
      double moved = orbit_check(entry, X, traj, eps);
      if (moved > 5 * base) {
        pass = false;
        char buf[96];
        std::snprintf(buf, sizeof buf, " %s/%s ratio=%.1f", cs.cls,
                      X.name.c_str(), moved / base);
        detail += buf;
      }
    }
    SymmetryField control =
        cs.control_scaling
            ? SymmetryField::from_exprs(Expr::literal(0), Expr::literal(1),
                                        Expr::literal(0), "ctrl")
            : SymmetryField::from_exprs(Expr::literal(0), Expr::literal(0),
                                        Expr::literal(1), "ctrl");
    double bad = orbit_check(entry, control, traj, 0.1);
    if (bad <= 50 * base) {
      pass = false;
      char buf[96];
      std::snprintf(buf, sizeof buf, " %s/control ratio=%.1f", cs.cls,
                    bad / base);
      detail += buf;
    }
  }
  double dt = seconds_since(t0);
  if (dt >= 300) pass = false;
  char buf[64];
  std::snprintf(buf, sizeof buf, "(5 classes, %.1fs)%s", dt, detail.c_str());
  report(7, pass, buf);
}

// ---- criterion 8: determinism ------------------------------------------------

void criterion_determinism() {
  RunConfig cfg;
  cfg.classes = {"A_1_1", "A_4_4", "NS_5_2"};
  cfg.samples = 60;
  cfg.seed = 424242;
  auto run_once = [&] {
    std::vector<VerificationReport> reports;
    for (const ClassId& id : cfg.selected_classes())
      reports.push_back(
          run_verification(id, cfg.freedata_for(id), cfg.plan(), cfg.tol));
    return report_to_json(reports, cfg);
  };
  std::string r1 = run_once();
  std::string r2 = run_once();
  report(8, r1 == r2 && !r1.empty(), "(byte-identical reports)");
}

}  // namespace

int main() {
  criterion_census();
  criterion_determining();
  criterion_controls();
  criterion_structure();
  criterion_invariants();
  criterion_numerics();
  criterion_orbits();
  criterion_determinism();
  if (g_failures) std::printf("%d criteria FAILED\n", g_failures);
  else std::printf("all acceptance criteria passed\n");
  return g_failures ? 1 : 0;
}
