#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latsym/config.hpp"

namespace py = pybind11;
using namespace latsym;

namespace {

py::dict verify_class(const std::string& cls, int samples, uint64_t seed,
                      std::pair<int, int> patch) {
  auto id = ClassId::parse(cls);
  if (!id || !is_known_class(*id))
    throw py::value_error("unknown class " + cls);
  SamplePlan plan;
  plan.patch = LatticePatch(patch.first, patch.second);
  plan.count = samples;
  plan.seed = seed;
  VerificationReport rep =
      run_verification(*id, default_freedata(*id), plan, Tolerances{});
  py::dict out;
  out["class"] = rep.id.str();
  out["pass"] = rep.pass;
  out["structure"] = verdict_str(rep.verdict);
  double worst = 0;
  py::list gens;
  for (const GeneratorStats& g : rep.generators) {
    worst = std::max(worst, g.max_normalized);
    py::dict gd;
    gd["name"] = g.name;
    gd["max_residual"] = g.max_normalized;
    gd["pass"] = g.pass;
    gens.append(gd);
  }
  out["generators"] = gens;
  out["max_residual"] = worst;
  out["invariant_max_residual"] = rep.invariants.max_normalized;
  return out;
}

py::list catalog_list() {
  py::list out;
  for (const ClassInfo& info : list_classes()) {
    py::dict d;
    d["class"] = info.id.str();
    d["dim"] = info.id.dim;
    d["family"] = info.id.family == Family::A ? "A" : "NS";
    d["freedata"] = info.freedata_fields;
    d["conditions"] = info.condition_names;
    out.append(d);
  }
  return out;
}

py::tuple py_eval_time(const std::string& expr, double t, int n, int m) {
  Jet3 j = Expr::parse(expr).eval_time(t, n, m);
  return py::make_tuple(j.v0, j.v1, j.v2, j.v3);
}

double py_eval_site(const std::string& expr, int n, int m) {
  return Expr::parse(expr).eval_site(n, m);
}

py::tuple py_eval_grad(const std::string& expr,
                       const std::map<std::string, double>& args) {
  std::vector<std::pair<std::string, double>> vec(args.begin(), args.end());
  Gradient g = eval_grad(Expr::parse(expr), vec);
  py::dict partials;
  for (const auto& [k, v] : g.partials) partials[py::str(k)] = v;
  return py::make_tuple(g.value, partials);
}

double py_detfun(const std::vector<std::string>& family,
                 const std::vector<std::pair<int, int>>& sites,
                 std::pair<int, int> patch) {
  LatticePatch p(patch.first, patch.second);
  std::vector<Expr> exprs;
  for (const std::string& s : family) exprs.push_back(Expr::parse(s));
  SiteFunctionFamily fam = SiteFunctionFamily::from_exprs(exprs, p);
  std::vector<Site> ss;
  for (auto [n, m] : sites) ss.push_back({n, m});
  return detfun(fam, ss);
}

py::list py_neighbors(int N, int M, int n, int m) {
  LatticePatch p(N, M);
  py::list out;
  for (Site s : p.neighbors({n, m})) out.append(py::make_tuple(s.n, s.m));
  return out;
}

py::dict py_orbit(const std::string& cls, int generator, double epsilon,
                  double h, double t_end, std::pair<int, int> patch,
                  uint64_t seed) {
  auto id = ClassId::parse(cls);
  if (!id || !is_known_class(*id))
    throw py::value_error("unknown class " + cls);
  LatticePatch p(patch.first, patch.second);
  CatalogEntry entry = build(*id, default_freedata(*id), p);
  LatticeState init = default_initial_state(p, seed, 0.0);
  Trajectory traj = integrate(entry, init, t_end, h);
  py::dict out;
  out["base_residual"] = trajectory_residual(entry, traj);
  out["transformed_residual"] =
      orbit_check(entry, entry.generators.at(generator), traj, epsilon);
  out["generator"] = entry.generators.at(generator).name;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "symmetry catalog and verifier for lattice "
            "differential-difference systems";
  m.def("catalog_list", &catalog_list, "the 42 classified classes");
  m.def("verify_class", &verify_class, py::arg("cls"),
        py::arg("samples") = 100, py::arg("seed") = 7,
        py::arg("patch") = std::make_pair(5, 5),
        "verify one class with default free data");
  m.def("eval_time", &py_eval_time, py::arg("expr"), py::arg("t"),
        py::arg("n") = 0, py::arg("m") = 0,
        "value and first three t-derivatives");
  m.def("eval_site", &py_eval_site);
  m.def("eval_grad", &py_eval_grad);
  m.def("detfun", &py_detfun, py::arg("family"), py::arg("sites"),
        py::arg("patch") = std::make_pair(5, 5));
  m.def("neighbors", &py_neighbors);
  m.def("orbit_check", &py_orbit, py::arg("cls"), py::arg("generator") = 0,
        py::arg("epsilon") = 0.02, py::arg("h") = 0.01,
        py::arg("t_end") = 0.5, py::arg("patch") = std::make_pair(5, 5),
        py::arg("seed") = 7);
}
