#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "latsym/config.hpp"

using namespace latsym;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CliArgs {
  std::vector<std::string> classes;
  std::string config_path;
  std::string out_dir;
  std::string patch;
  uint64_t seed = 0;
  bool seed_set = false;
  int samples = 0;
  double tol = 0;
  bool force = false;
  double h = 0, t_end = 0;
  std::vector<double> epsilons;
};

RunConfig load_config(const CliArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = RunConfig::from_file(args.config_path);
  if (!args.classes.empty()) cfg.classes = args.classes;
  if (args.seed_set) {
    cfg.seed = args.seed;
    cfg.sim.seed = args.seed;
  }
  if (args.samples > 0) cfg.samples = args.samples;
  if (args.tol > 0) cfg.tol.determining = args.tol;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.patch.empty()) {
    size_t x = args.patch.find('x');
    if (x == std::string::npos)
      throw ConfigError("--patch expects NxM, e.g. 5x5");
    int pn = std::stoi(args.patch.substr(0, x));
    int pm = std::stoi(args.patch.substr(x + 1));
    if (pn < 3 || pm < 3) throw ConfigError("patch extents must be >= 3");
    cfg.patch_n = pn;
    cfg.patch_m = pm;
    cfg.sim.patch_n = pn;
    cfg.sim.patch_m = pm;
  }
  if (args.h > 0) cfg.sim.h = args.h;
  if (args.t_end > 0) cfg.sim.t_end = args.t_end;
  if (!args.epsilons.empty()) cfg.sim.epsilons = args.epsilons;
  return cfg;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  out << content;
}

int cmd_catalog() {
  std::printf("%-8s %-4s %-7s %-44s %s\n", "class", "dim", "family",
              "free data", "conditions");
  int count = 0;
  for (const ClassInfo& info : list_classes()) {
    std::string fields;
    for (size_t i = 0; i < info.freedata_fields.size(); ++i)
      fields += (i ? ", " : "") + info.freedata_fields[i];
    std::string conds;
    for (size_t i = 0; i < info.condition_names.size(); ++i)
      conds += (i ? ", " : "") + info.condition_names[i];
    std::printf("%-8s %-4d %-7s %-44s %s\n", info.id.str().c_str(),
                info.id.dim, info.id.family == Family::A ? "A" : "NS",
                fields.c_str(), conds.c_str());
    ++count;
  }
  std::printf("total: %d classes\n", count);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  std::vector<ClassId> ids = cfg.selected_classes();
  SamplePlan plan = cfg.plan();
  // classes verify independently; results are collected in catalog order so
  // the report bytes do not depend on scheduling
  std::vector<std::future<VerificationReport>> futures;
  for (const ClassId& id : ids)
    futures.push_back(std::async(std::launch::async, [&cfg, &plan, id] {
      return run_verification(id, cfg.freedata_for(id), plan, cfg.tol);
    }));
  std::vector<VerificationReport> reports;
  bool all_pass = true;
  for (auto& fut : futures) {
    VerificationReport rep = fut.get();
    all_pass = all_pass && rep.pass;
    double worst = 0;
    for (const GeneratorStats& g : rep.generators)
      worst = std::max(worst, g.max_normalized);
    std::printf("%-8s %-6s dim=%-2d structure=%-22s max_residual=%.3e %s\n",
                rep.id.str().c_str(), rep.pass ? "PASS" : "FAIL", rep.id.dim,
                verdict_str(rep.verdict), worst,
                rep.error.empty() ? "" : rep.error.c_str());
    reports.push_back(std::move(rep));
  }
  std::string json = report_to_json(reports, cfg);
  write_file(cfg.out_dir, "verify.json", json);
  if (cfg.out_dir.empty() && !all_pass) {
    // machine-readable failure list on stdout when nothing else captures it
    for (const VerificationReport& r : reports)
      if (!r.pass)
        std::printf("FAILED %s %s\n", r.id.str().c_str(), r.error.c_str());
  }
  return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_simulate(const RunConfig& cfg, bool force) {
  std::vector<ClassId> ids = cfg.selected_classes();
  SamplePlan plan = cfg.plan();
  LatticePatch sim_patch(cfg.sim.patch_n, cfg.sim.patch_m);
  std::vector<OrbitRecord> records;
  bool ok = true;
  for (const ClassId& id : ids) {
    FreeData data = cfg.freedata_for(id);
    if (!force) {
      VerificationReport rep = run_verification(id, data, plan, cfg.tol);
      if (!rep.pass) {
        std::printf("%-8s SKIP (verification failed; use --force)\n",
                    id.str().c_str());
        ok = false;
        continue;
      }
    }
    CatalogEntry entry = build(id, data, sim_patch);
    LatticeState init =
        default_initial_state(sim_patch, cfg.sim.seed, cfg.sim.t0);
    Trajectory traj;
    try {
      traj = integrate(entry, init, cfg.sim.t_end, cfg.sim.h);
    } catch (const BlowupError& e) {
      std::printf("%-8s BLOWUP at t=%g site (%d,%d): %s\n", id.str().c_str(),
                  e.t, e.site.n, e.site.m, e.what());
      ok = false;
      continue;
    }
    double base = trajectory_residual(entry, traj);
    if (!cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      std::ofstream csv(cfg.out_dir + "/" + id.str() + ".csv",
                        std::ios::binary);
      write_csv(traj, csv);
    }
    for (const SymmetryField& X : entry.generators)
      for (double eps : cfg.sim.epsilons) {
        OrbitRecord rec;
        rec.cls = id.str();
        rec.generator = X.name;
        rec.epsilon = eps;
        rec.base_residual = base;
        try {
          rec.transformed_residual = orbit_check(entry, X, traj, eps);
        } catch (const FlowError& e) {
          rec.flow_failed = true;
          rec.note = e.what();
        }
        std::printf("%-8s %-4s eps=%-7g base=%.3e transformed=%.3e%s\n",
                    rec.cls.c_str(), rec.generator.c_str(), eps,
                    rec.base_residual, rec.transformed_residual,
                    rec.flow_failed ? " [flow failed]" : "");
        records.push_back(std::move(rec));
      }
  }
  write_file(cfg.out_dir, "orbit.json", orbit_report_to_json(records, cfg));
  return ok ? kExitOk : kExitRuntime;
}

int cmd_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    return kExitConfig;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bad report: %s\n", e.what());
    return kExitConfig;
  }
  std::string schema = j.value("schema", "");
  if (schema == "latsym-verify-v1") {
    bool pass = j.value("pass", false);
    std::printf("verification report: %s\n", pass ? "PASS" : "FAIL");
    for (const auto& r : j["results"]) {
      double worst = 0;
      for (const auto& g : r["generators"])
        worst = std::max(worst, g["max_residual"].get<double>());
      std::printf("  %-8s %-6s structure=%-22s max_residual=%.3e\n",
                  r["class"].get<std::string>().c_str(),
                  r.value("pass", false) ? "PASS" : "FAIL",
                  r["structure"].get<std::string>().c_str(), worst);
    }
    return pass ? kExitOk : kExitVerifyFailed;
  }
  if (schema == "latsym-orbit-v1") {
    std::printf("orbit report (%zu records)\n", j["records"].size());
    for (const auto& r : j["records"])
      std::printf("  %-8s %-4s eps=%-7g base=%.3e transformed=%.3e\n",
                  r["class"].get<std::string>().c_str(),
                  r["generator"].get<std::string>().c_str(),
                  r["epsilon"].get<double>(),
                  r["base_residual"].get<double>(),
                  r["transformed_residual"].get<double>());
    return kExitOk;
  }
  std::fprintf(stderr, "unknown report schema '%s'\n", schema.c_str());
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetry catalog, verifier and simulator for second-order "
               "lattice differential-difference systems"};
  app.require_subcommand(1);

  CLI::App* cat = app.add_subcommand("catalog", "print the classification");
  std::string cat_action = "list";
  cat->add_option("action", cat_action, "catalog action")
      ->check(CLI::IsMember({"list"}));

  CliArgs vargs;
  CLI::App* ver = app.add_subcommand("verify", "run the determining-equation "
                                               "and structure verification");
  ver->add_option("--class", vargs.classes, "class ids or 'all'");
  ver->add_option("--config", vargs.config_path, "JSON config file");
  ver->add_option("--seed", vargs.seed, "sample seed")
      ->each([&vargs](const std::string&) { vargs.seed_set = true; });
  ver->add_option("--samples", vargs.samples, "sample count");
  ver->add_option("--tol", vargs.tol, "determining-equation tolerance");
  ver->add_option("--patch", vargs.patch, "patch extents NxM");
  ver->add_option("--out", vargs.out_dir, "output directory");

  CliArgs sargs;
  CLI::App* sim = app.add_subcommand(
      "simulate", "integrate and demonstrate symmetries on trajectories");
  sim->add_option("--class", sargs.classes, "class ids or 'all'");
  sim->add_option("--config", sargs.config_path, "JSON config file");
  sim->add_option("--seed", sargs.seed, "initial-state seed")
      ->each([&sargs](const std::string&) { sargs.seed_set = true; });
  sim->add_option("--patch", sargs.patch, "patch extents NxM");
  sim->add_option("--step", sargs.h, "integration step");
  sim->add_option("--t-end", sargs.t_end, "end time");
  sim->add_option("--eps", sargs.epsilons, "flow parameters");
  sim->add_option("--out", sargs.out_dir, "output directory");
  sim->add_flag("--force", sargs.force, "simulate even if verification fails");

  std::string report_path;
  CLI::App* rep = app.add_subcommand("report", "summarize a JSON report");
  rep->add_option("file", report_path, "report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cat->parsed()) return cmd_catalog();
    if (ver->parsed()) return cmd_verify(load_config(vargs));
    if (sim->parsed()) return cmd_simulate(load_config(sargs), sargs.force);
    if (rep->parsed()) return cmd_report(report_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const BuildError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
