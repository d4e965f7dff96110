#pragma once

#include <map>

#include "latsym/simulator.hpp"

namespace latsym {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Free-data overrides exactly as configured (expression strings).
struct FreeDataSpec {
  std::vector<std::string> a, kappa, lambda, sigma;
  std::vector<std::vector<std::string>> omega;
  std::string c, f, a12_2_reading;

  /// Start from the class defaults and replace whichever fields are present.
  FreeData materialize(const FreeData& defaults) const;
};

struct SimulateConfig {
  int patch_n = 5, patch_m = 5;
  double t0 = 0.0;
  double t_end = 1.0;
  double h = 0.005;
  std::vector<double> epsilons = {0.02};
  uint64_t seed = 7;
};

struct RunConfig {
  std::vector<std::string> classes = {"all"};
  std::map<std::string, FreeDataSpec> freedata;
  int samples = 100;
  double u_lo = 0.5, u_hi = 2.0;
  double t_lo = 0.1, t_hi = 2.0;
  uint64_t seed = 7;
  int patch_n = 5, patch_m = 5;
  Tolerances tol;
  SimulateConfig sim;
  std::string out_dir;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  /// Normalized deterministic form; loading it back reproduces the config.
  std::string to_json() const;

  std::vector<ClassId> selected_classes() const;
  SamplePlan plan() const;
  FreeData freedata_for(const ClassId& id) const;
};

std::string json_escape(const std::string& s);
std::string fmt_double(double v);  // 17 significant digits

std::string report_to_json(const std::vector<VerificationReport>& reports,
                           const RunConfig& cfg);

struct OrbitRecord {
  std::string cls;
  std::string generator;
  double epsilon = 0;
  double base_residual = 0;
  double transformed_residual = 0;
  bool flow_failed = false;
  std::string note;
};

std::string orbit_report_to_json(const std::vector<OrbitRecord>& records,
                                 const RunConfig& cfg);

}  // namespace latsym
