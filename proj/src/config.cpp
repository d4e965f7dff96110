#include "latsym/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace latsym {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

void parse_or_throw(const std::string& text, const std::string& where) {
  try {
    Expr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError("bad expression in " + where + ": " + e.what());
  }
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw ConfigError(where + " must contain strings");
    out.push_back(x.get<std::string>());
    parse_or_throw(out.back(), where);
  }
  return out;
}

std::vector<Expr> parse_list(const std::vector<std::string>& xs) {
  std::vector<Expr> out;
  for (const std::string& s : xs) out.push_back(Expr::parse(s));
  return out;
}

void extract_config(const json& j, RunConfig& cfg) {
  if (j.contains("classes")) {
    cfg.classes.clear();
    for (const auto& c : j["classes"]) cfg.classes.push_back(c.get<std::string>());
  }
  if (j.contains("samples")) cfg.samples = j["samples"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  if (j.contains("u_range")) {
    cfg.u_lo = j["u_range"].at(0).get<double>();
    cfg.u_hi = j["u_range"].at(1).get<double>();
  }
  if (j.contains("t_range")) {
    cfg.t_lo = j["t_range"].at(0).get<double>();
    cfg.t_hi = j["t_range"].at(1).get<double>();
  }
  if (j.contains("patch")) {
    cfg.patch_n = j["patch"].at(0).get<int>();
    cfg.patch_m = j["patch"].at(1).get<int>();
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    check_keys(t, {"determining", "bracket", "radical", "invariant"},
               "tolerances");
    if (t.contains("determining"))
      cfg.tol.determining = t["determining"].get<double>();
    if (t.contains("bracket")) cfg.tol.bracket = t["bracket"].get<double>();
    if (t.contains("radical")) cfg.tol.radical = t["radical"].get<double>();
    if (t.contains("invariant"))
      cfg.tol.invariant = t["invariant"].get<double>();
  }
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    check_keys(s, {"patch", "t0", "t_end", "h", "epsilons", "seed"},
               "simulate");
    if (s.contains("patch")) {
      cfg.sim.patch_n = s["patch"].at(0).get<int>();
      cfg.sim.patch_m = s["patch"].at(1).get<int>();
    }
    if (s.contains("t0")) cfg.sim.t0 = s["t0"].get<double>();
    if (s.contains("t_end")) cfg.sim.t_end = s["t_end"].get<double>();
    if (s.contains("h")) cfg.sim.h = s["h"].get<double>();
    if (s.contains("seed")) cfg.sim.seed = s["seed"].get<uint64_t>();
    if (s.contains("epsilons")) {
      cfg.sim.epsilons.clear();
      for (const auto& e : s["epsilons"])
        cfg.sim.epsilons.push_back(e.get<double>());
    }
  }
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("freedata")) {
    const json& fd = j["freedata"];
    if (!fd.is_object())
      throw ConfigError("freedata must map class ids to override objects");
    for (auto it = fd.begin(); it != fd.end(); ++it) {
      const std::string& cls = it.key();
      if (!ClassId::parse(cls) || !is_known_class(*ClassId::parse(cls)))
        throw ConfigError("freedata refers to unknown class '" + cls + "'");
      const json& o = it.value();
      check_keys(o,
                 {"a", "kappa", "lambda", "sigma", "omega", "c", "f",
                  "a12_2_reading"},
                 "freedata." + cls);
      FreeDataSpec spec;
      if (o.contains("a")) spec.a = string_list(o["a"], "freedata." + cls + ".a");
      if (o.contains("kappa"))
        spec.kappa = string_list(o["kappa"], "freedata." + cls + ".kappa");
      if (o.contains("lambda"))
        spec.lambda = string_list(o["lambda"], "freedata." + cls + ".lambda");
      if (o.contains("sigma"))
        spec.sigma = string_list(o["sigma"], "freedata." + cls + ".sigma");
      if (o.contains("omega")) {
        for (const auto& row : o["omega"])
          spec.omega.push_back(
              string_list(row, "freedata." + cls + ".omega row"));
      }
      if (o.contains("c")) {
        spec.c = o["c"].get<std::string>();
        parse_or_throw(spec.c, "freedata." + cls + ".c");
      }
      if (o.contains("f")) {
        spec.f = o["f"].get<std::string>();
        parse_or_throw(spec.f, "freedata." + cls + ".f");
      }
      if (o.contains("a12_2_reading")) {
        spec.a12_2_reading = o["a12_2_reading"].get<std::string>();
        if (spec.a12_2_reading != "derived" && spec.a12_2_reading != "a65" &&
            spec.a12_2_reading != "d3")
          throw ConfigError("a12_2_reading must be derived, a65 or d3");
      }
      cfg.freedata[cls] = std::move(spec);
    }
  }
}

}  // namespace

FreeData FreeDataSpec::materialize(const FreeData& defaults) const {
  FreeData d = defaults;
  if (!a.empty()) d.a_list = parse_list(a);
  if (!kappa.empty()) d.kappa_list = parse_list(kappa);
  if (!lambda.empty()) d.lambda_list = parse_list(lambda);
  if (!sigma.empty()) d.sigma_list = parse_list(sigma);
  if (!omega.empty()) {
    d.omega.clear();
    for (const auto& row : omega) d.omega.push_back(parse_list(row));
  }
  if (!c.empty()) d.c = Expr::parse(c);
  if (!f.empty()) d.f = Expr::parse(f);
  if (!a12_2_reading.empty()) d.a12_2_reading = a12_2_reading;
  return d;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j,
             {"classes", "freedata", "samples", "u_range", "t_range", "seed",
              "patch", "tolerances", "simulate", "out"},
             "config");
  RunConfig cfg;
  try {
    extract_config(j, cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (cfg.patch_n < 3 || cfg.patch_m < 3 || cfg.sim.patch_n < 3 ||
      cfg.sim.patch_m < 3)
    throw ConfigError("patch extents must be >= 3");
  if (cfg.samples < 1) throw ConfigError("samples must be positive");
  if (!(cfg.u_lo > 0) || !(cfg.u_hi > cfg.u_lo))
    throw ConfigError("u_range must satisfy 0 < lo < hi");
  if (!(cfg.t_hi > cfg.t_lo)) throw ConfigError("t_range must be increasing");
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if ((unsigned char)c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

namespace {

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string string_array(const std::vector<std::string>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += quoted(xs[i]);
  }
  return out + "]";
}

std::string double_array(const std::vector<double>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(xs[i]);
  }
  return out + "]";
}

}  // namespace

std::string RunConfig::to_json() const {
  std::string s = "{\n";
  s += "  \"classes\": " + string_array(classes) + ",\n";
  s += "  \"freedata\": {";
  bool first = true;
  for (const auto& [cls, spec] : freedata) {
    if (!first) s += ",";
    first = false;
    s += "\n    " + quoted(cls) + ": {";
    std::vector<std::string> parts;
    if (!spec.a.empty()) parts.push_back("\"a\": " + string_array(spec.a));
    if (!spec.kappa.empty())
      parts.push_back("\"kappa\": " + string_array(spec.kappa));
    if (!spec.lambda.empty())
      parts.push_back("\"lambda\": " + string_array(spec.lambda));
    if (!spec.sigma.empty())
      parts.push_back("\"sigma\": " + string_array(spec.sigma));
    if (!spec.omega.empty()) {
      std::string om = "\"omega\": [";
      for (size_t i = 0; i < spec.omega.size(); ++i) {
        if (i) om += ",";
        om += string_array(spec.omega[i]);
      }
      parts.push_back(om + "]");
    }
    if (!spec.c.empty()) parts.push_back("\"c\": " + quoted(spec.c));
    if (!spec.f.empty()) parts.push_back("\"f\": " + quoted(spec.f));
    if (!spec.a12_2_reading.empty())
      parts.push_back("\"a12_2_reading\": " + quoted(spec.a12_2_reading));
    for (size_t i = 0; i < parts.size(); ++i)
      s += (i ? ", " : "") + parts[i];
    s += "}";
  }
  s += first ? "},\n" : "\n  },\n";
  s += "  \"samples\": " + std::to_string(samples) + ",\n";
  s += "  \"u_range\": [" + fmt_double(u_lo) + "," + fmt_double(u_hi) + "],\n";
  s += "  \"t_range\": [" + fmt_double(t_lo) + "," + fmt_double(t_hi) + "],\n";
  s += "  \"seed\": " + std::to_string(seed) + ",\n";
  s += "  \"patch\": [" + std::to_string(patch_n) + "," +
       std::to_string(patch_m) + "],\n";
  s += "  \"tolerances\": {\"determining\": " + fmt_double(tol.determining) +
       ", \"bracket\": " + fmt_double(tol.bracket) +
       ", \"radical\": " + fmt_double(tol.radical) +
       ", \"invariant\": " + fmt_double(tol.invariant) + "},\n";
  s += "  \"simulate\": {\"patch\": [" + std::to_string(sim.patch_n) + "," +
       std::to_string(sim.patch_m) + "], \"t0\": " + fmt_double(sim.t0) +
       ", \"t_end\": " + fmt_double(sim.t_end) +
       ", \"h\": " + fmt_double(sim.h) +
       ", \"epsilons\": " + double_array(sim.epsilons) +
       ", \"seed\": " + std::to_string(sim.seed) + "},\n";
  s += "  \"out\": " + quoted(out_dir) + "\n";
  s += "}\n";
  return s;
}

std::vector<ClassId> RunConfig::selected_classes() const {
  std::vector<ClassId> out;
  for (const std::string& c : classes) {
    if (c == "all") {
      for (const ClassInfo& info : list_classes()) out.push_back(info.id);
      continue;
    }
    std::optional<ClassId> id = ClassId::parse(c);
    if (!id || !is_known_class(*id))
      throw ConfigError("unknown class '" + c + "'");
    out.push_back(*id);
  }
  return out;
}

SamplePlan RunConfig::plan() const {
  SamplePlan p;
  p.patch = LatticePatch(patch_n, patch_m);
  p.count = samples;
  p.u_lo = u_lo;
  p.u_hi = u_hi;
  p.t_lo = t_lo;
  p.t_hi = t_hi;
  p.seed = seed;
  return p;
}

FreeData RunConfig::freedata_for(const ClassId& id) const {
  FreeData d = default_freedata(id);
  auto it = freedata.find(id.str());
  if (it != freedata.end()) d = it->second.materialize(d);
  return d;
}

namespace {

std::string generator_json(const GeneratorStats& g) {
  std::string s = "{";
  s += "\"name\": " + quoted(g.name);
  s += ", \"max_residual\": " + fmt_double(g.max_normalized);
  s += ", \"mean_residual\": " + fmt_double(g.mean_normalized);
  s += ", \"max_absolute\": " + fmt_double(g.max_absolute);
  s += ", \"samples\": " + std::to_string(g.samples);
  s += ", \"skipped\": " + std::to_string(g.skipped);
  s += std::string(", \"pass\": ") + (g.pass ? "true" : "false") + "}";
  return s;
}

std::string cell_json(const BracketCell& c) {
  std::string s = "{";
  s += "\"i\": " + std::to_string(c.i) + ", \"j\": " + std::to_string(c.j);
  s += ", \"coeffs\": " + double_array(c.coeffs);
  s += ", \"residual\": " + fmt_double(c.residual);
  s += std::string(", \"indeterminate\": ") +
       (c.indeterminate ? "true" : "false") + "}";
  return s;
}

std::string condition_json(const ConditionResult& c) {
  std::string s = "{";
  s += "\"name\": " + quoted(c.name);
  s += std::string(", \"pass\": ") + (c.pass ? "true" : "false");
  s += ", \"detail\": " + quoted(c.detail) + "}";
  return s;
}

}  // namespace

std::string report_to_json(const std::vector<VerificationReport>& reports,
                           const RunConfig& cfg) {
  std::string s = "{\n";
  s += "  \"schema\": \"latsym-verify-v1\",\n";
  s += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
  s += "  \"patch\": [" + std::to_string(cfg.patch_n) + "," +
       std::to_string(cfg.patch_m) + "],\n";
  s += "  \"samples\": " + std::to_string(cfg.samples) + ",\n";
  s += "  \"u_range\": [" + fmt_double(cfg.u_lo) + "," + fmt_double(cfg.u_hi) +
       "],\n";
  s += "  \"t_range\": [" + fmt_double(cfg.t_lo) + "," + fmt_double(cfg.t_hi) +
       "],\n";
  s += "  \"tolerances\": {\"determining\": " +
       fmt_double(cfg.tol.determining) +
       ", \"bracket\": " + fmt_double(cfg.tol.bracket) +
       ", \"radical\": " + fmt_double(cfg.tol.radical) +
       ", \"invariant\": " + fmt_double(cfg.tol.invariant) + "},\n";
  s += "  \"results\": [";
  bool all_pass = true;
  for (size_t i = 0; i < reports.size(); ++i) {
    const VerificationReport& r = reports[i];
    all_pass = all_pass && r.pass;
    if (i) s += ",";
    s += "\n    {\"class\": " + quoted(r.id.str());
    s += std::string(", \"family\": ") +
         (r.id.family == Family::A ? "\"A\"" : "\"NS\"");
    s += ", \"dim\": " + std::to_string(r.id.dim);
    s += ",\n     \"conditions\": [";
    for (size_t k = 0; k < r.conditions.size(); ++k)
      s += (k ? ", " : "") + condition_json(r.conditions[k]);
    s += "],\n     \"generators\": [";
    for (size_t k = 0; k < r.generators.size(); ++k)
      s += (k ? ", " : "") + generator_json(r.generators[k]);
    s += "],\n     \"bracket_table\": [";
    for (size_t k = 0; k < r.table.size(); ++k)
      s += (k ? ", " : "") + cell_json(r.table[k]);
    s += "],\n     \"structure\": " + quoted(verdict_str(r.verdict));
    s += ", \"invariant_max_residual\": " +
         fmt_double(r.invariants.max_normalized);
    s += std::string(", \"pass\": ") + (r.pass ? "true" : "false");
    s += ", \"error\": " + quoted(r.error) + "}";
  }
  s += "\n  ],\n";
  s += std::string("  \"pass\": ") + (all_pass ? "true" : "false") + "\n";
  s += "}\n";
  return s;
}

std::string orbit_report_to_json(const std::vector<OrbitRecord>& records,
                                 const RunConfig& cfg) {
  std::string s = "{\n";
  s += "  \"schema\": \"latsym-orbit-v1\",\n";
  s += "  \"h\": " + fmt_double(cfg.sim.h) + ",\n";
  s += "  \"t0\": " + fmt_double(cfg.sim.t0) + ",\n";
  s += "  \"t_end\": " + fmt_double(cfg.sim.t_end) + ",\n";
  s += "  \"patch\": [" + std::to_string(cfg.sim.patch_n) + "," +
       std::to_string(cfg.sim.patch_m) + "],\n";
  s += "  \"seed\": " + std::to_string(cfg.sim.seed) + ",\n";
  s += "  \"records\": [";
  for (size_t i = 0; i < records.size(); ++i) {
    const OrbitRecord& r = records[i];
    if (i) s += ",";
    s += "\n    {\"class\": " + quoted(r.cls);
    s += ", \"generator\": " + quoted(r.generator);
    s += ", \"epsilon\": " + fmt_double(r.epsilon);
    s += ", \"base_residual\": " + fmt_double(r.base_residual);
    s += ", \"transformed_residual\": " + fmt_double(r.transformed_residual);
    s += std::string(", \"flow_failed\": ") +
         (r.flow_failed ? "true" : "false");
    s += ", \"note\": " + quoted(r.note) + "}";
  }
  s += "\n  ]\n}\n";
  return s;
}

}  // namespace latsym
