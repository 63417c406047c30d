#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "csvio.hpp"
#include "json.hpp"

namespace lcd {

std::string RunConfig::meta_header() const {
  std::ostringstream os;
  os << "# h=" << fmt_double(h()) << "\n";
  os << "# n=" << n << "\n";
  os << "# kappa=" << fmt_double(kappa) << "\n";
  os << "# seed=" << seed << "\n";
  os << "# build=" << kBuildId << "\n";
  return os.str();
}

RunConfig config_from_json_text(const std::string& text, std::vector<std::string>& errors) {
  RunConfig cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    errors.push_back(std::string("config: JSON parse error: ") + e.what());
    return cfg;
  }
  if (!j.is_object()) {
    errors.push_back("config: top level must be a flat object");
    return cfg;
  }

  const std::set<std::string> known = {
      "kappa", "n", "extent", "boundary", "oracle_c", "amplitude", "mode",
      "constant_value", "input_field", "interior_init", "potential_enabled",
      "potential_a", "potential_sstar", "lambda", "max_sweeps", "tol", "radii",
      "tau", "gap", "s_min", "fib_points", "beta_samples", "seed", "threads",
      "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      errors.push_back("config." + it.key() + ": unknown key");

  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) {
      if (j[key].is_number()) dst = j[key].get<double>();
      else errors.push_back(std::string("config.") + key + ": must be a number");
    }
  };
  auto integer = [&](const char* key, int& dst) {
    if (j.contains(key)) {
      if (j[key].is_number_integer()) dst = j[key].get<int>();
      else errors.push_back(std::string("config.") + key + ": must be an integer");
    }
  };
  auto str = [&](const char* key, std::string& dst) {
    if (j.contains(key)) {
      if (j[key].is_string()) dst = j[key].get<std::string>();
      else errors.push_back(std::string("config.") + key + ": must be a string");
    }
  };

  num("kappa", cfg.kappa);
  integer("n", cfg.n);
  num("extent", cfg.extent);
  str("boundary", cfg.boundary);
  num("oracle_c", cfg.oracle_c);
  num("amplitude", cfg.amplitude);
  integer("mode", cfg.mode);
  str("constant_value", cfg.constant_value);
  str("input_field", cfg.input_field);
  str("interior_init", cfg.interior_init);
  if (j.contains("potential_enabled")) {
    if (j["potential_enabled"].is_boolean())
      cfg.potential_enabled = j["potential_enabled"].get<bool>();
    else errors.push_back("config.potential_enabled: must be a boolean");
  }
  num("potential_a", cfg.potential_a);
  num("potential_sstar", cfg.potential_sstar);
  num("lambda", cfg.lambda);
  integer("max_sweeps", cfg.max_sweeps);
  num("tol", cfg.tol);
  if (j.contains("radii")) {
    if (j["radii"].is_array()) {
      cfg.radii.clear();
      for (auto& v : j["radii"]) {
        if (v.is_number()) cfg.radii.push_back(v.get<double>());
        else errors.push_back("config.radii: entries must be numbers");
      }
    } else errors.push_back("config.radii: must be an array");
  }
  num("tau", cfg.tau);
  num("gap", cfg.gap);
  num("s_min", cfg.s_min);
  integer("fib_points", cfg.fib_points);
  integer("beta_samples", cfg.beta_samples);
  if (j.contains("seed")) {
    if (j["seed"].is_number_unsigned() || j["seed"].is_number_integer())
      cfg.seed = j["seed"].get<std::uint64_t>();
    else errors.push_back("config.seed: must be an integer");
  }
  integer("threads", cfg.threads);
  str("out_dir", cfg.out_dir);

  // range validation
  if (!(cfg.kappa > 1)) errors.push_back("config.kappa: must be > 1");
  if (cfg.n < 8) errors.push_back("config.n: must be >= 8");
  if (!(cfg.extent > 0)) errors.push_back("config.extent: must be > 0");
  if (cfg.boundary != "constant" && cfg.boundary != "cylindrical" &&
      cfg.boundary != "perturbed-cylindrical" && cfg.boundary != "from-file")
    errors.push_back("config.boundary: must be one of constant|cylindrical|"
                     "perturbed-cylindrical|from-file");
  if (!(cfg.oracle_c > 0)) errors.push_back("config.oracle_c: must be > 0");
  if (cfg.boundary == "perturbed-cylindrical" && cfg.amplitude < 0)
    errors.push_back("config.amplitude: must be >= 0");
  if (cfg.boundary == "from-file" && cfg.input_field.empty())
    errors.push_back("config.input_field: required for boundary=from-file");
  if (cfg.interior_init != "preset" && cfg.interior_init != "apex")
    errors.push_back("config.interior_init: must be preset|apex");
  if (cfg.potential_a < 0) errors.push_back("config.potential_a: must be >= 0");
  if (!(cfg.potential_sstar > 0 && cfg.potential_sstar < 1))
    errors.push_back("config.potential_sstar: must be in (0,1)");
  if (cfg.max_sweeps < 0) errors.push_back("config.max_sweeps: must be >= 0");
  if (!(cfg.tol > 0)) errors.push_back("config.tol: must be > 0");
  for (double r : cfg.radii)
    if (!(r > 0)) errors.push_back("config.radii: entries must be > 0");
  if (cfg.tau < 0) errors.push_back("config.tau: must be >= 0");
  if (cfg.gap < 0) errors.push_back("config.gap: must be >= 0");
  if (cfg.s_min < 0) errors.push_back("config.s_min: must be >= 0");
  if (cfg.fib_points < 16) errors.push_back("config.fib_points: must be >= 16");
  if (cfg.beta_samples < 1) errors.push_back("config.beta_samples: must be >= 1");
  if (cfg.threads < 1) errors.push_back("config.threads: must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path, std::vector<std::string>& errors) {
  std::ifstream is(path);
  if (!is) {
    errors.push_back("config: cannot open " + path);
    return RunConfig{};
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json_text(ss.str(), errors);
}

}  // namespace lcd
