#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcd {

inline constexpr const char* kBuildId = "lcdefect-0.1.0-a1b2c3d";

// Flat key/value run configuration; every stochastic choice downstream is
// driven by the seed.
struct RunConfig {
  double kappa = 4.0;
  int n = 65;
  double extent = 2.0;             // cube side; domain [-extent/2, extent/2]^3
  std::string boundary = "cylindrical";  // constant | cylindrical | perturbed-cylindrical | from-file
  double oracle_c = 1.0;
  double amplitude = 0.1;          // perturbed-cylindrical
  int mode = 2;
  std::string constant_value = "link";  // link point used by the constant preset
  std::string input_field;         // from-file preset / analyze input
  std::string interior_init = "preset";  // preset | apex

  bool potential_enabled = false;
  double potential_a = 0.0;
  double potential_sstar = 0.5;
  double lambda = -1.0;            // < 0 -> default M sqrt(kappa) when enabled

  int max_sweeps = 2000;
  double tol = 1e-8;

  std::vector<double> radii;       // analysis ladder; empty -> dyadic default
  double tau = 0.0;                // 0 -> scale-aware estimate
  double gap = 0.0;                // 0 -> 2.5 h
  double s_min = 0.0;              // 0 -> twice min inter-atom distance
  int fib_points = 2000;
  int beta_samples = 100;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";

  std::string meta_header() const;  // '#' lines: h, n, kappa, seed, build id
  double h() const { return extent/(n - 1); }
};

// Parses the flat JSON file; unknown keys and out-of-range values produce
// field-path error messages.
RunConfig load_config(const std::string& path, std::vector<std::string>& errors);
RunConfig config_from_json_text(const std::string& text, std::vector<std::string>& errors);

}  // namespace lcd
