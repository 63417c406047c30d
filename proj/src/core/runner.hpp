#pragma once

#include <random>
#include <string>

#include "config.hpp"
#include "defects.hpp"
#include "energy.hpp"
#include "grid.hpp"
#include "jones.hpp"
#include "monotonicity.hpp"
#include "weiss.hpp"

namespace lcd {

// seeded uniforms, independent of stdlib distribution internals
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return double(eng() >> 11)*0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo)*uniform(); }
};

LineField build_preset_field(const RunConfig& cfg);

// CLI entry: oracle | relax | analyze | cover | verify | report.
// Returns the process exit status; 0 on success and on all-pass verify.
int run_command(const std::string& command, const RunConfig& cfg);

}  // namespace lcd
