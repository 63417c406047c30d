#pragma once

#include "monotonicity.hpp"

namespace lcd {

struct WeissReport {
  Vec3 x{0, 0, 0};
  double r = 0;
  double alpha = 0;
  double value = 0;
  double deficit = -1;    // optional, < 0 when not evaluated
  double pinching = 0;    // W_{r/8}^{4r}(x) when evaluated
};

struct PinchingPair {
  double lhs = 0;           // |N(x1,r) - N(x2,r)|
  double rhs_unscaled = 0;  // (sqrt W1 + sqrt W2) |x1-x2| / r
  double W1 = 0, W2 = 0;
  bool clamped = false;     // pinching window clamped to the admissible range
};

// Weiss energy r^(-1-2a) D - a r^(-2-2a) H with the classical quantities.
double classical_weiss(const FieldAnalysis& fa, const Vec3& x, double r, double alpha,
                       const PotentialSpec& pot = {}, int fib_points = 2000);

// Annulus integral of |(y-x).grad u - N_phi(x,|y-x|) u|^2 over B_2r \ B_r/4,
// normalized by r^(-1-2N_phi(x,r)). Shell frequencies are piecewise constant in
// shells of width h, clamped below at 4h.
double weiss_deficit(const FieldAnalysis& fa, const Vec3& x, double r);

// Lemma-scale two-point comparison at radius r; requires |x1-x2| <= r/4.
// When allow_clamp is set, the W window [r/8, 4r] is clamped to what the grid
// admits (reported in the result); otherwise inadmissible windows throw.
PinchingPair pinching_bound_eval(const FieldAnalysis& fa, const Vec3& x1, const Vec3& x2,
                                 double r, bool allow_clamp = false);

void export_weiss_csv(const std::vector<WeissReport>& recs, const std::string& path,
                      const std::string& meta);

}  // namespace lcd
