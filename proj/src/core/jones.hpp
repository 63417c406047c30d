#pragma once

#include <string>
#include <vector>

#include "defects.hpp"
#include "geom.hpp"
#include "monotonicity.hpp"

namespace lcd {

struct DiscreteMeasure {
  struct Atom {
    Vec3 x{0, 0, 0};
    double s = 0;
  };
  std::vector<Atom> atoms;

  static DiscreteMeasure from_zero_set(const ZeroSet& zs);
};

struct Sym3Eigen {
  std::array<double, 3> values{};   // descending
  std::array<Vec3, 3> vectors{};    // orthonormal
};

// Closed-form symmetric 3x3 eigen decomposition with Jacobi polish.
Sym3Eigen sym3_eigen(const std::array<std::array<double, 3>, 3>& B);

struct BetaResult {
  Vec3 barycenter{0, 0, 0};
  std::array<double, 3> eigenvalues{};   // lambda1 >= lambda2 >= lambda3
  std::array<Vec3, 3> eigenvectors{};
  double beta2 = 0;                      // (lambda2 + lambda3)/r0^3
  Vec3 line_point{0, 0, 0};
  Vec3 line_dir{1, 0, 0};
};

// Second-moment characterization over atoms in the open ball B_r0(x0).
BetaResult beta2(const DiscreteMeasure& mu, const Vec3& x0, double r0);

struct DistortionResult {
  double lhs = 0;   // beta2(mu, x0, r/8)
  double rhs = 0;   // (1/r) sum s_j W_{r/8}^{4r}(x_j) over atoms in B_{r/8}(x0)
  double ratio = 0;
  bool clamped = false;
};

DistortionResult distortion_check(const FieldAnalysis& fa, const DiscreteMeasure& mu,
                                  const Vec3& x0, double r, bool allow_clamp = false);

// (1/r) int_{B_r(x)} int_{s_min}^r D_mu(y,s) ds/s dmu(y), geometric ladder in s
// with trapezoid weights in log s. For atomic mu, D_mu vanishes below the
// inter-atom spacing, which motivates the s_min cutoff.
double reifenberg_hypothesis(const DiscreteMeasure& mu, const Vec3& x, double r,
                             double s_min);

// Hierarchical 1/10^k covering with the case (a)/(b) dichotomy, line tubes and
// the radius/5 Vitali selection.
struct CoverTree {
  struct Ball {
    Vec3 center{0, 0, 0};
    int parent = -1;
    bool case_single = false;  // case (a)
  };
  struct Level {
    double radius = 0;
    std::vector<Ball> balls;
    double packing_sum = 0;  // sum of radius/5 over balls
  };
  Vec3 root_center{0, 0, 0};
  double root_radius = 0;
  std::vector<Level> levels;  // level 0 = the root ball
};

CoverTree build_cover(const ZeroSet& zs, const Vec3& x, double r, int depth);

double packing_measure(const CoverTree& tree, int level);

// exact audits
bool vitali_ok(const CoverTree& tree, int level);
double coverage_fraction(const CoverTree& tree, int level, const ZeroSet& zs);

std::string cover_to_json(const CoverTree& tree);

void export_beta_csv(const std::vector<BetaResult>& recs, const std::string& path,
                     const std::string& meta);

}  // namespace lcd
