#pragma once

#include <optional>
#include <string>
#include <vector>

#include "monotonicity.hpp"

namespace lcd {

struct ZeroSet {
  struct Point {
    Vec3 pos{0, 0, 0};
    double weight = 0;
  };
  std::vector<Point> points;
  std::vector<std::vector<int>> polylines;  // ordered point-index chains
};

// Scale-aware threshold c_est (2h)^alpha*; c_est is the median of |u|/rho^alpha*
// on a probe ring around the estimated defect column.
double estimate_tau(const LineField& f);

// Candidate nodes |u| < tau; one representative per candidate cluster (the
// |u|-minimizing candidate of each 26-neighborhood, lexicographic tie-break),
// refined by the quadratic fit of |u|^2 over the 3^3 stencil. Weight h.
ZeroSet extract_zero_set(const LineField& f, double tau);

// Greedy nearest-neighbor chaining with jump threshold gap; points with >= 3
// gap-neighbors are crossings and terminate arms.
ZeroSet link_curves(ZeroSet zs, double gap);

double arc_length(const ZeroSet& zs, int polyline);

struct DefectFrequency {
  std::vector<std::pair<Vec3, double>> values;  // admissible points only
  int skipped = 0;                              // too close to the boundary
  double min_N = 0, max_N = 0;
  double fraction_in_band = 0;  // within [1/(2 sqrt k) - 0.02, 1/(2 sqrt k) + delta]
  double fraction_above = 0;    // >= 1/(2 sqrt k) - 0.02
};

DefectFrequency frequency_along_defect(const FieldAnalysis& fa, const ZeroSet& zs,
                                       double r, double band_delta = 0.05);

struct TubeReport {
  double pinching1 = 0, pinching2 = 0;  // W at the two anchors, lemma scales
  double max_line_dist = 0;             // zero points in the scale ball vs line V
  double scale = 0;                     // ball radius used
  bool clamped = false;
};

TubeReport tube_confinement_check(const FieldAnalysis& fa, const ZeroSet& zs,
                                  const Vec3& x1, const Vec3& x2, double rho_hat);

struct MinkowskiResult {
  double volume = 0;
  double ratio = 0;  // volume / (r rho^2)
};

// rho-neighborhood volume of zs within the closed ball B_r(x), by counting
// voxel centers (lattice anchored at x) within rho of some zero point.
MinkowskiResult minkowski_content(const ZeroSet& zs, const Vec3& x, double r,
                                  double rho, double voxel);

void export_zero_set_csv(const ZeroSet& zs, const std::string& path,
                         const std::string& meta);

}  // namespace lcd
