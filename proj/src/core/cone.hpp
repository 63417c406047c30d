#pragma once

#include "geom.hpp"

namespace lcd {

// Target cone: points (z, y) in R x R^3 with z = sqrt(kappa-1)|y|, y ~ -y.
struct ConeParams {
  double kappa;
  double slope;        // sqrt(kappa - 1)
  double link_radius;  // 1/sqrt(kappa)
  double alpha_star;   // 1/(2 sqrt(kappa)), vanishing order of cylindrical defects

  explicit ConeParams(double kappa_);
};

inline constexpr double kConeTol = 1e-9;

// Representative of a point on the cone; the stored y sign is a gauge choice.
struct ConePoint {
  Vec4 v{0, 0, 0, 0};  // (z, y1, y2, y3)

  double z() const { return v[0]; }
  Vec3 y() const { return {v[1], v[2], v[3]}; }
  double norm() const { return lcd::norm(v); }
  ConePoint flipped() const { return {{v[0], -v[1], -v[2], -v[3]}}; }
  bool on_cone(const ConeParams& p, double tol = kConeTol) const;
  // equality as sign classes, up to tol in each representative
  bool equivalent(const ConePoint& o, double tol = 1e-12) const;
};

// Closed-form nearest point on the cone. Total: w = 0 resolves to the apex for
// zeta <= 0 and to the e1 direction otherwise.
ConePoint project_to_cone(const Vec4& v, const ConeParams& p);

// Intrinsic distance on the cone over the radius-1/sqrt(kappa) projective link.
// Developed-plane formula with angle min(arccos|n_a.n_b|/sqrt(kappa), pi).
double cone_distance(const ConePoint& a, const ConePoint& b, const ConeParams& p);

// Two-variable defect solution u = c r^a (sqrt((k-1)/k), (cos(th/2), sin(th/2), 0)/sqrt(k));
// zero set is exactly the x3-axis.
ConePoint cylindrical_oracle(const ConeParams& p, double c, const Vec3& x);

// Energy density of the oracle away from the axis: c^2 r^(2a-2) / (2 kappa).
double oracle_energy_density(const ConeParams& p, double c, double rho);

}  // namespace lcd
