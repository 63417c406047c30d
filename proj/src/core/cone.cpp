#include "cone.hpp"

#include <algorithm>
#include <stdexcept>

namespace lcd {

ConeParams::ConeParams(double kappa_) : kappa(kappa_) {
  if (!(kappa > 1.0))
    throw std::invalid_argument("ConeParams: kappa must be > 1");
  slope = std::sqrt(kappa - 1.0);
  link_radius = 1.0 / std::sqrt(kappa);
  alpha_star = 0.5 / std::sqrt(kappa);
}

bool ConePoint::on_cone(const ConeParams& p, double tol) const {
  double z2 = v[0]*v[0];
  double y2 = v[1]*v[1] + v[2]*v[2] + v[3]*v[3];
  if (v[0] < 0) return false;
  return std::abs(z2 - (p.kappa - 1.0)*y2) <= tol*(z2 + y2) + 1e-300;
}

bool ConePoint::equivalent(const ConePoint& o, double tol) const {
  auto close = [&](const Vec4& a, const Vec4& b) {
    for (int i = 0; i < 4; ++i)
      if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
  };
  return close(v, o.v) || close(v, o.flipped().v);
}

ConePoint project_to_cone(const Vec4& u, const ConeParams& p) {
  double zeta = u[0];
  Vec3 w{u[1], u[2], u[3]};
  double nw = norm(w);
  double rho = std::max(0.0, (p.slope*zeta + nw) / p.kappa);
  ConePoint out;
  out.v[0] = p.slope*rho;
  if (nw > 0) {
    double s = rho / nw;
    out.v[1] = s*w[0];
    out.v[2] = s*w[1];
    out.v[3] = s*w[2];
  } else if (zeta > 0) {
    out.v[1] = rho;  // deterministic director for the degenerate ray
  }
  return out;
}

double cone_distance(const ConePoint& a, const ConePoint& b, const ConeParams& p) {
  double t1 = a.norm(), t2 = b.norm();
  if (t1 == 0 || t2 == 0) return std::max(t1, t2);
  Vec3 ya = a.y(), yb = b.y();
  double na = norm(ya), nb = norm(yb);
  double theta_line = 0.0;
  if (na > 0 && nb > 0) {
    double c = std::abs(dot(ya, yb)) / (na*nb);
    theta_line = std::acos(std::clamp(c, -1.0, 1.0));
  }
  double psi = p.link_radius * theta_line;  // arc length on the link
  double theta = std::min(psi, M_PI);
  double d2 = t1*t1 + t2*t2 - 2.0*t1*t2*std::cos(theta);
  return std::sqrt(std::max(0.0, d2));
}

ConePoint cylindrical_oracle(const ConeParams& p, double c, const Vec3& x) {
  double rho = std::hypot(x[0], x[1]);
  if (rho == 0.0) return {};
  double th = std::atan2(x[1], x[0]);
  double t = c * std::pow(rho, p.alpha_star);
  double a = std::sqrt((p.kappa - 1.0) / p.kappa);
  double b = 1.0 / std::sqrt(p.kappa);
  return {{t*a, t*b*std::cos(0.5*th), t*b*std::sin(0.5*th), 0.0}};
}

double oracle_energy_density(const ConeParams& p, double c, double rho) {
  return c*c*std::pow(rho, 2.0*p.alpha_star - 2.0) / (2.0*p.kappa);
}

}  // namespace lcd
