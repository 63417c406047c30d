#include "weiss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csvio.hpp"

namespace lcd {

double classical_weiss(const FieldAnalysis& fa, const Vec3& x, double r, double alpha,
                       const PotentialSpec& pot, int fib_points) {
  if (!(alpha >= 0)) throw std::invalid_argument("classical_weiss: alpha must be >= 0");
  ClassicalRecord c = fa.classical_quantities(x, r, pot, fib_points);
  return std::pow(r, -1.0 - 2.0*alpha)*c.D - alpha*std::pow(r, -2.0 - 2.0*alpha)*c.H;
}

double weiss_deficit(const FieldAnalysis& fa, const Vec3& x, double r) {
  const LineField& f = fa.field();
  const Grid& g = f.grid();
  const double h = g.h;
  if (r < 8.0*h) throw std::invalid_argument("weiss_deficit: r below resolution");
  if (!fa.admissible(x, 2.0*r))
    throw std::invalid_argument("weiss_deficit: ball not interior");

  double Nr = fa.smoothed_quantities(x, r).N_phi;

  // one frequency evaluation per radial shell of width h
  int kmin = std::max(1, int(std::floor(0.25*r/h)) - 1);
  int kmax = int(std::ceil(2.0*r/h)) + 1;
  std::vector<double> shellN(kmax + 2, 0.0);
  for (int k = kmin; k <= kmax + 1; ++k) {
    double s = std::max(k*h, 4.0*h);
    s = std::min(s, fa.max_admissible_radius(x));
    shellN[k] = fa.smoothed_quantities(x, s).N_phi;
  }

  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(1, int(std::ceil((x[a] - 2.0*r - h - g.origin[a])/h)));
    hi[a] = std::min(g.n - 2, int(std::floor((x[a] + 2.0*r + h - g.origin[a])/h)));
  }
  const double* raw = f.raw().data();
  double total = 0.0;
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int k = lo[2]; k <= hi[2]; ++k) {
        double dx = g.origin[0] + h*i - x[0];
        double dy = g.origin[1] + h*j - x[1];
        double dz = g.origin[2] + h*k - x[2];
        double d = std::sqrt(dx*dx + dy*dy + dz*dz);
        double w = std::clamp((d - 0.25*r)/h + 0.5, 0.0, 1.0) *
                   std::clamp((2.0*r - d)/h + 0.5, 0.0, 1.0);
        if (w <= 0.0 || d <= 0.0) continue;
        int shell = std::clamp(int(std::lround(d/h)), kmin, kmax + 1);
        double Ns = shellN[shell];
        std::int64_t id = g.index(i, j, k);
        const double* c = raw + 4*id;
        const std::int64_t off[3] = {std::int64_t(g.n)*g.n, g.n, 1};
        double rd[4] = {0, 0, 0, 0};
        double dxyz[3] = {dx, dy, dz};
        for (int ax = 0; ax < 3; ++ax) {
          const double* up = raw + 4*(id + off[ax]);
          const double* dn = raw + 4*(id - off[ax]);
          double su = (c[1]*up[1] + c[2]*up[2] + c[3]*up[3] < 0.0) ? -1.0 : 1.0;
          double sd = (c[1]*dn[1] + c[2]*dn[2] + c[3]*dn[3] < 0.0) ? -1.0 : 1.0;
          double inv2h = 0.5/h;
          rd[0] += dxyz[ax]*(up[0] - dn[0])*inv2h;
          rd[1] += dxyz[ax]*(su*up[1] - sd*dn[1])*inv2h;
          rd[2] += dxyz[ax]*(su*up[2] - sd*dn[2])*inv2h;
          rd[3] += dxyz[ax]*(su*up[3] - sd*dn[3])*inv2h;
        }
        double q0 = rd[0] - Ns*c[0];
        double q1 = rd[1] - Ns*c[1];
        double q2 = rd[2] - Ns*c[2];
        double q3 = rd[3] - Ns*c[3];
        total += w*(q0*q0 + q1*q1 + q2*q2 + q3*q3);
      }
  total *= h*h*h;
  return std::pow(r, -1.0 - 2.0*Nr)*total;
}

PinchingPair pinching_bound_eval(const FieldAnalysis& fa, const Vec3& x1, const Vec3& x2,
                                 double r, bool allow_clamp) {
  double sep = dist(x1, x2);
  if (sep > 0.25*r) throw std::invalid_argument("pinching_bound_eval: points too far");
  const double h = fa.field().grid().h;

  PinchingPair out;
  double slo = r/8.0, shi = 4.0*r;
  if (allow_clamp) {
    double cap = std::min(fa.max_admissible_radius(x1), fa.max_admissible_radius(x2));
    double lo = std::max(slo, 4.0*h), hi = std::min(shi, cap);
    if (!(hi > lo)) throw std::invalid_argument("pinching_bound_eval: no admissible window");
    out.clamped = (lo != slo) || (hi != shi);
    slo = lo; shi = hi;
  }
  double N1r = fa.smoothed_quantities(x1, r).N_phi;
  double N2r = fa.smoothed_quantities(x2, r).N_phi;
  out.W1 = fa.smoothed_quantities(x1, shi).N_phi - fa.smoothed_quantities(x1, slo).N_phi;
  out.W2 = fa.smoothed_quantities(x2, shi).N_phi - fa.smoothed_quantities(x2, slo).N_phi;
  out.lhs = std::abs(N1r - N2r);
  out.rhs_unscaled = (std::sqrt(std::max(0.0, out.W1)) +
                      std::sqrt(std::max(0.0, out.W2)))*sep/r;
  return out;
}

void export_weiss_csv(const std::vector<WeissReport>& recs, const std::string& path,
                      const std::string& meta) {
  CsvWriter w(path, meta);
  w.header("x1,x2,x3,r,alpha,weiss,deficit,pinching");
  for (const auto& rec : recs)
    w.row({rec.x[0], rec.x[1], rec.x[2], rec.r, rec.alpha, rec.value,
           rec.deficit, rec.pinching});
  w.close();
}

}  // namespace lcd
