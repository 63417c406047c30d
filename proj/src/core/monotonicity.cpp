#include "monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "csvio.hpp"
#include "parallel.hpp"

namespace lcd {

namespace {

// fractional cell coverage across a radius-R boundary, linear over +-h/2
inline double smear_in(double d, double R, double h) {
  return std::clamp((R - d)/h + 0.5, 0.0, 1.0);
}
inline double smear_annulus(double d, double lo, double hi, double h) {
  return std::clamp((d - lo)/h + 0.5, 0.0, 1.0) * std::clamp((hi - d)/h + 0.5, 0.0, 1.0);
}

// cell integrals of rho^(2a-2) over unit squares centered at integer offsets
double cusp_cell_integral(int di, int dj, double alpha) {
  if (di == 0 && dj == 0) {
    // polar form: (1/2a) mean of R(th)^(2a) over th, R = 0.5/max(|cos|,|sin|)
    const int M = 8192;
    double s = 0.0;
    for (int m = 0; m < M; ++m) {
      double th = (m + 0.5) * (2.0*M_PI/M);
      double R = 0.5/std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
      s += std::pow(R, 2.0*alpha);
    }
    return (s/M) * 2.0*M_PI / (2.0*alpha);
  }
  const int M = 160;
  double s = 0.0;
  for (int a = 0; a < M; ++a) {
    double x = di - 0.5 + (a + 0.5)/M;
    for (int b = 0; b < M; ++b) {
      double y = dj - 0.5 + (b + 0.5)/M;
      s += std::pow(x*x + y*y, alpha - 1.0);
    }
  }
  return s/(double(M)*M);
}

struct Fib {
  std::vector<Vec3> dirs;
  explicit Fib(int M) {
    dirs.reserve(M);
    double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < M; ++i) {
      double z = 1.0 - (2.0*i + 1.0)/M;
      double rho = std::sqrt(std::max(0.0, 1.0 - z*z));
      dirs.push_back({rho*std::cos(ga*i), rho*std::sin(ga*i), z});
    }
  }
};

}  // namespace

FieldAnalysis::FieldAnalysis(const LineField& f, int threads, double apex_tol)
    : f_(&f), threads_(threads) {
  build_density();
  apply_patch(apex_tol);
}

void FieldAnalysis::build_density() {
  const Grid& g = f_->grid();
  const int n = g.n;
  dens_.assign(g.num_nodes(), std::numeric_limits<double>::quiet_NaN());
  const double* raw = f_->raw().data();
  const double inv2h = 0.5/g.h;
  parallel_for_blocks(g.num_nodes(), threads_,
                      [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t id = lo; id < hi; ++id) {
      int k = int(id % n);
      int j = int((id / n) % n);
      int i = int(id / (std::int64_t(n)*n));
      if (!g.interior(i, j, k)) continue;
      const double* c = raw + 4*id;
      double total = 0.0;
      const std::int64_t off[3] = {std::int64_t(n)*n, n, 1};
      for (int ax = 0; ax < 3; ++ax) {
        const double* up = raw + 4*(id + off[ax]);
        const double* dn = raw + 4*(id - off[ax]);
        double su = (c[1]*up[1] + c[2]*up[2] + c[3]*up[3] < 0.0) ? -1.0 : 1.0;
        double sd = (c[1]*dn[1] + c[2]*dn[2] + c[3]*dn[3] < 0.0) ? -1.0 : 1.0;
        double g0 = (up[0] - dn[0]) * inv2h;
        double g1 = (su*up[1] - sd*dn[1]) * inv2h;
        double g2 = (su*up[2] - sd*dn[2]) * inv2h;
        double g3 = (su*up[3] - sd*dn[3]) * inv2h;
        total += g0*g0 + g1*g1 + g2*g2 + g3*g3;
      }
      dens_[id] = total;
    }
  });
}

void FieldAnalysis::apply_patch(double apex_tol) {
  const Grid& g = f_->grid();
  const int n = g.n;
  const double h = g.h;
  std::map<std::pair<long, int>, double> cache;  // (alpha quantized, cell key) -> integral
  auto cell_I = [&](double alpha, int di, int dj) {
    int a = std::abs(di), b = std::abs(dj);
    if (a < b) std::swap(a, b);
    std::pair<long, int> key{std::lround(alpha*1e6), a*8 + b};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double v = cusp_cell_integral(a, b, alpha);
    cache[key] = v;
    return v;
  };

  const int P = 3;  // transverse patch radius in cells
  for (int i = 2; i < n - 2; ++i)
    for (int j = 2; j < n - 2; ++j)
      for (int k = 2; k < n - 2; ++k) {
        double v = f_->node_norm(i, j, k);
        double nb[6] = {f_->node_norm(i-1,j,k), f_->node_norm(i+1,j,k),
                        f_->node_norm(i,j-1,k), f_->node_norm(i,j+1,k),
                        f_->node_norm(i,j,k-1), f_->node_norm(i,j,k+1)};
        double mx = *std::max_element(nb, nb + 6);
        if (!(mx > 0.0) || v >= apex_tol*mx) continue;
        // defect direction = axis whose neighbor norms are jointly smallest
        double sums[3] = {nb[0]+nb[1], nb[2]+nb[3], nb[4]+nb[5]};
        int dax = int(std::min_element(sums, sums + 3) - sums);
        int t1 = (dax == 0) ? 1 : 0;
        int t2 = (dax == 2) ? 1 : 2;
        int idx[3] = {i, j, k};
        auto norm_at = [&](int o1, int o2) -> double {
          int q[3] = {idx[0], idx[1], idx[2]};
          q[t1] += o1; q[t2] += o2;
          if (q[0] < 0 || q[1] < 0 || q[2] < 0 || q[0] >= n || q[1] >= n || q[2] >= n)
            return -1.0;
          return f_->node_norm(q[0], q[1], q[2]);
        };
        double r1[4] = {norm_at(1,0), norm_at(-1,0), norm_at(0,1), norm_at(0,-1)};
        double r2[4] = {norm_at(2,0), norm_at(-2,0), norm_at(0,2), norm_at(0,-2)};
        bool ok = true;
        double alog = 0.0, T2 = 0.0;
        for (int m = 0; m < 4; ++m) {
          if (r1[m] <= 0 || r2[m] <= 0) { ok = false; break; }
          alog += std::log(r2[m]/r1[m]);
          T2 += r1[m]*r1[m];
        }
        if (!ok) continue;
        double alpha = std::clamp(alog/(4.0*std::log(2.0)), 0.05, 1.2);
        T2 = 0.25*T2/std::pow(h, 2.0*alpha);
        double base = 2.0*alpha*alpha*T2*std::pow(h, 2.0*alpha - 2.0);
        for (int o1 = -P; o1 <= P; ++o1)
          for (int o2 = -P; o2 <= P; ++o2) {
            int q[3] = {idx[0], idx[1], idx[2]};
            q[t1] += o1; q[t2] += o2;
            if (q[0] <= 0 || q[1] <= 0 || q[2] <= 0 ||
                q[0] >= n - 1 || q[1] >= n - 1 || q[2] >= n - 1)
              continue;
            dens_[g.index(q[0], q[1], q[2])] = base*cell_I(alpha, o1, o2);
          }
        ++patched_;
      }
}

bool FieldAnalysis::admissible(const Vec3& x, double r) const {
  const Grid& g = f_->grid();
  if (r < 4.0*g.h) return false;
  for (int a = 0; a < 3; ++a) {
    if (x[a] - r - g.h < g.origin[a] + g.h) return false;
    if (x[a] + r + g.h > g.origin[a] + g.extent() - g.h) return false;
  }
  return true;
}

double FieldAnalysis::max_admissible_radius(const Vec3& x) const {
  const Grid& g = f_->grid();
  double r = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    r = std::min(r, x[a] - (g.origin[a] + g.h) - g.h);
    r = std::min(r, (g.origin[a] + g.extent() - g.h) - x[a] - g.h);
  }
  return r;
}

FrequencyRecord FieldAnalysis::smoothed_quantities(const Vec3& x, double r) const {
  const Grid& g = f_->grid();
  const double h = g.h;
  if (r < 4.0*h) throw std::invalid_argument("smoothed_quantities: r below resolution");
  if (!admissible(x, r)) throw std::invalid_argument("smoothed_quantities: ball not interior");

  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(1, int(std::ceil((x[a] - r - h - g.origin[a])/h)));
    hi[a] = std::min(g.n - 2, int(std::floor((x[a] + r + h - g.origin[a])/h)));
  }
  const double* raw = f_->raw().data();
  const double h3 = h*h*h;
  const std::int64_t nrows = std::int64_t(hi[0] - lo[0] + 1)*(hi[1] - lo[1] + 1);

  struct Acc { double D, H, E; };
  std::vector<Acc> parts((nrows + 0), Acc{0, 0, 0});
  parallel_for_blocks(nrows, threads_, [&](std::int64_t, std::int64_t blo, std::int64_t bhi) {
    for (std::int64_t row = blo; row < bhi; ++row) {
      int i = lo[0] + int(row / (hi[1] - lo[1] + 1));
      int j = lo[1] + int(row % (hi[1] - lo[1] + 1));
      double dx = g.origin[0] + h*i - x[0];
      double dy = g.origin[1] + h*j - x[1];
      Acc acc{0, 0, 0};
      for (int k = lo[2]; k <= hi[2]; ++k) {
        double dz = g.origin[2] + h*k - x[2];
        double d = std::sqrt(dx*dx + dy*dy + dz*dz);
        if (d > r + h) continue;
        std::int64_t id = g.index(i, j, k);
        acc.D += dens_[id]*CutoffProfile::phi(d/r);
        double w = smear_annulus(d, 0.5*r, r, h);
        if (w > 0.0 && d > 0.0) {
          const double* c = raw + 4*id;
          double u2 = c[0]*c[0] + c[1]*c[1] + c[2]*c[2] + c[3]*c[3];
          acc.H += w*2.0*u2/d;
          // |d_nu u|^2 from the aligned central differences
          const std::int64_t off[3] = {std::int64_t(g.n)*g.n, g.n, 1};
          double nu[3] = {dx/d, dy/d, dz/d};
          double gn[4] = {0, 0, 0, 0};
          for (int ax = 0; ax < 3; ++ax) {
            const double* up = raw + 4*(id + off[ax]);
            const double* dn = raw + 4*(id - off[ax]);
            double su = (c[1]*up[1] + c[2]*up[2] + c[3]*up[3] < 0.0) ? -1.0 : 1.0;
            double sd = (c[1]*dn[1] + c[2]*dn[2] + c[3]*dn[3] < 0.0) ? -1.0 : 1.0;
            double inv2h = 0.5/h;
            gn[0] += nu[ax]*(up[0] - dn[0])*inv2h;
            gn[1] += nu[ax]*(su*up[1] - sd*dn[1])*inv2h;
            gn[2] += nu[ax]*(su*up[2] - sd*dn[2])*inv2h;
            gn[3] += nu[ax]*(su*up[3] - sd*dn[3])*inv2h;
          }
          acc.E += w*2.0*d*(gn[0]*gn[0] + gn[1]*gn[1] + gn[2]*gn[2] + gn[3]*gn[3]);
        }
      }
      parts[row] = acc;
    }
  });
  FrequencyRecord rec;
  rec.x = x;
  rec.r = r;
  for (const Acc& a : parts) {
    rec.D_phi += a.D;
    rec.H_phi += a.H;
    rec.E_phi += a.E;
  }
  rec.D_phi *= h3;
  rec.H_phi *= h3;
  rec.E_phi *= h3;
  if (!(rec.H_phi > 0)) throw std::runtime_error("smoothed_quantities: degenerate height");
  rec.N_phi = r*rec.D_phi/rec.H_phi;
  return rec;
}

ClassicalRecord FieldAnalysis::classical_quantities(const Vec3& x, double r,
                                                    const PotentialSpec& pot,
                                                    int fib_points) const {
  const Grid& g = f_->grid();
  const double h = g.h;
  if (r < 4.0*h) throw std::invalid_argument("classical_quantities: r below resolution");
  if (!admissible(x, r)) throw std::invalid_argument("classical_quantities: ball not interior");

  const double inv_sqrt_kappa = 1.0/std::sqrt(f_->params().kappa);
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(1, int(std::ceil((x[a] - r - h - g.origin[a])/h)));
    hi[a] = std::min(g.n - 2, int(std::floor((x[a] + r + h - g.origin[a])/h)));
  }
  double D = 0.0, pot_term = 0.0;
  const double* raw = f_->raw().data();
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j) {
      double dx = g.origin[0] + h*i - x[0];
      double dy = g.origin[1] + h*j - x[1];
      for (int k = lo[2]; k <= hi[2]; ++k) {
        double dz = g.origin[2] + h*k - x[2];
        double d = std::sqrt(dx*dx + dy*dy + dz*dz);
        double w = smear_in(d, r, h);
        if (w <= 0.0) continue;
        std::int64_t id = g.index(i, j, k);
        D += w*dens_[id];
        if (pot.enabled) {
          const double* c = raw + 4*id;
          double nu = std::sqrt(c[0]*c[0] + c[1]*c[1] + c[2]*c[2] + c[3]*c[3]);
          double s = inv_sqrt_kappa*nu;
          pot_term += w*pot.dpsi(s)*s;
        }
      }
    }
  double h3 = h*h*h;
  D *= h3;
  pot_term *= h3;

  // sphere integral of |u|^2: Fibonacci directions + trilinear interpolation
  static thread_local std::map<int, Fib> fib_cache;
  auto it = fib_cache.find(fib_points);
  if (it == fib_cache.end()) it = fib_cache.emplace(fib_points, Fib(fib_points)).first;
  const auto& dirs = it->second.dirs;
  double H = 0.0;
  for (const Vec3& dir : dirs) {
    Vec3 p = x + r*dir;
    double q[3];
    int i0[3];
    for (int a = 0; a < 3; ++a) {
      q[a] = (p[a] - g.origin[a])/h;
      i0[a] = std::clamp(int(std::floor(q[a])), 0, g.n - 2);
      q[a] -= i0[a];
    }
    double acc = 0.0;
    for (int da = 0; da < 2; ++da)
      for (int db = 0; db < 2; ++db)
        for (int dc = 0; dc < 2; ++dc) {
          double w = (da ? q[0] : 1 - q[0])*(db ? q[1] : 1 - q[1])*(dc ? q[2] : 1 - q[2]);
          const double* c = raw + 4*g.index(i0[0] + da, i0[1] + db, i0[2] + dc);
          acc += w*(c[0]*c[0] + c[1]*c[1] + c[2]*c[2] + c[3]*c[3]);
        }
    H += acc;
  }
  H *= 4.0*M_PI*r*r/fib_points;

  ClassicalRecord rec;
  rec.D = D;
  rec.H = H;
  if (!(H > 0)) throw std::runtime_error("classical_quantities: degenerate height");
  rec.N = r*D/H;
  rec.D_tilde = D + (pot.enabled ? pot_term : 0.0);
  rec.N_tilde = std::exp(pot.lambda*r)*r*rec.D_tilde/H;
  return rec;
}

double FieldAnalysis::pinching(const Vec3& x, double s, double r) const {
  if (!(s > 0) || s > r) throw std::invalid_argument("pinching: need 0 < s <= r");
  if (s == r) return 0.0;
  return smoothed_quantities(x, r).N_phi - smoothed_quantities(x, s).N_phi;
}

IdentityReport FieldAnalysis::verify_identities(const Vec3& x, double r, const Vec3& v) const {
  const Grid& g = f_->grid();
  const double h = g.h;
  auto rel = [](double a, double b) {
    return std::abs(a - b)/std::max({std::abs(a), std::abs(b), 1e-300});
  };

  FrequencyRecord q0 = smoothed_quantities(x, r);
  FrequencyRecord qp = smoothed_quantities(x, r + h);
  FrequencyRecord qm = smoothed_quantities(x, r - h);

  // direct quadratures of the annulus integrands for (11), (13), (15)
  const double* raw = f_->raw().data();
  int lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(1, int(std::ceil((x[a] - r - h - g.origin[a])/h)));
    hi[a] = std::min(g.n - 2, int(std::floor((x[a] + r + h - g.origin[a])/h)));
  }
  double nv = norm(v);
  Vec3 vh = (nv > 0) ? (1.0/nv)*v : Vec3{1, 0, 0};
  double ibp = 0.0, dvD = 0.0, dvH = 0.0;
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int k = lo[2]; k <= hi[2]; ++k) {
        double dx = g.origin[0] + h*i - x[0];
        double dy = g.origin[1] + h*j - x[1];
        double dz = g.origin[2] + h*k - x[2];
        double d = std::sqrt(dx*dx + dy*dy + dz*dz);
        double w = smear_annulus(d, 0.5*r, r, h);
        if (w <= 0.0 || d <= 0.0) continue;
        std::int64_t id = g.index(i, j, k);
        const double* c = raw + 4*id;
        const std::int64_t off[3] = {std::int64_t(g.n)*g.n, g.n, 1};
        double nu[3] = {dx/d, dy/d, dz/d};
        double gn[4] = {0, 0, 0, 0}, gv[4] = {0, 0, 0, 0};
        for (int ax = 0; ax < 3; ++ax) {
          const double* up = raw + 4*(id + off[ax]);
          const double* dn = raw + 4*(id - off[ax]);
          double su = (c[1]*up[1] + c[2]*up[2] + c[3]*up[3] < 0.0) ? -1.0 : 1.0;
          double sd = (c[1]*dn[1] + c[2]*dn[2] + c[3]*dn[3] < 0.0) ? -1.0 : 1.0;
          double inv2h = 0.5/h;
          double ga[4] = {(up[0] - dn[0])*inv2h, (su*up[1] - sd*dn[1])*inv2h,
                          (su*up[2] - sd*dn[2])*inv2h, (su*up[3] - sd*dn[3])*inv2h};
          for (int m = 0; m < 4; ++m) {
            gn[m] += nu[ax]*ga[m];
            gv[m] += vh[ax]*ga[m];
          }
        }
        double gu = gn[0]*c[0] + gn[1]*c[1] + gn[2]*c[2] + gn[3]*c[3];
        double gvu = gv[0]*c[0] + gv[1]*c[1] + gv[2]*c[2] + gv[3]*c[3];
        double gngv = gn[0]*gv[0] + gn[1]*gv[1] + gn[2]*gv[2] + gn[3]*gv[3];
        ibp += w*2.0*gu;
        dvD += w*2.0*gngv;
        dvH += w*2.0*gvu/d;
      }
  double h3 = h*h*h;
  ibp *= h3/r;
  dvD *= 2.0*h3/r;
  dvH *= 2.0*h3;

  double step = h;
  FrequencyRecord sp = smoothed_quantities(x + step*vh, r);
  FrequencyRecord sm = smoothed_quantities(x - step*vh, r);

  IdentityReport rep;
  rep.res_ibp = rel(q0.D_phi, ibp);
  rep.res_dr_D = rel((qp.D_phi - qm.D_phi)/(2.0*h), q0.D_phi/r + 2.0*q0.E_phi/(r*r));
  rep.res_dv_D = rel((sp.D_phi - sm.D_phi)/(2.0*step), dvD);
  rep.res_dr_H = rel((qp.H_phi - qm.H_phi)/(2.0*h), 2.0*q0.H_phi/r + 2.0*q0.D_phi);
  rep.res_dv_H = rel((sp.H_phi - sm.H_phi)/(2.0*step), dvH);
  rep.dr_N = (qp.N_phi - qm.N_phi)/(2.0*h);
  double lhs18 = (std::log(qp.H_phi/((r + h)*(r + h))) -
                  std::log(qm.H_phi/((r - h)*(r - h))))/(2.0*h);
  rep.res_log_height = rel(lhs18, 2.0*q0.N_phi/r);
  return rep;
}

LocalBoundsReport FieldAnalysis::local_bounds_check(const Vec3& x, const Vec3& y,
                                                    double rho) const {
  if (dist(x, y) > rho)
    throw std::invalid_argument("local_bounds_check: y must lie in B_rho(x)");
  LocalBoundsReport rep;
  rep.height_ratio = smoothed_quantities(y, rho).H_phi /
                     smoothed_quantities(x, 4.0*rho).H_phi;
  rep.freq_ratio = smoothed_quantities(y, rho).N_phi /
                   (smoothed_quantities(x, 16.0*rho).N_phi + 1.0);
  return rep;
}

void export_frequency_csv(const std::vector<FrequencyRecord>& recs,
                          const std::string& path, const std::string& meta) {
  CsvWriter w(path, meta);
  w.header("x1,x2,x3,r,D_phi,H_phi,E_phi,N_phi");
  for (const auto& r : recs)
    w.row({r.x[0], r.x[1], r.x[2], r.r, r.D_phi, r.H_phi, r.E_phi, r.N_phi});
  w.close();
}

}  // namespace lcd
