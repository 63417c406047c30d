#include "energy.hpp"

#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace lcd {

PotentialSpec::PotentialSpec(bool enabled_, double a_, double s_star_, double kappa)
    : enabled(enabled_), a(a_), s_star(s_star_) {
  if (a < 0) throw std::invalid_argument("PotentialSpec: a must be >= 0");
  if (!(s_star > 0 && s_star < 1))
    throw std::invalid_argument("PotentialSpec: s_star must be in (0,1)");
  lambda = enabled ? bound_M() * std::sqrt(kappa) : 0.0;
}

double discrete_energy(const LineField& f, const PotentialSpec& pot, int threads) {
  const Grid& g = f.grid();
  const int n = g.n;
  const double h = g.h;
  const double* raw = f.raw().data();
  auto edge = [&](std::int64_t ia, std::int64_t ib) {
    const double* a = raw + 4*ia;
    const double* b = raw + 4*ib;
    double dz = a[0] - b[0];
    double p = a[1]*b[1] + a[2]*b[2] + a[3]*b[3];
    double ya = a[1]*a[1] + a[2]*a[2] + a[3]*a[3];
    double yb = b[1]*b[1] + b[2]*b[2] + b[3]*b[3];
    // |ya - s yb|^2 minimized over the sign s
    return dz*dz + ya + yb - 2.0*std::abs(p);
  };
  // edges along each axis, k fastest; deterministic block reduction
  double dir = parallel_sum(g.num_nodes(), threads, [&](std::int64_t id) {
    int k = int(id % n);
    int j = int((id / n) % n);
    int i = int(id / (std::int64_t(n) * n));
    double s = 0.0;
    if (i + 1 < n) s += edge(id, g.index(i + 1, j, k));
    if (j + 1 < n) s += edge(id, g.index(i, j + 1, k));
    if (k + 1 < n) s += edge(id, id + 1);
    return s;
  });
  double total = dir * h;  // (1/h^2) * h^3
  if (pot.enabled) {
    double inv_sqrt_kappa = 1.0 / std::sqrt(f.params().kappa);
    double pe = parallel_sum(g.num_nodes(), threads, [&](std::int64_t id) {
      const double* a = raw + 4*id;
      double nu = std::sqrt(a[0]*a[0] + a[1]*a[1] + a[2]*a[2] + a[3]*a[3]);
      return pot.psi(inv_sqrt_kappa * nu);
    });
    total += pe * h * h * h;
  }
  return total;
}

EnergyTrace relax(LineField& f, const PotentialSpec& pot, int max_sweeps,
                  double tol, int threads) {
  if (!(tol > 0)) throw std::invalid_argument("relax: tol must be > 0");
  const Grid& g = f.grid();
  const int n = g.n;
  const double h = g.h;
  const ConeParams params = f.params();
  const double inv_sqrt_kappa = 1.0 / std::sqrt(params.kappa);
  const double step = h * h / 12.0;

  EnergyTrace trace;
  trace.energies.push_back(discrete_energy(f, pot, threads));

  auto update_color = [&](int color) {
    double* raw = f.raw().data();
    parallel_for_blocks(g.num_nodes(), threads,
                        [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
      for (std::int64_t id = lo; id < hi; ++id) {
        int k = int(id % n);
        int j = int((id / n) % n);
        int i = int(id / (std::int64_t(n) * n));
        if (((i + j + k) & 1) != color) continue;
        if (f.boundary(i, j, k)) continue;
        const double* c = raw + 4*id;
        double mean[4] = {0, 0, 0, 0};
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        for (int m = 0; m < 6; ++m) {
          const double* b = raw + 4*g.index(i + di[m], j + dj[m], k + dk[m]);
          double p = c[1]*b[1] + c[2]*b[2] + c[3]*b[3];
          double s = (p < 0.0) ? -1.0 : 1.0;
          mean[0] += b[0];
          mean[1] += s*b[1];
          mean[2] += s*b[2];
          mean[3] += s*b[3];
        }
        for (double& m : mean) m /= 6.0;
        if (pot.enabled) {
          double nm = std::sqrt(mean[0]*mean[0] + mean[1]*mean[1] +
                                mean[2]*mean[2] + mean[3]*mean[3]);
          if (nm > 0) {
            double coef = step * pot.dpsi(inv_sqrt_kappa*nm) * inv_sqrt_kappa / nm;
            for (double& m : mean) m -= coef * m;
          }
        }
        ConePoint pr = project_to_cone({mean[0], mean[1], mean[2], mean[3]}, params);
        double* out = raw + 4*id;
        out[0] = pr.v[0]; out[1] = pr.v[1]; out[2] = pr.v[2]; out[3] = pr.v[3];
      }
    });
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    update_color(0);
    update_color(1);
    double e = discrete_energy(f, pot, threads);
    if (!std::isfinite(e)) throw std::runtime_error("relax: divergence");
    double prev = trace.energies.back();
    trace.energies.push_back(e);
    trace.sweeps = sweep + 1;
    trace.residual = (prev - e) / std::max(std::abs(e), 1e-300);
    if (trace.residual < tol) break;
  }
  return trace;
}

}  // namespace lcd
