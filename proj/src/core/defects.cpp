#include "defects.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "csvio.hpp"

namespace lcd {

namespace {

// 10-parameter quadratic least squares over the 3^3 stencil, normal equations
// solved once. Basis: 1, x, y, z, x^2, y^2, z^2, xy, xz, yz  (offsets in {-1,0,1}).
struct QuadFit {
  std::array<std::array<double, 27>, 10> pinv{};
  QuadFit() {
    double A[27][10];
    int row = 0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          double* q = A[row++];
          q[0] = 1; q[1] = a; q[2] = b; q[3] = c;
          q[4] = a*a; q[5] = b*b; q[6] = c*c;
          q[7] = a*b; q[8] = a*c; q[9] = b*c;
        }
    double M[10][20];  // [A^T A | I]
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        double s = 0;
        for (int r = 0; r < 27; ++r) s += A[r][i]*A[r][j];
        M[i][j] = s;
      }
      for (int j = 0; j < 10; ++j) M[i][10 + j] = (i == j) ? 1.0 : 0.0;
    }
    for (int col = 0; col < 10; ++col) {
      int piv = col;
      for (int r = col + 1; r < 10; ++r)
        if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
      std::swap(M[piv], M[col]);
      double d = M[col][col];
      for (int j = 0; j < 20; ++j) M[col][j] /= d;
      for (int r = 0; r < 10; ++r) {
        if (r == col) continue;
        double f = M[r][col];
        for (int j = 0; j < 20; ++j) M[r][j] -= f*M[col][j];
      }
    }
    // pinv = (A^T A)^-1 A^T
    for (int i = 0; i < 10; ++i)
      for (int r = 0; r < 27; ++r) {
        double s = 0;
        for (int j = 0; j < 10; ++j) s += M[i][10 + j]*A[r][j];
        pinv[i][r] = s;
      }
  }
};

const QuadFit& quad_fit() {
  static QuadFit qf;
  return qf;
}

// minimize the fitted quadratic over [-1,1]^3 (stencil units)
Vec3 minimize_quadratic(const std::array<double, 10>& c) {
  double H[3][3] = {{2*c[4], c[7], c[8]}, {c[7], 2*c[5], c[9]}, {c[8], c[9], 2*c[6]}};
  double b[3] = {-c[1], -c[2], -c[3]};
  // solve H xi = b by Gaussian elimination with pivoting; fall back to origin
  double M[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M[i][j] = H[i][j];
    M[i][3] = b[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    std::swap(M[piv], M[col]);
    if (std::abs(M[col][col]) < 1e-12) return {0, 0, 0};
    for (int r = col + 1; r < 3; ++r) {
      double f = M[r][col]/M[col][col];
      for (int j = col; j < 4; ++j) M[r][j] -= f*M[col][j];
    }
  }
  double xi[3];
  for (int i = 2; i >= 0; --i) {
    double s = M[i][3];
    for (int j = i + 1; j < 3; ++j) s -= M[i][j]*xi[j];
    xi[i] = s/M[i][i];
  }
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = std::clamp(xi[a], -1.0, 1.0);
  return out;
}

}  // namespace

double estimate_tau(const LineField& f) {
  const Grid& g = f.grid();
  int n = g.n;
  int kz = n/2;
  // defect column estimate: min |u| in the central layer
  int bi = 1, bj = 1;
  double bv = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j) {
      double v = f.node_norm(i, j, kz);
      if (v < bv) { bv = v; bi = i; bj = j; }
    }
  Vec3 axis = g.position(bi, bj, kz);
  double half = 0.5*g.extent();
  double alpha = f.params().alpha_star;
  std::vector<double> samples;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j) {
      Vec3 p = g.position(i, j, kz);
      double rho = std::hypot(p[0] - axis[0], p[1] - axis[1]);
      if (rho > 0.2*half && rho < 0.3*half)
        samples.push_back(f.node_norm(i, j, kz)/std::pow(rho, alpha));
    }
  if (samples.empty()) throw std::runtime_error("estimate_tau: empty probe ring");
  std::nth_element(samples.begin(), samples.begin() + samples.size()/2, samples.end());
  double c_est = samples[samples.size()/2];
  return c_est*std::pow(2.0*g.h, alpha);
}

ZeroSet extract_zero_set(const LineField& f, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("extract_zero_set: tau must be > 0");
  const Grid& g = f.grid();
  const int n = g.n;
  std::vector<std::uint8_t> cand(g.num_nodes(), 0);
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k)
        if (f.node_norm(i, j, k) < tau) cand[g.index(i, j, k)] = 1;

  ZeroSet zs;
  const auto& qf = quad_fit();
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k) {
        if (!cand[g.index(i, j, k)]) continue;
        double v = f.node_norm(i, j, k);
        bool rep = true;
        for (int a = -1; a <= 1 && rep; ++a)
          for (int b = -1; b <= 1 && rep; ++b)
            for (int c = -1; c <= 1 && rep; ++c) {
              if (!a && !b && !c) continue;
              int ii = i + a, jj = j + b, kk = k + c;
              if (ii < 1 || jj < 1 || kk < 1 || ii >= n - 1 || jj >= n - 1 || kk >= n - 1)
                continue;
              if (!cand[g.index(ii, jj, kk)]) continue;
              double w = f.node_norm(ii, jj, kk);
              if (w < v || (w == v && std::array<int,3>{ii,jj,kk} < std::array<int,3>{i,j,k}))
                rep = false;
            }
        if (!rep) continue;
        // quadratic fit of |u|^2 over the stencil
        std::array<double, 10> coef{};
        int row = 0;
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c) {
              double nu = f.node_norm(i + a, j + b, k + c);
              double f2 = nu*nu;
              for (int m = 0; m < 10; ++m) coef[m] += qf.pinv[m][row]*f2;
              ++row;
            }
        Vec3 xi = minimize_quadratic(coef);
        Vec3 p = g.position(i, j, k) + g.h*xi;
        for (int a = 0; a < 3; ++a)
          p[a] = std::clamp(p[a], g.origin[a], g.origin[a] + g.extent());
        zs.points.push_back({p, g.h});
      }
  return zs;
}

ZeroSet link_curves(ZeroSet zs, double gap) {
  if (!(gap > 0)) throw std::invalid_argument("link_curves: gap must be > 0");
  int N = int(zs.points.size());
  zs.polylines.clear();
  if (N == 0) return zs;
  std::vector<std::vector<int>> nbr(N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (dist(zs.points[i].pos, zs.points[j].pos) <= gap) {
        nbr[i].push_back(j);
        nbr[j].push_back(i);
      }
  std::vector<char> crossing(N, 0), used(N, 0);
  for (int i = 0; i < N; ++i) crossing[i] = nbr[i].size() >= 3;

  auto walk = [&](int start) {
    std::vector<int> chain{start};
    used[start] = 1;
    int cur = start;
    for (;;) {
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int nb : nbr[cur]) {
        if (used[nb]) continue;
        double d = dist(zs.points[cur].pos, zs.points[nb].pos);
        if (d < bd || (d == bd && nb < best)) { bd = d; best = nb; }
      }
      if (best < 0) break;
      chain.push_back(best);
      if (crossing[best]) break;  // crossings terminate arms and stay reusable
      used[best] = 1;
      cur = best;
    }
    return chain;
  };

  // endpoints first, then whatever remains (loops)
  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return nbr[a].size() < nbr[b].size();
  });
  for (int idx : order) {
    if (used[idx] || crossing[idx]) continue;
    auto chain = walk(idx);
    // extend backwards from the start if possible
    std::vector<int> back;
    int cur = idx;
    for (;;) {
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int nb : nbr[cur]) {
        if (used[nb]) continue;
        double d = dist(zs.points[cur].pos, zs.points[nb].pos);
        if (d < bd || (d == bd && nb < best)) { bd = d; best = nb; }
      }
      if (best < 0) break;
      back.push_back(best);
      if (crossing[best]) break;
      used[best] = 1;
      cur = best;
    }
    std::reverse(back.begin(), back.end());
    back.insert(back.end(), chain.begin(), chain.end());
    if (back.size() >= 2) zs.polylines.push_back(std::move(back));
    else if (back.size() == 1 && nbr[idx].empty()) zs.polylines.push_back(std::move(back));
  }
  return zs;
}

double arc_length(const ZeroSet& zs, int polyline) {
  if (polyline < 0 || polyline >= int(zs.polylines.size()))
    throw std::invalid_argument("arc_length: no such polyline");
  const auto& pl = zs.polylines[polyline];
  double L = 0;
  for (size_t i = 1; i < pl.size(); ++i)
    L += dist(zs.points[pl[i - 1]].pos, zs.points[pl[i]].pos);
  return L;
}

DefectFrequency frequency_along_defect(const FieldAnalysis& fa, const ZeroSet& zs,
                                       double r, double band_delta) {
  DefectFrequency out;
  double alpha = fa.field().params().alpha_star;
  int in_band = 0, above = 0;
  for (const auto& p : zs.points) {
    if (!fa.admissible(p.pos, r)) { ++out.skipped; continue; }
    double N = fa.smoothed_quantities(p.pos, r).N_phi;
    out.values.push_back({p.pos, N});
    if (N >= alpha - 0.02) {
      ++above;
      if (N <= alpha + band_delta) ++in_band;
    }
  }
  if (!out.values.empty()) {
    out.min_N = out.max_N = out.values.front().second;
    for (auto& [_, N] : out.values) {
      out.min_N = std::min(out.min_N, N);
      out.max_N = std::max(out.max_N, N);
    }
    out.fraction_in_band = double(in_band)/out.values.size();
    out.fraction_above = double(above)/out.values.size();
  }
  return out;
}

TubeReport tube_confinement_check(const FieldAnalysis& fa, const ZeroSet& zs,
                                  const Vec3& x1, const Vec3& x2, double rho_hat) {
  double sep = dist(x1, x2);
  if (!(sep > 0)) throw std::invalid_argument("tube_confinement_check: x1 == x2");
  TubeReport rep;
  rep.scale = 2.0*sep;
  double cap = std::min(fa.max_admissible_radius(x1), fa.max_admissible_radius(x2));
  double h = fa.field().grid().h;
  double hi = std::min(2.0*rep.scale, cap);
  double lo = std::max(std::max(rho_hat, 0.1)*rep.scale, 4.0*h);
  if (!(hi > lo)) throw std::invalid_argument("tube_confinement_check: no admissible window");
  rep.clamped = (hi != 2.0*rep.scale) || (lo != std::max(rho_hat, 0.1)*rep.scale);
  rep.pinching1 = fa.smoothed_quantities(x1, hi).N_phi - fa.smoothed_quantities(x1, lo).N_phi;
  rep.pinching2 = fa.smoothed_quantities(x2, hi).N_phi - fa.smoothed_quantities(x2, lo).N_phi;
  Vec3 dir = (1.0/sep)*(x2 - x1);
  Vec3 mid = 0.5*(x1 + x2);
  for (const auto& p : zs.points)
    if (dist(p.pos, mid) <= rep.scale)
      rep.max_line_dist = std::max(rep.max_line_dist, line_dist(p.pos, x1, dir));
  return rep;
}

MinkowskiResult minkowski_content(const ZeroSet& zs, const Vec3& x, double r,
                                  double rho, double voxel) {
  if (!(rho > 0) || rho > r) throw std::invalid_argument("minkowski_content: need 0 < rho <= r");
  if (!(voxel > 0)) throw std::invalid_argument("minkowski_content: voxel must be > 0");
  std::vector<Vec3> sel;
  for (const auto& p : zs.points)
    if (dist(p.pos, x) <= r) sel.push_back(p.pos);
  MinkowskiResult out;
  if (sel.empty()) return out;

  // hash grid over the selected points, cell side = rho
  std::map<std::array<int, 3>, std::vector<int>> cells;
  auto cell_of = [&](const Vec3& p) {
    return std::array<int, 3>{int(std::floor(p[0]/rho)), int(std::floor(p[1]/rho)),
                              int(std::floor(p[2]/rho))};
  };
  for (int i = 0; i < int(sel.size()); ++i) cells[cell_of(sel[i])].push_back(i);

  double span = r + rho;
  int m = int(std::ceil(span/voxel));
  std::int64_t count = 0;
  for (int a = -m; a < m; ++a)
    for (int b = -m; b < m; ++b)
      for (int c = -m; c < m; ++c) {
        Vec3 p{x[0] + (a + 0.5)*voxel, x[1] + (b + 0.5)*voxel, x[2] + (c + 0.5)*voxel};
        auto cc = cell_of(p);
        bool hit = false;
        for (int da = -1; da <= 1 && !hit; ++da)
          for (int db = -1; db <= 1 && !hit; ++db)
            for (int dc = -1; dc <= 1 && !hit; ++dc) {
              auto it = cells.find({cc[0] + da, cc[1] + db, cc[2] + dc});
              if (it == cells.end()) continue;
              for (int idx : it->second)
                if (dist(p, sel[idx]) <= rho) { hit = true; break; }
            }
        if (hit) ++count;
      }
  out.volume = double(count)*voxel*voxel*voxel;
  out.ratio = out.volume/(r*rho*rho);
  return out;
}

void export_zero_set_csv(const ZeroSet& zs, const std::string& path,
                         const std::string& meta) {
  std::vector<int> pl_id(zs.points.size(), -1), pl_ord(zs.points.size(), -1);
  for (int pi = 0; pi < int(zs.polylines.size()); ++pi)
    for (int oi = 0; oi < int(zs.polylines[pi].size()); ++oi) {
      int pt = zs.polylines[pi][oi];
      if (pl_id[pt] < 0) { pl_id[pt] = pi; pl_ord[pt] = oi; }
    }
  CsvWriter w(path, meta);
  w.header("x1,x2,x3,weight,polyline_id,order_in_polyline");
  for (int i = 0; i < int(zs.points.size()); ++i) {
    const auto& p = zs.points[i];
    w.raw_row(fmt_double(p.pos[0]) + "," + fmt_double(p.pos[1]) + "," +
              fmt_double(p.pos[2]) + "," + fmt_double(p.weight) + "," +
              std::to_string(pl_id[i]) + "," + std::to_string(pl_ord[i]));
  }
  w.close();
}

}  // namespace lcd
