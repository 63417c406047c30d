#include "jones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csvio.hpp"
#include "json.hpp"
#include "weiss.hpp"

namespace lcd {

DiscreteMeasure DiscreteMeasure::from_zero_set(const ZeroSet& zs) {
  DiscreteMeasure mu;
  mu.atoms.reserve(zs.points.size());
  for (const auto& p : zs.points) mu.atoms.push_back({p.pos, p.weight});
  return mu;
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// cyclic Jacobi accumulation; V holds eigenvectors as columns
void jacobi_polish(Mat3& A, Mat3& V, int max_sweeps) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
    double diag = std::abs(A[0][0]) + std::abs(A[1][1]) + std::abs(A[2][2]);
    if (off <= 1e-15*std::max(diag, 1e-300)) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (A[p][q] == 0.0) continue;
        double theta = 0.5*(A[q][q] - A[p][p])/A[p][q];
        double t = (theta >= 0 ? 1.0 : -1.0)/(std::abs(theta) + std::sqrt(theta*theta + 1.0));
        double c = 1.0/std::sqrt(t*t + 1.0), s = t*c;
        for (int k = 0; k < 3; ++k) {
          double akp = A[k][p], akq = A[k][q];
          A[k][p] = c*akp - s*akq;
          A[k][q] = s*akp + c*akq;
        }
        for (int k = 0; k < 3; ++k) {
          double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c*apk - s*aqk;
          A[q][k] = s*apk + c*aqk;
        }
        for (int k = 0; k < 3; ++k) {
          double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = c*vkp - s*vkq;
          V[k][q] = s*vkp + c*vkq;
        }
      }
  }
}

}  // namespace

Sym3Eigen sym3_eigen(const Mat3& B) {
  // closed-form eigenvalues (Cardano on the shifted/scaled matrix)
  double q = (B[0][0] + B[1][1] + B[2][2])/3.0;
  Mat3 C = B;
  for (int i = 0; i < 3; ++i) C[i][i] -= q;
  double p2 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p2 += C[i][j]*C[i][j];
  double p = std::sqrt(p2/6.0);
  std::array<double, 3> ev{q, q, q};
  if (p > 1e-300) {
    Mat3 M;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M[i][j] = C[i][j]/p;
    double det = M[0][0]*(M[1][1]*M[2][2] - M[1][2]*M[2][1]) -
                 M[0][1]*(M[1][0]*M[2][2] - M[1][2]*M[2][0]) +
                 M[0][2]*(M[1][0]*M[2][1] - M[1][1]*M[2][0]);
    double phi = std::acos(std::clamp(det/2.0, -1.0, 1.0))/3.0;
    ev[0] = q + 2.0*p*std::cos(phi);
    ev[2] = q + 2.0*p*std::cos(phi + 2.0*M_PI/3.0);
    ev[1] = 3.0*q - ev[0] - ev[2];
  }
  // eigenvectors from (B - lam I) row cross products, then Jacobi polish
  Mat3 V{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  bool closed_ok = true;
  for (int m = 0; m < 3 && closed_ok; ++m) {
    Mat3 E = B;
    for (int i = 0; i < 3; ++i) E[i][i] -= ev[m];
    Vec3 r0{E[0][0], E[0][1], E[0][2]};
    Vec3 r1{E[1][0], E[1][1], E[1][2]};
    Vec3 r2{E[2][0], E[2][1], E[2][2]};
    Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
    Vec3 best = c01;
    if (norm(c02) > norm(best)) best = c02;
    if (norm(c12) > norm(best)) best = c12;
    double nb = norm(best);
    double scale = std::abs(ev[0]) + std::abs(ev[2]) + 1e-300;
    if (nb < 1e-10*scale*scale) { closed_ok = false; break; }
    for (int i = 0; i < 3; ++i) V[i][m] = best[i]/nb;
  }
  if (closed_ok) {
    // Gram-Schmidt the columns; near-parallel columns mean clustered
    // eigenvalues, handled by the full Jacobi fallback
    for (int m = 0; m < 3 && closed_ok; ++m) {
      Vec3 v{V[0][m], V[1][m], V[2][m]};
      for (int p = 0; p < m; ++p) {
        Vec3 u{V[0][p], V[1][p], V[2][p]};
        v = v - dot(v, u)*u;
      }
      double nv = norm(v);
      if (nv < 1e-6) { closed_ok = false; break; }
      for (int i = 0; i < 3; ++i) V[i][m] = v[i]/nv;
    }
  }
  if (!closed_ok)
    V = Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};  // repeated eigenvalue: Jacobi from scratch

  // polish in the computed basis: A = V^T B V, rotations accumulated into V
  Mat3 A{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += V[a][i]*B[a][b]*V[b][j];
      A[i][j] = s;
    }
  jacobi_polish(A, V, closed_ok ? 6 : 16);
  std::array<std::pair<double, int>, 3> order{{{A[0][0], 0}, {A[1][1], 1}, {A[2][2], 2}}};
  std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
  Sym3Eigen out;
  for (int m = 0; m < 3; ++m) {
    out.values[m] = order[m].first;
    int c = order[m].second;
    out.vectors[m] = {V[0][c], V[1][c], V[2][c]};
  }
  return out;
}

BetaResult beta2(const DiscreteMeasure& mu, const Vec3& x0, double r0) {
  if (!(r0 > 0)) throw std::invalid_argument("beta2: r0 must be > 0");
  double mass = 0;
  Vec3 bary{0, 0, 0};
  for (const auto& a : mu.atoms)
    if (dist(a.x, x0) < r0) {
      mass += a.s;
      bary = bary + a.s*a.x;
    }
  if (!(mass > 0)) throw std::invalid_argument("beta2: empty ball");
  bary = (1.0/mass)*bary;

  Mat3 B{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  for (const auto& a : mu.atoms) {
    if (!(dist(a.x, x0) < r0)) continue;
    Vec3 d = a.x - bary;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) B[i][j] += a.s*d[i]*d[j];
  }
  Sym3Eigen eg = sym3_eigen(B);
  BetaResult out;
  out.barycenter = bary;
  out.eigenvalues = eg.values;
  out.eigenvectors = eg.vectors;
  out.beta2 = (eg.values[1] + eg.values[2])/(r0*r0*r0);
  out.line_point = bary;
  out.line_dir = eg.vectors[0];
  return out;
}

DistortionResult distortion_check(const FieldAnalysis& fa, const DiscreteMeasure& mu,
                                  const Vec3& x0, double r, bool allow_clamp) {
  DistortionResult out;
  out.lhs = beta2(mu, x0, r/8.0).beta2;
  const double h = fa.field().grid().h;
  double sum = 0;
  for (const auto& a : mu.atoms) {
    if (!(dist(a.x, x0) < r/8.0)) continue;
    double slo = r/8.0, shi = 4.0*r;
    if (allow_clamp) {
      double cap = fa.max_admissible_radius(a.x);
      slo = std::max(slo, 4.0*h);
      shi = std::min(shi, cap);
      if (!(shi > slo)) continue;
      out.clamped = out.clamped || (slo != r/8.0) || (shi != 4.0*r);
    }
    double W = fa.smoothed_quantities(a.x, shi).N_phi -
               fa.smoothed_quantities(a.x, slo).N_phi;
    sum += a.s*std::max(0.0, W);
  }
  out.rhs = sum/r;
  out.ratio = (out.rhs > 0) ? out.lhs/out.rhs : 0.0;
  return out;
}

double reifenberg_hypothesis(const DiscreteMeasure& mu, const Vec3& x, double r,
                             double s_min) {
  if (!(s_min > 0)) throw std::invalid_argument("reifenberg_hypothesis: s_min must be > 0");
  std::vector<double> ladder;
  for (double s = r; s >= s_min; s *= 0.5) ladder.push_back(s);
  if (ladder.empty()) return 0.0;

  auto D_mu = [&](const Vec3& y, double s) -> double {
    double mass = 0;
    int cnt = 0;
    for (const auto& a : mu.atoms)
      if (dist(a.x, y) < s) { mass += a.s; ++cnt; }
    if (cnt < 2 || !(mass > 0)) return 0.0;
    return beta2(mu, y, s).beta2;
  };

  const double ln2 = std::log(2.0);
  double outer = 0, outer_mass = 0;
  for (const auto& a : mu.atoms) {
    if (!(dist(a.x, x) < r)) continue;
    outer_mass += a.s;
    double inner = 0;
    for (size_t m = 0; m < ladder.size(); ++m) {
      double w = (m == 0 || m + 1 == ladder.size()) ? 0.5 : 1.0;
      inner += w*D_mu(a.x, ladder[m]);
    }
    outer += a.s*inner*ln2;
  }
  if (!(outer_mass > 0)) throw std::invalid_argument("reifenberg_hypothesis: empty ball");
  return outer/r;
}

CoverTree build_cover(const ZeroSet& zs, const Vec3& x, double r, int depth) {
  if (depth < 1) throw std::invalid_argument("build_cover: depth must be >= 1");
  std::vector<Vec3> pts;
  for (const auto& p : zs.points)
    if (dist(p.pos, x) <= r) pts.push_back(p.pos);
  if (pts.empty()) throw std::invalid_argument("build_cover: empty zero set in ball");

  CoverTree tree;
  tree.root_center = x;
  tree.root_radius = r;
  CoverTree::Level root;
  root.radius = r;
  root.balls.push_back({x, -1, false});
  root.packing_sum = r/5.0;
  tree.levels.push_back(root);

  for (int k = 0; k < depth; ++k) {
    const CoverTree::Level& par = tree.levels.back();
    double R = par.radius;
    double Rc = R/10.0;  // child radius
    CoverTree::Level next;
    next.radius = Rc;

    struct CaseB {
      int parent;
      std::vector<int> cands;  // indices into pts, ordered along V
    };
    std::vector<CaseB> case_bs;
    std::vector<std::pair<Vec3, double>> protected_cores;  // case-(a) parents

    for (int pi = 0; pi < int(par.balls.size()); ++pi) {
      const Vec3& z = par.balls[pi].center;
      std::vector<int> members;
      for (int m = 0; m < int(pts.size()); ++m)
        if (dist(pts[m], z) <= R) members.push_back(m);
      if (members.empty()) continue;

      // case (a): some member's Rc-ball holds every member
      int best = -1;
      double best_maxd = std::numeric_limits<double>::infinity();
      for (int a : members) {
        double maxd = 0;
        for (int b : members) maxd = std::max(maxd, dist(pts[a], pts[b]));
        if (maxd < best_maxd) { best_maxd = maxd; best = a; }
      }
      if (best_maxd <= Rc) {
        next.balls.push_back({pts[best], pi, true});
        protected_cores.push_back({z, R/5.0});
        continue;
      }

      // case (b): diameter pair, tube of half the child radius around V
      int da = members[0], db = members[0];
      double diam = -1;
      for (size_t a = 0; a < members.size(); ++a)
        for (size_t b = a + 1; b < members.size(); ++b) {
          double d = dist(pts[members[a]], pts[members[b]]);
          if (d > diam) { diam = d; da = members[a]; db = members[b]; }
        }
      Vec3 dir = (1.0/dist(pts[da], pts[db]))*(pts[db] - pts[da]);
      CaseB cb;
      cb.parent = pi;
      std::vector<std::pair<double, int>> tube;
      for (int m : members)
        if (line_dist(pts[m], pts[da], dir) <= Rc/2.0)
          tube.push_back({dot(pts[m] - pts[da], dir), m});
      std::sort(tube.begin(), tube.end());
      for (auto& [t, m] : tube) cb.cands.push_back(m);
      case_bs.push_back(std::move(cb));
    }

    // greedy Vitali selection: case-(a) children are in; case-(b) candidates
    // must keep radius/5 cores disjoint and avoid protected cores
    double core = Rc/5.0;
    for (const CaseB& cb : case_bs) {
      for (int m : cb.cands) {
        const Vec3& c = pts[m];
        bool ok = true;
        for (const auto& b : next.balls)
          if (dist(b.center, c) < 2.0*core) { ok = false; break; }
        if (ok)
          for (const auto& [y, pr] : protected_cores)
            if (dist(c, y) < Rc + pr) { ok = false; break; }
        if (ok) next.balls.push_back({c, cb.parent, false});
      }
    }
    next.packing_sum = next.balls.size()*(Rc/5.0);
    tree.levels.push_back(std::move(next));
  }
  return tree;
}

double packing_measure(const CoverTree& tree, int level) {
  if (level < 0 || level >= int(tree.levels.size()))
    throw std::invalid_argument("packing_measure: level not built");
  return tree.levels[level].packing_sum;
}

bool vitali_ok(const CoverTree& tree, int level) {
  const auto& L = tree.levels.at(level);
  double core = L.radius/5.0;
  for (size_t a = 0; a < L.balls.size(); ++a)
    for (size_t b = a + 1; b < L.balls.size(); ++b)
      if (dist(L.balls[a].center, L.balls[b].center) < 2.0*core*(1.0 - 1e-12))
        return false;
  return true;
}

double coverage_fraction(const CoverTree& tree, int level, const ZeroSet& zs) {
  const auto& L = tree.levels.at(level);
  int inside = 0, covered = 0;
  for (const auto& p : zs.points) {
    if (!(dist(p.pos, tree.root_center) <= tree.root_radius)) continue;
    ++inside;
    for (const auto& b : L.balls)
      if (dist(p.pos, b.center) <= L.radius) { ++covered; break; }
  }
  return inside ? double(covered)/inside : 1.0;
}

std::string cover_to_json(const CoverTree& tree) {
  nlohmann::json j;
  j["root"] = {{"center", {tree.root_center[0], tree.root_center[1], tree.root_center[2]}},
               {"radius", tree.root_radius}};
  j["levels"] = nlohmann::json::array();
  for (const auto& L : tree.levels) {
    nlohmann::json lj;
    lj["radius"] = L.radius;
    lj["packing_sum"] = L.packing_sum;
    lj["balls"] = nlohmann::json::array();
    for (const auto& b : L.balls)
      lj["balls"].push_back({{"center", {b.center[0], b.center[1], b.center[2]}},
                             {"parent", b.parent},
                             {"case", b.case_single ? "single" : "line"}});
    j["levels"].push_back(lj);
  }
  return j.dump(2);
}

void export_beta_csv(const std::vector<BetaResult>& recs, const std::string& path,
                     const std::string& meta) {
  CsvWriter w(path, meta);
  w.header("bx,by,bz,lambda1,lambda2,lambda3,beta2,dirx,diry,dirz");
  for (const auto& r : recs)
    w.row({r.barycenter[0], r.barycenter[1], r.barycenter[2], r.eigenvalues[0],
           r.eigenvalues[1], r.eigenvalues[2], r.beta2, r.line_dir[0], r.line_dir[1],
           r.line_dir[2]});
  w.close();
}

}  // namespace lcd
