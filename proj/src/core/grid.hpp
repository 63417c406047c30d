#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cone.hpp"
#include "geom.hpp"

namespace lcd {

struct Grid {
  int n = 0;          // nodes per axis
  double h = 0.0;     // spacing
  Vec3 origin{0, 0, 0};

  Grid() = default;
  Grid(int n_, double h_, Vec3 origin_);
  static Grid centered_cube(int n_, double half_extent);

  double extent() const { return (n - 1) * h; }
  std::int64_t num_nodes() const { return std::int64_t(n) * n * n; }
  std::int64_t index(int i, int j, int k) const {
    return (std::int64_t(i) * n + j) * n + k;
  }
  Vec3 position(int i, int j, int k) const {
    return {origin[0] + h*i, origin[1] + h*j, origin[2] + h*k};
  }
  bool interior(int i, int j, int k) const {
    return i > 0 && j > 0 && k > 0 && i < n-1 && j < n-1 && k < n-1;
  }
};

// Discrete map u : grid -> D_kappa with fixed-boundary mask.
class LineField {
 public:
  LineField(Grid grid, ConeParams params);

  const Grid& grid() const { return grid_; }
  const ConeParams& params() const { return params_; }

  Vec4 value(int i, int j, int k) const {
    const double* p = &vals_[4 * grid_.index(i, j, k)];
    return {p[0], p[1], p[2], p[3]};
  }
  void set_value(int i, int j, int k, const Vec4& v) {
    double* p = &vals_[4 * grid_.index(i, j, k)];
    p[0] = v[0]; p[1] = v[1]; p[2] = v[2]; p[3] = v[3];
  }
  double node_norm(int i, int j, int k) const {
    const double* p = &vals_[4 * grid_.index(i, j, k)];
    return std::sqrt(p[0]*p[0] + p[1]*p[1] + p[2]*p[2] + p[3]*p[3]);
  }
  bool boundary(int i, int j, int k) const { return bmask_[grid_.index(i, j, k)] != 0; }
  void set_boundary(int i, int j, int k, bool b) { bmask_[grid_.index(i, j, k)] = b ? 1 : 0; }

  const std::vector<double>& raw() const { return vals_; }
  std::vector<double>& raw() { return vals_; }

 private:
  Grid grid_;
  ConeParams params_;
  std::vector<double> vals_;    // 4 doubles per node, k fastest
  std::vector<std::uint8_t> bmask_;
};

// Exact node evaluation of a source map; outer shell marked as boundary.
LineField sample_field(const std::function<ConePoint(const Vec3&)>& source,
                       const Grid& grid, const ConeParams& params);

// Per-edge sign choice: flip the neighbor director if that shortens the 4-vector
// difference against the center representative. Ties keep the stored sign.
Vec4 align_to(const Vec4& center, const Vec4& neighbor);

struct GradientStencil {
  double density = 0.0;          // sum over axes of |central difference|^2
  std::array<Vec4, 3> diff{};    // gauge-aligned central differences
};

// Interior node only; throws "interior stencil required" otherwise.
GradientStencil gauge_aligned_gradient(const LineField& f, int i, int j, int k);

// Binary snapshot (LFD1): magic, kappa, n, h, origin (LE 64-bit), then nodes as
// four doubles (z, y1, y2, y3) with the last index fastest. A JSON sidecar with
// key/value metadata is written next to it.
void save_field(const LineField& f, const std::string& path,
                const std::string& meta_extra = "");
LineField load_field(const std::string& path);

}  // namespace lcd
