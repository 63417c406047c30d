#include "grid.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace lcd {

Grid::Grid(int n_, double h_, Vec3 origin_) : n(n_), h(h_), origin(origin_) {
  if (n < 8) throw std::invalid_argument("Grid: n must be >= 8");
  if (!(h > 0)) throw std::invalid_argument("Grid: h must be > 0");
}

Grid Grid::centered_cube(int n_, double half_extent) {
  double h_ = 2.0 * half_extent / (n_ - 1);
  return Grid(n_, h_, {-half_extent, -half_extent, -half_extent});
}

LineField::LineField(Grid grid, ConeParams params)
    : grid_(grid), params_(params),
      vals_(4 * grid.num_nodes(), 0.0),
      bmask_(grid.num_nodes(), 0) {
  int n = grid_.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!grid_.interior(i, j, k)) bmask_[grid_.index(i, j, k)] = 1;
}

LineField sample_field(const std::function<ConePoint(const Vec3&)>& source,
                       const Grid& grid, const ConeParams& params) {
  LineField f(grid, params);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      for (int k = 0; k < grid.n; ++k)
        f.set_value(i, j, k, source(grid.position(i, j, k)).v);
  return f;
}

Vec4 align_to(const Vec4& c, const Vec4& nb) {
  double d = c[1]*nb[1] + c[2]*nb[2] + c[3]*nb[3];
  if (d < 0.0) return {nb[0], -nb[1], -nb[2], -nb[3]};
  return nb;
}

GradientStencil gauge_aligned_gradient(const LineField& f, int i, int j, int k) {
  if (!f.grid().interior(i, j, k))
    throw std::invalid_argument("gauge_aligned_gradient: interior stencil required");
  GradientStencil out;
  Vec4 c = f.value(i, j, k);
  double inv2h = 0.5 / f.grid().h;
  const int di[3] = {1, 0, 0}, dj[3] = {0, 1, 0}, dk[3] = {0, 0, 1};
  for (int ax = 0; ax < 3; ++ax) {
    Vec4 up = align_to(c, f.value(i + di[ax], j + dj[ax], k + dk[ax]));
    Vec4 dn = align_to(c, f.value(i - di[ax], j - dj[ax], k - dk[ax]));
    Vec4 g = inv2h * (up - dn);
    out.diff[ax] = g;
    out.density += dot(g, g);
  }
  return out;
}

namespace {

void put_u64(std::ofstream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((v >> (8*i)) & 0xff);
  os.write(b, 8);
}

std::uint64_t get_u64(std::ifstream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8*i);
  return v;
}

void put_f64(std::ofstream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

double get_f64(std::ifstream& is) {
  std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void save_field(const LineField& f, const std::string& path, const std::string& meta_extra) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("save_field: cannot open " + tmp);
    os.write("LFD1", 4);
    put_f64(os, f.params().kappa);
    put_u64(os, std::uint64_t(f.grid().n));
    put_f64(os, f.grid().h);
    for (int a = 0; a < 3; ++a) put_f64(os, f.grid().origin[a]);
    const auto& raw = f.raw();
    for (double d : raw) put_f64(os, d);
    if (!os) throw std::runtime_error("save_field: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("save_field: rename failed for " + path);

  nlohmann::json meta;
  meta["format"] = "LFD1";
  meta["kappa"] = f.params().kappa;
  meta["n"] = f.grid().n;
  meta["h"] = f.grid().h;
  meta["origin"] = {f.grid().origin[0], f.grid().origin[1], f.grid().origin[2]};
  meta["extent"] = f.grid().extent();
  if (!meta_extra.empty()) meta["note"] = meta_extra;
  std::string mtmp = path + ".meta.json.tmp";
  {
    std::ofstream os(mtmp);
    os << meta.dump(2) << "\n";
  }
  std::rename(mtmp.c_str(), (path + ".meta.json").c_str());
}

LineField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "LFD1", 4) != 0)
    throw std::runtime_error("load_field: bad magic in " + path);
  double kappa = get_f64(is);
  int n = int(get_u64(is));
  double h = get_f64(is);
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = get_f64(is);
  LineField f(Grid(n, h, origin), ConeParams(kappa));
  auto& raw = f.raw();
  for (double& d : raw) d = get_f64(is);
  if (!is) throw std::runtime_error("load_field: truncated file " + path);
  return f;
}

}  // namespace lcd
