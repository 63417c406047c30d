#include "lcdefect.h"

#include <cstring>
#include <exception>
#include <iostream>
#include <string>

#include "config.hpp"
#include "defects.hpp"
#include "energy.hpp"
#include "grid.hpp"
#include "jones.hpp"
#include "monotonicity.hpp"
#include "runner.hpp"
#include "weiss.hpp"

using namespace lcd;

namespace {

thread_local std::string g_last_error;

lcd_status fail(lcd_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

lcd_status from_exception(const std::exception& e) {
  std::string msg = e.what();
  g_last_error = msg;
  if (msg.find("not interior") != std::string::npos ||
      msg.find("below resolution") != std::string::npos ||
      msg.find("degenerate") != std::string::npos ||
      msg.find("too far") != std::string::npos ||
      msg.find("empty") != std::string::npos)
    return LCD_ERR_PRECONDITION;
  if (msg.find("divergence") != std::string::npos) return LCD_ERR_DIVERGED;
  if (msg.find("cannot open") != std::string::npos ||
      msg.find("rename failed") != std::string::npos ||
      msg.find("bad magic") != std::string::npos ||
      msg.find("truncated") != std::string::npos)
    return LCD_ERR_IO;
  return LCD_ERR_INVALID_ARGUMENT;
}

PotentialSpec to_pot(const lcd_potential* pot, double kappa) {
  if (!pot || !pot->enabled) return PotentialSpec{};
  PotentialSpec p(true, pot->a, pot->s_star, kappa);
  if (pot->lambda >= 0) p.lambda = pot->lambda;
  return p;
}

}  // namespace

struct lcd_field {
  LineField f;
  // analyses are rebuilt when the field data changes
  explicit lcd_field(LineField field) : f(std::move(field)) {}
};

struct lcd_zero_set {
  ZeroSet zs;
};

struct lcd_cover {
  CoverTree tree;
};

extern "C" {

const char* lcd_version(void) { return "0.1.0"; }
const char* lcd_build_id(void) { return kBuildId; }
const char* lcd_last_error(void) { return g_last_error.c_str(); }

lcd_status lcd_field_create(const char* preset, double kappa, double c,
                            double amplitude, int mode, int n, double half_extent,
                            lcd_field** out) {
  if (!preset || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    RunConfig cfg;
    cfg.kappa = kappa;
    cfg.oracle_c = c;
    cfg.amplitude = amplitude;
    cfg.mode = mode;
    cfg.n = n;
    cfg.extent = 2.0*half_extent;
    cfg.boundary = preset;
    if (cfg.boundary != "constant" && cfg.boundary != "cylindrical" &&
        cfg.boundary != "perturbed-cylindrical")
      return fail(LCD_ERR_INVALID_ARGUMENT, "unknown preset: " + cfg.boundary);
    *out = new lcd_field(build_preset_field(cfg));
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_field_load(const char* path, lcd_field** out) {
  if (!path || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = new lcd_field(load_field(path));
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_field_save(const lcd_field* f, const char* path) {
  if (!f || !path) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    save_field(f->f, path);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

void lcd_field_free(lcd_field* f) { delete f; }

lcd_status lcd_field_info(const lcd_field* f, int* n, double* h, double* kappa,
                          double origin[3]) {
  if (!f) return fail(LCD_ERR_INVALID_ARGUMENT, "null field");
  if (n) *n = f->f.grid().n;
  if (h) *h = f->f.grid().h;
  if (kappa) *kappa = f->f.params().kappa;
  if (origin)
    for (int a = 0; a < 3; ++a) origin[a] = f->f.grid().origin[a];
  return LCD_OK;
}

lcd_status lcd_field_value(const lcd_field* f, int i, int j, int k, double out[4]) {
  if (!f || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  const Grid& g = f->f.grid();
  if (i < 0 || j < 0 || k < 0 || i >= g.n || j >= g.n || k >= g.n)
    return fail(LCD_ERR_INVALID_ARGUMENT, "node index out of range");
  Vec4 v = f->f.value(i, j, k);
  std::memcpy(out, v.data(), 4*sizeof(double));
  return LCD_OK;
}

lcd_status lcd_field_set_value(lcd_field* f, int i, int j, int k, const double v[4]) {
  if (!f || !v) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  const Grid& g = f->f.grid();
  if (i < 0 || j < 0 || k < 0 || i >= g.n || j >= g.n || k >= g.n)
    return fail(LCD_ERR_INVALID_ARGUMENT, "node index out of range");
  f->f.set_value(i, j, k, {v[0], v[1], v[2], v[3]});
  return LCD_OK;
}

lcd_status lcd_discrete_energy(const lcd_field* f, const lcd_potential* pot,
                               int threads, double* out) {
  if (!f || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = discrete_energy(f->f, to_pot(pot, f->f.params().kappa), std::max(1, threads));
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_relax(lcd_field* f, const lcd_potential* pot, int max_sweeps,
                     double tol, int threads, lcd_relax_stats* out) {
  if (!f) return fail(LCD_ERR_INVALID_ARGUMENT, "null field");
  try {
    EnergyTrace tr = relax(f->f, to_pot(pot, f->f.params().kappa), max_sweeps, tol,
                           std::max(1, threads));
    if (out) {
      out->sweeps = tr.sweeps;
      out->initial_energy = tr.energies.front();
      out->final_energy = tr.energies.back();
      out->residual = tr.residual;
    }
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_smoothed_quantities(const lcd_field* f, const double x[3], double r,
                                   lcd_frequency_record* out) {
  if (!f || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    FrequencyRecord rec = fa.smoothed_quantities({x[0], x[1], x[2]}, r);
    std::memcpy(out->x, rec.x.data(), 3*sizeof(double));
    out->r = rec.r;
    out->d_phi = rec.D_phi;
    out->h_phi = rec.H_phi;
    out->e_phi = rec.E_phi;
    out->n_phi = rec.N_phi;
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_classical_quantities(const lcd_field* f, const double x[3], double r,
                                    const lcd_potential* pot, int fib_points,
                                    lcd_classical_record* out) {
  if (!f || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    ClassicalRecord rec = fa.classical_quantities({x[0], x[1], x[2]}, r,
                                                  to_pot(pot, f->f.params().kappa),
                                                  fib_points > 0 ? fib_points : 2000);
    out->d = rec.D;
    out->h = rec.H;
    out->n = rec.N;
    out->d_tilde = rec.D_tilde;
    out->n_tilde = rec.N_tilde;
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_pinching(const lcd_field* f, const double x[3], double s, double r,
                        double* out) {
  if (!f || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    *out = fa.pinching({x[0], x[1], x[2]}, s, r);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_classical_weiss(const lcd_field* f, const double x[3], double r,
                               double alpha, double* out) {
  if (!f || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    *out = classical_weiss(fa, {x[0], x[1], x[2]}, r, alpha);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_weiss_deficit(const lcd_field* f, const double x[3], double r,
                             double* out) {
  if (!f || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    *out = weiss_deficit(fa, {x[0], x[1], x[2]}, r);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_pinching_bound(const lcd_field* f, const double x1[3], const double x2[3],
                              double r, int allow_clamp, double* lhs, double* rhs) {
  if (!f || !x1 || !x2) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    PinchingPair pp = pinching_bound_eval(fa, {x1[0], x1[1], x1[2]},
                                          {x2[0], x2[1], x2[2]}, r, allow_clamp != 0);
    if (lhs) *lhs = pp.lhs;
    if (rhs) *rhs = pp.rhs_unscaled;
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_extract_zero_set(const lcd_field* f, double tau, lcd_zero_set** out) {
  if (!f || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    double t = tau > 0 ? tau : estimate_tau(f->f);
    *out = new lcd_zero_set{extract_zero_set(f->f, t)};
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_zero_set_link(lcd_zero_set* zs, double gap) {
  if (!zs) return fail(LCD_ERR_INVALID_ARGUMENT, "null zero set");
  try {
    zs->zs = link_curves(std::move(zs->zs), gap);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

void lcd_zero_set_free(lcd_zero_set* zs) { delete zs; }

lcd_status lcd_zero_set_size(const lcd_zero_set* zs, size_t* out) {
  if (!zs || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  *out = zs->zs.points.size();
  return LCD_OK;
}

lcd_status lcd_zero_set_point(const lcd_zero_set* zs, size_t idx, double pos[3],
                              double* weight) {
  if (!zs || !pos) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  if (idx >= zs->zs.points.size())
    return fail(LCD_ERR_INVALID_ARGUMENT, "point index out of range");
  std::memcpy(pos, zs->zs.points[idx].pos.data(), 3*sizeof(double));
  if (weight) *weight = zs->zs.points[idx].weight;
  return LCD_OK;
}

lcd_status lcd_zero_set_polyline_count(const lcd_zero_set* zs, size_t* out) {
  if (!zs || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  *out = zs->zs.polylines.size();
  return LCD_OK;
}

lcd_status lcd_arc_length(const lcd_zero_set* zs, size_t polyline, double* out) {
  if (!zs || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = arc_length(zs->zs, int(polyline));
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_minkowski_content(const lcd_zero_set* zs, const double x[3], double r,
                                 double rho, double voxel, double* volume,
                                 double* ratio) {
  if (!zs || !x) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    MinkowskiResult m = minkowski_content(zs->zs, {x[0], x[1], x[2]}, r, rho, voxel);
    if (volume) *volume = m.volume;
    if (ratio) *ratio = m.ratio;
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_defect_frequency_fraction(const lcd_field* f, const lcd_zero_set* zs,
                                         double r, double* fraction, int* evaluated) {
  if (!f || !zs || !fraction) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    FieldAnalysis fa(f->f);
    DefectFrequency df = frequency_along_defect(fa, zs->zs, r);
    *fraction = df.fraction_above;
    if (evaluated) *evaluated = int(df.values.size());
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_beta2(const double* atoms_xyzw, size_t n_atoms, const double x0[3],
                     double r0, lcd_beta_result* out) {
  if (!atoms_xyzw || !x0 || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    DiscreteMeasure mu;
    mu.atoms.reserve(n_atoms);
    for (size_t i = 0; i < n_atoms; ++i) {
      const double* a = atoms_xyzw + 4*i;
      mu.atoms.push_back({{a[0], a[1], a[2]}, a[3]});
    }
    BetaResult br = beta2(mu, {x0[0], x0[1], x0[2]}, r0);
    std::memcpy(out->barycenter, br.barycenter.data(), 3*sizeof(double));
    for (int m = 0; m < 3; ++m) {
      out->eigenvalues[m] = br.eigenvalues[m];
      std::memcpy(out->eigenvectors + 3*m, br.eigenvectors[m].data(), 3*sizeof(double));
    }
    out->beta2 = br.beta2;
    std::memcpy(out->line_point, br.line_point.data(), 3*sizeof(double));
    std::memcpy(out->line_dir, br.line_dir.data(), 3*sizeof(double));
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_reifenberg_hypothesis(const double* atoms_xyzw, size_t n_atoms,
                                     const double x[3], double r, double s_min,
                                     double* out) {
  if (!atoms_xyzw || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    DiscreteMeasure mu;
    mu.atoms.reserve(n_atoms);
    for (size_t i = 0; i < n_atoms; ++i) {
      const double* a = atoms_xyzw + 4*i;
      mu.atoms.push_back({{a[0], a[1], a[2]}, a[3]});
    }
    if (s_min <= 0) {
      double dmin = 1e300;
      for (size_t i = 0; i < mu.atoms.size(); ++i)
        for (size_t j = i + 1; j < mu.atoms.size(); ++j)
          dmin = std::min(dmin, dist(mu.atoms[i].x, mu.atoms[j].x));
      s_min = (dmin < 1e300) ? 2.0*dmin : r;
    }
    *out = reifenberg_hypothesis(mu, {x[0], x[1], x[2]}, r, s_min);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_build_cover(const lcd_zero_set* zs, const double x[3], double r,
                           int depth, lcd_cover** out) {
  if (!zs || !x || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = new lcd_cover{build_cover(zs->zs, {x[0], x[1], x[2]}, r, depth)};
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

void lcd_cover_free(lcd_cover* c) { delete c; }

lcd_status lcd_cover_levels(const lcd_cover* c, int* out) {
  if (!c || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  *out = int(c->tree.levels.size());
  return LCD_OK;
}

lcd_status lcd_cover_packing(const lcd_cover* c, int level, double* out) {
  if (!c || !out) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    *out = packing_measure(c->tree, level);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_cover_audit(const lcd_cover* c, const lcd_zero_set* zs, int level,
                           int* vitali, double* coverage) {
  if (!c || !zs) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    if (vitali) *vitali = vitali_ok(c->tree, level) ? 1 : 0;
    if (coverage) *coverage = coverage_fraction(c->tree, level, zs->zs);
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

lcd_status lcd_cover_save_json(const lcd_cover* c, const char* path) {
  if (!c || !path) return fail(LCD_ERR_INVALID_ARGUMENT, "null argument");
  try {
    std::string text = cover_to_json(c->tree);
    std::string tmp = std::string(path) + ".tmp";
    {
      std::ofstream os(tmp);
      if (!os) throw std::runtime_error("cannot open " + tmp);
      os << text << "\n";
    }
    if (std::rename(tmp.c_str(), path) != 0)
      throw std::runtime_error("rename failed for " + std::string(path));
    return LCD_OK;
  } catch (const std::exception& e) {
    return from_exception(e);
  }
}

int lcd_run(const char* command, const char* config_path, const char* out_dir,
            long long seed, int threads) {
  if (!command) {
    g_last_error = "null command";
    return 2;
  }
  std::vector<std::string> errors;
  RunConfig cfg;
  if (config_path) cfg = load_config(config_path, errors);
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << e << "\n";
    g_last_error = errors.front();
    return 2;
  }
  if (out_dir) cfg.out_dir = out_dir;
  if (seed >= 0) cfg.seed = std::uint64_t(seed);
  if (threads >= 1) cfg.threads = threads;
  try {
    return run_command(command, cfg);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // extern "C"
