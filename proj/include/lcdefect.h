/* lcdefect: line-field defect laboratory.
 *
 * C API over the C++ core. All objects are opaque handles created and
 * destroyed here; every call returns an lcd_status and writes results through
 * out parameters. lcd_last_error() describes the most recent failure on the
 * calling thread.
 */
#ifndef LCDEFECT_H
#define LCDEFECT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LCD_API __declspec(dllexport)
#else
#define LCD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lcd_status {
  LCD_OK = 0,
  LCD_ERR_INVALID_ARGUMENT = 1,  /* bad parameter or precondition violation */
  LCD_ERR_PRECONDITION = 2,      /* ball not interior, r below resolution, ... */
  LCD_ERR_IO = 3,
  LCD_ERR_DIVERGED = 4,
  LCD_ERR_UNKNOWN = 5
} lcd_status;

typedef struct lcd_field lcd_field;
typedef struct lcd_zero_set lcd_zero_set;
typedef struct lcd_cover lcd_cover;

typedef struct lcd_potential {
  int enabled;
  double a;       /* double-well strength, psi(s) = a (s^2 - s*^2)^2 */
  double s_star;  /* well location in (0,1) */
  double lambda;  /* < 0 selects the default M sqrt(kappa) */
} lcd_potential;

typedef struct lcd_frequency_record {
  double x[3];
  double r;
  double d_phi, h_phi, e_phi, n_phi;
} lcd_frequency_record;

typedef struct lcd_classical_record {
  double d, h, n, d_tilde, n_tilde;
} lcd_classical_record;

typedef struct lcd_relax_stats {
  int sweeps;
  double initial_energy;
  double final_energy;
  double residual;
} lcd_relax_stats;

typedef struct lcd_beta_result {
  double barycenter[3];
  double eigenvalues[3];   /* descending */
  double eigenvectors[9];  /* row-major, one eigenvector per row */
  double beta2;
  double line_point[3];
  double line_dir[3];
} lcd_beta_result;

LCD_API const char* lcd_version(void);
LCD_API const char* lcd_build_id(void);
LCD_API const char* lcd_last_error(void);

/* ---- fields ---- */

/* preset is one of: constant | cylindrical | perturbed-cylindrical.
 * amplitude/mode only apply to the perturbed preset. The cube is
 * [-half_extent, half_extent]^3 with n nodes per axis. */
LCD_API lcd_status lcd_field_create(const char* preset, double kappa, double c,
                                    double amplitude, int mode, int n,
                                    double half_extent, lcd_field** out);
LCD_API lcd_status lcd_field_load(const char* path, lcd_field** out);
LCD_API lcd_status lcd_field_save(const lcd_field* f, const char* path);
LCD_API void lcd_field_free(lcd_field* f);

LCD_API lcd_status lcd_field_info(const lcd_field* f, int* n, double* h,
                                  double* kappa, double origin[3]);
LCD_API lcd_status lcd_field_value(const lcd_field* f, int i, int j, int k,
                                   double out[4]);
LCD_API lcd_status lcd_field_set_value(lcd_field* f, int i, int j, int k,
                                       const double v[4]);

LCD_API lcd_status lcd_discrete_energy(const lcd_field* f, const lcd_potential* pot,
                                       int threads, double* out);
/* interior <- projected mean of the gauge-aligned neighbors until the relative
 * per-sweep energy decrease drops below tol */
LCD_API lcd_status lcd_relax(lcd_field* f, const lcd_potential* pot, int max_sweeps,
                             double tol, int threads, lcd_relax_stats* out);

/* ---- smoothed and classical quantities ---- */

LCD_API lcd_status lcd_smoothed_quantities(const lcd_field* f, const double x[3],
                                           double r, lcd_frequency_record* out);
LCD_API lcd_status lcd_classical_quantities(const lcd_field* f, const double x[3],
                                            double r, const lcd_potential* pot,
                                            int fib_points, lcd_classical_record* out);
LCD_API lcd_status lcd_pinching(const lcd_field* f, const double x[3], double s,
                                double r, double* out);
LCD_API lcd_status lcd_classical_weiss(const lcd_field* f, const double x[3], double r,
                                       double alpha, double* out);
LCD_API lcd_status lcd_weiss_deficit(const lcd_field* f, const double x[3], double r,
                                     double* out);
LCD_API lcd_status lcd_pinching_bound(const lcd_field* f, const double x1[3],
                                      const double x2[3], double r, int allow_clamp,
                                      double* lhs, double* rhs);

/* ---- defect set ---- */

/* tau <= 0 selects the scale-aware default threshold */
LCD_API lcd_status lcd_extract_zero_set(const lcd_field* f, double tau,
                                        lcd_zero_set** out);
LCD_API lcd_status lcd_zero_set_link(lcd_zero_set* zs, double gap);
LCD_API void lcd_zero_set_free(lcd_zero_set* zs);
LCD_API lcd_status lcd_zero_set_size(const lcd_zero_set* zs, size_t* out);
LCD_API lcd_status lcd_zero_set_point(const lcd_zero_set* zs, size_t idx,
                                      double pos[3], double* weight);
LCD_API lcd_status lcd_zero_set_polyline_count(const lcd_zero_set* zs, size_t* out);
LCD_API lcd_status lcd_arc_length(const lcd_zero_set* zs, size_t polyline,
                                  double* out);
LCD_API lcd_status lcd_minkowski_content(const lcd_zero_set* zs, const double x[3],
                                         double r, double rho, double voxel,
                                         double* volume, double* ratio);
/* fraction of admissible defect points with N_phi(z,r) >= 1/(2 sqrt kappa) - 0.02 */
LCD_API lcd_status lcd_defect_frequency_fraction(const lcd_field* f,
                                                 const lcd_zero_set* zs, double r,
                                                 double* fraction, int* evaluated);

/* ---- point-cloud geometry ---- */

/* atoms: n_atoms rows of (x, y, z, weight) */
LCD_API lcd_status lcd_beta2(const double* atoms_xyzw, size_t n_atoms,
                             const double x0[3], double r0, lcd_beta_result* out);
LCD_API lcd_status lcd_reifenberg_hypothesis(const double* atoms_xyzw, size_t n_atoms,
                                             const double x[3], double r, double s_min,
                                             double* out);

LCD_API lcd_status lcd_build_cover(const lcd_zero_set* zs, const double x[3], double r,
                                   int depth, lcd_cover** out);
LCD_API void lcd_cover_free(lcd_cover* c);
LCD_API lcd_status lcd_cover_levels(const lcd_cover* c, int* out);
LCD_API lcd_status lcd_cover_packing(const lcd_cover* c, int level, double* out);
LCD_API lcd_status lcd_cover_audit(const lcd_cover* c, const lcd_zero_set* zs,
                                   int level, int* vitali, double* coverage);
LCD_API lcd_status lcd_cover_save_json(const lcd_cover* c, const char* path);

/* ---- orchestration (the CLI front end) ---- */

/* command: oracle | relax | analyze | cover | verify | report.
 * config_path may be NULL (defaults); out_dir/seed/threads override the file
 * when non-NULL / >= 0. Returns the process-style exit status. */
LCD_API int lcd_run(const char* command, const char* config_path, const char* out_dir,
                    long long seed, int threads);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LCDEFECT_H */
