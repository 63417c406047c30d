#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "csvio.hpp"
#include "json.hpp"

namespace lcd {

namespace fs = std::filesystem;

LineField build_preset_field(const RunConfig& cfg) {
  ConeParams params(cfg.kappa);
  Grid grid = Grid::centered_cube(cfg.n, 0.5*cfg.extent);

  if (cfg.boundary == "from-file") {
    LineField f = load_field(cfg.input_field);
    return f;
  }

  std::function<ConePoint(const Vec3&)> source;
  if (cfg.boundary == "constant") {
    double a = std::sqrt((cfg.kappa - 1.0)/cfg.kappa);
    double b = 1.0/std::sqrt(cfg.kappa);
    ConePoint p{{a, b, 0, 0}};
    source = [p](const Vec3&) { return p; };
  } else if (cfg.boundary == "cylindrical") {
    source = [params, c = cfg.oracle_c](const Vec3& x) {
      return cylindrical_oracle(params, c, x);
    };
  } else {  // perturbed-cylindrical: helical displacement of the defect line
    double A = cfg.amplitude;
    double w = cfg.mode*M_PI;
    source = [params, c = cfg.oracle_c, A, w](const Vec3& x) {
      Vec3 q{x[0] - A*std::cos(w*x[2]), x[1] - A*std::sin(w*x[2]), x[2]};
      return cylindrical_oracle(params, c, q);
    };
  }
  LineField f = sample_field(source, grid, params);
  if (cfg.interior_init == "apex") {
    for (int i = 1; i < grid.n - 1; ++i)
      for (int j = 1; j < grid.n - 1; ++j)
        for (int k = 1; k < grid.n - 1; ++k)
          f.set_value(i, j, k, {0, 0, 0, 0});
  }
  return f;
}

namespace {

PotentialSpec potential_from(const RunConfig& cfg) {
  PotentialSpec pot(cfg.potential_enabled, cfg.potential_a, cfg.potential_sstar, cfg.kappa);
  if (cfg.lambda >= 0) pot.lambda = cfg.potential_enabled ? cfg.lambda : 0.0;
  return pot;
}

std::vector<double> radii_ladder(const RunConfig& cfg, const FieldAnalysis& fa,
                                 const Vec3& x) {
  if (!cfg.radii.empty()) return cfg.radii;
  std::vector<double> out;
  double h = fa.field().grid().h;
  double cap = fa.max_admissible_radius(x);
  for (double r = 4.0*h; r <= cap; r *= 2.0) out.push_back(r);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    os << text;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_text: rename failed for " + path);
}

void write_trace_csv(const EnergyTrace& tr, const std::string& path,
                     const std::string& meta) {
  CsvWriter w(path, meta);
  w.header("sweep,energy");
  for (size_t i = 0; i < tr.energies.size(); ++i)
    w.raw_row(std::to_string(i) + "," + fmt_double(tr.energies[i]));
  w.close();
}

int cmd_oracle(const RunConfig& cfg) {
  LineField f = build_preset_field(cfg);
  fs::create_directories(cfg.out_dir);
  save_field(f, cfg.out_dir + "/field.lfd", "preset=" + cfg.boundary);
  std::cout << "wrote " << cfg.out_dir << "/field.lfd (n=" << cfg.n
            << ", kappa=" << cfg.kappa << ")\n";
  return 0;
}

int cmd_relax(const RunConfig& cfg) {
  LineField f = build_preset_field(cfg);
  PotentialSpec pot = potential_from(cfg);
  EnergyTrace tr = relax(f, pot, cfg.max_sweeps, cfg.tol, cfg.threads);
  fs::create_directories(cfg.out_dir);
  save_field(f, cfg.out_dir + "/field.lfd", "relaxed preset=" + cfg.boundary);
  write_trace_csv(tr, cfg.out_dir + "/trace.csv", cfg.meta_header());
  std::cout << "relaxed " << tr.sweeps << " sweeps, final energy "
            << fmt_double(tr.energies.back()) << "\n";
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  LineField f = cfg.input_field.empty() ? build_preset_field(cfg)
                                        : load_field(cfg.input_field);
  FieldAnalysis fa(f, cfg.threads);
  fs::create_directories(cfg.out_dir);
  std::string meta = cfg.meta_header();
  const Grid& g = f.grid();
  double h = g.h;

  Vec3 center{g.origin[0] + 0.5*g.extent(), g.origin[1] + 0.5*g.extent(),
              g.origin[2] + 0.5*g.extent()};

  std::vector<FrequencyRecord> freq;
  for (double r : radii_ladder(cfg, fa, center))
    if (fa.admissible(center, r)) freq.push_back(fa.smoothed_quantities(center, r));

  double tau = cfg.tau > 0 ? cfg.tau : estimate_tau(f);
  ZeroSet zs = extract_zero_set(f, tau);
  double gap = cfg.gap > 0 ? cfg.gap : 2.5*h;
  zs = link_curves(std::move(zs), gap);

  // per-defect-point frequency records at r = 8h where admissible
  for (const auto& p : zs.points)
    if (fa.admissible(p.pos, 8.0*h)) freq.push_back(fa.smoothed_quantities(p.pos, 8.0*h));
  export_frequency_csv(freq, cfg.out_dir + "/frequency.csv", meta);
  export_zero_set_csv(zs, cfg.out_dir + "/zeroset.csv", meta);

  // beta2 / distortion on the defect measure
  std::vector<BetaResult> betas;
  if (!zs.points.empty()) {
    DiscreteMeasure mu = DiscreteMeasure::from_zero_set(zs);
    for (double r : radii_ladder(cfg, fa, center)) {
      try {
        betas.push_back(beta2(mu, center, r));
      } catch (const std::exception&) {
      }
    }
  }
  export_beta_csv(betas, cfg.out_dir + "/beta.csv", meta);

  // weiss / deficit at the center when resolvable
  std::vector<WeissReport> weiss;
  {
    WeissReport wr;
    wr.x = center;
    wr.r = std::min(16.0*h, 0.45*fa.max_admissible_radius(center));
    wr.alpha = f.params().alpha_star;
    if (wr.r >= 8.0*h && fa.admissible(center, 2.0*wr.r)) {
      wr.value = classical_weiss(fa, center, wr.r, wr.alpha, potential_from(cfg),
                                 cfg.fib_points);
      wr.deficit = weiss_deficit(fa, center, wr.r);
      weiss.push_back(wr);
    }
  }
  export_weiss_csv(weiss, cfg.out_dir + "/weiss.csv", meta);

  // Minkowski content of the defect around the center
  {
    CsvWriter w(cfg.out_dir + "/minkowski.csv", meta);
    w.header("r,rho,volume,ratio");
    if (!zs.points.empty()) {
      double r = 0.45*fa.max_admissible_radius(center);
      for (double rho : {r/2.0, r/4.0, r/8.0}) {
        MinkowskiResult m = minkowski_content(zs, center, r, rho, 0.5*h);
        w.row({r, rho, m.volume, m.ratio});
      }
    }
    w.close();
  }
  std::cout << "analyze: " << zs.points.size() << " defect points, "
            << zs.polylines.size() << " polylines, " << freq.size()
            << " frequency records\n";
  return 0;
}

int cmd_cover(const RunConfig& cfg) {
  LineField f = cfg.input_field.empty() ? build_preset_field(cfg)
                                        : load_field(cfg.input_field);
  double tau = cfg.tau > 0 ? cfg.tau : estimate_tau(f);
  ZeroSet zs = extract_zero_set(f, tau);
  const Grid& g = f.grid();
  Vec3 center{g.origin[0] + 0.5*g.extent(), g.origin[1] + 0.5*g.extent(),
              g.origin[2] + 0.5*g.extent()};
  double r = cfg.radii.empty() ? 0.4*g.extent() : cfg.radii.front();
  CoverTree tree = build_cover(zs, center, r, 3);
  fs::create_directories(cfg.out_dir);
  write_text(cfg.out_dir + "/cover.json", cover_to_json(tree));
  CsvWriter w(cfg.out_dir + "/packing.csv", cfg.meta_header());
  w.header("level,radius,balls,packing_sum,vitali,coverage");
  for (int L = 0; L < int(tree.levels.size()); ++L)
    w.raw_row(std::to_string(L) + "," + fmt_double(tree.levels[L].radius) + "," +
              std::to_string(tree.levels[L].balls.size()) + "," +
              fmt_double(tree.levels[L].packing_sum) + "," +
              (vitali_ok(tree, L) ? "1" : "0") + "," +
              fmt_double(coverage_fraction(tree, L, zs)));
  w.close();
  std::cout << "cover: " << tree.levels.size() - 1 << " levels below the root\n";
  return 0;
}

struct Check {
  std::string name;
  bool pass;
  double value;
  double threshold;
};

int cmd_verify(const RunConfig& cfg) {
  std::vector<Check> checks;
  auto add = [&](const std::string& name, bool pass, double value, double thr) {
    checks.push_back({name, pass, value, thr});
  };
  Rng rng(cfg.seed);
  ConeParams params(cfg.kappa);

  // projection idempotence and triangle inequality on seeded samples
  {
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      Vec4 v{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
             rng.uniform(-2, 2)};
      ConePoint p = project_to_cone(v, params);
      ConePoint q = project_to_cone(p.v, params);
      worst = std::max(worst, norm(p.v - q.v));
    }
    add("projection_idempotent", worst <= 1e-12, worst, 1e-12);
  }
  {
    double worst = -1e300;
    for (int t = 0; t < 200; ++t) {
      auto rnd = [&]() {
        return project_to_cone({rng.uniform(-2, 2), rng.uniform(-2, 2),
                                rng.uniform(-2, 2), rng.uniform(-2, 2)}, params);
      };
      ConePoint a = rnd(), b = rnd(), c = rnd();
      double lhs = cone_distance(a, c, params);
      double rhs = cone_distance(a, b, params) + cone_distance(b, c, params);
      worst = std::max(worst, lhs - rhs);
    }
    add("cone_triangle_inequality", worst <= 1e-12, worst, 1e-12);
  }

  // oracle checks at the configured resolution
  {
    RunConfig ocfg = cfg;
    ocfg.boundary = "cylindrical";
    ocfg.interior_init = "preset";
    LineField f = build_preset_field(ocfg);
    FieldAnalysis fa(f, cfg.threads);
    double alpha = params.alpha_star;
    Vec3 center{0, 0, 0};
    double h = f.grid().h;
    double worst = 0;
    std::vector<double> Ns;
    for (double r = 4.0*h; fa.admissible(center, r); r *= 2.0) {
      double N = fa.smoothed_quantities(center, r).N_phi;
      Ns.push_back(N);
      worst = std::max(worst, std::abs(N - alpha));
    }
    add("oracle_smoothed_frequency", worst <= 0.01, worst, 0.01);
    double drop = 0;
    for (size_t i = 1; i < Ns.size(); ++i) drop = std::min(drop, Ns[i] - Ns[i - 1]);
    add("frequency_ladder_monotone", drop >= -5e-3, drop, -5e-3);

    double rc = 0;
    for (double r = 4.0*h; fa.admissible(center, 2.0*r); r *= 2.0) rc = r;
    if (rc > 0) {
      double Nc = fa.classical_quantities(center, rc, PotentialSpec{}, cfg.fib_points).N;
      add("oracle_classical_frequency", std::abs(Nc - alpha) <= 0.01,
          std::abs(Nc - alpha), 0.01);
      double W = classical_weiss(fa, center, rc, alpha, PotentialSpec{}, cfg.fib_points);
      double Hc = fa.classical_quantities(center, rc, PotentialSpec{}, cfg.fib_points).H;
      double scaled = std::abs(W)/(std::pow(rc, -2.0 - 2.0*alpha)*Hc);
      add("oracle_weiss_scaled", scaled <= 1e-3, scaled, 1e-3);
    }
    Vec3 xoff{0.1*0.5*cfg.extent, 0.05*0.5*cfg.extent, 0.0};
    double rid = 0.5*0.5*cfg.extent;
    if (fa.admissible(xoff, rid + h)) {
      IdentityReport rep = fa.verify_identities(xoff, rid, {0, 0, 1});
      double worst_id = std::max({rep.res_ibp, rep.res_dr_D, rep.res_dr_H,
                                  rep.res_log_height});
      add("identity_residuals", worst_id <= 0.02, worst_id, 0.02);
    }
    double rd = 16.0*h;
    if (rd >= 8.0*h && fa.admissible(center, 2.0*rd)) {
      double d = weiss_deficit(fa, center, rd);
      add("oracle_weiss_deficit_scaled", d <= 1e-3, d, 1e-3);
    }
  }

  // beta2 against the dense-direction line infimum on seeded measures
  {
    int S = std::min(cfg.beta_samples, 25);
    double worst = 0;
    for (int t = 0; t < S; ++t) {
      DiscreteMeasure mu;
      for (int a = 0; a < 10; ++a)
        mu.atoms.push_back({{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9),
                             rng.uniform(-0.9, 0.9)},
                            rng.uniform(0.1, 2.0)});
      BetaResult br = beta2(mu, {0, 0, 0}, 1.0);
      // coarse direction scan + local refinement
      double best = 1e300;
      Vec3 bestd{1, 0, 0};
      double ga = M_PI*(3.0 - std::sqrt(5.0));
      for (int i = 0; i < 800; ++i) {
        double z = 1.0 - (2.0*i + 1.0)/800.0;
        double rr = std::sqrt(std::max(0.0, 1.0 - z*z));
        Vec3 d{rr*std::cos(ga*i), rr*std::sin(ga*i), z};
        double cost = 0;
        for (const auto& a : mu.atoms) {
          Vec3 dd = a.x - br.barycenter;
          cost += a.s*(dot(dd, dd) - dot(dd, d)*dot(dd, d));
        }
        if (cost < best) { best = cost; bestd = d; }
      }
      for (int zoom = 0; zoom < 3; ++zoom) {
        double span = 0.12/std::pow(8.0, zoom);
        Vec3 base = bestd;
        for (int i = -6; i <= 6; ++i)
          for (int j = -6; j <= 6; ++j) {
            Vec3 t1 = std::abs(base[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            Vec3 e1 = cross(base, t1);
            e1 = (1.0/norm(e1))*e1;
            Vec3 e2 = cross(base, e1);
            Vec3 d = base + span*i*e1 + span*j*e2;
            d = (1.0/norm(d))*d;
            double cost = 0;
            for (const auto& a : mu.atoms) {
              Vec3 dd = a.x - br.barycenter;
              cost += a.s*(dot(dd, dd) - dot(dd, d)*dot(dd, d));
            }
            if (cost < best) { best = cost; bestd = d; }
          }
      }
      worst = std::max(worst, std::abs(br.beta2 - best));
    }
    add("beta2_line_infimum", worst <= 1e-6, worst, 1e-6);
  }

  // covering on a synthetic segment
  {
    ZeroSet seg;
    int M = 10000;
    for (int i = 0; i <= M; ++i)
      seg.points.push_back({{0, 0, -1.0 + 2.0*i/M}, 2.0/M});
    CoverTree tree = build_cover(seg, {0, 0, 0}, 1.0, 3);
    bool audits = vitali_ok(tree, 1) && vitali_ok(tree, 2) && vitali_ok(tree, 3) &&
                  coverage_fraction(tree, 3, seg) == 1.0;
    double s1 = packing_measure(tree, 1);
    double s3 = packing_measure(tree, 3);
    double spread = std::max(s1, s3)/std::min(s1, s3);
    add("segment_cover_audits", audits, audits ? 1 : 0, 1);
    add("segment_packing_stable", spread <= 1.10, spread, 1.10);
  }

  // reifenberg separation: line vs plane controls
  {
    DiscreteMeasure line;
    for (int i = 0; i < 33; ++i)
      line.atoms.push_back({{-0.9 + 1.8*i/32.0, 0, 0}, 1.0});
    double vline = reifenberg_hypothesis(line, {0, 0, 0}, 1.0, 0.05);
    DiscreteMeasure plane;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        plane.atoms.push_back({{-0.8 + 1.6*i/8.0, -0.8 + 1.6*j/8.0, 0}, 1.0});
    double vplane = reifenberg_hypothesis(plane, {0, 0, 0}, 1.0, 0.05);
    add("reifenberg_line_null", vline <= 1e-9, vline, 1e-9);
    add("reifenberg_plane_positive", vplane >= 3.0*std::max(vline, 1e-12), vplane,
        3.0*std::max(vline, 1e-12));
  }

  // report
  fs::create_directories(cfg.out_dir);
  nlohmann::json j;
  j["build"] = kBuildId;
  j["seed"] = cfg.seed;
  j["n"] = cfg.n;
  j["kappa"] = cfg.kappa;
  j["h"] = cfg.h();
  bool all = true;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    j["checks"].push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"value", fmt_double(c.value)},
                           {"threshold", fmt_double(c.threshold)}});
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " value="
              << fmt_double(c.value) << " threshold=" << fmt_double(c.threshold)
              << "\n";
  }
  j["all_pass"] = all;
  write_text(cfg.out_dir + "/verify_report.json", j.dump(2) + "\n");
  return all ? 0 : 1;
}

int cmd_report(const RunConfig& cfg) {
  // gather per-file row counts and numeric column ranges into one table
  CsvWriter w(cfg.out_dir + "/summary.csv", cfg.meta_header());
  w.header("file,rows,columns");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
    if (e.path().extension() == ".csv" && e.path().filename() != "summary.csv")
      names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    std::ifstream is(cfg.out_dir + "/" + name);
    std::string line, header;
    std::int64_t rows = 0;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (header.empty()) { header = line; continue; }
      ++rows;
    }
    std::int64_t cols = header.empty() ? 0 : std::count(header.begin(), header.end(), ',') + 1;
    w.raw_row(name + "," + std::to_string(rows) + "," + std::to_string(cols));
  }
  w.close();
  std::cout << "report: " << names.size() << " tables summarized\n";
  return 0;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "oracle") return cmd_oracle(cfg);
  if (command == "relax") return cmd_relax(cfg);
  if (command == "analyze") return cmd_analyze(cfg);
  if (command == "cover") return cmd_cover(cfg);
  if (command == "verify") return cmd_verify(cfg);
  if (command == "report") return cmd_report(cfg);
  std::cerr << "unknown command: " << command << "\n";
  return 2;
}

}  // namespace lcd
