#include <cmath>
#include <cstdio>
#include <fstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wlab/config.hpp"
#include "wlab/energy.hpp"
#include "wlab/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace wlab;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

S3Point parse_point(const std::string& s) {
  Vec4 q;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &q[0], &q[1], &q[2], &q[3]) != 4)
    throw ConfigError("--p expects four comma-separated components");
  return S3Point(q);
}

SphereField load_field(const std::string& path, const std::shared_ptr<const SphereGrid>& grid) {
  if (path.empty()) return SphereField(grid);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient file '" + path + "'");
  json j;
  in >> j;
  const auto v = j.at("w_coeffs").get<std::vector<double>>();
  SphereField f(grid);
  const int n = std::min<size_t>(v.size(), f.coeffs().size());
  for (int i = 0; i < n; ++i) f.coeffs()[i] = v[i];
  return f;
}

json curvature_point_report(const MetricFamily& fam, const S3Point& p) {
  const CurvatureBundle b = curvature_bundle(fam, p);
  json j;
  j["p"] = {p[0], p[1], p[2], p[3]};
  j["scalar"] = b.scalar;
  j["ric0_norm2"] = b.ric0_norm2;
  j["ricci"] = {{b.ric(0, 0), b.ric(0, 1), b.ric(0, 2)},
                {b.ric(1, 0), b.ric(1, 1), b.ric(1, 2)},
                {b.ric(2, 0), b.ric(2, 1), b.ric(2, 2)}};
  j["symmetry_residual"] = b.symmetry_residual();
  j["first_bianchi_residual"] = b.bianchi1_residual();
  j["decomposition_residual"] = ricci_decomposition_residual(b);
  j["contracted_bianchi_residual"] = bianchi_residual(fam, p).norm();
  return j;
}

int cmd_curvature(const RunConfig& cfg, int npoints) {
  const auto dir = prepare_out_dir(cfg, "curvature");
  json rep;
  rep["family"] = cfg.family.to_json();
  rep["points"] = json::array();
  double worst_bianchi = 0;
  auto pts = seeded_points(npoints, cfg.seed);
  pts.insert(pts.begin(), S3Point());
  for (const auto& p : pts) {
    if (!cfg.family.is_group() && std::abs(1.0 + p[0]) < 0.2) continue;
    const json pj = curvature_point_report(cfg.family, p);
    worst_bianchi = std::max(worst_bianchi, pj.at("contracted_bianchi_residual").get<double>());
    rep["points"].push_back(pj);
  }
  rep["max_contracted_bianchi_residual"] = worst_bianchi;
  write_json_file(dir / "curvature.json", rep);
  std::printf("wrote %s\n", (dir / "curvature.json").c_str());
  return 0;
}

int cmd_sphere(const RunConfig& cfg, const S3Point& p, double rho, const std::string& wfile) {
  const auto dir = prepare_out_dir(cfg, "sphere");
  auto grid = SphereGrid::get(cfg.solver.lmax);
  const SphereField w = load_field(wfile, grid);
  const ImmersedSphere s = graph_sphere(cfg.family, p, rho, w);
  const EnergyReport e = energy(s);

  json j;
  j["family"] = cfg.family.to_json();
  j["p"] = {p[0], p[1], p[2], p[3]};
  j["rho"] = rho;
  j["lmax"] = grid->lmax();
  j["area"] = e.area;
  j["conformal_energy"] = e.conformal;
  j["willmore_energy"] = e.willmore;
  j["half_a0_sq"] = e.half_a0_sq;
  j["normal_residual"] = s.normal_residual;
  j["integrand_identity_residual"] = s.integrand_identity_residual();
  write_json_file(dir / "sphere.json", j);

  CsvWriter csv(dir / "nodes.csv");
  csv.row({"theta", "phi", "q0", "q1", "q2", "q3", "H", "A0_sq", "area_el"});
  for (int n = 0; n < grid->nnodes(); ++n)
    csv.row({CsvWriter::num(grid->node_theta(n)), CsvWriter::num(grid->node_phi(n)),
             CsvWriter::num(s.position(n, 0)), CsvWriter::num(s.position(n, 1)),
             CsvWriter::num(s.position(n, 2)), CsvWriter::num(s.position(n, 3)),
             CsvWriter::num(s.H[n]), CsvWriter::num(s.A0_sq[n]),
             CsvWriter::num(s.area_el[n])});
  std::printf("wrote %s\n", (dir / "sphere.json").c_str());
  return 0;
}

int cmd_energy(const RunConfig& cfg, const S3Point& p, double rho, const std::string& wfile,
               bool with_gradient, const std::string& mode) {
  const auto dir = prepare_out_dir(cfg, "energy");
  auto grid = SphereGrid::get(cfg.solver.lmax);
  const SphereField w = load_field(wfile, grid);
  const EnergyReport e = energy(graph_sphere(cfg.family, p, rho, w));
  json j;
  j["family"] = cfg.family.to_json();
  j["rho"] = rho;
  j["conformal_energy"] = e.conformal;
  j["willmore_energy"] = e.willmore;
  j["area"] = e.area;
  j["half_a0_sq"] = e.half_a0_sq;
  if (with_gradient) {
    if (mode != "fd" && mode != "analytic")
      throw ConfigError("--mode must be fd or analytic");
    const GradientMode gm =
        mode == "analytic" ? GradientMode::kAnalyticRound : GradientMode::kFiniteDifference;
    const SphereField g = willmore_gradient(cfg.family, p, rho, w, gm);
    j["gradient_mode"] = mode;
    j["gradient_coeffs"] =
        std::vector<double>(g.coeffs().data(), g.coeffs().data() + g.coeffs().size());
    j["gradient_norm"] = g.l2_norm();
  }
  write_json_file(dir / "energy.json", j);
  std::printf("wrote %s\n", (dir / "energy.json").c_str());
  return 0;
}

int cmd_reduce(const RunConfig& cfg, const S3Point& p, double rho) {
  const auto dir = prepare_out_dir(cfg, "reduce");
  const ReducedPoint r = solve_auxiliary(cfg.family, p, rho, cfg.solver);
  write_json_file(dir / "reduced.json", reduced_point_json(r));
  std::printf("wrote %s (converged=%d, phi=%.12e)\n", (dir / "reduced.json").c_str(),
              int(r.converged), r.phi);
  if (!r.converged) {
    std::fprintf(stderr, "reduce: no convergence after %d iterations (residual %.3e)\n",
                 r.iterations, r.aux_residual);
    return 2;
  }
  return 0;
}

int cmd_find_critical(const RunConfig& cfg) {
  const auto dir = prepare_out_dir(cfg, "find-critical");
  OptimizerConfig ocfg = cfg.optimizer;
  ocfg.solver = cfg.solver;
  const CriticalSearchResult res = find_critical(cfg.family, ocfg);

  CsvWriter csv(dir / "trail.csv");
  csv.row({"stage", "q0", "q1", "q2", "q3", "rho", "phi", "aux_residual", "iterations",
           "converged"});
  for (const auto& t : res.trail)
    csv.row({t.stage, CsvWriter::num(t.p[0]), CsvWriter::num(t.p[1]), CsvWriter::num(t.p[2]),
             CsvWriter::num(t.p[3]), CsvWriter::num(t.rho), CsvWriter::num(t.phi),
             CsvWriter::num(t.aux_residual), std::to_string(t.iterations),
             t.converged ? "1" : "0"});

  json j;
  j["incumbent"] = reduced_point_json(res.incumbent);
  j["critical"] = res.critical;
  j["degenerate_flat"] = res.degenerate_flat;
  j["window_collapse"] = res.window_collapse;
  j["evaluations"] = res.trail.size();
  write_json_file(dir / "critical.json", j);
  std::printf("wrote %s (critical=%d, flat=%d, phi=%.12e)\n", (dir / "critical.json").c_str(),
              int(res.critical), int(res.degenerate_flat), res.incumbent.phi);
  return 0;
}

int cmd_asymptotics(const RunConfig& cfg, double eps) {
  const auto dir = prepare_out_dir(cfg, "asymptotics");
  const S3Point p;
  const std::vector<double> fit_rhos = {0.06, 0.09, 0.12, 0.18};
  const std::vector<double> rem_eps = {eps / 2, eps};
  const std::vector<double> rem_rhos = {0.08, 0.12, 0.16, 0.2};
  const std::vector<double> prof_rhos = {0.05, 0.1, 0.2};

  const AsymptoticFit efit =
      small_radius_energy_fit(cfg.family, p, fit_rhos, eps, cfg.asymptotics);
  const AsymptoticFit rfit =
      remainder_bound_fit(cfg.family, p, rem_eps, rem_rhos, cfg.asymptotics);

  CsvWriter csv(dir / "samples.csv");
  csv.row({"eps", "rho", "phi", "omega", "target", "profile_residual"});
  for (const auto& s : efit.samples) {
    const double target = efit.target_coefficient * std::pow(s.rho, 4);
    csv.row({CsvWriter::num(s.eps), CsvWriter::num(s.rho), CsvWriter::num(s.value),
             CsvWriter::num(s.value - target), CsvWriter::num(target), ""});
  }
  for (const auto& s : rfit.samples) {
    const double ric2 = curvature_bundle(cfg.family.with_epsilon(s.eps), p).ric0_norm2;
    const double target = (kPi / 5.0) * ric2 * std::pow(s.rho, 4);
    csv.row({CsvWriter::num(s.eps), CsvWriter::num(s.rho), CsvWriter::num(s.value + target),
             CsvWriter::num(s.value), CsvWriter::num(target), ""});
  }
  json profj = json::array();
  for (double rho : prof_rhos) {
    try {
      const double pres = w_profile_residual(cfg.family, p, rho, eps, cfg.asymptotics);
      csv.row({CsvWriter::num(eps), CsvWriter::num(rho), "", "", "", CsvWriter::num(pres)});
      profj.push_back({{"rho", rho}, {"residual", pres}});
    } catch (const NumericalError& e) {
      profj.push_back({{"rho", rho}, {"error", e.what()}});
    }
  }

  json j;
  j["family"] = cfg.family.with_epsilon(eps).to_json();
  j["energy_fit"] = {{"exponent", efit.fitted_exponent},
                     {"coefficient", efit.fitted_coefficient},
                     {"target_coefficient", efit.target_coefficient},
                     {"relative_error", efit.relative_error},
                     {"degenerate_zero", efit.degenerate_zero},
                     {"rho_window", {efit.rho_min, efit.rho_max}}};
  j["remainder_fit"] = {{"omega_slope", rfit.fitted_exponent},
                        {"bound_constant", rfit.bound_constant},
                        {"rho_window", {rfit.rho_min, rfit.rho_max}}};
  j["profile_residuals"] = profj;
  write_json_file(dir / "fits.json", j);
  std::printf("wrote %s (exponent=%.3f, coefficient=%.6e)\n", (dir / "fits.json").c_str(),
              efit.fitted_exponent, efit.fitted_coefficient);
  return 0;
}

int cmd_classify(const RunConfig& cfg) {
  const auto dir = prepare_out_dir(cfg, "classify");
  json j = classify_family(cfg.family, cfg.seed, cfg.diagnostics);
  j["family"] = cfg.family.to_json();
  write_json_file(dir / "classification.json", j);
  std::printf("wrote %s (case %s)\n", (dir / "classification.json").c_str(),
              j.at("case").get<std::string>().c_str());
  return 0;
}

struct Check {
  std::string name;
  double value;
  double tol;
  bool pass;
};

void check(std::vector<Check>& cs, const std::string& name, double value, double tol) {
  cs.push_back({name, value, tol, std::abs(value) < tol});
}

int report(const std::vector<Check>& cs) {
  int fails = 0;
  for (const auto& c : cs) {
    std::printf("%-58s %10.3e  (tol %7.1e)  %s\n", c.name.c_str(), c.value, c.tol,
                c.pass ? "PASS" : "FAIL");
    if (!c.pass) ++fails;
  }
  std::printf("%d/%zu checks passed\n", int(cs.size()) - fails, cs.size());
  return fails == 0 ? 0 : 2;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  (void)cfg;
  std::vector<Check> cs;
  const bool all = suite == "all";

  if (all || suite == "spectral") {
    auto g = SphereGrid::get(16);
    check(cs, "spectral: total quadrature weight - 4pi", g->weights().sum() - 4 * kPi, 1e-12);
    const auto y2 = SphereField::harmonic(g, 2, 0);
    check(cs, "spectral: <Y20,Y20> - 1",
          y2.node_values().cwiseProduct(y2.node_values()).dot(g->weights()) - 1.0, 1e-12);
    check(cs, "spectral: hessian eigenvalue at l=2, rho=pi/2",
          umbilic_hessian_apply(y2, kPi / 2).coeff(2, 0) - 12.0, 1e-12);
    SphereField low(g);
    low.coeffs()[2] = 1.0;
    check(cs, "spectral: hessian annihilates l<=1",
          umbilic_hessian_apply(low, 0.7).coeffs().norm(), 1e-12);
    const SphereField r = zero_low_modes(SphereField::harmonic(g, 5, -3, 2.0));
    check(cs, "spectral: inverse round trip",
          (umbilic_hessian_apply(umbilic_hessian_invert(r, 0.9), 0.9) - r).l2_norm(), 1e-10);
  }
  if (all || suite == "curvature") {
    const CurvatureBundle b = curvature_bundle(MetricFamily::round(), S3Point());
    check(cs, "curvature: round scalar - 6", b.scalar - 6.0, 1e-12);
    check(cs, "curvature: round traceless Ricci", std::sqrt(std::max(0.0, b.ric0_norm2)), 1e-8);
    const CurvatureBundle bb = curvature_bundle(MetricFamily::berger(1.2), S3Point());
    check(cs, "curvature: berger |Ric0|^2 - 32 eps^2/3", bb.ric0_norm2 - 32.0 * 0.04 / 3.0,
          1e-10);
    check(cs, "curvature: berger Ricci decomposition", ricci_decomposition_residual(bb), 1e-6);
    check(cs, "curvature: berger contracted Bianchi",
          bianchi_residual(MetricFamily::berger(1.3), S3Point(0.5, 0.5, 0.5, 0.5)).norm(),
          1e-5);
  }
  if (all || suite == "geometry") {
    auto grid = SphereGrid::get(16);
    for (double rho : {0.3, kPi / 2, 2.2}) {
      const ImmersedSphere s =
          graph_sphere(MetricFamily::round(), S3Point(), rho, SphereField(grid));
      const double Hexp = std::sin(2 * rho) / std::pow(std::sin(rho), 2);
      double hmax = 0;
      for (int n = 0; n < grid->nnodes(); ++n) hmax = std::max(hmax, std::abs(s.H[n] - Hexp));
      check(cs, "geometry: umbilic H error at rho=" + std::to_string(rho), hmax, 1e-7);
      check(cs, "geometry: umbilic |A0|_inf at rho=" + std::to_string(rho),
            std::sqrt(s.A0_sq.cwiseAbs().maxCoeff()), 1e-7);
      check(cs, "geometry: area - 4pi sin^2 at rho=" + std::to_string(rho),
            s.area_el.dot(grid->weights()) - 4 * kPi * std::pow(std::sin(rho), 2), 1e-8);
    }
  }
  if (all || suite == "energy") {
    auto grid = SphereGrid::get(16);
    const EnergyReport e =
        energy(graph_sphere(MetricFamily::round(), S3Point(), kPi / 2, SphereField(grid)));
    check(cs, "energy: umbilic conformal energy", e.conformal, 1e-9);
    check(cs, "energy: W - 4pi at the equator", e.willmore - 4 * kPi, 1e-8);
    SphereField w(grid);
    w.coeffs()[SphereGrid::index(2, 0)] = 0.01;
    const EnergyReport e2 = energy(graph_sphere(MetricFamily::round(), S3Point(), 0.5, w));
    check(cs, "energy: integrand identity (relative)",
          (e2.conformal - e2.half_a0_sq) / e2.half_a0_sq, 1e-8);
  }
  if (cs.empty()) throw ConfigError("verify: unknown suite '" + suite + "'");
  return report(cs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"willmore-lab: perturbed umbilic spheres and the conformal Willmore functional"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, pstr = "1,0,0,0", wfile, mode = "fd", suite = "all";
  double rho = 0.8, eps = 0.05;
  int jobs = 0, npoints = 5;
  bool with_gradient = false;

  app.add_option("--config", config_path, "RunConfig JSON file");
  app.add_option("--out", out_dir, "output directory (default ./out/<cmd>-<stamp>)");
  app.add_option("--jobs", jobs, "parallelism degree");

  auto* c_curv = app.add_subcommand("curvature", "curvature report at probe points");
  c_curv->add_option("--points", npoints, "number of seeded probe points");
  auto* c_sphere = app.add_subcommand("sphere", "build and export a perturbed geodesic sphere");
  auto* c_energy = app.add_subcommand("energy", "energy report (optionally the gradient)");
  auto* c_reduce = app.add_subcommand("reduce", "solve the auxiliary equation at (p, rho)");
  auto* c_crit = app.add_subcommand("find-critical", "maximize the reduced energy");
  auto* c_asym = app.add_subcommand("asymptotics", "small-radius fits");
  auto* c_class = app.add_subcommand("classify", "curvature case classification");
  auto* c_verify = app.add_subcommand("verify", "invariant suites");

  for (auto* c : {c_sphere, c_energy, c_reduce}) {
    c->add_option("--p", pstr, "center point, four comma-separated components");
    c->add_option("--rho", rho, "geodesic radius");
    c->add_option("--w-file", wfile, "JSON file with w_coeffs");
  }
  c_energy->add_flag("--gradient", with_gradient, "also compute the gradient");
  c_energy->add_option("--mode", mode, "gradient mode: fd | analytic");
  c_asym->add_option("--eps", eps, "perturbation size");
  c_verify->add_option("--suite", suite, "spectral | curvature | geometry | energy | all");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
#ifdef _OPENMP
    omp_set_num_threads(cfg.jobs);
#endif
    if (c_curv->parsed()) return cmd_curvature(cfg, npoints);
    if (c_sphere->parsed()) return cmd_sphere(cfg, parse_point(pstr), rho, wfile);
    if (c_energy->parsed())
      return cmd_energy(cfg, parse_point(pstr), rho, wfile, with_gradient, mode);
    if (c_reduce->parsed()) return cmd_reduce(cfg, parse_point(pstr), rho);
    if (c_crit->parsed()) return cmd_find_critical(cfg);
    if (c_asym->parsed()) return cmd_asymptotics(cfg, eps);
    if (c_class->parsed()) return cmd_classify(cfg);
    if (c_verify->parsed()) return cmd_verify(cfg, suite);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
