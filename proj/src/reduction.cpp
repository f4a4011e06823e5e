#include "wlab/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double offkernel_norm(const SphereField& f) {
  return f.coeffs().tail(f.coeffs().size() - 4).norm();
}

}  // namespace

ReducedPoint solve_auxiliary(const MetricFamily& family, const S3Point& p, double rho,
                             const SolverConfig& cfg, const SphereField* seed) {
  if (!(rho >= cfg.delta - 1e-12 && rho <= kPi - cfg.delta + 1e-12))
    throw std::invalid_argument("solve_auxiliary: rho outside [delta, pi - delta]");
  if (!family.within_validity_bound())
    throw NonPositiveDefinite("solve_auxiliary: family outside validity bound");

  auto grid = SphereGrid::get(cfg.lmax);
  auto padded = SphereGrid::get(cfg.lmax + cfg.geom_pad);
  auto cache = build_radial_cache(family, p, rho, padded);
  const EnergyMachine machine(cache, grid);

  ReducedPoint out;
  out.family = family;
  out.epsilon = family.epsilon();
  out.p = p;
  out.rho = rho;
  out.w = SphereField(grid);
  if (seed && seed->coeffs().size() > 0) {
    // adopt the seed's coefficients (possibly from a coarser grid)
    const int ncopy = std::min<int>(seed->coeffs().size(), grid->ncoeffs());
    out.w.coeffs().head(ncopy) = seed->coeffs().head(ncopy);
    out.w = zero_low_modes(out.w);
  }

  GradientConfig gcfg;
  gcfg.fd_step = cfg.fd_step;

  double best_residual = std::numeric_limits<double>::infinity();
  SphereField best_w = out.w;
  for (int it = 0; it <= cfg.max_iter; ++it) {
    const SphereField grad = machine.gradient(out.w, gcfg);
    const SphereField ghat = machine.gradient_density(out.w, grad);
    const double resid = offkernel_norm(ghat);
    out.residual_history.push_back(resid);
    for (int i = 0; i < 4; ++i) out.kernel_coeffs[i] = ghat.coeffs()[i];
    out.grad_norm = ghat.l2_norm();
    out.iterations = it;
    if (resid < best_residual) {
      best_residual = resid;
      best_w = out.w;
    }
    if (resid < cfg.tol) {
      out.converged = true;
      break;
    }
    if (it == cfg.max_iter) break;
    out.w -= umbilic_hessian_invert(zero_low_modes(ghat), rho);
  }
  if (!out.converged) out.w = best_w;
  out.aux_residual = out.residual_history.back();
  out.phi = machine.conformal_energy(out.w);
  return out;
}

double reduced_functional(const MetricFamily& family, const S3Point& p, double rho,
                          const SolverConfig& cfg) {
  const ReducedPoint r = solve_auxiliary(family, p, rho, cfg);
  if (!r.converged)
    throw NoConvergence("reduced_functional: auxiliary solver did not converge");
  return r.phi;
}

std::array<double, 4> kernel_coefficients(const ReducedPoint& reduced) {
  return reduced.kernel_coeffs;
}

namespace {

struct PhiEval {
  double phi = -std::numeric_limits<double>::infinity();
  ReducedPoint point;
  bool ok = false;
};

PhiEval eval_phi(const MetricFamily& family, const S3Point& p, double rho,
                 const SolverConfig& cfg, const SphereField* seed,
                 std::vector<TrailRecord>& trail, const char* stage) {
  PhiEval out;
  TrailRecord rec;
  rec.stage = stage;
  rec.p = p;
  rec.rho = rho;
  try {
    out.point = solve_auxiliary(family, p, rho, cfg, seed);
    out.ok = out.point.converged;
    if (out.ok) out.phi = out.point.phi;
    rec.phi = out.point.phi;
    rec.aux_residual = out.point.aux_residual;
    rec.iterations = out.point.iterations;
    rec.converged = out.point.converged;
  } catch (const NumericalError&) {
    rec.converged = false;
  }
  trail.push_back(rec);
  return out;
}

// lexicographic order on (rho, quaternion components), the grid tie-break
bool lex_less(double rho_a, const S3Point& pa, double rho_b, const S3Point& pb) {
  if (rho_a != rho_b) return rho_a < rho_b;
  for (int i = 0; i < 4; ++i)
    if (pa[i] != pb[i]) return pa[i] < pb[i];
  return false;
}

}  // namespace

CriticalSearchResult find_critical(const MetricFamily& family, const OptimizerConfig& cfg) {
  CriticalSearchResult res;

  // ---- coarse grid stage ------------------------------------------------
  SolverConfig coarse = cfg.solver;
  coarse.lmax = cfg.coarse_lmax;
  coarse.tol = cfg.coarse_tol;
  coarse.delta = std::min(coarse.delta, cfg.rho_min);

  std::vector<double> rhos(cfg.rho_count);
  for (int i = 0; i < cfg.rho_count; ++i)
    rhos[i] = cfg.rho_min + (cfg.rho_max - cfg.rho_min) * (i + 0.5) / cfg.rho_count;

  double best_phi = -std::numeric_limits<double>::infinity();
  double worst_phi = std::numeric_limits<double>::infinity();
  S3Point best_p;
  double best_rho = rhos[0];
  SphereField best_seed;
  bool any = false;
  for (double rho : rhos) {
    for (const S3Point& p : cell24()) {
      const PhiEval e = eval_phi(family, p, rho, coarse, nullptr, res.trail, "grid");
      if (!e.ok) continue;
      const bool better =
          !any || e.phi > best_phi + 1e-12 * std::max(1.0, std::abs(best_phi)) ||
          (std::abs(e.phi - best_phi) <= 1e-12 * std::max(1.0, std::abs(best_phi)) &&
           lex_less(rho, p, best_rho, best_p));
      worst_phi = std::min(worst_phi, e.phi);
      if (better) {
        best_phi = e.phi;
        best_p = p;
        best_rho = rho;
        best_seed = e.point.w;
        any = true;
      }
    }
  }
  if (!any) throw NoConvergence("find_critical: no grid sample converged");

  // degenerate flat landscape: a manifold of critical points, not a point
  if (best_phi - worst_phi < cfg.flat_spread) {
    res.degenerate_flat = true;
    res.incumbent = solve_auxiliary(family, best_p, best_rho, cfg.solver);
    return res;
  }

  // ---- Nelder-Mead refinement in (rho, exp chart at incumbent) ----------
  SolverConfig full = cfg.solver;
  full.delta = std::min(full.delta, cfg.rho_min);
  const S3Point anchor = best_p;
  SphereField warm = best_seed;

  auto phi_at = [&](const Eigen::Vector4d& x, const char* stage) -> double {
    const double rho = x[0];
    if (rho < cfg.rho_min || rho > cfg.rho_max)
      return std::numeric_limits<double>::infinity();
    const S3Point p = frame_exp(anchor, Vec3(x[1], x[2], x[3]));
    const PhiEval e = eval_phi(family, p, rho, full, &warm, res.trail, stage);
    if (!e.ok) return std::numeric_limits<double>::infinity();
    warm = e.point.w;
    return -e.phi;  // minimized
  };

  using Vertex = std::pair<Eigen::Vector4d, double>;
  std::vector<Vertex> simplex;
  Eigen::Vector4d x0(best_rho, 0, 0, 0);
  simplex.push_back({x0, phi_at(x0, "refine")});
  const double drho = 0.5 * (cfg.rho_max - cfg.rho_min) / cfg.rho_count;
  const double da = 0.15;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d x = x0;
    x[i] += (i == 0) ? drho : da;
    if (i == 0 && (x[0] > cfg.rho_max || x[0] < cfg.rho_min)) x[0] = x0[0] - drho;
    simplex.push_back({x, phi_at(x, "refine")});
  }

  int evals = (int)simplex.size();
  auto order = [&] {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.second < b.second; });
  };
  order();
  while (evals < cfg.nm_max_eval) {
    double dspread = 0;
    const double vspread = std::abs(simplex[4].second - simplex[0].second);
    for (int i = 1; i < 5; ++i)
      dspread = std::max(dspread, (simplex[i].first - simplex[0].first).norm());
    if (dspread < cfg.nm_domain_tol && vspread < cfg.nm_value_tol) break;

    const Eigen::Vector4d centroid =
        (simplex[0].first + simplex[1].first + simplex[2].first + simplex[3].first) / 4.0;
    const Eigen::Vector4d xr = centroid + (centroid - simplex[4].first);
    const double fr = phi_at(xr, "refine");
    ++evals;
    if (fr < simplex[0].second) {
      const Eigen::Vector4d xe = centroid + 2.0 * (centroid - simplex[4].first);
      const double fe = phi_at(xe, "refine");
      ++evals;
      simplex[4] = (fe < fr) ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < simplex[3].second) {
      simplex[4] = {xr, fr};
    } else {
      const Eigen::Vector4d xc = centroid + 0.5 * (simplex[4].first - centroid);
      const double fc = phi_at(xc, "refine");
      ++evals;
      if (fc < simplex[4].second) {
        simplex[4] = {xc, fc};
      } else {
        for (int i = 1; i < 5; ++i) {
          simplex[i].first = simplex[0].first + 0.5 * (simplex[i].first - simplex[0].first);
          simplex[i].second = phi_at(simplex[i].first, "refine");
          ++evals;
        }
      }
    }
    order();
  }

  // ---- certificate at the incumbent -------------------------------------
  const Eigen::Vector4d xbest = simplex[0].first;
  const S3Point pbest = frame_exp(anchor, Vec3(xbest[1], xbest[2], xbest[3]));
  res.incumbent = solve_auxiliary(family, pbest, xbest[0], cfg.solver, &warm);
  {
    TrailRecord rec;
    rec.stage = "final";
    rec.p = pbest;
    rec.rho = xbest[0];
    rec.phi = res.incumbent.phi;
    rec.aux_residual = res.incumbent.aux_residual;
    rec.iterations = res.incumbent.iterations;
    rec.converged = res.incumbent.converged;
    res.trail.push_back(rec);
  }
  const double amax = std::max({std::abs(res.incumbent.kernel_coeffs[0]),
                                std::abs(res.incumbent.kernel_coeffs[1]),
                                std::abs(res.incumbent.kernel_coeffs[2]),
                                std::abs(res.incumbent.kernel_coeffs[3])});
  const double thresh = cfg.critical_factor * cfg.solver.tol;
  res.critical = res.incumbent.converged && res.incumbent.aux_residual < thresh &&
                 amax < thresh;
  res.window_collapse = (xbest[0] - cfg.rho_min < 1e-3) || (cfg.rho_max - xbest[0] < 1e-3);
  return res;
}

}  // namespace wlab
