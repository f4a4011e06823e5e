#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wlab/energy.hpp"

namespace wlab {

struct SolverConfig {
  int lmax = 16;         // band limit of the solution and of the spectral ops
  double tol = 1e-8;     // on || P (gradient density) ||_{L^2(S^2)}
  int max_iter = 60;
  double delta = 0.15;   // admissible window [delta, pi - delta] for rho
  double fd_step = 1e-4;
  int geom_pad = 2;      // extra band limit for the surface geometry
};

// Output of the reduction at (eps, p, rho): the solved offset w in the
// complement of the low modes, the reduced energy, and the residuals.
struct ReducedPoint {
  MetricFamily family;
  double epsilon = 0.0;
  S3Point p;
  double rho = 0.0;
  SphereField w;
  double phi = 0.0;                     // I_eps on the solved graph
  double aux_residual = 0.0;            // || P ghat ||, ghat = gradient density
  double grad_norm = 0.0;               // || ghat || including the low modes
  std::array<double, 4> kernel_coeffs{};  // <ghat, q_i>, i = 0..3
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

// Solve the low-mode-projected Euler-Lagrange equation by the preconditioned
// residual iteration w <- w - Hess0^{-1} P ghat(w), with the umbilic second
// variation as the fixed preconditioner. Returns the best iterate flagged
// converged/not; seed (projected onto the complement) is optional.
ReducedPoint solve_auxiliary(const MetricFamily& family, const S3Point& p, double rho,
                             const SolverConfig& cfg = {},
                             const SphereField* seed = nullptr);

// Phi_eps(p, rho); throws NoConvergence when the solver fails.
double reduced_functional(const MetricFamily& family, const S3Point& p, double rho,
                          const SolverConfig& cfg = {});

// Projections of the full gradient density onto the low-mode basis.
std::array<double, 4> kernel_coefficients(const ReducedPoint& reduced);

struct OptimizerConfig {
  SolverConfig solver;      // full-quality solves (refinement + certificate)
  int coarse_lmax = 8;      // grid-stage resolution
  double coarse_tol = 1e-6;
  int rho_count = 8;
  double rho_min = 0.15;
  double rho_max = 3.14159265358979323846 - 0.15;
  int nm_max_eval = 160;
  double nm_domain_tol = 1e-5;
  double nm_value_tol = 1e-12;
  double flat_spread = 1e-10;  // grid spread below this: flat landscape
  double critical_factor = 10.0;  // criticality threshold factor on tol
};

struct TrailRecord {
  std::string stage;  // "grid" | "refine" | "final"
  S3Point p;
  double rho = 0.0;
  double phi = 0.0;
  double aux_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct CriticalSearchResult {
  ReducedPoint incumbent;
  bool critical = false;        // aux_residual and max |A_i| below 10 tol
  bool degenerate_flat = false; // grid spread of Phi below flat_spread
  bool window_collapse = false; // maximizer stuck at the rho boundary
  std::vector<TrailRecord> trail;
};

// Maximize Phi_eps over S^3 x [rho_min, rho_max]: coarse 24-cell x rho grid,
// then Nelder-Mead refinement in (rho, exponential chart at the incumbent).
CriticalSearchResult find_critical(const MetricFamily& family, const OptimizerConfig& cfg = {});

}  // namespace wlab
