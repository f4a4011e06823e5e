#pragma once

#include "wlab/reduction.hpp"

namespace wlab {

struct AsymptoticSample {
  double eps = 0.0;
  double rho = 0.0;
  double value = 0.0;  // Phi, or Omega for the remainder grid
  bool converged = false;
};

struct AsymptoticFit {
  std::vector<AsymptoticSample> samples;  // sorted by (eps, rho)
  double fitted_exponent = 0.0;
  double fitted_coefficient = 0.0;
  double target_coefficient = 0.0;
  double relative_error = 0.0;
  double bound_constant = 0.0;  // M = max |Omega| / (eps^2 rho^5)
  bool degenerate_zero = false;
  double rho_min = 0.0, rho_max = 0.0;  // fit window metadata
};

struct AsymptoticsConfig {
  SolverConfig solver = [] {
    SolverConfig s;
    s.delta = 0.04;  // the small-radius window reaches below the reduction default
    return s;
  }();
};

// Ric_p(Theta, Theta) of the family at p as a band-limited field on S^2
// (Theta via the G(p)-orthonormal frame); shared by the profile residual and
// by profile-seeded solves.
SphereField ricci_direction_field(const MetricFamily& family, const S3Point& p,
                                  const std::shared_ptr<const SphereGrid>& grid);

// The small-radius reference profile (1/12) rho^3 Ric(Theta,Theta)
// - (1/36) rho^3 R restricted to the complement of the low modes.
SphereField reference_profile(const MetricFamily& family, const S3Point& p, double rho,
                              const std::shared_ptr<const SphereGrid>& grid);

// log-log regression of Phi(rho) over rho_list; target (pi/5)|Ric0(g_eps)(p)|^2.
AsymptoticFit small_radius_energy_fit(const MetricFamily& family, const S3Point& p,
                                      const std::vector<double>& rho_list, double eps,
                                      const AsymptoticsConfig& cfg = {});

// || w_eps(p,rho) - P[reference profile] ||_{L^2} / rho^3.
double w_profile_residual(const MetricFamily& family, const S3Point& p, double rho,
                          double eps, const AsymptoticsConfig& cfg = {});

// Omega(eps, rho) = Phi - (pi/5)|Ric0|^2 rho^4 over the grid;
// bound_constant = max |Omega| / (eps^2 rho^5); fitted_exponent = mean
// per-eps log-log slope of |Omega| against rho.
AsymptoticFit remainder_bound_fit(const MetricFamily& family, const S3Point& p,
                                  const std::vector<double>& eps_list,
                                  const std::vector<double>& rho_list,
                                  const AsymptoticsConfig& cfg = {});

}  // namespace wlab
