#include "wlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

// least-squares a + k x
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = (int)x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double k = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - k * sx) / n;
  return {a, k};
}

}  // namespace

SphereField ricci_direction_field(const MetricFamily& family, const S3Point& p,
                                  const std::shared_ptr<const SphereGrid>& grid) {
  const CurvatureBundle b = curvature_bundle(family, p);
  const Mat3 F = orthonormal_frame_factor(b.metric);
  const Mat3 ric_on = F.transpose() * b.ric * F;  // Ric(f_a, f_b)
  Eigen::VectorXd vals(grid->nnodes());
  for (int n = 0; n < grid->nnodes(); ++n) {
    const Eigen::Vector3d d = grid->node_dir(n);
    vals[n] = d.dot(ric_on * d);
  }
  return SphereField::from_nodes(grid, vals);
}

SphereField reference_profile(const MetricFamily& family, const S3Point& p, double rho,
                              const std::shared_ptr<const SphereGrid>& grid) {
  const CurvatureBundle b = curvature_bundle(family, p);
  SphereField ric = ricci_direction_field(family, p, grid);
  ric *= rho * rho * rho / 12.0;
  ric.coeffs()[0] -= rho * rho * rho / 36.0 * b.scalar * std::sqrt(4.0 * kPi);
  return zero_low_modes(ric);
}

AsymptoticFit small_radius_energy_fit(const MetricFamily& family, const S3Point& p,
                                      const std::vector<double>& rho_list, double eps,
                                      const AsymptoticsConfig& cfg) {
  const MetricFamily fam = family.with_epsilon(eps);
  AsymptoticFit fit;
  fit.target_coefficient = (kPi / 5.0) * curvature_bundle(fam, p).ric0_norm2;

  std::vector<double> lx, ly;
  for (double rho : rho_list) {
    AsymptoticSample s;
    s.eps = eps;
    s.rho = rho;
    try {
      const ReducedPoint r = solve_auxiliary(fam, p, rho, cfg.solver);
      s.value = r.phi;
      s.converged = r.converged;
    } catch (const NumericalError&) {
      s.converged = false;
    }
    fit.samples.push_back(s);
    if (s.converged && std::abs(s.value) > 1e-16) {
      lx.push_back(std::log(rho));
      ly.push_back(std::log(std::abs(s.value)));
    }
  }
  std::sort(fit.samples.begin(), fit.samples.end(), [](const auto& a, const auto& b) {
    return a.eps != b.eps ? a.eps < b.eps : a.rho < b.rho;
  });
  fit.rho_min = rho_list.empty() ? 0 : *std::min_element(rho_list.begin(), rho_list.end());
  fit.rho_max = rho_list.empty() ? 0 : *std::max_element(rho_list.begin(), rho_list.end());

  if ((int)lx.size() < 2) {
    fit.degenerate_zero = true;
    return fit;
  }
  const auto [a, k] = line_fit(lx, ly);
  fit.fitted_exponent = k;
  fit.fitted_coefficient = std::exp(a);
  fit.relative_error = fit.target_coefficient != 0
                           ? std::abs(fit.fitted_coefficient - fit.target_coefficient) /
                                 fit.target_coefficient
                           : std::abs(fit.fitted_coefficient);
  return fit;
}

double w_profile_residual(const MetricFamily& family, const S3Point& p, double rho,
                          double eps, const AsymptoticsConfig& cfg) {
  const MetricFamily fam = family.with_epsilon(eps);
  const ReducedPoint r = solve_auxiliary(fam, p, rho, cfg.solver);
  if (!r.converged) throw NoConvergence("w_profile_residual: solver did not converge");
  const SphereField prof = reference_profile(fam, p, rho, r.w.grid());
  return (r.w - prof).l2_norm() / (rho * rho * rho);
}

AsymptoticFit remainder_bound_fit(const MetricFamily& family, const S3Point& p,
                                  const std::vector<double>& eps_list,
                                  const std::vector<double>& rho_list,
                                  const AsymptoticsConfig& cfg) {
  AsymptoticFit fit;
  std::vector<double> slopes;
  double target_at_last_eps = 0;
  for (double eps : eps_list) {
    const MetricFamily fam = family.with_epsilon(eps);
    const double ric2 = curvature_bundle(fam, p).ric0_norm2;
    target_at_last_eps = (kPi / 5.0) * ric2;
    std::vector<double> lx, ly;
    for (double rho : rho_list) {
      AsymptoticSample s;
      s.eps = eps;
      s.rho = rho;
      try {
        const ReducedPoint r = solve_auxiliary(fam, p, rho, cfg.solver);
        s.converged = r.converged;
        if (r.converged) {
          const double omega = r.phi - (kPi / 5.0) * ric2 * std::pow(rho, 4);
          s.value = omega;
          const double m = std::abs(omega) / (eps * eps * std::pow(rho, 5));
          fit.bound_constant = std::max(fit.bound_constant, m);
          if (std::abs(omega) > 1e-18) {
            lx.push_back(std::log(rho));
            ly.push_back(std::log(std::abs(omega)));
          }
        }
      } catch (const NumericalError&) {
        s.converged = false;
      }
      fit.samples.push_back(s);
    }
    if ((int)lx.size() >= 2) slopes.push_back(line_fit(lx, ly).second);
  }
  std::sort(fit.samples.begin(), fit.samples.end(), [](const auto& a, const auto& b) {
    return a.eps != b.eps ? a.eps < b.eps : a.rho < b.rho;
  });
  if (!slopes.empty()) {
    double acc = 0;
    for (double s : slopes) acc += s;
    fit.fitted_exponent = acc / slopes.size();
  }
  fit.target_coefficient = target_at_last_eps;
  fit.rho_min = rho_list.empty() ? 0 : *std::min_element(rho_list.begin(), rho_list.end());
  fit.rho_max = rho_list.empty() ? 0 : *std::max_element(rho_list.begin(), rho_list.end());
  return fit;
}

}  // namespace wlab
