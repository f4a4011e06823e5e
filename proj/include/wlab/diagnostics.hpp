#pragma once

#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "wlab/curvature.hpp"

namespace wlab {

struct DiagnosticsConfig {
  double homothety_threshold = 1e-6;  // on decomposition residual and R-spread
  double coefficient_floor = 1e-10;   // detection floor for eps-expansion terms
  std::vector<double> eps_probes = {-0.12, -0.08, -0.04, 0.04, 0.06, 0.08, 0.10, 0.12};
  int max_power = 6;
};

// Smallest eps-power with detectable coefficient in |Ric0(g_eps)|^2 at pt.
struct DegeneracyReport {
  std::optional<int> k0;     // empty: below the floor at every fitted power
  double coefficient = 0.0;  // coefficient at k0
  std::vector<double> coefficients;  // fitted powers 1..max_power
  S3Point probe;
};

DegeneracyReport degeneracy_order(const MetricFamily& family, const S3Point& pt,
                                  const DiagnosticsConfig& cfg = {});

// max_p || Riem - (R(p0)/12) g.g ||_G with p0 the first probe point, plus the
// spread of the scalar curvature across the probes (Schur constancy probe).
struct ConstantCurvatureResidual {
  double residual = 0.0;
  double scalar_spread = 0.0;
  double scalar_at_base = 0.0;
};

ConstantCurvatureResidual constant_curvature_residual(const MetricFamily& family,
                                                      const std::vector<S3Point>& pts);

// r(eps) = sqrt(6 / R) when the family is homothetic to the round metric.
std::optional<double> homothety_detect(const MetricFamily& family,
                                       const std::vector<S3Point>& pts,
                                       const DiagnosticsConfig& cfg = {});

// Normal-coordinate metric expansion at q fitted through the given order on
// a sampled ball; the quadratic coefficients are compared against
// -(1/3) Riem_{irjs} x^i x^j.
struct NormalCoordExpansion {
  int order = 4;
  double ball_radius = 0.1;
  double fit_residual = 0.0;     // max |g_rs(x) - delta - fit(x)| over samples
  double quad_mismatch = 0.0;    // max |fitted - predicted| quadratic entry
  std::array<Mat3, 6> quad_fitted{};     // (r,s) in order 00,01,02,11,12,22
  std::array<Mat3, 6> quad_predicted{};
};

NormalCoordExpansion normal_coordinate_expansion(const MetricFamily& family, const S3Point& q,
                                                 int order = 4, double ball_radius = 0.1);

// The case trichotomy: "III" homothetic/round, "I" leading quadratic
// eps-degeneracy, "II" degenerate-but-curved. JSON report with residuals.
nlohmann::json classify_family(const MetricFamily& family, unsigned seed = 2024,
                               const DiagnosticsConfig& cfg = {});

}  // namespace wlab
