#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wlab/quat.hpp"

namespace wlab {

// A parametrized Riemannian metric on S^3, evaluated everywhere as the
// 3x3 symmetric matrix G_ij(q) = g(E_i, E_j) in the global left-invariant
// frame E_1, E_2, E_3 (the su(2) basis translated along the group).
//
// Group kinds (Round / Berger / LeftInvariant) have constant G; the Berger
// family is exactly g_eps = g_0 + eps h with h the dual square of the Hopf
// direction, so its epsilon is lambda - 1. General symmetric tensors h are
// supplied in the stereographic chart centered at the identity, with the
// antipode (-1,0,0,0) excluded.
class MetricFamily {
 public:
  enum class Kind { kRound, kBerger, kLeftInvariant, kRoundPlusTensor };

  MetricFamily() = default;  // the round metric

  // Built-in chart tensors.
  enum class BuiltinTensor {
    kConstG0,      // c * g_0
    kBergerDir,    // the Berger direction sigma^1 (x) sigma^1
    kConformalX0,  // x_0 * g_0 — smooth, not left-invariant
    kConstChart,   // constant components in the chart
  };

  static MetricFamily round();
  static MetricFamily berger(double lambda);
  static MetricFamily left_invariant(double l1, double l2, double l3);
  static MetricFamily round_plus_tensor(BuiltinTensor h, double epsilon, double scale = 1.0);
  static MetricFamily round_plus_const_chart(const Mat3& h_chart, double epsilon);

  static MetricFamily from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Kind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  bool is_group() const { return kind_ != Kind::kRoundPlusTensor; }
  Vec3 lambdas() const { return lambdas_; }

  // Same family at a different perturbation size (see eval()).
  MetricFamily with_epsilon(double eps) const;

  // G(q): symmetric positive definite for admissible epsilon.
  Mat3 eval(const S3Point& q) const;

  // G(q) without the positivity check (used by the validity probe itself).
  Mat3 eval_raw(const S3Point& q) const;

  // Positivity guard: smallest eigenvalue of G over a fixed 26-point design
  // must exceed 0.1. Cached after the first call.
  bool within_validity_bound() const;

  std::string describe() const;

 private:
  Mat3 chart_tensor(const S3Point& q) const;  // h in the frame at q

  Kind kind_ = Kind::kRound;
  double epsilon_ = 0.0;
  Vec3 lambdas_ = Vec3::Ones();  // group kinds
  BuiltinTensor h_ = BuiltinTensor::kConstG0;
  double h_scale_ = 1.0;
  Mat3 h_chart_ = Mat3::Zero();  // kConstChart payload
  mutable std::optional<bool> validity_;
};

// Stereographic chart centered at the identity, projecting from (-1,0,0,0).
namespace chart {
Vec3 to_chart(const S3Point& q);          // throws ChartSingularity near the antipode
S3Point from_chart(const Vec3& x);
double conformal_factor(const Vec3& x);   // g_0 = cf(x) * delta in the chart
// Chart components of the left-invariant frame at q = from_chart(x).
Mat3 frame_in_chart(const Vec3& x);
}  // namespace chart

// Public surface of the metric module: metric components in the declared
// frame (the left-invariant frame at pt). Checks positivity and validity.
Mat3 eval_metric(const MetricFamily& family, const S3Point& pt);

// G-orthonormal frame factor by Cholesky: columns F.col(a) are the frame
// components of f_a with F^T G F = Id.
Mat3 orthonormal_frame_factor(const Mat3& G);

}  // namespace wlab
