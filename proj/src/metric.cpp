#include "wlab/metric.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "wlab/errors.hpp"

namespace wlab {

namespace chart {

Vec3 to_chart(const S3Point& q) {
  const double d = 1.0 + q[0];
  if (std::abs(d) < 1e-6)
    throw ChartSingularity("stereographic chart: point at the excluded antipode");
  return Vec3(q[1], q[2], q[3]) / d;
}

S3Point from_chart(const Vec3& x) {
  const double r2 = x.squaredNorm();
  const double d = 1.0 + r2;
  return S3Point(Vec4((1.0 - r2) / d, 2.0 * x[0] / d, 2.0 * x[1] / d, 2.0 * x[2] / d));
}

double conformal_factor(const Vec3& x) {
  const double d = 1.0 + x.squaredNorm();
  return 4.0 / (d * d);
}

Mat3 frame_in_chart(const Vec3& x) {
  const S3Point q = from_chart(x);
  const double d = 1.0 + q[0];
  Mat3 F;
  for (int i = 0; i < 3; ++i) {
    const Vec4 E = q.frame(i + 1);
    // dx_a = dq_a / (1 + q_0) - q_a dq_0 / (1 + q_0)^2
    for (int a = 0; a < 3; ++a) F(a, i) = E[a + 1] / d - q[a + 1] * E[0] / (d * d);
  }
  return F;
}

}  // namespace chart

MetricFamily MetricFamily::round() {
  MetricFamily f;
  f.kind_ = Kind::kRound;
  return f;
}

MetricFamily MetricFamily::berger(double lambda) {
  if (lambda <= 0) throw ConfigError("berger: lambda must be positive");
  MetricFamily f;
  f.kind_ = Kind::kBerger;
  f.epsilon_ = lambda - 1.0;
  f.lambdas_ = Vec3(lambda, 1.0, 1.0);
  return f;
}

MetricFamily MetricFamily::left_invariant(double l1, double l2, double l3) {
  if (l1 <= 0 || l2 <= 0 || l3 <= 0)
    throw ConfigError("left_invariant: eigenvalues must be positive");
  MetricFamily f;
  f.kind_ = Kind::kLeftInvariant;
  f.lambdas_ = Vec3(l1, l2, l3);
  f.epsilon_ = (f.lambdas_ - Vec3::Ones()).cwiseAbs().maxCoeff();
  return f;
}

MetricFamily MetricFamily::round_plus_tensor(BuiltinTensor h, double epsilon, double scale) {
  MetricFamily f;
  f.kind_ = Kind::kRoundPlusTensor;
  f.h_ = h;
  f.epsilon_ = epsilon;
  f.h_scale_ = scale;
  return f;
}

MetricFamily MetricFamily::round_plus_const_chart(const Mat3& h_chart, double epsilon) {
  MetricFamily f;
  f.kind_ = Kind::kRoundPlusTensor;
  f.h_ = BuiltinTensor::kConstChart;
  f.h_chart_ = 0.5 * (h_chart + h_chart.transpose());
  f.epsilon_ = epsilon;
  return f;
}

MetricFamily MetricFamily::with_epsilon(double eps) const {
  MetricFamily f = *this;
  f.validity_.reset();
  switch (kind_) {
    case Kind::kRound:
      return f;
    case Kind::kBerger:
      f.epsilon_ = eps;
      f.lambdas_ = Vec3(1.0 + eps, 1.0, 1.0);
      return f;
    case Kind::kLeftInvariant: {
      // linear path through the given eigenvalues at this family's epsilon
      const double e0 = epsilon_ == 0.0 ? 1.0 : epsilon_;
      f.lambdas_ = Vec3::Ones() + (eps / e0) * (lambdas_ - Vec3::Ones());
      f.epsilon_ = eps;
      return f;
    }
    case Kind::kRoundPlusTensor:
      f.epsilon_ = eps;
      return f;
  }
  return f;
}

Mat3 MetricFamily::chart_tensor(const S3Point& q) const {
  const Vec3 x = chart::to_chart(q);
  Mat3 h_ch;
  switch (h_) {
    case BuiltinTensor::kConstG0:
      h_ch = h_scale_ * chart::conformal_factor(x) * Mat3::Identity();
      break;
    case BuiltinTensor::kBergerDir: {
      // sigma (x) sigma with sigma = g_0(X_1, .)
      const Mat3 F = chart::frame_in_chart(x);
      const Vec3 sigma = chart::conformal_factor(x) * F.col(0);
      h_ch = h_scale_ * sigma * sigma.transpose();
      break;
    }
    case BuiltinTensor::kConformalX0:
      h_ch = h_scale_ * q[0] * chart::conformal_factor(x) * Mat3::Identity();
      break;
    case BuiltinTensor::kConstChart:
      h_ch = h_chart_;
      break;
  }
  // pull back to the frame: H_ij = h(E_i, E_j) = F^T h_chart F
  const Mat3 F = chart::frame_in_chart(x);
  return F.transpose() * h_ch * F;
}

Mat3 MetricFamily::eval_raw(const S3Point& q) const {
  switch (kind_) {
    case Kind::kRound:
      return Mat3::Identity();
    case Kind::kBerger:
    case Kind::kLeftInvariant:
      return lambdas_.asDiagonal();
    case Kind::kRoundPlusTensor:
      return Mat3::Identity() + epsilon_ * chart_tensor(q);
  }
  return Mat3::Identity();
}

bool MetricFamily::within_validity_bound() const {
  if (validity_) return *validity_;
  bool ok = true;
  // fixed 26-point design: the 24-cell plus two extra fixed points
  std::vector<S3Point> probes = cell24();
  probes.emplace_back(Vec4(1, 1, 0, 0));
  probes.emplace_back(Vec4(0.3, -0.5, 0.7, 0.2));
  for (const auto& p : probes) {
    if (kind_ == Kind::kRoundPlusTensor && std::abs(1.0 + p[0]) < 1e-6) continue;
    Eigen::SelfAdjointEigenSolver<Mat3> es(eval_raw(p));
    if (es.eigenvalues().minCoeff() <= 0.1) {
      ok = false;
      break;
    }
  }
  validity_ = ok;
  return ok;
}

Mat3 MetricFamily::eval(const S3Point& q) const {
  if (!within_validity_bound())
    throw NonPositiveDefinite("metric family outside its validity bound: " + describe());
  const Mat3 G = eval_raw(q);
  Eigen::SelfAdjointEigenSolver<Mat3> es(G);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NonPositiveDefinite("metric not positive definite at queried point");
  return G;
}

Mat3 eval_metric(const MetricFamily& family, const S3Point& pt) { return family.eval(pt); }

Mat3 orthonormal_frame_factor(const Mat3& G) {
  const Mat3 L = Eigen::LLT<Mat3>(G).matrixL();
  return L.transpose().inverse();
}

std::string MetricFamily::describe() const {
  switch (kind_) {
    case Kind::kRound:
      return "round";
    case Kind::kBerger:
      return "berger(lambda=" + std::to_string(1.0 + epsilon_) + ")";
    case Kind::kLeftInvariant:
      return "left_invariant(" + std::to_string(lambdas_[0]) + "," + std::to_string(lambdas_[1]) +
             "," + std::to_string(lambdas_[2]) + ")";
    case Kind::kRoundPlusTensor:
      return "round_plus_tensor(eps=" + std::to_string(epsilon_) + ")";
  }
  return "?";
}

namespace {

MetricFamily::BuiltinTensor builtin_from_name(const std::string& name) {
  if (name == "const_g0") return MetricFamily::BuiltinTensor::kConstG0;
  if (name == "berger_dir") return MetricFamily::BuiltinTensor::kBergerDir;
  if (name == "conformal_x0") return MetricFamily::BuiltinTensor::kConformalX0;
  throw ConfigError("unknown builtin tensor '" + name +
                    "' (expected const_g0 | berger_dir | conformal_x0)");
}

std::string builtin_name(MetricFamily::BuiltinTensor h) {
  switch (h) {
    case MetricFamily::BuiltinTensor::kConstG0: return "const_g0";
    case MetricFamily::BuiltinTensor::kBergerDir: return "berger_dir";
    case MetricFamily::BuiltinTensor::kConformalX0: return "conformal_x0";
    case MetricFamily::BuiltinTensor::kConstChart: return "const_chart";
  }
  return "?";
}

}  // namespace

MetricFamily MetricFamily::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("metric family: expected an object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "round") return round();
  if (kind == "berger") {
    if (j.contains("lambda")) return berger(j.at("lambda").get<double>());
    if (j.contains("epsilon")) return berger(1.0 + j.at("epsilon").get<double>());
    throw ConfigError("berger: need \"lambda\" or \"epsilon\"");
  }
  if (kind == "left_invariant") {
    const auto& l = j.at("lambdas");
    if (!l.is_array() || l.size() != 3)
      throw ConfigError("left_invariant: \"lambdas\" must be an array of 3 positive reals");
    return left_invariant(l[0].get<double>(), l[1].get<double>(), l[2].get<double>());
  }
  if (kind == "round_plus_tensor") {
    const double eps = j.value("epsilon", 0.0);
    const auto& h = j.at("h");
    if (h.is_string()) {
      MetricFamily f = round_plus_tensor(builtin_from_name(h.get<std::string>()), eps,
                                         j.value("scale", 1.0));
      return f;
    }
    if (h.is_object() && h.contains("chart_components")) {
      const auto& rows = h.at("chart_components");
      if (!rows.is_array() || rows.size() != 3)
        throw ConfigError("round_plus_tensor: \"chart_components\" must be a 3x3 matrix");
      Mat3 m;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = rows[a][b].get<double>();
      return round_plus_const_chart(m, eps);
    }
    throw ConfigError("round_plus_tensor: \"h\" must be a builtin name or a coefficient table");
  }
  throw ConfigError("unknown metric kind '" + kind +
                    "' (expected round | berger | left_invariant | round_plus_tensor)");
}

nlohmann::json MetricFamily::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::kRound:
      j["kind"] = "round";
      break;
    case Kind::kBerger:
      j["kind"] = "berger";
      j["lambda"] = 1.0 + epsilon_;
      break;
    case Kind::kLeftInvariant:
      j["kind"] = "left_invariant";
      j["lambdas"] = {lambdas_[0], lambdas_[1], lambdas_[2]};
      break;
    case Kind::kRoundPlusTensor:
      j["kind"] = "round_plus_tensor";
      j["epsilon"] = epsilon_;
      if (h_ == BuiltinTensor::kConstChart) {
        nlohmann::json rows = nlohmann::json::array();
        for (int a = 0; a < 3; ++a) rows.push_back({h_chart_(a, 0), h_chart_(a, 1), h_chart_(a, 2)});
        j["h"] = {{"chart_components", rows}};
      } else {
        j["h"] = builtin_name(h_);
        if (h_scale_ != 1.0) j["scale"] = h_scale_;
      }
      break;
  }
  return j;
}

}  // namespace wlab
