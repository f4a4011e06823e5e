#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "wlab/errors.hpp"

using namespace wlab;

namespace {
const std::vector<S3Point> kProbePts = seeded_points(20, 20240901u);

std::vector<MetricFamily> shipped_families() {
  return {MetricFamily::round(), MetricFamily::berger(1.2),
          MetricFamily::left_invariant(1.1, 0.9, 1.05),
          MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConformalX0, 0.05),
          MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kBergerDir, 0.1)};
}
}  // namespace

TEST_CASE("eval_metric basics") {
  const S3Point p(0.2, -0.4, 0.8, 0.1);
  CHECK(eval_metric(MetricFamily::round(), p).isApprox(Mat3::Identity(), 1e-15));
  CHECK(eval_metric(MetricFamily::berger(1.0), p).isApprox(Mat3::Identity(), 1e-15));
  const Mat3 G = eval_metric(MetricFamily::left_invariant(1.3, 0.8, 1.1), p);
  CHECK(G.isApprox(Vec3(1.3, 0.8, 1.1).asDiagonal().toDenseMatrix(), 1e-15));

  // constant conformal tensor in the chart comes back as a multiple of the
  // identity in the frame
  const MetricFamily cf =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConstG0, 0.07);
  for (const auto& q : kProbePts)
    CHECK((eval_metric(cf, q) - 1.07 * Mat3::Identity()).norm() < 1e-12);

  // the Berger direction tensor is diag(1,0,0) in the frame
  const MetricFamily bd =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kBergerDir, 0.1);
  for (const auto& q : kProbePts) {
    const Mat3 Gb = eval_metric(bd, q);
    CHECK((Gb - Vec3(1.1, 1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-12);
  }
}

TEST_CASE("eval_metric errors") {
  const MetricFamily too_big =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConstG0, -0.95);
  CHECK_THROWS_AS(eval_metric(too_big, S3Point()), NonPositiveDefinite);

  const MetricFamily ok =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConformalX0, 0.05);
  CHECK_THROWS_AS(eval_metric(ok, S3Point(-1, 0, 0, 0)), ChartSingularity);
}

TEST_CASE("round curvature anchors") {
  for (const auto& p : {S3Point(), S3Point(0.5, 0.5, -0.5, 0.5)}) {
    const CurvatureBundle b = curvature_bundle(MetricFamily::round(), p);
    CHECK(std::abs(b.scalar - 6.0) < 1e-12);
    CHECK((b.ric - 2.0 * b.metric).norm() < 1e-12);
    CHECK(b.ric0.norm() < 1e-12);
    CHECK(b.ric0_norm2 >= -1e-12);
    CHECK(b.ric0_norm2 < 1e-12);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const double expect = b.metric(i, k) * b.metric(j, l) - b.metric(i, l) * b.metric(j, k);
            CHECK(std::abs(b.riem(i, j, k, l) - expect) < 1e-12);
          }
  }
}

TEST_CASE("berger curvature against the Koszul oracle") {
  const double lambda = 1.2;
  const CurvatureBundle b = curvature_bundle(MetricFamily::berger(lambda), S3Point());
  const auto ora = oracle::koszul_curvature(Vec3(lambda, 1, 1).asDiagonal());

  CHECK(std::abs(b.ric0_norm2 - ora.ric0_norm2) < 1e-12);
  CHECK(std::abs(b.scalar - ora.scalar) < 1e-12);
  CHECK((b.ric - ora.ric).norm() < 1e-12);

  // known closed forms for the Berger frame planes
  CHECK(std::abs(ora.sec[0][1] - lambda) < 1e-12);
  CHECK(std::abs(ora.sec[1][2] - (4 - 3 * lambda)) < 1e-12);
  CHECK(std::abs(ora.scalar - (8 - 2 * lambda)) < 1e-12);
  CHECK(std::abs(ora.ric0_norm2 - 32.0 * 0.2 * 0.2 / 3.0) < 1e-12);
}

TEST_CASE("left-invariant curvature is position independent") {
  for (const auto& fam :
       {MetricFamily::berger(1.3), MetricFamily::left_invariant(1.1, 0.9, 1.05)}) {
    const CurvatureBundle a = curvature_bundle(fam, kProbePts[0]);
    const CurvatureBundle c = curvature_bundle(fam, kProbePts[1]);
    double worst = 0;
    for (int n = 0; n < 81; ++n) worst = std::max(worst, std::abs(a.riem.v[n] - c.riem.v[n]));
    CHECK(worst < 1e-10);
    CHECK(std::abs(a.ric0_norm2 - c.ric0_norm2) < 1e-10);
  }
}

TEST_CASE("chart finite differences agree with the group algebra") {
  // the berger_dir chart tensor realizes exactly the Berger family
  const double eps = 0.1;
  const MetricFamily chart_fam =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kBergerDir, eps);
  const MetricFamily group_fam = MetricFamily::berger(1.0 + eps);
  for (const auto& p : {S3Point(), S3Point(0.3, 0.2, -0.5, 0.8)}) {
    const CurvatureBundle bc = curvature_bundle(chart_fam, p);
    const CurvatureBundle bg = curvature_bundle(group_fam, p);
    CHECK(std::abs(bc.scalar - bg.scalar) < 1e-8);
    CHECK(std::abs(bc.ric0_norm2 - bg.ric0_norm2) < 1e-8);
    CHECK((bc.ric - bg.ric).norm() < 1e-8);
  }
}

TEST_CASE("curvature bundle invariants across families") {
  for (const auto& fam : shipped_families()) {
    int checked = 0;
    for (const auto& p : kProbePts) {
      if (!fam.is_group() && std::abs(1.0 + p[0]) < 0.2) continue;  // keep away from chart edge
      const CurvatureBundle b = curvature_bundle(fam, p);
      const bool fd = !fam.is_group();
      CHECK(b.symmetry_residual() < (fd ? 1e-7 : 1e-12));
      CHECK(b.bianchi1_residual() < (fd ? 1e-7 : 1e-12));
      CHECK(std::abs((b.metric_inv * b.ric0).trace()) < 1e-8);
      CHECK(b.ric0_norm2 >= -1e-12);
      CHECK(ricci_decomposition_residual(b) < 1e-6);
      ++checked;
    }
    CHECK(checked >= 15);
  }
}

TEST_CASE("kulkarni-nomizu product") {
  const Mat3 id = Mat3::Identity();
  const Tens4 gg = kulkarni_nomizu(id, id);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double expect = 2.0 * (id(i, k) * id(j, l) - id(i, l) * id(j, k));
          CHECK(std::abs(gg(i, j, k, l) - expect) < 1e-15);
        }

  const Tens4 z = kulkarni_nomizu(Mat3::Zero(), id);
  for (double v : z.v) CHECK(v == 0.0);

  // Riemann-type symmetries for a generic pair
  Mat3 a, b;
  a << 1.0, 0.2, -0.1, 0.2, 0.7, 0.3, -0.1, 0.3, 1.4;
  b << 0.5, -0.2, 0.0, -0.2, 1.1, 0.4, 0.0, 0.4, 0.9;
  const Tens4 t = kulkarni_nomizu(a, b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          CHECK(std::abs(t(i, j, k, l) + t(j, i, k, l)) < 1e-14);
          CHECK(std::abs(t(i, j, k, l) + t(i, j, l, k)) < 1e-14);
          CHECK(std::abs(t(i, j, k, l) - t(k, l, i, j)) < 1e-14);
        }
}

TEST_CASE("traceless ricci linearization") {
  const S3Point p(0.9, 0.1, -0.2, 0.3);

  // conformal-constant direction: first-order Einstein preservation
  // (tolerance set by the chart finite-difference noise floor ~1e-10
  // amplified by the eps step 1e-3)
  const MetricFamily cf =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConstG0, 0.0);
  const auto dc = traceless_ricci_linearization(cf, p);
  CHECK(dc.D.norm() < 2e-6);
  CHECK(dc.t2 < 1e-11);

  // zero perturbation
  const auto dz = traceless_ricci_linearization(MetricFamily::round(), p);
  CHECK(dz.D.norm() < 1e-14);

  // Berger direction: |D|^2 equals the eps^2 coefficient of |Ric0(g_eps)|^2
  const MetricFamily berger = MetricFamily::berger(1.0);
  const auto db = traceless_ricci_linearization(berger, p);
  std::vector<double> xs, ys;
  for (double e : {-0.02, -0.01, 0.01, 0.02}) {
    xs.push_back(e * e);
    ys.push_back(curvature_bundle(berger.with_epsilon(e), p).ric0_norm2);
  }
  // quadratic fit through the origin: coeff = sum(x y)/sum(x^2)
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  const double coeff = sxy / sxx;
  CHECK(std::abs(db.t2 - coeff) < 1e-4 * coeff);
  CHECK(std::abs(db.t2 - 32.0 / 3.0) < 1e-6);
  CHECK(db.t2 >= 0.0);
}

TEST_CASE("conformal coordinate tensor has vanishing linearized traceless Ricci") {
  // x_0 g_0 is conformal with Hess(x_0) = -x_0 g_0, so the traceless part of
  // the linearization vanishes identically: a degenerate direction.
  for (const auto& p : {S3Point(1, 0, 0, 0), S3Point(0.2, 0.5, -0.6, 0.6)}) {
    const MetricFamily fam =
        MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConformalX0, 0.0);
    const auto lin = traceless_ricci_linearization(fam, p);
    CHECK(lin.t2 < 1e-11);
  }
}

TEST_CASE("epsilon analyticity probe") {
  // |Ric0(g_eps)|^2 fitted over +-0.01, +-0.02, +-0.04 is even in eps and its
  // eps^2 coefficient matches the linearization
  const S3Point p(1, 0, 0, 0);
  Mat3 hc;
  hc << 1, 0, 0, 0, 0.5, 0, 0, 0, 0.25;
  const MetricFamily fam = MetricFamily::round_plus_const_chart(hc, 0.0);
  const auto lin = traceless_ricci_linearization(fam, p);
  std::vector<double> es = {-0.04, -0.02, -0.01, 0.01, 0.02, 0.04};
  // fit c2 e^2 + c3 e^3 + c4 e^4 (odd term should vanish)
  Eigen::MatrixXd M(es.size(), 3);
  Eigen::VectorXd y(es.size());
  for (size_t i = 0; i < es.size(); ++i) {
    const double e = es[i];
    M(i, 0) = e * e;
    M(i, 1) = e * e * e;
    M(i, 2) = e * e * e * e;
    y[i] = curvature_bundle(fam.with_epsilon(e), p).ric0_norm2;
  }
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(y);
  const double scale = std::max(1e-12, std::abs(c[0]));
  // leading behavior is even: the odd part is subdominant on the probe range
  CHECK(std::abs(c[1]) * 0.04 < 5e-2 * scale);
  CHECK(std::abs(c[0] - lin.t2) < 1e-3 * scale);  // eps^2 coefficient

  // the Berger family is exactly quadratic in eps, so evenness is strict
  const MetricFamily berger = MetricFamily::berger(1.0);
  for (size_t i = 0; i < es.size(); ++i)
    y[i] = curvature_bundle(berger.with_epsilon(es[i]), p).ric0_norm2;
  const Eigen::VectorXd cb = M.colPivHouseholderQr().solve(y);
  CHECK(std::abs(cb[1]) < 1e-9 * std::abs(cb[0]));
  CHECK(std::abs(cb[2]) < 1e-9 * std::abs(cb[0]));
  CHECK(std::abs(cb[0] - 32.0 / 3.0) < 1e-9);
}

TEST_CASE("contracted Bianchi identity residual") {
  const S3Point p(0.8, 0.4, 0.2, -0.4);
  CHECK(bianchi_residual(MetricFamily::round(), p).norm() < 1e-12);
  CHECK(bianchi_residual(MetricFamily::berger(1.3), p).norm() < 1e-5);
  const MetricFamily smooth =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConformalX0, 0.05);
  CHECK(bianchi_residual(smooth, p).norm() < 1e-4);
}

TEST_CASE("metric family json round trip") {
  using nlohmann::json;
  const auto j1 = json::parse(R"({"kind":"berger","lambda":1.2})");
  const MetricFamily f1 = MetricFamily::from_json(j1);
  CHECK(f1.kind() == MetricFamily::Kind::kBerger);
  CHECK(std::abs(f1.epsilon() - 0.2) < 1e-15);

  const auto j2 = json::parse(R"({"kind":"round_plus_tensor","h":"berger_dir","epsilon":0.05})");
  const MetricFamily f2 = MetricFamily::from_json(j2);
  CHECK(f2.kind() == MetricFamily::Kind::kRoundPlusTensor);
  const MetricFamily f2b = MetricFamily::from_json(f2.to_json());
  CHECK((f2b.eval_raw(kProbePts[3]) - f2.eval_raw(kProbePts[3])).norm() < 1e-15);

  CHECK_THROWS_AS(MetricFamily::from_json(json::parse(R"({"kind":"nope"})")), ConfigError);
  CHECK_THROWS_AS(MetricFamily::from_json(json::parse(R"({"kind":"berger"})")), ConfigError);

  const auto j3 = json::parse(
      R"({"kind":"round_plus_tensor","epsilon":0.02,"h":{"chart_components":[[1,0,0],[0,0.5,0],[0,0,0.25]]}})");
  const MetricFamily f3 = MetricFamily::from_json(j3);
  CHECK_NOTHROW(eval_metric(f3, kProbePts[0]));
}
