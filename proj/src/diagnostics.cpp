#include "wlab/diagnostics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "wlab/errors.hpp"
#include "wlab/geodesics.hpp"

namespace wlab {

DegeneracyReport degeneracy_order(const MetricFamily& family, const S3Point& pt,
                                  const DiagnosticsConfig& cfg) {
  if ((int)cfg.eps_probes.size() < 5)
    throw std::invalid_argument("degeneracy_order: need at least 5 eps probes");
  const int np = (int)cfg.eps_probes.size();
  const int nc = cfg.max_power;
  if (np < nc)
    throw FitIllConditioned("degeneracy_order: fewer probes than fitted powers");

  Eigen::MatrixXd M(np, nc);
  Eigen::VectorXd y(np);
  for (int i = 0; i < np; ++i) {
    const double e = cfg.eps_probes[i];
    double pw = 1.0;
    for (int k = 0; k < nc; ++k) {
      pw *= e;
      M(i, k) = pw;
    }
    y[i] = curvature_bundle(family.with_epsilon(e), pt).ric0_norm2;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < nc) throw FitIllConditioned("degeneracy_order: probe design is singular");

  DegeneracyReport rep;
  rep.probe = pt;
  const Eigen::VectorXd c = qr.solve(y);
  rep.coefficients.assign(c.data(), c.data() + nc);
  for (int k = 0; k < nc; ++k) {
    if (std::abs(c[k]) > cfg.coefficient_floor) {
      rep.k0 = k + 1;
      rep.coefficient = c[k];
      break;
    }
  }
  return rep;
}

ConstantCurvatureResidual constant_curvature_residual(const MetricFamily& family,
                                                      const std::vector<S3Point>& pts) {
  if (pts.size() < 2)
    throw std::invalid_argument("constant_curvature_residual: need at least 2 points");
  ConstantCurvatureResidual out;
  const CurvatureBundle base = curvature_bundle(family, pts.front());
  out.scalar_at_base = base.scalar;
  for (const auto& p : pts) {
    const CurvatureBundle b = curvature_bundle(family, p);
    const Tens4 gg = kulkarni_nomizu(b.metric, b.metric);
    Tens4 diff;
    for (int n = 0; n < 81; ++n)
      diff.v[n] = b.riem.v[n] - (out.scalar_at_base / 12.0) * gg.v[n];
    out.residual = std::max(out.residual, tensor4_norm(diff, b.metric_inv));
    out.scalar_spread = std::max(out.scalar_spread, std::abs(b.scalar - out.scalar_at_base));
  }
  return out;
}

std::optional<double> homothety_detect(const MetricFamily& family,
                                       const std::vector<S3Point>& pts,
                                       const DiagnosticsConfig& cfg) {
  const ConstantCurvatureResidual r = constant_curvature_residual(family, pts);
  if (r.residual < cfg.homothety_threshold && r.scalar_spread < cfg.homothety_threshold)
    return std::sqrt(6.0 / r.scalar_at_base);
  return std::nullopt;
}

namespace {

// the 26 cube directions: faces, edges, corners
std::vector<Vec3> cube_directions() {
  std::vector<Vec3> dirs;
  for (int i = 0; i < 3; ++i)
    for (int s : {1, -1}) {
      Vec3 d = Vec3::Zero();
      d[i] = s;
      dirs.push_back(d);
    }
  for (int i = 0; i < 3; ++i)
    for (int si : {1, -1})
      for (int sj : {1, -1}) {
        Vec3 d = Vec3::Zero();
        d[i] = si;
        d[(i + 1) % 3] = sj;
        dirs.push_back(d.normalized());
      }
  for (int s0 : {1, -1})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) dirs.push_back(Vec3(s0, s1, s2).normalized());
  return dirs;
}

int sym_index(int r, int s) {
  // (0,0)(0,1)(0,2)(1,1)(1,2)(2,2)
  if (r > s) std::swap(r, s);
  static const int tab[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return tab[r][s];
}

}  // namespace

NormalCoordExpansion normal_coordinate_expansion(const MetricFamily& family, const S3Point& q,
                                                 int order, double ball_radius) {
  if (order < 2 || order > 4)
    throw std::invalid_argument("normal_coordinate_expansion: order must be 2..4");
  NormalCoordExpansion out;
  out.order = order;
  out.ball_radius = ball_radius;

  const Mat3 Gq = family.eval(q);
  const Mat3 F = orthonormal_frame_factor(Gq);
  GeodesicIntegrator integ(family);

  // monomial exponent table for degrees 2..order
  std::vector<std::array<int, 3>> mono;
  for (int d = 2; d <= order; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) mono.push_back({a, b, d - a - b});

  const std::vector<Vec3> dirs = cube_directions();
  const std::vector<double> radii = {0.4 * ball_radius, 0.7 * ball_radius, ball_radius};
  const int ns = (int)(dirs.size() * radii.size());
  Eigen::MatrixXd A(ns, (int)mono.size());
  Eigen::MatrixXd rhs(ns, 6);

  int row = 0;
  for (double r : radii)
    for (const Vec3& d : dirs) {
      const Vec3 x = r * d;
      const double n = x.norm();  // the g-length of F x is |x| by construction
      const RadialGeodesic path = integ.shoot(
          q, F * d, {F * Vec3::UnitX(), F * Vec3::UnitY(), F * Vec3::UnitZ()}, n);
      const GeoState st = path.at(n);
      const Mat3 Ge = family.eval_raw(S3Point(st.q));
      Mat3 J;  // columns: d(exp)_x[e_k] in frame components
      for (int k = 0; k < 3; ++k) J.col(k) = st.j[k] / n;
      const Mat3 g_coords = J.transpose() * Ge * J;

      for (size_t m = 0; m < mono.size(); ++m)
        A(row, m) = std::pow(x[0], mono[m][0]) * std::pow(x[1], mono[m][1]) *
                    std::pow(x[2], mono[m][2]);
      for (int r2 = 0; r2 < 3; ++r2)
        for (int s2 = r2; s2 < 3; ++s2)
          rhs(row, sym_index(r2, s2)) = g_coords(r2, s2) - (r2 == s2 ? 1.0 : 0.0);
      ++row;
    }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd coef = qr.solve(rhs);
  out.fit_residual = (A * coef - rhs).cwiseAbs().maxCoeff();

  // quadratic part of the fit as symmetric 3x3 forms Q_rs(i,j)
  const CurvatureBundle b = curvature_bundle(family, q);
  // curvature in the orthonormal coordinate frame: contract with F
  Tens4 riem_on;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0;
          for (int a = 0; a < 3; ++a)
            for (int b2 = 0; b2 < 3; ++b2)
              for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d)
                  v += F(a, i) * F(b2, j) * F(c, k) * F(d, l) * b.riem(a, b2, c, d);
          riem_on(i, j, k, l) = v;
        }

  for (int r2 = 0; r2 < 3; ++r2)
    for (int s2 = r2; s2 < 3; ++s2) {
      const int col = sym_index(r2, s2);
      Mat3 Qf = Mat3::Zero(), Qp = Mat3::Zero();
      for (size_t m = 0; m < mono.size(); ++m) {
        const auto& e = mono[m];
        if (e[0] + e[1] + e[2] != 2) continue;
        int i = -1, j = -1;
        for (int t = 0; t < 3; ++t) {
          if (e[t] == 2) i = j = t;
          if (e[t] == 1) {
            if (i < 0)
              i = t;
            else
              j = t;
          }
        }
        const double c = coef(m, col);
        Qf(i, j) += (i == j) ? c : 0.5 * c;
        Qf(j, i) = Qf(i, j);
      }
      // predicted: -(1/3) sym_ij Riem_{i r j s}
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          Qp(i, j) = -(riem_on(i, r2, j, s2) + riem_on(j, r2, i, s2)) / 6.0;
      out.quad_fitted[col] = Qf;
      out.quad_predicted[col] = Qp;
      out.quad_mismatch = std::max(out.quad_mismatch, (Qf - Qp).cwiseAbs().maxCoeff());
    }
  return out;
}

nlohmann::json classify_family(const MetricFamily& family, unsigned seed,
                               const DiagnosticsConfig& cfg) {
  std::vector<S3Point> pts = seeded_points(3, seed);
  pts.insert(pts.begin(), S3Point());
  if (!family.is_group()) {
    // keep probes away from the chart edge
    std::erase_if(pts, [](const S3Point& p) { return std::abs(1.0 + p[0]) < 0.2; });
    if (pts.size() < 2) pts = {S3Point(), S3Point(0.5, 0.5, 0.5, 0.5)};
  }

  nlohmann::json j;
  const ConstantCurvatureResidual ccr = constant_curvature_residual(family, pts);
  j["residuals"]["constant_curvature"] = ccr.residual;
  j["residuals"]["scalar_spread"] = ccr.scalar_spread;
  double bianchi = 0;
  for (const auto& p : pts) bianchi = std::max(bianchi, bianchi_residual(family, p).norm());
  j["residuals"]["bianchi"] = bianchi;

  if (const auto r = homothety_detect(family, pts, cfg)) {
    j["case"] = "III";
    j["k0"] = nullptr;
    j["r"] = *r;
    return j;
  }
  std::optional<int> k0;
  for (const auto& p : pts) {
    const DegeneracyReport rep = degeneracy_order(family, p, cfg);
    if (rep.k0 && (!k0 || *rep.k0 < *k0)) k0 = rep.k0;
  }
  j["r"] = nullptr;
  if (k0)
    j["k0"] = *k0;
  else
    j["k0"] = nullptr;
  j["case"] = (k0 && *k0 == 2) ? "I" : "II";
  return j;
}

}  // namespace wlab
