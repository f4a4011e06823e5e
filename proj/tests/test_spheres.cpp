#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wlab/errors.hpp"
#include "wlab/immersed_sphere.hpp"

using namespace wlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

double round_H(double rho) { return std::sin(2 * rho) / (std::sin(rho) * std::sin(rho)); }
}  // namespace

TEST_CASE("exp_map: round closed form") {
  const S3Point p(0.6, 0.2, -0.7, 0.1);
  const MetricFamily g0 = MetricFamily::round();

  CHECK((exp_map(g0, p, Vec3::Zero()).q() - p.q()).norm() < 1e-15);

  for (const Vec3& v : {Vec3(0.3, -0.8, 0.4), Vec3(1.9, 0.2, 0.0), Vec3(0, 0, 2.9)}) {
    const S3Point got = exp_map(g0, p, v);
    const double n = v.norm();
    Vec4 tangent = Vec4::Zero();
    for (int i = 0; i < 3; ++i) tangent += (v[i] / n) * p.frame(i + 1);
    const Vec4 expect = std::cos(n) * p.q() + std::sin(n) * tangent;
    CHECK((got.q() - expect).norm() < 1e-9);
  }

  // |v| = pi/2 lands orthogonal to p in R^4
  const Vec3 v(0, kPi / 2, 0);
  CHECK(std::abs(exp_map(g0, p, v).q().dot(p.q())) < 1e-9);

  CHECK_THROWS_AS(exp_map(g0, p, Vec3(4.0, 0, 0)), std::invalid_argument);
}

TEST_CASE("exp_map: Berger closed form and arc-length oracle") {
  const double lambda = 1.2;
  const MetricFamily fam = MetricFamily::berger(lambda);
  const S3Point p(0.3, 0.5, 0.5, -0.2);
  const Vec3 v(0.4, -0.6, 0.9);

  const Mat3 G = fam.eval_raw(p);
  const double vnorm = std::sqrt(v.dot(G * v));

  GeodesicIntegrator integ(fam);
  const RadialGeodesic path = integ.shoot(p, v / vnorm, {}, vnorm);

  // endpoint against the closed-form Berger geodesic
  const S3Point closed = oracle::berger_geodesic(p, lambda, v / vnorm, vnorm);
  CHECK((path.at(vnorm).q - closed.q()).norm() < 1e-9);

  // independent distance integration along the computed path
  const double len = oracle::path_length(path, fam, vnorm);
  CHECK(std::abs(len - vnorm) < 1e-6);
}

TEST_CASE("exp_map: chart metric geodesic keeps its speed") {
  const MetricFamily fam =
      MetricFamily::round_plus_tensor(MetricFamily::BuiltinTensor::kConformalX0, 0.05);
  const S3Point p(0.9, 0.1, 0.4, -0.1);
  const Vec3 v(0.5, 0.2, -0.3);
  const Mat3 G = fam.eval_raw(p);
  const double vnorm = std::sqrt(v.dot(G * v));
  GeodesicIntegrator integ(fam);
  const RadialGeodesic path = integ.shoot(p, v / vnorm, {}, vnorm);
  const double len = oracle::path_length(path, fam, vnorm, 100);
  CHECK(std::abs(len - vnorm) < 1e-6);
}

TEST_CASE("exp_map_inverse round trips") {
  const MetricFamily fam = MetricFamily::berger(1.15);
  const S3Point p(0.2, 0.9, -0.3, 0.1);
  for (const Vec3& v : {Vec3(0.05, -0.02, 0.08), Vec3(-0.09, 0.01, 0.02)}) {
    const S3Point q = exp_map(fam, p, v);
    const Vec3 back = exp_map_inverse(fam, p, q);
    CHECK((back - v).norm() < 1e-9);
  }
}

TEST_CASE("round Jacobi fields have the sin(t) profile") {
  const MetricFamily g0 = MetricFamily::round();
  GeodesicIntegrator integ(g0);
  const S3Point p;
  const Vec3 dir(0, 0, 1);
  const Vec3 w1(1, 0, 0);
  const RadialGeodesic path = integ.shoot(p, dir, {w1}, 2.0);
  for (double t : {0.3, 1.0, 1.7}) {
    const GeoState s = path.at(t);
    CHECK(std::abs(s.j[0].norm() - std::sin(t)) < 1e-9);
  }
}

TEST_CASE("umbilic spheres in the round metric") {
  auto grid = SphereGrid::get(16);
  const S3Point p(0.5, -0.5, 0.5, 0.5);
  const MetricFamily g0 = MetricFamily::round();

  for (double rho : {0.3, 0.7, kPi / 2, 2.2}) {
    const ImmersedSphere s = graph_sphere(g0, p, rho, SphereField(grid));
    const double Hexp = round_H(rho);
    const double A2exp = std::pow(std::sin(2 * rho), 2) / (2 * std::pow(std::sin(rho), 4));

    for (int n = 0; n < grid->nnodes(); ++n) {
      CHECK(std::abs(s.H[n] - Hexp) < 1e-7 * std::max(1.0, std::abs(Hexp)));
      const double A2 = s.H[n] * s.H[n] - 2 * s.D[n];
      CHECK(std::abs(A2 - A2exp) < 1e-7 * std::max(1.0, A2exp));
    }
    CHECK(s.A0_sq.cwiseAbs().maxCoeff() < 1e-14);  // umbilic: |A0|_inf < 1e-7
    CHECK(s.normal_residual < 1e-8);

    const double area = s.area_el.dot(grid->weights());
    CHECK(std::abs(area - 4 * kPi * std::sin(rho) * std::sin(rho)) < 1e-8);
  }
}

TEST_CASE("rho to pi - rho symmetry") {
  auto grid = SphereGrid::get(12);
  const S3Point p;
  const MetricFamily g0 = MetricFamily::round();
  for (double rho : {0.4, 1.1}) {
    const ImmersedSphere a = graph_sphere(g0, p, rho, SphereField(grid));
    const ImmersedSphere b = graph_sphere(g0, p, kPi - rho, SphereField(grid));
    CHECK(std::abs(std::abs(a.H[0]) - std::abs(b.H[0])) < 1e-8);
    const double area_a = a.area_el.dot(grid->weights());
    const double area_b = b.area_el.dot(grid->weights());
    CHECK(std::abs(area_a - area_b) < 1e-8);
  }
}

TEST_CASE("small-radius limits with Richardson fit") {
  auto grid = SphereGrid::get(12);
  const MetricFamily g0 = MetricFamily::round();
  const S3Point p;
  std::vector<double> rhos = {0.1, 0.05, 0.025};
  std::vector<double> rh, ra;
  for (double rho : rhos) {
    const ImmersedSphere s = graph_sphere(g0, p, rho, SphereField(grid));
    rh.push_back(rho * s.H[3]);
    ra.push_back(rho * rho * (s.H[3] * s.H[3] - 2 * s.D[3]));
  }
  // rho H = 2 + c rho^2: Richardson extrapolation on ratio-2 radii
  const double lim_h = (4 * rh[1] - rh[0]) / 3.0;
  const double lim_h2 = (4 * rh[2] - rh[1]) / 3.0;
  CHECK(std::abs(lim_h - 2.0) < 1e-5);
  CHECK(std::abs(lim_h2 - 2.0) < 1e-6);
  const double lim_a = (4 * ra[2] - ra[1]) / 3.0;
  CHECK(std::abs(lim_a - 2.0) < 1e-6);
}

TEST_CASE("graph invariants for a nontrivial offset") {
  auto grid = SphereGrid::get(16);
  const MetricFamily fam = MetricFamily::berger(1.1);
  const S3Point p(0.8, 0.0, -0.6, 0.0);
  SphereField w(grid);
  w.coeffs()[SphereGrid::index(2, 0)] = 0.02;
  w.coeffs()[SphereGrid::index(3, 1)] = -0.015;
  const ImmersedSphere s = graph_sphere(fam, p, 0.8, w);

  CHECK(s.integrand_identity_residual() < 1e-8);  // H^2/4 - D = |A0|^2/2
  CHECK(s.normal_residual < 1e-8);
  CHECK(s.asym_residual < 1e-6);

  // mean curvature trace identity against the stored gamma/A rows
  for (int n = 0; n < grid->nnodes(); n += 97) {
    const double g11 = s.gamma(n, 0), g12 = s.gamma(n, 1), g22 = s.gamma(n, 2);
    const double det = g11 * g22 - g12 * g12;
    const double tr =
        (g22 * s.second(n, 0) - 2 * g12 * s.second(n, 1) + g11 * s.second(n, 2)) / det;
    CHECK(std::abs(tr - s.H[n]) < 1e-8 * std::max(1.0, std::abs(s.H[n])));
  }
}

TEST_CASE("graph too large") {
  auto grid = SphereGrid::get(8);
  SphereField w(grid);
  w.coeffs()[0] = 1.0;  // constant ~ 0.28, exceeds min(rho, pi - rho)/2 for rho = 0.4
  CHECK_THROWS_AS(graph_sphere(MetricFamily::round(), S3Point(), 0.4, w), GraphTooLarge);
}

TEST_CASE("pullback of simple ambient functions") {
  auto grid = SphereGrid::get(12);
  const MetricFamily g0 = MetricFamily::round();
  const S3Point p(0.7, 0.3, 0.2, -0.6);
  const double rho = 0.9;
  const ImmersedSphere s = graph_sphere(g0, p, rho, SphereField(grid));

  // constant function pulls back to the constant
  {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(grid->nnodes(), 2.5);
    const SphereField w = pullback_field(grid, u);
    CHECK(std::abs(w.coeff(0, 0) - 2.5 * std::sqrt(4 * kPi)) < 1e-12);
    CHECK(zero_low_modes(w).coeffs().norm() < 1e-12);
  }

  // a linear ambient function orthogonal to p restricts to a degree-1 field
  {
    Vec4 a = Vec4(0.3, -1.0, 0.2, 0.5);
    a -= a.dot(p.q()) * p.q();
    Eigen::VectorXd u(grid->nnodes());
    for (int n = 0; n < grid->nnodes(); ++n) u[n] = a.dot(s.position.row(n).transpose());
    const SphereField w = pullback_field(grid, u);
    const double total = w.coeffs().norm();
    const double low = w.coeffs().segment(1, 3).norm();
    CHECK(std::abs(total - low) < 1e-10 * total);
  }
}

TEST_CASE("surface Laplacian scales like 1/sin^2(rho) on umbilic spheres") {
  auto grid = SphereGrid::get(16);
  const double rho = 0.7;
  const ImmersedSphere s =
      graph_sphere(MetricFamily::round(), S3Point(), rho, SphereField(grid));
  const SphereField u = SphereField::harmonic(grid, 2, 0);
  const Eigen::VectorXd lap = surface_laplacian(s, u.node_values());
  const Eigen::VectorXd expect =
      (-6.0 / (std::sin(rho) * std::sin(rho))) * u.node_values();
  CHECK((lap - expect).cwiseAbs().maxCoeff() < 1e-6);
}
