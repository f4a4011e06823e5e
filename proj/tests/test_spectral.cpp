#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wlab/errors.hpp"
#include "wlab/sphere_field.hpp"

using namespace wlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

SphereField random_field(const std::shared_ptr<const SphereGrid>& grid, unsigned seed,
                         int lmin = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  SphereField f(grid);
  for (int l = lmin; l <= grid->lmax(); ++l)
    for (int m = -l; m <= l; ++m) f.coeffs()[SphereGrid::index(l, m)] = gauss(rng);
  return f;
}
}  // namespace

TEST_CASE("quadrature weights sum to 4 pi") {
  for (int lmax : {8, 16, 24}) {
    auto g = SphereGrid::get(lmax);
    CHECK(std::abs(g->weights().sum() - 4 * kPi) < 1e-12);
  }
}

TEST_CASE("quadrature integrates harmonic products exactly") {
  auto g = SphereGrid::get(12);
  // <Y_a, Y_b> = delta_ab for a selection of pairs including edge cases
  const int pairs[][4] = {{0, 0, 0, 0},   {1, -1, 1, -1}, {3, 2, 3, 2},  {12, 12, 12, 12},
                          {12, -7, 12, -7}, {2, 0, 3, 0},   {5, 4, 7, 4},  {6, -3, 6, 3},
                          {10, 9, 11, -9}, {12, 0, 11, 0}};
  for (const auto& p : pairs) {
    const auto ya = SphereField::harmonic(g, p[0], p[1]).node_values();
    const auto yb = SphereField::harmonic(g, p[2], p[3]).node_values();
    const double ip = (ya.cwiseProduct(yb)).dot(g->weights());
    const double expect = (p[0] == p[2] && p[1] == p[3]) ? 1.0 : 0.0;
    CHECK(std::abs(ip - expect) < 1e-12);
  }
}

TEST_CASE("analysis is a left inverse of synthesis on band-limited data") {
  auto g = SphereGrid::get(16);
  const SphereField f = random_field(g, 7);
  const SphereField back = SphereField::from_nodes(g, f.node_values());
  CHECK((back.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("Parseval") {
  auto g = SphereGrid::get(16);
  const SphereField f = random_field(g, 99);
  const Eigen::VectorXd v = f.node_values();
  const double quad = v.cwiseProduct(v).dot(g->weights());
  CHECK(std::abs(quad - f.coeffs().squaredNorm()) < 1e-10 * f.coeffs().squaredNorm());
}

TEST_CASE("laplace_beltrami eigenvalues") {
  auto g = SphereGrid::get(8);
  for (auto [l, m] : {std::pair{1, 0}, {1, 1}, {3, 2}, {0, 0}}) {
    const SphereField f = SphereField::harmonic(g, l, m);
    const SphereField lf = laplace_beltrami(f);
    CHECK(std::abs(lf.coeff(l, m) + double(l) * (l + 1)) < 1e-14);
  }
}

TEST_CASE("derivative tables reproduce the Laplacian") {
  // where-differentiation check: d2/dth2 + cot th d/dth + d2/dph2 / sin^2 th
  auto g = SphereGrid::get(14);
  const SphereField f = random_field(g, 3);
  const Eigen::VectorXd ftt = g->dtheta2() * f.coeffs();
  const Eigen::VectorXd ft = g->dtheta() * f.coeffs();
  const Eigen::VectorXd fpp = g->values() * g->phi_rotate(g->phi_rotate(f.coeffs()));
  const Eigen::VectorXd lap_spec = laplace_beltrami(f).node_values();
  double worst = 0;
  for (int n = 0; n < g->nnodes(); ++n) {
    const double th = g->node_theta(n);
    const double lap = ftt[n] + ft[n] / std::tan(th) + fpp[n] / (std::sin(th) * std::sin(th));
    worst = std::max(worst, std::abs(lap - lap_spec[n]));
  }
  CHECK(worst < 1e-8 * f.coeffs().norm() * g->lmax() * g->lmax());
}

TEST_CASE("node derivatives match trigonometric identities") {
  auto g = SphereGrid::get(10);
  // Y_{1,1} = c sin th cos ph: d/dph = -c sin th sin ph = -Y_{1,-1} values
  const SphereField f = SphereField::harmonic(g, 1, 1);
  const Eigen::VectorXd dp = f.node_dphi();
  const Eigen::VectorXd expect = -SphereField::harmonic(g, 1, -1).node_values();
  CHECK((dp - expect).cwiseAbs().maxCoeff() < 1e-13);
  // d/dth of Y_{1,0} = -c sin th
  const SphereField h = SphereField::harmonic(g, 1, 0);
  const Eigen::VectorXd dt = h.node_dtheta();
  const double c = std::sqrt(3.0 / (4 * kPi));
  for (int n = 0; n < g->nnodes(); ++n)
    CHECK(std::abs(dt[n] + c * std::sin(g->node_theta(n))) < 1e-13);
}

TEST_CASE("projector zeroes exactly the low modes and is idempotent") {
  auto g = SphereGrid::get(10);
  SphereField f = random_field(g, 5);
  f.coeffs()[SphereGrid::index(0, 0)] = 2.0;
  const SphereField pf = zero_low_modes(f);
  CHECK(pf.low_mode_energy() == 0.0);
  for (int l = 2; l <= g->lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      CHECK(pf.coeff(l, m) == f.coeff(l, m));
  const SphereField ppf = zero_low_modes(pf);
  CHECK((ppf.coeffs() - pf.coeffs()).norm() == 0.0);

  // self-adjointness: <Pf, h> = <f, Ph>
  const SphereField h = random_field(g, 6);
  CHECK(std::abs(inner(pf, h) - inner(f, zero_low_modes(h))) < 1e-12);

  // degree-1 harmonic (a coordinate restriction) is annihilated
  const SphereField x1 = SphereField::harmonic(g, 1, 1);
  CHECK(zero_low_modes(x1).coeffs().norm() == 0.0);
}

TEST_CASE("umbilic hessian spectral law") {
  auto g = SphereGrid::get(12);
  // l = 2 at rho = pi/2: 6 * 4 / 2 = 12
  const SphereField y2 = SphereField::harmonic(g, 2, 0);
  CHECK(std::abs(umbilic_hessian_apply(y2, kPi / 2).coeff(2, 0) - 12.0) < 1e-12);
  // l = 3: 12 * 10 / 2 = 60
  const SphereField y3 = SphereField::harmonic(g, 3, 2);
  CHECK(std::abs(umbilic_hessian_apply(y3, kPi / 2).coeff(3, 2) - 60.0) < 1e-12);
  // kernel annihilated
  for (int k = 0; k < 4; ++k) {
    SphereField f(g);
    f.coeffs()[k] = 1.0;
    CHECK(umbilic_hessian_apply(f, 0.7).coeffs().norm() == 0.0);
  }
  // rho -> pi - rho invariance
  const SphereField a = umbilic_hessian_apply(y2, 0.4);
  const SphereField b = umbilic_hessian_apply(y2, kPi - 0.4);
  CHECK(std::abs(a.coeff(2, 0) - b.coeff(2, 0)) < 1e-10 * std::abs(a.coeff(2, 0)));
}

TEST_CASE("umbilic hessian inverse") {
  auto g = SphereGrid::get(12);
  const SphereField y2 = SphereField::harmonic(g, 2, 0);
  CHECK(std::abs(umbilic_hessian_invert(y2, kPi / 2).coeff(2, 0) - 1.0 / 12.0) < 1e-14);

  // 24 Y_21 at sin^4 rho = 1/2 -> Y_21
  const double rho = std::asin(std::pow(0.5, 0.25));
  const SphereField f = SphereField::harmonic(g, 2, 1, 24.0);
  CHECK(std::abs(umbilic_hessian_invert(f, rho).coeff(2, 1) - 1.0) < 1e-12);

  const SphereField zero(g);
  CHECK(umbilic_hessian_invert(zero, 1.0).coeffs().norm() == 0.0);

  // round trip on the orthogonal complement
  const SphereField r = zero_low_modes(random_field(g, 11));
  const SphereField rt = umbilic_hessian_apply(umbilic_hessian_invert(r, 0.9), 0.9);
  CHECK((rt.coeffs() - r.coeffs()).cwiseAbs().maxCoeff() < 1e-10);

  SphereField bad = random_field(g, 12);
  bad.coeffs()[0] = 1.0;
  CHECK_THROWS_AS(umbilic_hessian_invert(bad, 0.9), KernelComponentPresent);
}

TEST_CASE("low mode basis") {
  auto g = SphereGrid::get(10);
  const auto q = low_mode_basis(g);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      CHECK(std::abs(inner(q[a], q[b]) - (a == b ? 1.0 : 0.0)) < 1e-12);
  // q0 equals the constant 1/sqrt(4 pi)
  const Eigen::VectorXd v = q[0].node_values();
  CHECK(std::abs(v.maxCoeff() - 1.0 / std::sqrt(4 * kPi)) < 1e-13);
  CHECK(std::abs(v.minCoeff() - 1.0 / std::sqrt(4 * kPi)) < 1e-13);
  for (int a = 0; a < 4; ++a) {
    const SphereField img = laplace_beltrami(laplace_beltrami(q[a]) + 2.0 * q[a]);
    CHECK(img.coeffs().norm() < 1e-13);
  }
}

TEST_CASE("cartesian gradient and divergence on known fields") {
  auto g = SphereGrid::get(16);
  // div(grad Y_lm) = -l(l+1) Y_lm
  for (auto [l, m] : {std::pair{2, 0}, {4, 3}, {6, -2}}) {
    const SphereField f = SphereField::harmonic(g, l, m);
    const auto grad = cartesian_gradient(f);
    const Eigen::VectorXd div = cartesian_divergence(g, grad);
    const Eigen::VectorXd expect = -double(l) * (l + 1) * f.node_values();
    CHECK((div - expect).cwiseAbs().maxCoeff() < 1e-9);
  }
}
