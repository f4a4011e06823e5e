#include "wlab/sphere_field.hpp"

#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

SphereField SphereField::from_nodes(std::shared_ptr<const SphereGrid> grid,
                                    const Eigen::VectorXd& node_values) {
  Eigen::VectorXd c = grid->analysis() * node_values;
  return SphereField(std::move(grid), std::move(c));
}

SphereField SphereField::harmonic(std::shared_ptr<const SphereGrid> grid, int l, int m,
                                  double amplitude) {
  SphereField f(std::move(grid));
  f.c_[SphereGrid::index(l, m)] = amplitude;
  return f;
}

double inner(const SphereField& a, const SphereField& b) { return a.coeffs().dot(b.coeffs()); }

SphereField laplace_beltrami(const SphereField& f) {
  SphereField out = f;
  const int lmax = f.grid()->lmax();
  for (int l = 0; l <= lmax; ++l) {
    const double ev = -double(l) * (l + 1);
    for (int m = -l; m <= l; ++m) out.coeffs()[SphereGrid::index(l, m)] *= ev;
  }
  return out;
}

SphereField zero_low_modes(const SphereField& f) {
  SphereField out = f;
  out.coeffs().head(4).setZero();
  return out;
}

SphereField umbilic_hessian_apply(const SphereField& f, double rho) {
  SphereField out = f;
  const double s4 = std::pow(std::sin(rho), 4);
  const int lmax = f.grid()->lmax();
  for (int l = 0; l <= lmax; ++l) {
    const double ll = double(l) * (l + 1);
    const double ev = ll * (ll - 2.0) / (2.0 * s4);
    for (int m = -l; m <= l; ++m) out.coeffs()[SphereGrid::index(l, m)] *= ev;
  }
  return out;
}

SphereField umbilic_hessian_invert(const SphereField& f, double rho) {
  if (f.low_mode_energy() > 1e-12)
    throw KernelComponentPresent("umbilic_hessian_invert: input has l <= 1 energy");
  SphereField out = f;
  out.coeffs().head(4).setZero();
  const double s4 = std::pow(std::sin(rho), 4);
  const int lmax = f.grid()->lmax();
  for (int l = 2; l <= lmax; ++l) {
    const double ll = double(l) * (l + 1);
    const double ev = ll * (ll - 2.0) / (2.0 * s4);
    for (int m = -l; m <= l; ++m) out.coeffs()[SphereGrid::index(l, m)] /= ev;
  }
  return out;
}

std::array<SphereField, 4> low_mode_basis(const std::shared_ptr<const SphereGrid>& grid) {
  // Y_{0,0} = 1/sqrt(4 pi); Y_{1,*} are already the normalized coordinate
  // functions in the real basis.
  return {SphereField::harmonic(grid, 0, 0), SphereField::harmonic(grid, 1, -1),
          SphereField::harmonic(grid, 1, 0), SphereField::harmonic(grid, 1, 1)};
}

std::array<Eigen::VectorXd, 3> cartesian_gradient(const SphereField& f) {
  const auto& g = *f.grid();
  const Eigen::VectorXd ft = f.node_dtheta();
  const Eigen::VectorXd fp = f.node_dphi();
  const int nn = g.nnodes();
  std::array<Eigen::VectorXd, 3> out{Eigen::VectorXd(nn), Eigen::VectorXd(nn),
                                     Eigen::VectorXd(nn)};
  for (int n = 0; n < nn; ++n) {
    const double th = g.node_theta(n), ph = g.node_phi(n);
    const double ct = std::cos(th), st = std::sin(th);
    const double cp = std::cos(ph), sp = std::sin(ph);
    // grad f = f_theta e_theta + f_phi / sin(theta) e_phi
    const double a = ft[n], b = fp[n] / st;
    out[0][n] = a * ct * cp - b * sp;
    out[1][n] = a * ct * sp + b * cp;
    out[2][n] = -a * st;
  }
  return out;
}

Eigen::VectorXd cartesian_divergence(const std::shared_ptr<const SphereGrid>& grid,
                                     const std::array<Eigen::VectorXd, 3>& v) {
  Eigen::VectorXd div = Eigen::VectorXd::Zero(grid->nnodes());
  for (int k = 0; k < 3; ++k) {
    SphereField comp = SphereField::from_nodes(grid, v[k]);
    div += cartesian_gradient(comp)[k];
  }
  return div;
}

}  // namespace wlab
