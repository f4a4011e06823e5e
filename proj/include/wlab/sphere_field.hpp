#pragma once

#include <array>

#include "wlab/sphere_grid.hpp"

namespace wlab {

// A band-limited real function on S^2 stored by its SH coefficients.
class SphereField {
 public:
  SphereField() = default;
  explicit SphereField(std::shared_ptr<const SphereGrid> grid)
      : grid_(std::move(grid)), c_(Eigen::VectorXd::Zero(grid_->ncoeffs())) {}
  SphereField(std::shared_ptr<const SphereGrid> grid, Eigen::VectorXd coeffs)
      : grid_(std::move(grid)), c_(std::move(coeffs)) {}

  static SphereField from_nodes(std::shared_ptr<const SphereGrid> grid,
                                const Eigen::VectorXd& node_values);
  static SphereField harmonic(std::shared_ptr<const SphereGrid> grid, int l, int m,
                              double amplitude = 1.0);

  const std::shared_ptr<const SphereGrid>& grid() const { return grid_; }
  const Eigen::VectorXd& coeffs() const { return c_; }
  Eigen::VectorXd& coeffs() { return c_; }
  double coeff(int l, int m) const { return c_[SphereGrid::index(l, m)]; }

  Eigen::VectorXd node_values() const { return grid_->values() * c_; }
  Eigen::VectorXd node_dtheta() const { return grid_->dtheta() * c_; }
  Eigen::VectorXd node_dphi() const { return grid_->values() * grid_->phi_rotate(c_); }

  double l2_norm() const { return c_.norm(); }       // Parseval: L^2(S^2) norm
  double sup_norm() const { return node_values().cwiseAbs().maxCoeff(); }
  // L^2 energy carried by the l <= 1 modes.
  double low_mode_energy() const { return c_.head(4).squaredNorm(); }

  SphereField& operator+=(const SphereField& o) { c_ += o.c_; return *this; }
  SphereField& operator-=(const SphereField& o) { c_ -= o.c_; return *this; }
  SphereField& operator*=(double a) { c_ *= a; return *this; }
  friend SphereField operator+(SphereField a, const SphereField& b) { return a += b; }
  friend SphereField operator-(SphereField a, const SphereField& b) { return a -= b; }
  friend SphereField operator*(double a, SphereField f) { return f *= a; }

 private:
  std::shared_ptr<const SphereGrid> grid_;
  Eigen::VectorXd c_;
};

double inner(const SphereField& a, const SphereField& b);

// Laplace-Beltrami on S^2: c_{l,m} -> -l(l+1) c_{l,m}.
SphereField laplace_beltrami(const SphereField& f);

// L^2-orthogonal projector onto the complement of the l <= 1 modes
// (the kernel of Delta(Delta+2)); zeroes the first four coefficients.
SphereField zero_low_modes(const SphereField& f);

// Second-variation operator of the umbilic spheres, spectral form
// (1 / (2 sin^4 rho)) Delta (Delta + 2):
//   c_{l,m} -> l(l+1)(l(l+1)-2) / (2 sin^4 rho) c_{l,m}.
SphereField umbilic_hessian_apply(const SphereField& f, double rho);

// Exact spectral inverse on the complement of the l <= 1 modes.
// Throws KernelComponentPresent if the input carries l <= 1 energy.
SphereField umbilic_hessian_invert(const SphereField& f, double rho);

// Orthonormal basis of the l <= 1 modes: 1/sqrt(4 pi) and the three
// normalized coordinate functions of R^3 restricted to S^2.
std::array<SphereField, 4> low_mode_basis(const std::shared_ptr<const SphereGrid>& grid);

// Tangential gradient of a scalar on S^2, returned as three node-value
// arrays holding the R^3 Cartesian components (smooth fields; pole-safe).
std::array<Eigen::VectorXd, 3> cartesian_gradient(const SphereField& f);

// Divergence (round metric) of a tangent field given by Cartesian
// component node values. Pole-safe: each component is re-expanded.
Eigen::VectorXd cartesian_divergence(const std::shared_ptr<const SphereGrid>& grid,
                                     const std::array<Eigen::VectorXd, 3>& v);

}  // namespace wlab
