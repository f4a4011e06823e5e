#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace wlab {

// Band-limited real spherical-harmonic machinery on S^2.
//
// Basis ordering (shared by every module and by all serialized coefficient
// vectors): index k = l*l + (m + l) for 0 <= l <= lmax, -l <= m <= l.
// Real harmonics without Condon-Shortley phase:
//   Y_{l,0}  = Nbar_{l,0} P_l(cos th)
//   Y_{l,m}  = sqrt(2) Nbar_{l,m} P_l^m(cos th) cos(m phi)   (m > 0)
//   Y_{l,-m} = sqrt(2) Nbar_{l,m} P_l^m(cos th) sin(m phi)   (m > 0)
// with Nbar the full orthonormalization over S^2.
//
// Nodes: (lmax+1) Gauss-Legendre colatitudes (theta ascending) times
// (2 lmax + 2) uniform longitudes; node index n = i_theta * nphi + j_phi.
// The quadrature integrates products Y_{l,m} Y_{l',m'} exactly for
// l, l' <= lmax.
class SphereGrid {
 public:
  explicit SphereGrid(int lmax);

  int lmax() const { return lmax_; }
  int ntheta() const { return lmax_ + 1; }
  int nphi() const { return 2 * lmax_ + 2; }
  int nnodes() const { return ntheta() * nphi(); }
  int ncoeffs() const { return (lmax_ + 1) * (lmax_ + 1); }

  static int index(int l, int m) { return l * l + m + l; }
  static int degree_of(int k);  // l of a flat index

  double theta(int i) const { return theta_[i]; }
  double phi(int j) const { return phi_[j]; }
  double node_theta(int n) const { return theta_[n / nphi()]; }
  double node_phi(int n) const { return phi_[n % nphi()]; }
  // Node as a unit vector of R^3 (z toward theta = 0).
  Eigen::Vector3d node_dir(int n) const;

  // Quadrature weight of node n; weights sum to 4 pi.
  double weight(int n) const { return w_[n]; }
  const Eigen::VectorXd& weights() const { return w_; }

  // Value and theta-derivative tables, nnodes x ncoeffs.
  const Eigen::MatrixXd& values() const { return V_; }
  const Eigen::MatrixXd& dtheta() const { return Vt_; }
  const Eigen::MatrixXd& dtheta2() const { return Vtt_; }
  // Analysis matrix, ncoeffs x nnodes: coeffs = analysis() * nodevalues.
  const Eigen::MatrixXd& analysis() const { return A_; }

  // d/dphi acts on coefficients: (d/dphi f)_coeffs = phi_rotate(coeffs).
  Eigen::VectorXd phi_rotate(const Eigen::VectorXd& c) const;

  // Shared instances keyed by lmax.
  static std::shared_ptr<const SphereGrid> get(int lmax);

 private:
  int lmax_;
  std::vector<double> theta_, phi_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd V_, Vt_, Vtt_, A_;
};

}  // namespace wlab
