#pragma once

#include "wlab/geodesics.hpp"
#include "wlab/sphere_field.hpp"

namespace wlab {

// A sampled normal graph exp_p((rho + w(Theta)) Theta) over a geodesic
// sphere, with its induced metric and extrinsic curvature per grid node.
//
// Second fundamental form convention: A(X, Y) = g(nabla_X nu, Y) with nu the
// outward unit normal (away from the center), so the unit round sphere has
// H = tr_gamma A = +2 and geodesic spheres in the round S^3 have H = 2 cot(rho).
struct ImmersedSphere {
  std::shared_ptr<const RadialCache> cache;
  SphereField w;

  // per node, frame components unless noted
  Eigen::MatrixX4d position;   // ambient unit quaternions
  Eigen::MatrixX3d velocity;   // gdot(r), g-unit, outward
  Eigen::MatrixX3d normal;     // nu
  Eigen::MatrixX3d tan_theta;  // d Psi / d theta
  Eigen::MatrixX3d tan_phi;    // d Psi / d phi
  Eigen::MatrixX3d gamma;      // induced metric (th-th, th-ph, ph-ph)
  Eigen::MatrixX3d second;     // A (th-th, th-ph, ph-ph)
  Eigen::VectorXd area_el;     // sqrt(det gamma) / sin(theta)
  Eigen::VectorXd H;           // mean curvature, sum of principal curvatures
  Eigen::VectorXd A0_sq;       // |A - (H/2) gamma|^2
  Eigen::VectorXd D;           // product of principal curvatures
  Eigen::VectorXd jacobian;    // area_el * g(gdot, nu): L2(S2) pairing weight

  // assembly diagnostics (sup norms)
  double asym_residual = 0.0;    // |A_thph - A_phth| before symmetrization
  double normal_residual = 0.0;  // |g(nu,nu) - 1|, |g(nu, dPsi)|

  const SphereGrid& grid() const { return *cache->grid; }
  double rho() const { return cache->rho; }

  // H^2/4 - D and |A0|^2/2 agree pointwise; largest relative gap.
  double integrand_identity_residual() const;
};

// Build the graph over a prepared radial cache (fast path; w must satisfy
// |w|_inf < min(rho, pi - rho)/2, else GraphTooLarge).
ImmersedSphere graph_sphere(std::shared_ptr<const RadialCache> cache, const SphereField& w);

// Convenience: build the cache and the graph in one call.
ImmersedSphere graph_sphere(const MetricFamily& family, const S3Point& p, double rho,
                            const SphereField& w);

// Values u at the grid-image nodes of a geodesic sphere pulled back to S^2.
SphereField pullback_field(const std::shared_ptr<const SphereGrid>& grid,
                           const Eigen::VectorXd& u_on_sphere);

// Laplace-Beltrami of the induced metric applied to node values of u,
// assembled pole-safely through Cartesian component fields.
Eigen::VectorXd surface_laplacian(const ImmersedSphere& s, const Eigen::VectorXd& u_nodes);

// gamma^{ab} da u db z per node (surface gradient pairing).
Eigen::VectorXd surface_grad_pair(const ImmersedSphere& s, const SphereField& u,
                                  const SphereField& z);

}  // namespace wlab
