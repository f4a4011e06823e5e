#pragma once

#include "wlab/immersed_sphere.hpp"

namespace wlab {

struct EnergyReport {
  double conformal = 0.0;   // I = int (H^2/4 - D) dmu
  double willmore = 0.0;    // W = int (H^2/4 + 1) dmu
  double area = 0.0;
  double half_a0_sq = 0.0;  // (1/2) int |A0|^2 dmu; equals I pointwise
};

EnergyReport energy(const ImmersedSphere& surface);

// Jacobi operator L u = -Lap_Sigma u - (Ric(nu,nu) + |A|^2) u, sampled on the
// grid and re-expanded.
SphereField jacobi_apply(const ImmersedSphere& surface, const SphereField& u);

enum class GradientMode { kFiniteDifference, kAnalyticRound };

struct GradientConfig {
  double fd_step = 1e-4;   // coefficient-space step
  bool richardson = true;  // one extra level at fd_step/2
  // Surface geometry is sampled at band limit lmax + geom_pad so that the
  // degree-(l+1) content of the normal field survives for every solved mode;
  // without the margin the top modes see a ~35% too-soft discrete Hessian.
  int geom_pad = 2;
};

// Evaluates the conformal Willmore energy and its coefficient-space gradient.
// Fields of interest (w, gradients) are band-limited at the base grid; the
// graphs themselves live on the padded cache grid. The gradient is the
// L^2(S^2) representation of dI: component (l,m) is d/dt I(w + t Y_lm).
class EnergyMachine {
 public:
  // cache must be built on the padded grid; base is the solution band limit.
  EnergyMachine(std::shared_ptr<const RadialCache> cache,
                std::shared_ptr<const SphereGrid> base);

  const std::shared_ptr<const RadialCache>& cache() const { return cache_; }
  const std::shared_ptr<const SphereGrid>& base_grid() const { return base_; }

  // w may be given at the base or the padded band limit.
  double conformal_energy(const SphereField& w) const;
  ImmersedSphere graph(const SphereField& w) const;
  SphereField gradient(const SphereField& w, const GradientConfig& cfg = {}) const;

  // Pointwise quotient of the gradient by the pairing weight
  // area_el * g(gdot, nu), re-expanded at the base band limit: the
  // L^2(Sigma, gamma) density of dI.
  SphereField gradient_density(const SphereField& w, const SphereField& grad) const;

  SphereField embed(const SphereField& w) const;  // zero-pad to the cache grid

 private:
  std::shared_ptr<const RadialCache> cache_;
  std::shared_ptr<const SphereGrid> base_;
};

// dI as a field on S^2 at the graph (family, p, rho, w).
// kFiniteDifference: central differences in each SH coefficient direction.
// kAnalyticRound: the first-variation density (1/2) L H + H^3/4 + H of the
// round metric, weighted by the area-element Jacobian relating the
// L^2(Sigma, gamma) and L^2(S^2) pairings. Only valid for the round family.
SphereField willmore_gradient(const MetricFamily& family, const S3Point& p, double rho,
                              const SphereField& w,
                              GradientMode mode = GradientMode::kFiniteDifference,
                              const GradientConfig& cfg = {});

// Finite-difference residuals of the first-variation identities under the
// normal variation u (graphs w + s u over a round umbilic base, where radial
// graph motion is exactly normal motion):
//   d/ds dmu = u H dmu
//   d/ds H = L u
//   d/ds Ric(nu,nu) = u grad_nu Ric(nu,nu) - 2 Ric(grad u, nu)
//   d/ds |A|^2 = -2 u tr A^3 - 2 A^{ij} nabla_i nabla_j u - 2 u A^{ij} T_ij
//   [d/ds, Lap] z  (commutator, evaluated with z = u)
struct VariationResiduals {
  double area_element = 0.0;
  double mean_curvature = 0.0;
  double ambient_ricci = 0.0;
  double second_form_sq = 0.0;
  double laplace_commutator = 0.0;
};

VariationResiduals variation_identity_residuals(const ImmersedSphere& surface,
                                                const SphereField& u, double ds);

}  // namespace wlab
