#pragma once

#include <memory>
#include <vector>

#include "wlab/curvature.hpp"
#include "wlab/sphere_grid.hpp"

namespace wlab {

// State along a radial geodesic: position, frame velocity, and up to three
// Jacobi fields J with their covariant derivatives U = D_t J, all in
// left-invariant frame components.
struct GeoState {
  Vec4 q;
  Vec3 v;
  std::array<Vec3, 3> j{};
  std::array<Vec3, 3> u{};
};

// Dense output of one integrated geodesic (cubic Hermite between steps).
class RadialGeodesic {
 public:
  GeoState at(double t) const;
  double tmax() const { return t_.empty() ? 0.0 : t_.back(); }
  int njac() const { return njac_; }
  const std::vector<double>& times() const { return t_; }
  const std::vector<GeoState>& states() const { return y_; }

 private:
  friend class GeodesicIntegrator;
  int njac_ = 0;
  std::vector<double> t_;
  std::vector<GeoState> y_, f_;
};

// Adaptive RK4 (step doubling with local extrapolation) for the geodesic
// equation coupled with the Jacobi equation D_t^2 J + R(J, gdot) gdot = 0.
class GeodesicIntegrator {
 public:
  explicit GeodesicIntegrator(const MetricFamily& family) : conn_(family) {}

  // Start at p with frame velocity v; Jacobi data J_k(0) = 0, U_k(0) = u0[k].
  RadialGeodesic shoot(const S3Point& p, const Vec3& v, const std::vector<Vec3>& u0,
                       double tmax) const;

  const ConnectionProvider& connection() const { return conn_; }

 private:
  ConnectionProvider conn_;
};

// exp_p(v) with v in left-invariant frame components; |v|_g <= pi + 0.5.
S3Point exp_map(const MetricFamily& family, const S3Point& p, const Vec3& v);

// Inverse of exp_p by Gauss-Newton shooting; target must lie within an
// injectivity-sized ball. Throws ExpInversionFailure.
Vec3 exp_map_inverse(const MetricFamily& family, const S3Point& p, const S3Point& target,
                     double guess_radius = 0.1);

// Radial geodesics with theta/phi Jacobi fields for a whole grid of
// directions at a common center; the dense output makes every graph with
// r(Theta) <= r_max over this center cheap to assemble.
struct RadialCache {
  std::shared_ptr<const SphereGrid> grid;
  MetricFamily family;
  S3Point center;
  double rho = 0.0;
  double r_max = 0.0;
  Mat3 frame_factor;  // columns: G(center)-orthonormal frame in E components
  std::vector<RadialGeodesic> rays;
  std::shared_ptr<const GeodesicIntegrator> integrator;
};

std::shared_ptr<const RadialCache> build_radial_cache(const MetricFamily& family,
                                                      const S3Point& p, double rho,
                                                      std::shared_ptr<const SphereGrid> grid);

}  // namespace wlab
