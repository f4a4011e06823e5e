#include "wlab/geodesics.hpp"

#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

constexpr double kBaseStep = 0.004;
constexpr double kStepTol = 1e-11;
constexpr double kMinStep = 1e-7;

struct Rhs {
  const ConnectionProvider* conn;
  int njac;
  Tens3 gamma0;  // filled once for position-independent connections
  Tens4 rop0;

  Rhs(const ConnectionProvider* c, int nj) : conn(c), njac(nj) {
    if (conn->constant()) conn->eval(S3Point(), gamma0, rop0);
  }

  void operator()(const GeoState& y, GeoState& dy) const {
    const S3Point q(y.q);  // renormalizes
    Tens3 gamma_loc;
    Tens4 rop_loc;
    const Tens3* gp = &gamma0;
    const Tens4* rp = &rop0;
    if (!conn->constant()) {
      conn->eval(q, gamma_loc, rop_loc);
      gp = &gamma_loc;
      rp = &rop_loc;
    }
    const Tens3& gamma = *gp;
    const Tens4& rop = *rp;
    // qdot = q * (v . e)
    dy.q = qmul(q.q(), Vec4(0, y.v[0], y.v[1], y.v[2]));
    for (int k = 0; k < 3; ++k) {
      double a = 0;
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) a += gamma(k, i, l) * y.v[i] * y.v[l];
      dy.v[k] = -a;
    }
    for (int m = 0; m < njac; ++m) {
      for (int k = 0; k < 3; ++k) {
        double gj = 0, gu = 0, rr = 0;
        for (int i = 0; i < 3; ++i)
          for (int l = 0; l < 3; ++l) {
            gj += gamma(k, i, l) * y.v[i] * y.j[m][l];
            gu += gamma(k, i, l) * y.v[i] * y.u[m][l];
          }
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) rr += rop(k, c, a, b) * y.j[m][a] * y.v[b] * y.v[c];
        dy.j[m][k] = y.u[m][k] - gj;
        dy.u[m][k] = -gu - rr;
      }
    }
  }
};

GeoState axpy(const GeoState& y, double h, const GeoState& d, int njac) {
  GeoState out = y;
  out.q += h * d.q;
  out.v += h * d.v;
  for (int m = 0; m < njac; ++m) {
    out.j[m] += h * d.j[m];
    out.u[m] += h * d.u[m];
  }
  return out;
}

GeoState rk4_step(const Rhs& rhs, const GeoState& y, double h, int njac) {
  GeoState k1, k2, k3, k4;
  rhs(y, k1);
  rhs(axpy(y, h / 2, k1, njac), k2);
  rhs(axpy(y, h / 2, k2, njac), k3);
  rhs(axpy(y, h, k3, njac), k4);
  GeoState out = y;
  out.q += (h / 6) * (k1.q + 2 * k2.q + 2 * k3.q + k4.q);
  out.v += (h / 6) * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  for (int m = 0; m < njac; ++m) {
    out.j[m] += (h / 6) * (k1.j[m] + 2 * k2.j[m] + 2 * k3.j[m] + k4.j[m]);
    out.u[m] += (h / 6) * (k1.u[m] + 2 * k2.u[m] + 2 * k3.u[m] + k4.u[m]);
  }
  return out;
}

double state_dist(const GeoState& a, const GeoState& b, int njac) {
  double d = (a.q - b.q).cwiseAbs().maxCoeff();
  d = std::max(d, (a.v - b.v).cwiseAbs().maxCoeff());
  for (int m = 0; m < njac; ++m) {
    d = std::max(d, (a.j[m] - b.j[m]).cwiseAbs().maxCoeff());
    d = std::max(d, (a.u[m] - b.u[m]).cwiseAbs().maxCoeff());
  }
  return d;
}

}  // namespace

GeoState RadialGeodesic::at(double t) const {
  if (t_.empty() || t < -1e-12 || t > t_.back() + 1e-9)
    throw IntegratorFailure("RadialGeodesic::at: parameter outside dense range");
  t = std::min(std::max(t, 0.0), t_.back());
  // binary search for the bracketing step
  size_t lo = 0, hi = t_.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (t_[mid] <= t)
      lo = mid;
    else
      hi = mid;
  }
  const double h = t_[hi] - t_[lo];
  if (h <= 0) return y_[lo];
  const double s = (t - t_[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;

  const GeoState& y0 = y_[lo];
  const GeoState& y1 = y_[hi];
  const GeoState& f0 = f_[lo];
  const GeoState& f1 = f_[hi];
  GeoState out;
  out.q = h00 * y0.q + h * h10 * f0.q + h01 * y1.q + h * h11 * f1.q;
  out.v = h00 * y0.v + h * h10 * f0.v + h01 * y1.v + h * h11 * f1.v;
  for (int m = 0; m < njac_; ++m) {
    out.j[m] = h00 * y0.j[m] + h * h10 * f0.j[m] + h01 * y1.j[m] + h * h11 * f1.j[m];
    out.u[m] = h00 * y0.u[m] + h * h10 * f0.u[m] + h01 * y1.u[m] + h * h11 * f1.u[m];
  }
  out.q.normalize();
  return out;
}

RadialGeodesic GeodesicIntegrator::shoot(const S3Point& p, const Vec3& v,
                                         const std::vector<Vec3>& u0, double tmax) const {
  const int njac = (int)u0.size();
  if (njac > 3) throw std::invalid_argument("shoot: at most 3 Jacobi fields");
  const Rhs rhs(&conn_, njac);

  GeoState y;
  y.q = p.q();
  y.v = v;
  for (int m = 0; m < njac; ++m) {
    y.j[m].setZero();
    y.u[m] = u0[m];
  }

  RadialGeodesic path;
  path.njac_ = njac;
  GeoState f;
  rhs(y, f);
  path.t_.push_back(0.0);
  path.y_.push_back(y);
  path.f_.push_back(f);

  double t = 0.0;
  double h = std::min(kBaseStep, tmax > 0 ? tmax : kBaseStep);
  while (t < tmax - 1e-14) {
    h = std::min(h, tmax - t);
    const GeoState full = rk4_step(rhs, y, h, njac);
    const GeoState half1 = rk4_step(rhs, y, h / 2, njac);
    const GeoState half2 = rk4_step(rhs, half1, h / 2, njac);
    const double err = state_dist(full, half2, njac) / 15.0;
    if (err > kStepTol && h > kMinStep) {
      h /= 2;
      if (h < kMinStep) throw IntegratorFailure("geodesic integrator: step underflow");
      continue;
    }
    // local extrapolation
    GeoState next = half2;
    next.q += (half2.q - full.q) / 15.0;
    next.v += (half2.v - full.v) / 15.0;
    for (int m = 0; m < njac; ++m) {
      next.j[m] += (half2.j[m] - full.j[m]) / 15.0;
      next.u[m] += (half2.u[m] - full.u[m]) / 15.0;
    }
    next.q.normalize();
    t += h;
    y = next;
    rhs(y, f);
    path.t_.push_back(t);
    path.y_.push_back(y);
    path.f_.push_back(f);
    if (h < kBaseStep && err < kStepTol / 32) h *= 2;
  }
  return path;
}

S3Point exp_map(const MetricFamily& family, const S3Point& p, const Vec3& v) {
  const Mat3 G = family.eval(p);
  const double vnorm = std::sqrt(v.dot(G * v));
  if (vnorm > 3.14159265358979323846 + 0.5)
    throw std::invalid_argument("exp_map: |v|_g exceeds pi + 0.5");
  if (vnorm < 1e-300) return p;
  GeodesicIntegrator integ(family);
  const RadialGeodesic path = integ.shoot(p, v / vnorm, {}, vnorm);
  return S3Point(path.at(vnorm).q);
}

Vec3 exp_map_inverse(const MetricFamily& family, const S3Point& p, const S3Point& target,
                     double guess_radius) {
  GeodesicIntegrator integ(family);
  // initial guess from the round closed form
  const double c = std::clamp(p.q().dot(target.q()), -1.0, 1.0);
  const double dist = std::acos(c);
  Vec3 x = Vec3::Zero();
  if (dist < 1e-14) return x;
  Vec4 t4 = target.q() - c * p.q();
  if (t4.norm() < 1e-14)
    throw ExpInversionFailure("exp_map_inverse: antipodal target");
  t4.normalize();
  for (int i = 0; i < 3; ++i) x[i] = dist * t4.dot(p.frame(i + 1));
  if (x.norm() > 4 * std::max(guess_radius, 0.3))
    throw ExpInversionFailure("exp_map_inverse: target too far from center");

  const std::vector<Vec3> basis = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (int it = 0; it < 60; ++it) {
    const double n = x.norm();
    RadialGeodesic path = integ.shoot(p, n > 1e-14 ? Vec3(x / n) : Vec3::UnitX(), basis,
                                      std::max(n, 1e-12));
    // endpoint and differential d(exp)_x in ambient coordinates
    GeoState s = path.at(std::max(n, 1e-12));
    const S3Point qe(s.q);
    Eigen::Matrix<double, 4, 3> Jac;
    if (n > 1e-14) {
      // d(exp)(w) = J_w(n)/n for |x| fixed direction scaling; assemble via
      // the three unit Jacobi fields shot from t=0 with U_k = e_k: the map
      // x -> exp(x) has differential J_k evaluated at t=n with the nonunit
      // parametrization, i.e. fields along speed-1 ray scaled by 1/n... use
      // directional refit instead: shoot at velocity x/|x| over time |x|,
      // Jacobi initial data e_k gives d/ds exp(|x| (xhat + s e_k)) = J_k(|x|).
      // Correction: exp(x + s w) = exp(|x+sw| dir), handled by Gauss-Newton
      // on the frame components below.
      for (int k = 0; k < 3; ++k) {
        Vec4 amb = Vec4::Zero();
        for (int i = 0; i < 3; ++i) amb += s.j[k][i] * qe.frame(i + 1);
        Jac.col(k) = amb;
      }
    } else {
      for (int k = 0; k < 3; ++k) Jac.col(k) = p.frame(k + 1);
    }
    const Vec4 resid = target.q() - qe.q();
    if (resid.norm() < 1e-12) return x;
    // Gauss-Newton step: J has the scaling d exp(x)[w] = J_w(|x|)/|x| for
    // the fields above (U_k = e_k gives J_k ~ t e_k near 0, so divide by n).
    Eigen::Matrix<double, 4, 3> Jn = Jac / std::max(n, 1e-12);
    const Vec3 delta = (Jn.transpose() * Jn).ldlt().solve(Jn.transpose() * resid);
    x += delta;
    if (delta.norm() < 1e-13) return x;
  }
  throw ExpInversionFailure("exp_map_inverse: Gauss-Newton did not converge");
}

std::shared_ptr<const RadialCache> build_radial_cache(const MetricFamily& family,
                                                      const S3Point& p, double rho,
                                                      std::shared_ptr<const SphereGrid> grid) {
  constexpr double kPi = 3.14159265358979323846;
  if (!(rho > 0 && rho < kPi)) throw std::invalid_argument("build_radial_cache: rho in (0, pi)");
  auto cache = std::make_shared<RadialCache>();
  cache->grid = grid;
  cache->family = family;
  cache->center = p;
  cache->rho = rho;
  cache->r_max = rho + 0.5 * std::min(rho, kPi - rho) + 0.02;
  cache->frame_factor = orthonormal_frame_factor(family.eval(p));
  cache->integrator = std::make_shared<const GeodesicIntegrator>(family);

  const int nn = grid->nnodes();
  cache->rays.resize(nn);
  const Mat3& F = cache->frame_factor;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int n = 0; n < nn; ++n) {
    const double th = grid->node_theta(n), ph = grid->node_phi(n);
    const double st = std::sin(th), ct = std::cos(th);
    const double sp = std::sin(ph), cp = std::cos(ph);
    const Vec3 dir(st * cp, st * sp, ct);
    const Vec3 e_th(ct * cp, ct * sp, -st);
    const Vec3 dphi(-st * sp, st * cp, 0.0);  // d Theta / d phi
    cache->rays[n] =
        cache->integrator->shoot(p, F * dir, {F * e_th, F * dphi}, cache->r_max);
  }
  return cache;
}

}  // namespace wlab
