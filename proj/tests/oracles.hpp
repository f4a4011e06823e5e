#pragma once

// Independent test oracles. These deliberately re-derive quantities from
// first principles with their own conventions and loops so that agreement
// with the library is meaningful.

#include <cmath>
#include <vector>

#include "wlab/curvature.hpp"
#include "wlab/geodesics.hpp"

namespace oracle {

using wlab::Mat3;
using wlab::Vec3;

inline double eps3(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;  // cyclic detection
}

// Curvature of a left-invariant metric on SU(2) by brute-force Koszul
// evaluation in the frame X_1, X_2, X_3 with [X_i, X_j] = 2 eps_{ijk} X_k.
struct GroupCurvature {
  Mat3 G, Ginv, ric, ric0;
  double scalar = 0.0, ric0_norm2 = 0.0;
  double sec[3][3] = {};            // sectional curvatures of frame planes
  double gamma[3][3][3] = {};       // nabla_{X_i} X_j = gamma[i][j][k] X_k
  double rm[3][3][3][3] = {};       // <R(X_i,X_j)X_k, X_l>
};

inline GroupCurvature koszul_curvature(const Mat3& G) {
  GroupCurvature r;
  r.G = G;
  r.Ginv = G.inverse();
  // 2 <nabla_i X_j, X_l> = <[X_i,X_j],X_l> - <[X_j,X_l],X_i> + <[X_l,X_i],X_j>
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Vec3 rhs;
      for (int l = 0; l < 3; ++l) {
        double s = 0;
        for (int m = 0; m < 3; ++m)
          s += 2 * eps3(i, j, m) * G(m, l) - 2 * eps3(j, l, m) * G(m, i) +
               2 * eps3(l, i, m) * G(m, j);
        rhs[l] = 0.5 * s;
      }
      const Vec3 gam = r.Ginv * rhs;
      for (int k = 0; k < 3; ++k) r.gamma[i][j][k] = gam[k];
    }
  // R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        Vec3 val = Vec3::Zero();
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            val[b] += r.gamma[j][k][a] * r.gamma[i][a][b];
            val[b] -= r.gamma[i][k][a] * r.gamma[j][a][b];
            val[b] -= 2 * eps3(i, j, a) * r.gamma[a][k][b];
          }
        for (int l = 0; l < 3; ++l) {
          double ip = 0;
          for (int b = 0; b < 3; ++b) ip += val[b] * G(b, l);
          r.rm[i][j][k][l] = ip;
        }
      }
  // Ricci as the trace over an orthonormalized first slot:
  // Ric(Y,Z) = sum_a <R(f_a, Y) Z, f_a> for f_a orthonormal
  const Mat3 F = wlab::orthonormal_frame_factor(G);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      double s = 0;
      for (int a = 0; a < 3; ++a) {
        // <R(f_a, X_j) X_l, f_a>
        double v = 0;
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) v += F(i, a) * F(k, a) * r.rm[i][j][l][k];
        s += v;
      }
      r.ric(j, l) = s;
    }
  r.scalar = (r.Ginv * r.ric).trace();
  r.ric0 = r.ric - (r.scalar / 3.0) * G;
  r.ric0_norm2 = (r.Ginv * r.ric0 * r.Ginv * r.ric0).trace();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const double num = r.rm[a][b][b][a];
      const double den = G(a, a) * G(b, b) - G(a, b) * G(a, b);
      r.sec[a][b] = num / den;
    }
  return r;
}

// Arc length of an integrated geodesic path by Simpson quadrature of the
// stored dense output.
inline double path_length(const wlab::RadialGeodesic& path, const wlab::MetricFamily& fam,
                          double tmax, int segments = 400) {
  auto speed = [&](double t) {
    const auto s = path.at(t);
    const Mat3 G = fam.eval_raw(wlab::S3Point(s.q));
    return std::sqrt(s.v.dot(G * s.v));
  };
  double sum = 0;
  const double h = tmax / segments;
  for (int k = 0; k < segments; ++k) {
    const double a = k * h;
    sum += (h / 6) * (speed(a) + 4 * speed(a + h / 2) + speed(a + h));
  }
  return sum;
}

// Closed-form geodesic of the Berger metric diag(lambda, 1, 1):
// q(t) = q0 * exp(t a) * exp(t b) with a = (lambda v1, v2, v3),
// b = (-(lambda - 1) v1, 0, 0).
inline wlab::S3Point berger_geodesic(const wlab::S3Point& p, double lambda, const Vec3& v,
                                     double t) {
  const Vec3 a(lambda * v[0], v[1], v[2]);
  const Vec3 b(-(lambda - 1.0) * v[0], 0, 0);
  using wlab::qexp_im;
  using wlab::qmul;
  return wlab::S3Point(qmul(qmul(p.q(), qexp_im(t * a)), qexp_im(t * b)));
}

// Least-squares slope of log|y| against log|x|.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = (int)x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(std::abs(x[i])), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
