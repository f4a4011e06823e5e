#pragma once

#include <array>

#include "wlab/metric.hpp"

namespace wlab {

// ---------------------------------------------------------------------------
// Conventions (fixed here, used everywhere).
//
// Frame: the global left-invariant frame E_1, E_2, E_3 with
// [E_i, E_j] = 2 eps_{ijk} E_k; the round metric has G = Id in it.
//
// Curvature operator: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
//                               - nabla_{[X,Y]} Z.
// Component tensor:   Riem_{ijkl} = g( R(E_i,E_j) E_l , E_k ),
// so the round metric gives Riem_{ijkl} = g_ik g_jl - g_il g_jk.
// Contractions:       Ric_{jl} = G^{ik} Riem_{ijkl},  R = G^{jl} Ric_{jl}.
//
// Divergence of a symmetric 2-tensor (no minus sign):
//   (div T)_j = G^{ik} (nabla_i T)_{kj}.
// With these choices the contracted Bianchi identity reads
//   dR = 6 div(Ric - (R/3) g)
// with the +6 coefficient; bianchi_residual asserts exactly this form.
// ---------------------------------------------------------------------------

struct Tens3 {
  std::array<double, 27> v{};
  double& operator()(int a, int b, int c) { return v[9 * a + 3 * b + c]; }
  double operator()(int a, int b, int c) const { return v[9 * a + 3 * b + c]; }
};

struct Tens4 {
  std::array<double, 81> v{};
  double& operator()(int a, int b, int c, int d) { return v[27 * a + 9 * b + 3 * c + d]; }
  double operator()(int a, int b, int c, int d) const { return v[27 * a + 9 * b + 3 * c + d]; }
};

// All curvature data of a metric at a point, components in the declared frame.
struct CurvatureBundle {
  S3Point pt;
  std::array<Vec4, 3> frame;  // ambient R^4 realization of E_1..E_3 at pt
  Mat3 metric;                // G_ij
  Mat3 metric_inv;
  Tens3 gamma;                // connection coefficients Gamma^k_ij = gamma(k,i,j)
  Tens4 riem;                 // Riem_{ijkl}
  Tens4 rop;                  // R(E_i,E_j)E_k = rop(m,k,i,j) E_m
  Mat3 ric;
  double scalar = 0.0;
  Mat3 ric0;                  // Ric - (R/3) g
  double ric0_norm2 = 0.0;    // |Ric0|^2 in the metric

  // Diagnostics for the invariant suite.
  double symmetry_residual() const;   // antisymmetry + pair-exchange, sup norm
  double bianchi1_residual() const;   // first Bianchi identity, sup norm
};

CurvatureBundle curvature_bundle(const MetricFamily& family, const S3Point& pt);

// Connection + curvature-operator access for the geodesic integrator.
// Group metrics are position independent and use the precomputed tables.
class ConnectionProvider {
 public:
  explicit ConnectionProvider(const MetricFamily& family);
  const MetricFamily& family() const { return family_; }
  bool constant() const { return constant_; }
  void eval(const S3Point& q, Tens3& gamma, Tens4& rop) const;
  void eval_gamma(const S3Point& q, Tens3& gamma) const;

 private:
  MetricFamily family_;
  bool constant_;
  Tens3 gamma0_;
  Tens4 rop0_;
};

// Kulkarni-Nomizu product of symmetric 2-tensors:
// (a . b)_{ijkl} = a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il.
Tens4 kulkarni_nomizu(const Mat3& a, const Mat3& b);

// Invariant norm of a (0,4) tensor, all indices raised with G.
double tensor4_norm(const Tens4& t, const Mat3& G_inv);

// Residual of Riem - (R/12) g.g - Ric0 . g (the 3D Ricci decomposition).
double ricci_decomposition_residual(const CurvatureBundle& b);

// d/deps Ric0(g_eps) at eps = 0 by centered differences with one Richardson
// refinement; second return value is T2 = |D|^2 (>= 0), the leading
// coefficient of |Ric0(g_eps)|^2 = eps^2 T2 + o(eps^2).
struct TracelessRicciDerivative {
  Mat3 D;
  double t2 = 0.0;
};
TracelessRicciDerivative traceless_ricci_linearization(const MetricFamily& family,
                                                       const S3Point& pt);

// dR - 6 div(Ric0) at pt as a frame covector (identically zero for every
// metric; the numerical value certifies the convention block above).
Vec3 bianchi_residual(const MetricFamily& family, const S3Point& pt);

}  // namespace wlab
