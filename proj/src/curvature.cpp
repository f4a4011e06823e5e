#include "wlab/curvature.hpp"

#include <cmath>
#include <functional>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

constexpr double kEps3[3][3][3] = {
    {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
    {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}},
};

using MetricFn = std::function<Mat3(const S3Point&)>;

// 4th-order directional derivative along the flow of E_i.
Mat3 frame_d1(const MetricFn& f, const S3Point& q, int i, double h) {
  const Mat3 f2 = f(frame_flow(q, i, 2 * h));
  const Mat3 f1 = f(frame_flow(q, i, h));
  const Mat3 fm1 = f(frame_flow(q, i, -h));
  const Mat3 fm2 = f(frame_flow(q, i, -2 * h));
  return (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h);
}

Mat3 frame_d1_richardson(const MetricFn& f, const S3Point& q, int i, double h) {
  const Mat3 a = frame_d1(f, q, i, h);
  const Mat3 b = frame_d1(f, q, i, h / 2);
  return (16 * b - a) / 15;
}

// 4th-order ordered second derivative E_i E_j along the flows.
Mat3 frame_d2(const MetricFn& f, const S3Point& q, int i, int j, double h) {
  if (i == j) {
    const Mat3 f2 = f(frame_flow(q, i, 2 * h));
    const Mat3 f1 = f(frame_flow(q, i, h));
    const Mat3 f0 = f(q);
    const Mat3 fm1 = f(frame_flow(q, i, -h));
    const Mat3 fm2 = f(frame_flow(q, i, -2 * h));
    return (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
  }
  static const double off[4] = {2, 1, -1, -2};
  static const double wgt[4] = {-1, 8, -8, 1};
  Mat3 acc = Mat3::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const S3Point p = frame_flow(frame_flow(q, i, off[a] * h), j, off[b] * h);
      acc += wgt[a] * wgt[b] * f(p);
    }
  return acc / (144 * h * h);
}

Mat3 frame_d2_richardson(const MetricFn& f, const S3Point& q, int i, int j, double h) {
  const Mat3 a = frame_d2(f, q, i, j, h);
  const Mat3 b = frame_d2(f, q, i, j, h / 2);
  return (16 * b - a) / 15;
}

struct MetricJet {
  Mat3 G, Ginv;
  std::array<Mat3, 3> dG;                 // E_i G
  std::array<std::array<Mat3, 3>, 3> d2G; // E_i E_j G (ordered)
  bool with_second = false;
};

MetricJet metric_jet(const MetricFamily& fam, const S3Point& q, bool with_second) {
  // FD step for chart metrics. The second-derivative stencil amplifies
  // roundoff by ~64/(12 h^2); 5e-3 balances that against the h^6 truncation
  // left after the Richardson refinement (per-entry noise ~1e-10).
  constexpr double kStep = 5e-3;
  MetricJet jet;
  jet.G = fam.eval_raw(q);
  jet.Ginv = jet.G.inverse();
  jet.with_second = with_second;
  if (fam.is_group()) {
    for (auto& m : jet.dG) m.setZero();
    for (auto& r : jet.d2G)
      for (auto& m : r) m.setZero();
    return jet;
  }
  const MetricFn f = [&fam](const S3Point& p) { return fam.eval_raw(p); };
  for (int i = 0; i < 3; ++i) jet.dG[i] = frame_d1_richardson(f, q, i + 1, kStep);
  if (with_second)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        jet.d2G[i][j] = frame_d2_richardson(f, q, i + 1, j + 1, kStep);
  return jet;
}

// Koszul bracket block: K_{ij,l} such that Gamma^k_ij = (1/2) G^{kl} K_{ij,l}.
double koszul_block(const MetricJet& jet, int i, int j, int l) {
  double v = jet.dG[i](j, l) + jet.dG[j](i, l) - jet.dG[l](i, j);
  for (int m = 0; m < 3; ++m)
    v += 2.0 * (kEps3[i][j][m] * jet.G(m, l) - kEps3[j][l][m] * jet.G(m, i) +
                kEps3[l][i][m] * jet.G(m, j));
  return v;
}

Tens3 connection_from_jet(const MetricJet& jet) {
  Tens3 gamma;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double s = 0;
        for (int l = 0; l < 3; ++l) s += jet.Ginv(k, l) * koszul_block(jet, i, j, l);
        gamma(k, i, j) = 0.5 * s;
      }
  return gamma;
}

// E_a Gamma^k_ij assembled from the jet (needs ordered second derivatives).
Tens3 connection_derivative(const MetricJet& jet, const Tens3& /*gamma*/, int a) {
  // E_a G^{kl} = -G^{km} (E_a G)_{mn} G^{nl}
  const Mat3 dGinv = -jet.Ginv * jet.dG[a] * jet.Ginv;
  Tens3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        double s = 0;
        for (int l = 0; l < 3; ++l) {
          double dK = jet.d2G[a][i](j, l) + jet.d2G[a][j](i, l) - jet.d2G[a][l](i, j);
          for (int m = 0; m < 3; ++m)
            dK += 2.0 * (kEps3[i][j][m] * jet.dG[a](m, l) - kEps3[j][l][m] * jet.dG[a](m, i) +
                         kEps3[l][i][m] * jet.dG[a](m, j));
          s += dGinv(k, l) * koszul_block(jet, i, j, l) + jet.Ginv(k, l) * dK;
        }
        out(k, i, j) = 0.5 * s;
      }
    }
  return out;
}

Tens4 curvature_operator(const Tens3& gamma,
                         const std::array<Tens3, 3>& dgamma, bool has_dgamma) {
  Tens4 rop;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) {
          double v = 0;
          if (has_dgamma) v += dgamma[i](m, j, k) - dgamma[j](m, i, k);
          for (int a = 0; a < 3; ++a) {
            v += gamma(a, j, k) * gamma(m, i, a) - gamma(a, i, k) * gamma(m, j, a);
            v -= 2.0 * kEps3[i][j][a] * gamma(m, a, k);
          }
          rop(m, k, i, j) = v;
        }
  return rop;
}

}  // namespace

CurvatureBundle curvature_bundle(const MetricFamily& family, const S3Point& pt) {
  if (!family.within_validity_bound())
    throw NonPositiveDefinite("curvature_bundle: family outside validity bound");
  CurvatureBundle b;
  b.pt = pt;
  for (int i = 0; i < 3; ++i) b.frame[i] = pt.frame(i + 1);

  const MetricJet jet = metric_jet(family, pt, /*with_second=*/true);
  b.metric = jet.G;
  b.metric_inv = jet.Ginv;
  b.gamma = connection_from_jet(jet);

  std::array<Tens3, 3> dgamma;
  const bool varying = !family.is_group();
  if (varying)
    for (int a = 0; a < 3; ++a) dgamma[a] = connection_derivative(jet, b.gamma, a);
  b.rop = curvature_operator(b.gamma, dgamma, varying);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0;
          for (int m = 0; m < 3; ++m) v += b.metric(k, m) * b.rop(m, l, i, j);
          b.riem(i, j, k, l) = v;
        }

  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      double v = 0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) v += b.metric_inv(i, k) * b.riem(i, j, k, l);
      b.ric(j, l) = v;
    }
  b.ric = 0.5 * (b.ric + b.ric.transpose()).eval();
  b.scalar = (b.metric_inv * b.ric).trace();
  b.ric0 = b.ric - (b.scalar / 3.0) * b.metric;
  b.ric0_norm2 = (b.metric_inv * b.ric0 * b.metric_inv * b.ric0).trace();
  return b;
}

double CurvatureBundle::symmetry_residual() const {
  double r = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          r = std::max(r, std::abs(riem(i, j, k, l) + riem(j, i, k, l)));
          r = std::max(r, std::abs(riem(i, j, k, l) + riem(i, j, l, k)));
          r = std::max(r, std::abs(riem(i, j, k, l) - riem(k, l, i, j)));
        }
  return r;
}

double CurvatureBundle::bianchi1_residual() const {
  double r = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          r = std::max(r, std::abs(riem(i, j, k, l) + riem(i, k, l, j) + riem(i, l, j, k)));
  return r;
}

ConnectionProvider::ConnectionProvider(const MetricFamily& family)
    : family_(family), constant_(family.is_group()) {
  if (constant_) {
    const CurvatureBundle b = curvature_bundle(family_, S3Point());
    gamma0_ = b.gamma;
    rop0_ = b.rop;
  }
}

void ConnectionProvider::eval(const S3Point& q, Tens3& gamma, Tens4& rop) const {
  if (constant_) {
    gamma = gamma0_;
    rop = rop0_;
    return;
  }
  const CurvatureBundle b = curvature_bundle(family_, q);
  gamma = b.gamma;
  rop = b.rop;
}

void ConnectionProvider::eval_gamma(const S3Point& q, Tens3& gamma) const {
  if (constant_) {
    gamma = gamma0_;
    return;
  }
  const MetricJet jet = metric_jet(family_, q, /*with_second=*/false);
  gamma = connection_from_jet(jet);
}

Tens4 kulkarni_nomizu(const Mat3& a, const Mat3& b) {
  Tens4 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          t(i, j, k, l) = a(i, k) * b(j, l) + a(j, l) * b(i, k) - a(i, l) * b(j, k) -
                          a(j, k) * b(i, l);
  return t;
}

double tensor4_norm(const Tens4& t, const Mat3& Gi) {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double u = 0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d)
                  u += Gi(i, a) * Gi(j, b) * Gi(k, c) * Gi(l, d) * t(a, b, c, d);
          s += u * t(i, j, k, l);
        }
  return std::sqrt(std::max(0.0, s));
}

double ricci_decomposition_residual(const CurvatureBundle& b) {
  const Tens4 gg = kulkarni_nomizu(b.metric, b.metric);
  const Tens4 rg = kulkarni_nomizu(b.ric0, b.metric);
  Tens4 diff;
  for (int n = 0; n < 81; ++n)
    diff.v[n] = b.riem.v[n] - (b.scalar / 12.0) * gg.v[n] - rg.v[n];
  return tensor4_norm(diff, b.metric_inv);
}

TracelessRicciDerivative traceless_ricci_linearization(const MetricFamily& family,
                                                       const S3Point& pt) {
  constexpr double kStep = 1e-3;
  const auto ric0_at = [&](double eps) {
    return curvature_bundle(family.with_epsilon(eps), pt).ric0;
  };
  const auto central = [&](double h) -> Mat3 {
    return (ric0_at(h) - ric0_at(-h)) / (2.0 * h);
  };
  const Mat3 d_h = central(kStep);
  const Mat3 d_h2 = central(kStep / 2);
  const Mat3 D = (4.0 * d_h2 - d_h) / 3.0;
  const double disagree = (d_h2 - d_h).norm();
  if (disagree > 1e-4 * std::max(1.0, D.norm()))
    throw NonConvergentDerivative("traceless_ricci_linearization: Richardson levels disagree");
  TracelessRicciDerivative out;
  out.D = D;
  out.t2 = D.squaredNorm();  // frame metric at eps = 0 is the identity
  return out;
}

Vec3 bianchi_residual(const MetricFamily& family, const S3Point& pt) {
  constexpr double kStep = 1e-3;
  const CurvatureBundle b0 = curvature_bundle(family, pt);

  // E_i of scalar curvature and of the Ric0 components along the frame flows
  std::array<double, 3> dR;
  std::array<Mat3, 3> dRic0;
  for (int i = 0; i < 3; ++i) {
    if (family.is_group()) {
      dR[i] = 0.0;
      dRic0[i].setZero();
      continue;
    }
    std::array<CurvatureBundle, 4> s;
    const double off[4] = {2, 1, -1, -2};
    for (int a = 0; a < 4; ++a)
      s[a] = curvature_bundle(family, frame_flow(pt, i + 1, off[a] * kStep));
    dR[i] = (-s[0].scalar + 8 * s[1].scalar - 8 * s[2].scalar + s[3].scalar) / (12 * kStep);
    dRic0[i] = (-s[0].ric0 + 8 * s[1].ric0 - 8 * s[2].ric0 + s[3].ric0) / (12 * kStep);
    if (std::abs(kStep) < 1e-12) throw FiniteDifferenceStepUnderflow("bianchi_residual");
  }

  // (div Ric0)_j = G^{ik} [ E_i Ric0_{kj} - Gamma^a_{ik} Ric0_{aj} - Gamma^a_{ij} Ric0_{ka} ]
  Vec3 divr = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    double v = 0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        double cov = dRic0[i](k, j);
        for (int a = 0; a < 3; ++a)
          cov -= b0.gamma(a, i, k) * b0.ric0(a, j) + b0.gamma(a, i, j) * b0.ric0(k, a);
        v += b0.metric_inv(i, k) * cov;
      }
    divr[j] = v;
  }
  return Vec3(dR[0], dR[1], dR[2]) - 6.0 * divr;
}

}  // namespace wlab
