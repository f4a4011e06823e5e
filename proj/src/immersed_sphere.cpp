#include "wlab/immersed_sphere.hpp"

#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ImmersedSphere graph_sphere(std::shared_ptr<const RadialCache> cache, const SphereField& w) {
  const auto& grid = *cache->grid;
  const int nn = grid.nnodes();
  const double rho = cache->rho;

  ImmersedSphere s;
  s.cache = cache;
  s.w = w;

  const Eigen::VectorXd wv = w.node_values();
  const Eigen::VectorXd wt = w.node_dtheta();
  const Eigen::VectorXd wp = w.node_dphi();
  const double bound = 0.5 * std::min(rho, kPi - rho);
  if (wv.size() && wv.cwiseAbs().maxCoeff() >= bound)
    throw GraphTooLarge("graph_sphere: |w|_inf >= min(rho, pi - rho)/2");

  s.position.resize(nn, 4);
  s.velocity.resize(nn, 3);
  s.normal.resize(nn, 3);
  s.tan_theta.resize(nn, 3);
  s.tan_phi.resize(nn, 3);
  s.gamma.resize(nn, 3);
  s.second.resize(nn, 3);
  s.area_el.resize(nn);
  s.H.resize(nn);
  s.A0_sq.resize(nn);
  s.D.resize(nn);
  s.jacobian.resize(nn);

  const bool group = cache->family.is_group();
  Mat3 G = cache->family.eval_raw(cache->center);

  double normal_res = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : normal_res)
#endif
  for (int n = 0; n < nn; ++n) {
    const double r = rho + wv[n];
    const GeoState st = cache->rays[n].at(r);
    const Vec3 a_th = st.j[0] + wt[n] * st.v;
    const Vec3 a_ph = st.j[1] + wp[n] * st.v;
    const Mat3 Gn = group ? G : cache->family.eval_raw(S3Point(st.q));

    const double g11 = a_th.dot(Gn * a_th);
    const double g12 = a_th.dot(Gn * a_ph);
    const double g22 = a_ph.dot(Gn * a_ph);

    Vec3 nu = Gn.inverse() * a_th.cross(a_ph);
    const double nn2 = nu.dot(Gn * nu);
    nu /= std::sqrt(nn2);
    const double vdotn = nu.dot(Gn * st.v);
    if (vdotn < 0) nu = -nu;

    s.position.row(n) = st.q.transpose();
    s.velocity.row(n) = st.v.transpose();
    s.normal.row(n) = nu.transpose();
    s.tan_theta.row(n) = a_th.transpose();
    s.tan_phi.row(n) = a_ph.transpose();
    s.gamma.row(n) = Eigen::RowVector3d(g11, g12, g22);

    const double det = g11 * g22 - g12 * g12;
    s.area_el[n] = std::sqrt(det) / std::sin(grid.node_theta(n));
    s.jacobian[n] = s.area_el[n] * std::abs(nu.dot(Gn * st.v));

    double res = std::abs(nu.dot(Gn * nu) - 1.0);
    res = std::max(res, std::abs(nu.dot(Gn * a_th)));
    res = std::max(res, std::abs(nu.dot(Gn * a_ph)));
    normal_res = std::max(normal_res, res);
  }
  s.normal_residual = normal_res;

  // d nu spectrally: the frame components of nu are smooth scalars on S^2
  std::array<SphereField, 3> nfield;
  std::array<Eigen::VectorXd, 3> nth, nph;
  for (int k = 0; k < 3; ++k) {
    nfield[k] = SphereField::from_nodes(cache->grid, s.normal.col(k));
    nth[k] = nfield[k].node_dtheta();
    nph[k] = nfield[k].node_dphi();
  }

  ConnectionProvider conn = cache->integrator->connection();
  Tens3 gamma_tab;
  if (group) conn.eval_gamma(cache->center, gamma_tab);

  double asym = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : asym) firstprivate(gamma_tab)
#endif
  for (int n = 0; n < nn; ++n) {
    Tens3 gm = gamma_tab;
    if (!group) conn.eval_gamma(S3Point(s.position.row(n).transpose()), gm);
    const Mat3 Gn =
        group ? G : cache->family.eval_raw(S3Point(s.position.row(n).transpose()));
    const Vec3 nu = s.normal.row(n).transpose();
    const Vec3 a_th = s.tan_theta.row(n).transpose();
    const Vec3 a_ph = s.tan_phi.row(n).transpose();

    // (nabla_{T_a} nu)^k = da n^k + T_a^i n^m Gamma^k_{im}
    Vec3 dth_nu(nth[0][n], nth[1][n], nth[2][n]);
    Vec3 dph_nu(nph[0][n], nph[1][n], nph[2][n]);
    for (int k = 0; k < 3; ++k) {
      double cth = 0, cph = 0;
      for (int i = 0; i < 3; ++i)
        for (int m = 0; m < 3; ++m) {
          cth += a_th[i] * nu[m] * gm(k, i, m);
          cph += a_ph[i] * nu[m] * gm(k, i, m);
        }
      dth_nu[k] += cth;
      dph_nu[k] += cph;
    }

    // A(X, Y) = g(nabla_X nu, Y)
    const double A11 = dth_nu.dot(Gn * a_th);
    double A12 = dth_nu.dot(Gn * a_ph);
    double A21 = dph_nu.dot(Gn * a_th);
    const double A22 = dph_nu.dot(Gn * a_ph);
    asym = std::max(asym, std::abs(A12 - A21));
    A12 = 0.5 * (A12 + A21);

    Eigen::Matrix2d met, Am;
    met << s.gamma(n, 0), s.gamma(n, 1), s.gamma(n, 1), s.gamma(n, 2);
    Am << A11, A12, A12, A22;
    const Eigen::Matrix2d gi = met.inverse();
    const double H = (gi * Am).trace();
    const Eigen::Matrix2d B = Am - 0.5 * H * met;  // traceless part A0
    const Eigen::Matrix2d MB = gi * B;

    s.second.row(n) = Eigen::RowVector3d(A11, A12, A22);
    s.H[n] = H;
    s.D[n] = Am.determinant() / met.determinant();
    s.A0_sq[n] = (MB * MB).trace();
  }
  s.asym_residual = asym;
  return s;
}

ImmersedSphere graph_sphere(const MetricFamily& family, const S3Point& p, double rho,
                            const SphereField& w) {
  return graph_sphere(build_radial_cache(family, p, rho, w.grid()), w);
}

SphereField pullback_field(const std::shared_ptr<const SphereGrid>& grid,
                           const Eigen::VectorXd& u_on_sphere) {
  return SphereField::from_nodes(grid, u_on_sphere);
}

Eigen::VectorXd surface_laplacian(const ImmersedSphere& s, const Eigen::VectorXd& u_nodes) {
  const auto& grid = s.cache->grid;
  const SphereField u = SphereField::from_nodes(grid, u_nodes);
  const Eigen::VectorXd ut = u.node_dtheta();
  const Eigen::VectorXd up = u.node_dphi();
  const int nn = grid->nnodes();

  // flux field V = area_el * gamma^{ab} db u da, Cartesian components
  std::array<Eigen::VectorXd, 3> V{Eigen::VectorXd(nn), Eigen::VectorXd(nn),
                                   Eigen::VectorXd(nn)};
  for (int n = 0; n < nn; ++n) {
    const double g11 = s.gamma(n, 0), g12 = s.gamma(n, 1), g22 = s.gamma(n, 2);
    const double det = g11 * g22 - g12 * g12;
    const double vth = (g22 * ut[n] - g12 * up[n]) / det;
    const double vph = (-g12 * ut[n] + g11 * up[n]) / det;
    const double th = grid->node_theta(n), ph = grid->node_phi(n);
    const double st = std::sin(th), ct = std::cos(th);
    const double sp = std::sin(ph), cp = std::cos(ph);
    // d_theta = e_theta, d_phi = sin(theta) e_phi in R^3 components
    const double a = s.area_el[n] * vth;
    const double b = s.area_el[n] * vph * st;
    V[0][n] = a * ct * cp - b * sp;
    V[1][n] = a * ct * sp + b * cp;
    V[2][n] = -a * st;
  }
  const Eigen::VectorXd div = cartesian_divergence(grid, V);
  return div.cwiseQuotient(s.area_el);
}

Eigen::VectorXd surface_grad_pair(const ImmersedSphere& s, const SphereField& u,
                                  const SphereField& z) {
  const Eigen::VectorXd ut = u.node_dtheta(), up = u.node_dphi();
  const Eigen::VectorXd zt = z.node_dtheta(), zp = z.node_dphi();
  const int nn = s.grid().nnodes();
  Eigen::VectorXd out(nn);
  for (int n = 0; n < nn; ++n) {
    const double g11 = s.gamma(n, 0), g12 = s.gamma(n, 1), g22 = s.gamma(n, 2);
    const double det = g11 * g22 - g12 * g12;
    out[n] =
        (g22 * ut[n] * zt[n] - g12 * (ut[n] * zp[n] + up[n] * zt[n]) + g11 * up[n] * zp[n]) /
        det;
  }
  return out;
}

double ImmersedSphere::integrand_identity_residual() const {
  double r = 0;
  for (int n = 0; n < H.size(); ++n) {
    const double lhs = 0.25 * H[n] * H[n] - D[n];
    const double rhs = 0.5 * A0_sq[n];
    r = std::max(r, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return r;
}

}  // namespace wlab
