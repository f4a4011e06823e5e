#include "wlab/energy.hpp"

#include <cmath>

#include "wlab/errors.hpp"

namespace wlab {

EnergyReport energy(const ImmersedSphere& s) {
  const Eigen::VectorXd& wq = s.grid().weights();
  EnergyReport r;
  for (int n = 0; n < wq.size(); ++n) {
    const double dmu = s.area_el[n] * wq[n];
    const double h2q = 0.25 * s.H[n] * s.H[n];
    r.conformal += (h2q - s.D[n]) * dmu;
    r.willmore += (h2q + 1.0) * dmu;
    r.area += dmu;
    r.half_a0_sq += 0.5 * s.A0_sq[n] * dmu;
  }
  return r;
}

namespace {

// Ric(nu, nu) per node in frame components.
Eigen::VectorXd ambient_ricci_normal(const ImmersedSphere& s) {
  const int nn = s.grid().nnodes();
  Eigen::VectorXd out(nn);
  const bool group = s.cache->family.is_group();
  Mat3 ric;
  if (group) ric = curvature_bundle(s.cache->family, s.cache->center).ric;
  for (int n = 0; n < nn; ++n) {
    const Vec3 nu = s.normal.row(n).transpose();
    if (!group)
      ric = curvature_bundle(s.cache->family, S3Point(s.position.row(n).transpose())).ric;
    out[n] = nu.dot(ric * nu);
  }
  return out;
}

}  // namespace

SphereField jacobi_apply(const ImmersedSphere& s, const SphereField& u) {
  const Eigen::VectorXd un = u.node_values();
  const Eigen::VectorXd lap = surface_laplacian(s, un);
  const Eigen::VectorXd ricnn = ambient_ricci_normal(s);
  const int nn = s.grid().nnodes();
  Eigen::VectorXd out(nn);
  for (int n = 0; n < nn; ++n) {
    const double a2 = s.H[n] * s.H[n] - 2.0 * s.D[n];
    out[n] = -lap[n] - (ricnn[n] + a2) * un[n];
  }
  return SphereField::from_nodes(s.cache->grid, out);
}

EnergyMachine::EnergyMachine(std::shared_ptr<const RadialCache> cache,
                             std::shared_ptr<const SphereGrid> base)
    : cache_(std::move(cache)), base_(std::move(base)) {
  if (base_->lmax() > cache_->grid->lmax())
    throw std::invalid_argument("EnergyMachine: cache grid must not be coarser than base");
}

SphereField EnergyMachine::embed(const SphereField& w) const {
  if (w.grid()->lmax() == cache_->grid->lmax()) return w;
  // flat index l*l + m + l does not depend on the band limit
  SphereField out(cache_->grid);
  out.coeffs().head(w.coeffs().size()) = w.coeffs();
  return out;
}

ImmersedSphere EnergyMachine::graph(const SphereField& w) const {
  return graph_sphere(cache_, embed(w));
}

double EnergyMachine::conformal_energy(const SphereField& w) const {
  return energy(graph(w)).conformal;
}

SphereField EnergyMachine::gradient_density(const SphereField& w,
                                            const SphereField& grad) const {
  const Eigen::VectorXd jac = graph(w).jacobian;
  const Eigen::VectorXd nodes = embed(grad).node_values().cwiseQuotient(jac);
  const SphereField dens = SphereField::from_nodes(cache_->grid, nodes);
  return SphereField(base_, dens.coeffs().head(base_->ncoeffs()));
}

SphereField EnergyMachine::gradient(const SphereField& w, const GradientConfig& cfg) const {
  const int nc = base_->ncoeffs();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nc);
  const double d = cfg.fd_step;
  const SphereField wp0 = embed(w);

  std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (int k = 0; k < nc; ++k) {
    try {
      SphereField wp = wp0;
      auto probe = [&](double step) {
        wp.coeffs()[k] = wp0.coeffs()[k] + step;
        const double ep = conformal_energy(wp);
        wp.coeffs()[k] = wp0.coeffs()[k] - step;
        const double em = conformal_energy(wp);
        wp.coeffs()[k] = wp0.coeffs()[k];
        return (ep - em) / (2 * step);
      };
      const double g1 = probe(d);
      if (cfg.richardson) {
        const double g2 = probe(d / 2);
        g[k] = (4 * g2 - g1) / 3;
      } else {
        g[k] = g1;
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return SphereField(base_, std::move(g));
}

SphereField willmore_gradient(const MetricFamily& family, const S3Point& p, double rho,
                              const SphereField& w, GradientMode mode,
                              const GradientConfig& cfg) {
  auto padded = SphereGrid::get(w.grid()->lmax() + cfg.geom_pad);
  auto cache = build_radial_cache(family, p, rho, padded);
  if (mode == GradientMode::kFiniteDifference) {
    EnergyMachine machine(cache, w.grid());
    return machine.gradient(w, cfg);
  }
  if (family.kind() != MetricFamily::Kind::kRound)
    throw std::invalid_argument("willmore_gradient: analytic mode is round-metric only");
  const EnergyMachine machine(cache, w.grid());
  const ImmersedSphere s = machine.graph(w);
  const Eigen::VectorXd lapH = surface_laplacian(s, s.H);
  const Eigen::VectorXd ricnn = ambient_ricci_normal(s);
  const int nn = s.grid().nnodes();
  Eigen::VectorXd density(nn);
  for (int n = 0; n < nn; ++n) {
    const double a2 = s.H[n] * s.H[n] - 2.0 * s.D[n];
    const double LH = -lapH[n] - (ricnn[n] + a2) * s.H[n];
    density[n] = (0.5 * LH + 0.25 * s.H[n] * s.H[n] * s.H[n] + s.H[n]) * s.jacobian[n];
  }
  const SphereField full = SphereField::from_nodes(padded, density);
  return SphereField(w.grid(), full.coeffs().head(w.grid()->ncoeffs()));
}

VariationResiduals variation_identity_residuals(const ImmersedSphere& s, const SphereField& u,
                                                double ds) {
  if (s.cache->family.kind() != MetricFamily::Kind::kRound ||
      s.A0_sq.cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(
        "variation_identity_residuals: base must be a round umbilic sphere");
  const double bound = 0.5 * std::min(s.rho(), 3.14159265358979323846 - s.rho());
  if (ds * u.sup_norm() > 0.25 * bound)
    throw StepTooLarge("variation_identity_residuals: ds too large for FD accuracy");

  const auto& grid = s.cache->grid;
  const int nn = grid->nnodes();
  const Eigen::VectorXd un = u.node_values();

  struct Sample {
    Eigen::VectorXd area_el, H, ricnn, a2, lap_u;
  };
  auto sample = [&](double step) {
    const SphereField ws = s.w + step * u;
    const ImmersedSphere g = graph_sphere(s.cache, ws);
    Sample out;
    out.area_el = g.area_el;
    out.H = g.H;
    out.ricnn = ambient_ricci_normal(g);
    out.a2 = (g.H.array() * g.H.array() - 2.0 * g.D.array()).matrix();
    out.lap_u = surface_laplacian(g, un);
    return out;
  };

  const Sample sp = sample(ds), sm = sample(-ds);
  const Sample sp2 = sample(ds / 2), sm2 = sample(-ds / 2);
  auto dd = [&](const Eigen::VectorXd Sample::*field) {
    Eigen::VectorXd out(nn);
    for (int n = 0; n < nn; ++n)
      out[n] = ((sm.*field)[n] - 8 * (sm2.*field)[n] + 8 * (sp2.*field)[n] - (sp.*field)[n]) /
               (6 * ds);
    return out;
  };

  const Eigen::VectorXd d_area = dd(&Sample::area_el);
  const Eigen::VectorXd d_H = dd(&Sample::H);
  const Eigen::VectorXd d_ric = dd(&Sample::ricnn);
  const Eigen::VectorXd d_a2 = dd(&Sample::a2);
  const Eigen::VectorXd d_lap = dd(&Sample::lap_u);

  const Eigen::VectorXd lap_u = surface_laplacian(s, un);
  const Eigen::VectorXd Lun = jacobi_apply(s, u).node_values();

  VariationResiduals r;
  for (int n = 0; n < nn; ++n) {
    const double H = s.H[n];
    r.area_element = std::max(r.area_element, std::abs(d_area[n] - un[n] * H * s.area_el[n]));
    r.mean_curvature = std::max(r.mean_curvature, std::abs(d_H[n] - Lun[n]));
    // round ambient: grad Ric = 0 and Ric(grad u, nu) = 0
    r.ambient_ricci = std::max(r.ambient_ricci, std::abs(d_ric[n]));
    // umbilic simplifications: tr A^3 = H^3/4, A^{ij} hess_ij u = (H/2) Lap u,
    // A^{ij} T_ij = H with T = gamma on the round umbilic sphere
    const double rhs_a2 = -0.5 * un[n] * H * H * H - H * lap_u[n] - 2.0 * un[n] * H;
    r.second_form_sq = std::max(r.second_form_sq, std::abs(d_a2[n] - rhs_a2));
    r.laplace_commutator =
        std::max(r.laplace_commutator, std::abs(d_lap[n] + un[n] * H * lap_u[n]));
  }
  return r;
}

}  // namespace wlab
