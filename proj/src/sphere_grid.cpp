#include "wlab/sphere_grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on (-1, 1) by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int l = 0; l < n; ++l) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * l + 1) * t * p1 - l * p2) / (l + 1);
      }
      const double dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    p1 = 0.0;
    {
      double a = 1.0, b = 0.0;
      for (int l = 0; l < n; ++l) {
        const double c = b;
        b = a;
        a = ((2 * l + 1) * t * b - l * c) / (l + 1);
      }
      p0 = a;
      p1 = n * (t * a - b) / (t * t - 1.0);
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * p1 * p1);
  }
}

}  // namespace

int SphereGrid::degree_of(int k) { return (int)std::floor(std::sqrt((double)k) + 1e-12); }

SphereGrid::SphereGrid(int lmax) : lmax_(lmax) {
  if (lmax < 8) throw std::invalid_argument("SphereGrid: lmax must be >= 8");
  const int nt = ntheta(), np = nphi(), nn = nnodes(), nc = ncoeffs();

  std::vector<double> x, glw;
  gauss_legendre(nt, x, glw);
  // theta ascending <=> x = cos(theta) descending
  theta_.resize(nt);
  std::vector<double> wt(nt);
  for (int i = 0; i < nt; ++i) {
    theta_[i] = std::acos(x[i]);
    wt[i] = glw[i];
  }
  for (int i = 0; i + 1 < nt; ++i)  // ensure ascending theta
    if (theta_[i] > theta_[i + 1]) {
      for (int a = 0, b = nt - 1; a < b; ++a, --b) {
        std::swap(theta_[a], theta_[b]);
        std::swap(wt[a], wt[b]);
      }
      break;
    }

  phi_.resize(np);
  for (int j = 0; j < np; ++j) phi_[j] = 2.0 * kPi * j / np;

  w_.resize(nn);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) w_[i * np + j] = wt[i] * (2.0 * kPi / np);

  // Normalized associated Legendre tables per colatitude:
  // Pb(l,m) = Nbar_{lm} P_l^m(cos th), plus d/dtheta and d2/dtheta2.
  V_.resize(nn, nc);
  Vt_.resize(nn, nc);
  Vtt_.resize(nn, nc);

  Eigen::MatrixXd Pb(lmax_ + 1, lmax_ + 1), Pt(lmax_ + 1, lmax_ + 1), Ptt(lmax_ + 1, lmax_ + 1);
  const double sqrt2 = std::sqrt(2.0);

  for (int i = 0; i < nt; ++i) {
    const double th = theta_[i];
    const double ct = std::cos(th), st = std::sin(th);
    Pb.setZero();
    // diagonal recursion
    Pb(0, 0) = std::sqrt(1.0 / (4.0 * kPi));
    for (int m = 1; m <= lmax_; ++m)
      Pb(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * Pb(m - 1, m - 1);
    for (int m = 0; m < lmax_; ++m)
      Pb(m + 1, m) = std::sqrt(2.0 * m + 3.0) * ct * Pb(m, m);
    for (int m = 0; m <= lmax_; ++m)
      for (int l = m + 2; l <= lmax_; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / ((double)l * l - m * m));
        const double b =
            std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        Pb(l, m) = a * (ct * Pb(l - 1, m) - b * Pb(l - 2, m));
      }
    // sin(th) dP/dth = l ct P_{l,m} - sqrt((2l+1)(l^2-m^2)/(2l-1)) P_{l-1,m}
    for (int m = 0; m <= lmax_; ++m)
      for (int l = m; l <= lmax_; ++l) {
        double low = 0.0;
        if (l > m)
          low = std::sqrt((2.0 * l + 1.0) * ((double)l * l - m * m) / (2.0 * l - 1.0)) *
                Pb(l - 1, m);
        Pt(l, m) = (l * ct * Pb(l, m) - low) / st;
        Ptt(l, m) = -ct / st * Pt(l, m) + ((double)m * m / (st * st) - (double)l * (l + 1)) * Pb(l, m);
      }

    for (int j = 0; j < np; ++j) {
      const int n = i * np + j;
      for (int l = 0; l <= lmax_; ++l) {
        V_(n, index(l, 0)) = Pb(l, 0);
        Vt_(n, index(l, 0)) = Pt(l, 0);
        Vtt_(n, index(l, 0)) = Ptt(l, 0);
        for (int m = 1; m <= l; ++m) {
          const double c = sqrt2 * std::cos(m * phi_[j]);
          const double s = sqrt2 * std::sin(m * phi_[j]);
          V_(n, index(l, m)) = Pb(l, m) * c;
          V_(n, index(l, -m)) = Pb(l, m) * s;
          Vt_(n, index(l, m)) = Pt(l, m) * c;
          Vt_(n, index(l, -m)) = Pt(l, m) * s;
          Vtt_(n, index(l, m)) = Ptt(l, m) * c;
          Vtt_(n, index(l, -m)) = Ptt(l, m) * s;
        }
      }
    }
  }

  A_ = V_.transpose() * w_.asDiagonal();
}

Eigen::Vector3d SphereGrid::node_dir(int n) const {
  const double th = node_theta(n), ph = node_phi(n);
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

Eigen::VectorXd SphereGrid::phi_rotate(const Eigen::VectorXd& c) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(c.size());
  for (int l = 0; l <= lmax_; ++l)
    for (int m = 1; m <= l; ++m) {
      // d/dphi [cos(m phi)] = -m sin(m phi), d/dphi [sin(m phi)] = m cos(m phi)
      out[index(l, -m)] = -m * c[index(l, m)];
      out[index(l, m)] = m * c[index(l, -m)];
    }
  return out;
}

std::shared_ptr<const SphereGrid> SphereGrid::get(int lmax) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const SphereGrid>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(lmax);
  if (it != cache.end()) return it->second;
  auto g = std::make_shared<const SphereGrid>(lmax);
  cache[lmax] = g;
  return g;
}

}  // namespace wlab
