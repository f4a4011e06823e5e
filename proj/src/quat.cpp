#include "wlab/quat.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace wlab {

Vec4 qmul(const Vec4& a, const Vec4& b) {
  return Vec4(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
              a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
              a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
              a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

Vec4 qconj(const Vec4& a) { return Vec4(a[0], -a[1], -a[2], -a[3]); }

Vec4 qexp_im(const Vec3& v) {
  const double n = v.norm();
  if (n < 1e-300) return Vec4(1, 0, 0, 0);
  const double s = std::sin(n) / n;
  return Vec4(std::cos(n), s * v[0], s * v[1], s * v[2]);
}

S3Point::S3Point(const Vec4& q) : q_(q) {
  const double n = q_.norm();
  if (!(n > 1e-8)) throw std::invalid_argument("S3Point: zero quaternion");
  q_ /= n;
}

Vec4 S3Point::frame(int i) const {
  Vec4 e = Vec4::Zero();
  e[i] = 1.0;
  return qmul(q_, e);
}

S3Point frame_flow(const S3Point& p, int i, double t) {
  Vec3 v = Vec3::Zero();
  v[i - 1] = t;
  return frame_exp(p, v);
}

S3Point frame_exp(const S3Point& p, const Vec3& v) {
  return S3Point(qmul(p.q(), qexp_im(v)));
}

const std::vector<S3Point>& cell24() {
  static const std::vector<S3Point> pts = [] {
    std::vector<S3Point> v;
    for (int i = 0; i < 4; ++i)
      for (int s : {1, -1}) {
        Vec4 q = Vec4::Zero();
        q[i] = s;
        v.emplace_back(q);
      }
    for (int s0 : {1, -1})
      for (int s1 : {1, -1})
        for (int s2 : {1, -1})
          for (int s3 : {1, -1})
            v.emplace_back(Vec4(0.5 * s0, 0.5 * s1, 0.5 * s2, 0.5 * s3));
    return v;
  }();
  return pts;
}

std::vector<S3Point> seeded_points(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<S3Point> v;
  v.reserve(count);
  while ((int)v.size() < count) {
    Vec4 q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    if (q.norm() < 1e-3) continue;
    v.emplace_back(q);
  }
  return v;
}

}  // namespace wlab
