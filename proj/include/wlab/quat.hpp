#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace wlab {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

// Unit quaternions model S^3; components ordered (w, x, y, z).
Vec4 qmul(const Vec4& a, const Vec4& b);
Vec4 qconj(const Vec4& a);

// exp of the imaginary quaternion v1*i + v2*j + v3*k.
Vec4 qexp_im(const Vec3& v);

// A point of S^3, renormalized on construction.
class S3Point {
 public:
  S3Point() : q_(1, 0, 0, 0) {}
  explicit S3Point(const Vec4& q);
  S3Point(double w, double x, double y, double z) : S3Point(Vec4(w, x, y, z)) {}

  const Vec4& q() const { return q_; }
  double operator[](int i) const { return q_[i]; }

  // Left-invariant frame E_i(q) = q * e_i as vectors of R^4 (e_1=i, e_2=j, e_3=k).
  Vec4 frame(int i) const;

  S3Point left_translate(const Vec4& a) const { return S3Point(qmul(a, q_)); }
  S3Point antipode() const { return S3Point(-q_); }

 private:
  Vec4 q_;
};

// Flow of the left-invariant field E_i: q -> q * exp(t e_i).
S3Point frame_flow(const S3Point& p, int i, double t);

// q * exp(v . e) for a frame tangent vector v.
S3Point frame_exp(const S3Point& p, const Vec3& v);

// Vertices of the 24-cell: the 8 unit-axis quaternions and the 16
// half-integer ones. Used as a deterministic direction/position design.
const std::vector<S3Point>& cell24();

// Deterministic quasi-random unit quaternions (fixed internal seed).
std::vector<S3Point> seeded_points(int count, unsigned seed);

}  // namespace wlab
