#ifndef RELIEF_GEOMETRY_HPP
#define RELIEF_GEOMETRY_HPP

// Frames and rigid transforms.
//
// Conventions used throughout:
//   - right-handed, x forward, y left, z up
//   - yaw is counterclockwise about +z, measured from +x
//   - Pose maps body-frame coordinates into the world frame

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace relief {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  Vec3 normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Vec3::normalized: zero vector");
    return {x / n, y / n, z / n};
  }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 rotation matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return Mat3{}; }

  double operator()(int r, int c) const { return m[3 * r + c]; }
  double& operator()(int r, int c) { return m[3 * r + c]; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  // Max |R*R^T - I| entry; zero for a perfect rotation.
  double orthonormality_error() const {
    const Mat3 rrt = (*this) * transposed();
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        err = std::max(err, std::abs(rrt(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
  }
};

inline Mat3 rot_z(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Mat3 r;
  r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
  return r;
}

inline Mat3 rot_y(double pitch) {
  const double c = std::cos(pitch), s = std::sin(pitch);
  Mat3 r;
  r.m = {c, 0, s, 0, 1, 0, -s, 0, c};
  return r;
}

inline Mat3 rot_x(double roll) {
  const double c = std::cos(roll), s = std::sin(roll);
  Mat3 r;
  r.m = {1, 0, 0, 0, c, -s, 0, s, c};
  return r;
}

// yaw about z, then pitch about y, then roll about x (Z-Y-X intrinsic).
inline Mat3 rot_zyx(double yaw, double pitch, double roll) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

// Rigid body->world transform. Rotation must stay orthonormal; validate()
// is called by the simulation layers that construct poses from user input.
struct Pose {
  Mat3 rotation;
  Vec3 position;

  static Pose identity() { return Pose{}; }

  void validate(double tol = 1e-9) const {
    if (rotation.orthonormality_error() > tol)
      throw std::invalid_argument("Pose: rotation not orthonormal");
    if (rotation.det() < 0.0)
      throw std::invalid_argument("Pose: rotation is a reflection");
    if (!position.finite())
      throw std::invalid_argument("Pose: non-finite position");
  }

  Vec3 apply(const Vec3& p_body) const { return rotation * p_body + position; }

  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.transposed();
    inv.position = inv.rotation * (Vec3{0, 0, 0} - position);
    return inv;
  }

  // this ∘ other: apply `other` first, then this.
  Pose compose(const Pose& other) const {
    Pose out;
    out.rotation = rotation * other.rotation;
    out.position = rotation * other.position + position;
    return out;
  }

  // Heading of the body x axis projected into the world xy plane.
  double yaw() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }
};

inline std::vector<Vec3> transform_points(const Pose& pose,
                                          const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(pose.apply(p));
  return out;
}

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace relief

#endif  // RELIEF_GEOMETRY_HPP
