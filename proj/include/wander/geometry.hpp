#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Geometry>

// Right-handed, z-up, meters. Angles are degrees at API boundaries and
// radians internally.
namespace wander {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3 = Vector3<double>;
using Aabb = Eigen::AlignedBox<double, 3>;

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * (std::numbers::pi_v<Scalar> / Scalar(180));
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
  return rad * (Scalar(180) / std::numbers::pi_v<Scalar>);
}

/// A direction with Euclidean norm 1 (within 1e-9). Construction normalizes.
template <typename Scalar>
class UnitVector3 {
 public:
  UnitVector3() : v_(Scalar(1), Scalar(0), Scalar(0)) {}

  explicit UnitVector3(const Vector3<Scalar>& v) : v_(v) {
    const Scalar n = v.norm();
    if (!(n > Scalar(0)) || !std::isfinite(n)) {
      throw std::invalid_argument("UnitVector3: zero or non-finite vector");
    }
    v_ /= n;
  }

  UnitVector3(Scalar x, Scalar y, Scalar z) : UnitVector3(Vector3<Scalar>(x, y, z)) {}

  const Vector3<Scalar>& vec() const { return v_; }
  Scalar x() const { return v_.x(); }
  Scalar y() const { return v_.y(); }
  Scalar z() const { return v_.z(); }

  UnitVector3 operator-() const { return UnitVector3(-v_, Normalized{}); }

  bool operator==(const UnitVector3& o) const { return v_ == o.v_; }

 private:
  struct Normalized {};
  UnitVector3(const Vector3<Scalar>& v, Normalized) : v_(v) {}

  Vector3<Scalar> v_;
};

using UnitVec3 = UnitVector3<double>;

struct Pose {
  Vec3 position = Vec3::Zero();
  UnitVec3 direction;

  bool operator==(const Pose& o) const {
    return position == o.position && direction == o.direction;
  }
};

/// Swept sphere around segment a-b. a == b is a sphere.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;
};

inline Vec3 world_up() { return Vec3::UnitZ(); }

template <typename Derived>
auto lerp(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b,
          typename Derived::Scalar u) {
  return (a + u * (b - a)).eval();
}

/// Angle between two directions, stable for small and near-pi angles.
template <typename Scalar>
Scalar angle_between(const UnitVector3<Scalar>& a, const UnitVector3<Scalar>& b) {
  return std::atan2(a.vec().cross(b.vec()).norm(), a.vec().dot(b.vec()));
}

/// Spherical interpolation along the great circle from d0 to d1.
///
/// Near-identical inputs fall back to normalized lerp. When the great
/// circle is undefined (antipodal inputs) the rotation axis is d0 x up, or
/// d0 x unit-x if that degenerates.
template <typename Scalar>
UnitVector3<Scalar> slerp_dir(const UnitVector3<Scalar>& d0, const UnitVector3<Scalar>& d1,
                              Scalar u) {
  using V = Vector3<Scalar>;
  if (u == Scalar(0)) return d0;
  if (u == Scalar(1)) return d1;
  const Scalar theta = angle_between(d0, d1);
  if (theta < Scalar(1e-6)) {
    return UnitVector3<Scalar>(d0.vec() + u * (d1.vec() - d0.vec()));
  }
  V axis = d0.vec().cross(d1.vec());
  if (axis.norm() < Scalar(1e-9)) {
    axis = d0.vec().cross(V::UnitZ());
    if (axis.norm() < Scalar(1e-6)) axis = d0.vec().cross(V::UnitX());
  }
  axis.normalize();
  const Eigen::AngleAxis<Scalar> rot(u * theta, axis);
  return UnitVector3<Scalar>(rot * d0.vec());
}

template <typename Scalar>
UnitVector3<Scalar> pitch_yaw_to_dir(Scalar yaw_deg, Scalar pitch_deg) {
  const Scalar yaw = deg2rad(yaw_deg);
  const Scalar pitch = deg2rad(pitch_deg);
  return UnitVector3<Scalar>(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
                             std::sin(pitch));
}

struct YawPitch {
  double yaw_deg;    // [0, 360)
  double pitch_deg;  // [-90, 90]
};

template <typename Scalar>
YawPitch dir_to_pitch_yaw(const UnitVector3<Scalar>& d) {
  const Scalar horiz = std::hypot(d.x(), d.y());
  Scalar yaw = rad2deg(std::atan2(d.y(), d.x()));
  if (yaw < Scalar(0)) yaw += Scalar(360);
  if (yaw >= Scalar(360)) yaw -= Scalar(360);
  const Scalar pitch = rad2deg(std::atan2(d.z(), horiz));
  return {static_cast<double>(yaw), static_cast<double>(pitch)};
}

inline double pitch_deg(const UnitVec3& d) { return dir_to_pitch_yaw(d).pitch_deg; }

/// Wraps an angle in degrees into (-180, 180].
inline double wrap_deg180(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

inline double horizontal_distance(const Vec3& a, const Vec3& b) {
  return (a.head<2>() - b.head<2>()).norm();
}

// ---------------------------------------------------------------------------
// Triangle primitives

template <typename Scalar>
struct Triangle3 {
  Vector3<Scalar> a, b, c;

  Vector3<Scalar> normal() const { return (b - a).cross(c - a).normalized(); }
  Scalar area() const { return Scalar(0.5) * (b - a).cross(c - a).norm(); }
  Vector3<Scalar> centroid() const { return (a + b + c) / Scalar(3); }
};

using Triangle = Triangle3<double>;

/// Closest point on a triangle to p (Voronoi-region walk).
template <typename Scalar>
Vector3<Scalar> closest_point_on_triangle(const Vector3<Scalar>& p, const Triangle3<Scalar>& t) {
  const auto& a = t.a;
  const auto& b = t.b;
  const auto& c = t.c;
  const Vector3<Scalar> ab = b - a, ac = c - a, ap = p - a;
  const Scalar d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;

  const Vector3<Scalar> bp = p - b;
  const Scalar d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;

  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;

  const Vector3<Scalar> cp = p - c;
  const Scalar d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;

  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;

  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const Scalar denom = Scalar(1) / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Squared distance between segments p1-q1 and p2-q2.
template <typename Scalar>
Scalar segment_segment_distance2(const Vector3<Scalar>& p1, const Vector3<Scalar>& q1,
                                 const Vector3<Scalar>& p2, const Vector3<Scalar>& q2) {
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Vector3<Scalar> d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const Scalar a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  Scalar s = 0, t = 0;
  if (a <= eps && e <= eps) return r.squaredNorm();
  if (a <= eps) {
    t = std::clamp(f / e, Scalar(0), Scalar(1));
  } else {
    const Scalar c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, Scalar(0), Scalar(1));
    } else {
      const Scalar b = d1.dot(d2);
      const Scalar denom = a * e - b * b;
      s = denom > eps * a * e ? std::clamp((b * f - c * e) / denom, Scalar(0), Scalar(1)) : Scalar(0);
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, Scalar(0), Scalar(1));
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, Scalar(0), Scalar(1));
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).squaredNorm();
}

/// True if segment p-q crosses the (closed) triangle.
template <typename Scalar>
bool segment_intersects_triangle(const Vector3<Scalar>& p, const Vector3<Scalar>& q,
                                 const Triangle3<Scalar>& t) {
  const Vector3<Scalar> n = (t.b - t.a).cross(t.c - t.a);
  const Scalar dp = n.dot(p - t.a);
  const Scalar dq = n.dot(q - t.a);
  if ((dp > 0 && dq > 0) || (dp < 0 && dq < 0)) return false;
  if (dp == dq) return false;  // coplanar; edge distances cover it
  const Vector3<Scalar> x = p + (dp / (dp - dq)) * (q - p);
  const Vector3<Scalar> c0 = (t.b - t.a).cross(x - t.a);
  const Vector3<Scalar> c1 = (t.c - t.b).cross(x - t.b);
  const Vector3<Scalar> c2 = (t.a - t.c).cross(x - t.c);
  return c0.dot(n) >= 0 && c1.dot(n) >= 0 && c2.dot(n) >= 0;
}

/// Exact distance between segment p-q and a triangle.
template <typename Scalar>
Scalar segment_triangle_distance(const Vector3<Scalar>& p, const Vector3<Scalar>& q,
                                 const Triangle3<Scalar>& t) {
  if (segment_intersects_triangle(p, q, t)) return Scalar(0);
  Scalar best = (p - closest_point_on_triangle(p, t)).squaredNorm();
  best = std::min(best, (q - closest_point_on_triangle(q, t)).squaredNorm());
  best = std::min(best, segment_segment_distance2(p, q, t.a, t.b));
  best = std::min(best, segment_segment_distance2(p, q, t.b, t.c));
  best = std::min(best, segment_segment_distance2(p, q, t.c, t.a));
  return std::sqrt(best);
}

/// Two-sided Moller-Trumbore. Returns the ray parameter or a negative value
/// on miss. Barycentric bounds are inclusive so shared edges report a hit.
template <typename Scalar>
Scalar intersect_ray_triangle(const Vector3<Scalar>& origin, const Vector3<Scalar>& dir,
                              const Triangle3<Scalar>& t) {
  const Vector3<Scalar> e1 = t.b - t.a, e2 = t.c - t.a;
  const Vector3<Scalar> pvec = dir.cross(e2);
  const Scalar det = e1.dot(pvec);
  if (std::abs(det) < Scalar(1e-14)) return Scalar(-1);
  const Scalar inv = Scalar(1) / det;
  const Vector3<Scalar> tvec = origin - t.a;
  const Scalar u = tvec.dot(pvec) * inv;
  if (u < 0 || u > 1) return Scalar(-1);
  const Vector3<Scalar> qvec = tvec.cross(e1);
  const Scalar v = dir.dot(qvec) * inv;
  if (v < 0 || u + v > 1) return Scalar(-1);
  const Scalar dist = e2.dot(qvec) * inv;
  return dist >= 0 ? dist : Scalar(-1);
}

/// Ray/box slab test; returns entry parameter or +inf on miss.
inline double intersect_ray_box(const Vec3& origin, const Vec3& inv_dir, const Aabb& box,
                                double t_max) {
  double t0 = 0.0, t1 = t_max;
  for (int i = 0; i < 3; ++i) {
    double ta = (box.min()[i] - origin[i]) * inv_dir[i];
    double tb = (box.max()[i] - origin[i]) * inv_dir[i];
    if (std::isnan(ta) || std::isnan(tb)) {
      // origin on slab plane with zero direction component
      if (origin[i] < box.min()[i] || origin[i] > box.max()[i]) return std::numeric_limits<double>::infinity();
      continue;
    }
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

inline double box_point_distance2(const Aabb& box, const Vec3& p) {
  return box.squaredExteriorDistance(p);
}

}  // namespace wander
