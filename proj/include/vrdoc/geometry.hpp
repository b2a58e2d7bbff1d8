#ifndef VRDOC_GEOMETRY_HPP_
#define VRDOC_GEOMETRY_HPP_

// Minimal 3D math for the gaze engine: vectors, unit quaternions, poses,
// rays and ray/panel intersection.
//
// Panel local frame: +X right, +Y up, +Z is the panel normal (faces the
// reader). uv has its origin at the top-left corner, v grows downward so
// that line indices are monotone in v.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cmath>
#include <numbers>
#include <optional>
#include <ranges>
#include <utility>

namespace vrdoc {

namespace tol {
/// Geometric tolerance (metres).
inline constexpr double kLength = 1e-6;
/// Tolerance for unit-norm checks and the parallel-ray cut-off.
inline constexpr double kUnit = 1e-9;
}  // namespace tol

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr Vec3 kWorldUp{0.0, 1.0, 0.0};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Returns v / |v|; the zero vector is returned unchanged.
inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : v;
}

inline bool is_unit(const Vec3& v, double eps = tol::kUnit) { return std::abs(norm(v) - 1.0) <= eps; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Angle between two unit directions in degrees, in [0, 180].
///
/// Evaluated with atan2(|a x b|, a.b), which equals arccos of the clamped dot
/// product but keeps full precision for nearly parallel inputs.
inline double angular_distance(const Vec3& a, const Vec3& b) {
  const double s = norm(cross(a, b));
  const double c = std::clamp(dot(a, b), -1.0, 1.0);
  return rad_to_deg(std::atan2(s, c));
}

/// Unit quaternion (w, x, y, z).
struct Orientation {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Orientation identity() { return {}; }

  static Orientation from_axis_angle(const Vec3& axis, double radians) {
    const Vec3 a = vrdoc::normalized(axis);
    const double h = 0.5 * radians;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
  }

  /// Rotation whose columns are the given orthonormal basis vectors.
  static Orientation from_basis(const Vec3& bx, const Vec3& by, const Vec3& bz) {
    // Shepperd's method on the matrix [bx by bz].
    const double m00 = bx.x, m01 = by.x, m02 = bz.x;
    const double m10 = bx.y, m11 = by.y, m12 = bz.y;
    const double m20 = bx.z, m21 = by.z, m22 = bz.z;
    const double tr = m00 + m11 + m22;
    Orientation q;
    if (tr > 0.0) {
      const double s = std::sqrt(tr + 1.0) * 2.0;
      q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
    } else if (m00 > m11 && m00 > m22) {
      const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
      q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
    } else if (m11 > m22) {
      const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
      q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
    } else {
      const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
      q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
    }
    return q.normalized();
  }

  /// Orientation whose forward axis (local -Z) is `forward` and whose local +Y
  /// lies in the plane spanned by `forward` and `up`.
  static Orientation look_rotation(const Vec3& forward, const Vec3& up = kWorldUp) {
    const Vec3 bz = -vrdoc::normalized(forward);
    Vec3 bx = cross(up, bz);
    if (vrdoc::norm(bx) < tol::kUnit) {
      // forward parallel to up: pick any perpendicular right axis
      bx = cross(Vec3{0.0, 0.0, 1.0}, bz);
      if (vrdoc::norm(bx) < tol::kUnit) bx = cross(Vec3{1.0, 0.0, 0.0}, bz);
    }
    bx = vrdoc::normalized(bx);
    const Vec3 by = cross(bz, bx);
    return from_basis(bx, by, bz);
  }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Orientation normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Orientation conjugate() const { return {w, -x, -y, -z}; }

  friend Orientation operator*(const Orientation& a, const Orientation& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // v' = v + 2w (q x v) + 2 q x (q x v)
    const Vec3 q{x, y, z};
    const Vec3 t = 2.0 * cross(q, v);
    return v + w * t + cross(q, t);
  }

  Vec3 right() const { return rotate({1.0, 0.0, 0.0}); }
  Vec3 up() const { return rotate({0.0, 1.0, 0.0}); }
  /// Local +Z; for a panel this is the normal facing the reader.
  Vec3 back() const { return rotate({0.0, 0.0, 1.0}); }
  Vec3 forward() const { return rotate({0.0, 0.0, -1.0}); }

  friend bool operator==(const Orientation&, const Orientation&) = default;
};

struct Pose {
  Vec3 position;
  Orientation orientation;

  Vec3 transform_point(const Vec3& p) const { return position + orientation.rotate(p); }
  Vec3 transform_dir(const Vec3& d) const { return orientation.rotate(d); }

  Pose inverse() const {
    const Orientation inv = orientation.conjugate();
    return {inv.rotate(-position), inv};
  }

  /// this * other: applies `other` first, then this.
  Pose compose(const Pose& other) const {
    return {transform_point(other.position), (orientation * other.orientation).normalized()};
  }

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  ///< unit length

  static Ray through(const Vec3& origin, const Vec3& target) { return {origin, normalized(target - origin)}; }

  Vec3 at(double t) const { return origin + direction * t; }
  friend bool operator==(const Ray&, const Ray&) = default;
};

struct PanelExtent {
  double width = 0.6;
  double height = 0.4;

  bool valid() const { return width > 0.0 && height > 0.0; }
};

struct Uv {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Uv&, const Uv&) = default;
};

struct Hit {
  Vec3 point;
  Uv uv;
  double distance = 0.0;
};

/// World-space point of a panel-space uv coordinate.
inline Vec3 panel_point(const Pose& panel_pose, const PanelExtent& extent, Uv uv) {
  const Vec3 local{(uv.u - 0.5) * extent.width, (0.5 - uv.v) * extent.height, 0.0};
  return panel_pose.transform_point(local);
}

/// Intersection of `ray` with the finite rectangle centred at `panel_pose`.
/// Returns nothing for misses, rays parallel to the plane and hits at or
/// behind the ray origin.
inline std::optional<Hit> ray_panel_intersect(const Ray& ray, const Pose& panel_pose, const PanelExtent& extent) {
  const Vec3 n = panel_pose.orientation.back();
  const double denom = dot(n, ray.direction);
  if (std::abs(denom) < tol::kUnit) return std::nullopt;
  const double t = dot(n, panel_pose.position - ray.origin) / denom;
  if (!(t > 0.0)) return std::nullopt;
  const Vec3 p = ray.at(t);
  const Vec3 rel = p - panel_pose.position;
  const double lx = dot(rel, panel_pose.orientation.right());
  const double ly = dot(rel, panel_pose.orientation.up());
  const double u = 0.5 + lx / extent.width;
  const double v = 0.5 - ly / extent.height;
  if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) return std::nullopt;
  return Hit{p, {u, v}, t};
}

/// Horizontal (XZ-plane) component of a vector.
constexpr Vec3 horizontal(const Vec3& v) { return {v.x, 0.0, v.z}; }

/// Anything placed in the scene as a rectangle with a stacking rank.
template <class P>
concept RankedPanel = requires(const P& p) {
  { p.pose } -> std::convertible_to<Pose>;
  { p.extent } -> std::convertible_to<PanelExtent>;
  { p.z_rank } -> std::convertible_to<long long>;
};

struct RankedHit {
  std::size_t index = 0;  ///< position of the panel in the input range
  Hit hit;
};

/// Among all panels intersected by `ray`, the one with the highest z_rank.
/// Ranks are expected to be distinct.
template <std::ranges::forward_range R>
  requires RankedPanel<std::ranges::range_value_t<R>>
std::optional<RankedHit> topmost_hit(const Ray& ray, const R& panels) {
  std::optional<RankedHit> best;
  long long best_rank = 0;
  std::size_t i = 0;
  for (const auto& p : panels) {
    if (auto h = ray_panel_intersect(ray, p.pose, p.extent)) {
      if (!best || p.z_rank > best_rank) {
        best = RankedHit{i, *h};
        best_rank = p.z_rank;
      }
    }
    ++i;
  }
  return best;
}

}  // namespace vrdoc

#endif  // VRDOC_GEOMETRY_HPP_
