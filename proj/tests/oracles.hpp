#ifndef VRDOC_TESTS_ORACLES_HPP_
#define VRDOC_TESTS_ORACLES_HPP_

// Reference implementations written independently of the library code.
// They trade speed and elegance for being obviously correct.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vrdoc/geometry.hpp"

namespace oracle {

using M3 = std::array<std::array<long double, 3>, 3>;

/// Rotation matrix of a unit quaternion (w, x, y, z), textbook form.
inline M3 rotation_matrix(long double w, long double x, long double y, long double z) {
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

inline long double det3(const M3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct PlaneHit {
  std::array<long double, 3> point;
  long double u, v, distance;
};

/// Solves origin + t*d = centre + a*ex + b*ey for (t, a, b) by Cramer's rule,
/// where ex, ey are the first two columns of the panel rotation matrix.
inline std::optional<PlaneHit> plane_intersection(const vrdoc::Ray& ray, const vrdoc::Pose& pose,
                                                  const vrdoc::PanelExtent& ext) {
  const auto& q = pose.orientation;
  const M3 r = rotation_matrix(q.w, q.x, q.y, q.z);
  const std::array<long double, 3> d{ray.direction.x, ray.direction.y, ray.direction.z};
  const std::array<long double, 3> ex{r[0][0], r[1][0], r[2][0]};
  const std::array<long double, 3> ey{r[0][1], r[1][1], r[2][1]};
  const std::array<long double, 3> ez{r[0][2], r[1][2], r[2][2]};
  const std::array<long double, 3> rhs{pose.position.x - ray.origin.x, pose.position.y - ray.origin.y,
                                       pose.position.z - ray.origin.z};
  const long double nd = ez[0] * d[0] + ez[1] * d[1] + ez[2] * d[2];
  if (std::fabs(nd) < 1e-9L) return std::nullopt;
  auto column_matrix = [](const std::array<long double, 3>& c0, const std::array<long double, 3>& c1,
                          const std::array<long double, 3>& c2) {
    M3 m;
    for (int i = 0; i < 3; ++i) m[i] = {c0[i], c1[i], c2[i]};
    return m;
  };
  const std::array<long double, 3> nex{-ex[0], -ex[1], -ex[2]};
  const std::array<long double, 3> ney{-ey[0], -ey[1], -ey[2]};
  const long double D = det3(column_matrix(d, nex, ney));
  if (std::fabs(D) < 1e-18L) return std::nullopt;
  const long double t = det3(column_matrix(rhs, nex, ney)) / D;
  const long double a = det3(column_matrix(d, rhs, ney)) / D;
  const long double b = det3(column_matrix(d, nex, rhs)) / D;
  if (!(t > 0)) return std::nullopt;
  const long double u = 0.5L + a / ext.width;
  const long double v = 0.5L - b / ext.height;
  if (u < 0 || u > 1 || v < 0 || v > 1) return std::nullopt;
  PlaneHit h;
  h.point = {ray.origin.x + t * d[0], ray.origin.y + t * d[1], ray.origin.z + t * d[2]};
  h.u = u;
  h.v = v;
  h.distance = t;
  return h;
}

/// Greedy wrap over a flat token list: append while the running length with
/// separating spaces stays within `width`.
inline std::vector<std::string> greedy_wrap(const std::vector<std::string>& tokens, std::size_t width) {
  std::vector<std::vector<std::string>> lines;
  auto length = [](const std::vector<std::string>& ws) {
    std::size_t n = 0;
    for (const auto& w : ws) n += w.size();
    return n + (ws.empty() ? 0 : ws.size() - 1);
  };
  for (const auto& t : tokens) {
    if (!lines.empty()) {
      auto trial = lines.back();
      trial.push_back(t);
      if (length(trial) <= width) {
        lines.back() = std::move(trial);
        continue;
      }
    }
    lines.push_back({t});
  }
  std::vector<std::string> out;
  for (const auto& ws : lines) {
    std::string s;
    for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? " " : "") + ws[i];
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::string> split_words(const std::vector<std::string>& sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) {
    std::istringstream in(s);
    for (std::string w; in >> w;) out.push_back(w);
  }
  return out;
}

/// Straight-line recency-weighted mean in long double.
inline std::array<long double, 3> weighted_mean(const std::vector<double>& ts, const std::vector<vrdoc::Vec3>& ds,
                                                long double lambda) {
  std::array<long double, 3> acc{0, 0, 0};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const long double w = std::pow(lambda, static_cast<long double>(ts.back()) - ts[i]);
    acc[0] += w * ds[i].x;
    acc[1] += w * ds[i].y;
    acc[2] += w * ds[i].z;
  }
  const long double n = std::sqrt(acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]);
  return {acc[0] / n, acc[1] / n, acc[2] / n};
}

}  // namespace oracle

#endif  // VRDOC_TESTS_ORACLES_HPP_
