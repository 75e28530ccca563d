#pragma once

// Brute-force reference implementations. Deliberately share no code with the
// library: no BVH, no library distance helpers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include <Eigen/Core>

#include "wander/scene.hpp"

namespace oracle {

using V3 = Eigen::Vector3d;

inline double point_segment_distance(const V3& p, const V3& a, const V3& b) {
  const V3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest approach of two segments, clamped parameters.
inline double segment_segment_distance(const V3& p1, const V3& q1, const V3& p2, const V3& q2) {
  const V3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0, t = 0;
  if (a <= 1e-300 && e <= 1e-300) return r.norm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  // Guard against rounding in the closed form with a few direct probes.
  double best = ((p1 + s * d1) - (p2 + t * d2)).norm();
  best = std::min({best, point_segment_distance(p1, p2, q2), point_segment_distance(q1, p2, q2),
                   point_segment_distance(p2, p1, q1), point_segment_distance(q2, p1, q1)});
  return best;
}

inline double point_triangle_distance(const V3& p, const V3& a, const V3& b, const V3& c) {
  const V3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  const V3 proj = p - n * (n.dot(p - a) / n2);
  // Barycentric inside test with signed sub-areas.
  const double w0 = n.dot((b - proj).cross(c - proj));
  const double w1 = n.dot((c - proj).cross(a - proj));
  const double w2 = n.dot((a - proj).cross(b - proj));
  if (w0 >= 0 && w1 >= 0 && w2 >= 0) return std::abs(n.dot(p - a)) / std::sqrt(n2);
  return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c), point_segment_distance(p, c, a)});
}

// Moller-Trumbore, returns t along (dir) for hits with t >= 0.
inline std::optional<double> ray_triangle(const V3& o, const V3& dir, const V3& a, const V3& b, const V3& c) {
  const V3 e1 = b - a, e2 = c - a;
  const V3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const V3 tv = o - a;
  const double u = tv.dot(pv) * inv;
  if (u < 0 || u > 1) return std::nullopt;
  const V3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < 0 || u + v > 1) return std::nullopt;
  const double t = e2.dot(qv) * inv;
  if (t < 0) return std::nullopt;
  return t;
}

inline double segment_triangle_distance(const V3& p, const V3& q, const V3& a, const V3& b, const V3& c) {
  const V3 d = q - p;
  const double len = d.norm();
  if (len > 0) {
    if (auto t = ray_triangle(p, d / len, a, b, c); t && *t <= len) return 0.0;
  }
  return std::min({point_triangle_distance(p, a, b, c), point_triangle_distance(q, a, b, c),
                   segment_segment_distance(p, q, a, b), segment_segment_distance(p, q, b, c),
                   segment_segment_distance(p, q, c, a)});
}

inline double mesh_segment_distance(const wander::SceneMesh& mesh, const V3& p, const V3& q) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.triangle_count(); ++i) {
    const auto t = mesh.triangle(i);
    best = std::min(best, segment_triangle_distance(p, q, t.a, t.b, t.c));
  }
  return best;
}

inline double mesh_point_distance(const wander::SceneMesh& mesh, const V3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.triangle_count(); ++i) {
    const auto t = mesh.triangle(i);
    best = std::min(best, point_triangle_distance(p, t.a, t.b, t.c));
  }
  return best;
}

/// Capsule a-b of radius r is clear when every triangle is at least r away.
inline bool capsule_clear(const wander::SceneMesh& mesh, const V3& a, const V3& b, double r) {
  return mesh_segment_distance(mesh, a, b) >= r;
}

struct Hit {
  double t;
  int triangle;
};

inline std::optional<Hit> raycast(const wander::SceneMesh& mesh, const V3& o, const V3& dir) {
  std::optional<Hit> best;
  for (int i = 0; i < mesh.triangle_count(); ++i) {
    const auto tri = mesh.triangle(i);
    if (auto t = ray_triangle(o, dir, tri.a, tri.b, tri.c)) {
      if (!best || *t < best->t - 1e-9) best = Hit{*t, i};
    }
  }
  return best;
}

struct Edge {
  int i, j;
  double w;
};

/// Single-source distances by repeated relaxation over undirected edges.
inline std::vector<double> bellman_ford(int n, const std::vector<Edge>& edges, int src) {
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  dist[static_cast<std::size_t>(src)] = 0.0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      auto& di = dist[static_cast<std::size_t>(e.i)];
      auto& dj = dist[static_cast<std::size_t>(e.j)];
      if (di + e.w < dj) {
        dj = di + e.w;
        changed = true;
      }
      if (dj + e.w < di) {
        di = dj + e.w;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

/// Shortest 2D path length on a grid of free cells with 16-connectivity
/// (king plus knight moves), each move checked along its straight segment.
/// free(x, y) tests a world point; returns +inf if unreachable.
template <typename Free>
double grid_shortest(Eigen::Vector2d lo, Eigen::Vector2d hi, double h, Eigen::Vector2d start, Eigen::Vector2d goal,
                     Free&& free) {
  const int nx = static_cast<int>(std::floor((hi.x() - lo.x()) / h)) + 1;
  const int ny = static_cast<int>(std::floor((hi.y() - lo.y()) / h)) + 1;
  auto pos = [&](int x, int y) { return Eigen::Vector2d(lo.x() + x * h, lo.y() + y * h); };
  std::vector<char> ok(static_cast<std::size_t>(nx) * ny);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) ok[static_cast<std::size_t>(y) * nx + x] = free(pos(x, y)) ? 1 : 0;
  }
  auto cell_of = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2i(static_cast<int>(std::lround((p.x() - lo.x()) / h)),
                           static_cast<int>(std::lround((p.y() - lo.y()) / h)));
  };
  const Eigen::Vector2i s = cell_of(start), g = cell_of(goal);
  const int moves[16][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
                            {2, 1}, {2, -1}, {-2, 1}, {-2, -1}, {1, 2}, {1, -2}, {-1, 2}, {-1, -2}};
  std::vector<double> dist(ok.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const int si = s.y() * nx + s.x();
  dist[static_cast<std::size_t>(si)] = 0;
  pq.push({0, si});
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(i)]) continue;
    const int x = i % nx, y = i / nx;
    if (x == g.x() && y == g.y()) break;
    for (const auto& m : moves) {
      const int xx = x + m[0], yy = y + m[1];
      if (xx < 0 || yy < 0 || xx >= nx || yy >= ny) continue;
      const int j = yy * nx + xx;
      if (!ok[static_cast<std::size_t>(j)]) continue;
      // Knight moves pass between two intermediate cells; both must be free.
      if (std::abs(m[0]) + std::abs(m[1]) == 3) {
        int ax, ay, bx, by;
        if (std::abs(m[0]) == 2) {
          ax = bx = x + m[0] / 2;
          ay = y;
          by = yy;
        } else {
          ay = by = y + m[1] / 2;
          ax = x;
          bx = xx;
        }
        if (!ok[static_cast<std::size_t>(ay) * nx + ax] || !ok[static_cast<std::size_t>(by) * nx + bx]) continue;
      } else if (m[0] != 0 && m[1] != 0) {
        if (!ok[static_cast<std::size_t>(y) * nx + xx] || !ok[static_cast<std::size_t>(yy) * nx + x]) continue;
      }
      const double nd = d + h * std::hypot(m[0], m[1]);
      if (nd < dist[static_cast<std::size_t>(j)]) {
        dist[static_cast<std::size_t>(j)] = nd;
        pq.push({nd, j});
      }
    }
  }
  return dist[static_cast<std::size_t>(g.y()) * nx + g.x()];
}

/// Rodrigues rotation of v about unit axis k by angle phi (radians).
inline V3 rodrigues(const V3& v, const V3& k, double phi) {
  Eigen::Matrix3d K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  const Eigen::Matrix3d R = Eigen::Matrix3d::Identity() + std::sin(phi) * K + (1 - std::cos(phi)) * K * K;
  return R * v;
}

/// Exhaustive least-squares nondecreasing fit for short sequences: the
/// optimum is piecewise constant on blocks equal to block means, so try
/// every partition into consecutive blocks and keep the best monotone one.
inline std::vector<double> isotonic_enumerate(const std::vector<double>& y, double lo, double hi) {
  const int n = static_cast<int>(y.size());
  std::vector<double> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<double> fit(static_cast<std::size_t>(n));
    int start = 0;
    for (int i = 0; i < n; ++i) {
      const bool cut = i == n - 1 || (mask >> i) & 1u;
      if (!cut) continue;
      double mean = 0;
      for (int k = start; k <= i; ++k) mean += y[static_cast<std::size_t>(k)];
      mean /= (i - start + 1);
      mean = std::clamp(mean, lo, hi);
      for (int k = start; k <= i; ++k) fit[static_cast<std::size_t>(k)] = mean;
      start = i + 1;
    }
    bool mono = true;
    for (int i = 1; i < n; ++i) mono = mono && fit[static_cast<std::size_t>(i)] >= fit[static_cast<std::size_t>(i - 1)];
    if (!mono) continue;
    double err = 0;
    for (int i = 0; i < n; ++i) {
      const double d = fit[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
      err += d * d;
    }
    if (err < best_err) {
      best_err = err;
      best = fit;
    }
  }
  return best;
}

/// Pearson correlation of average ranks, computed with O(n^2) rank counting.
inline double spearman_bruteforce(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto ranks = [&](const std::vector<double>& v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double less = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] < v[i]) ++less;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = less + (equal + 1) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
