#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "wander/geometry.hpp"

namespace wander {

struct SceneMesh;

struct RayHit {
  double t = 0.0;
  int triangle = -1;
  int label = 0;
  Vec3 point = Vec3::Zero();
};

struct NearestPoint {
  double distance = std::numeric_limits<double>::infinity();
  int triangle = -1;
  Vec3 point = Vec3::Zero();
};

/// Hits closer than this are treated as the same distance; the lower
/// triangle id wins.
inline constexpr double kRayTieEpsilon = 1e-9;

inline bool ray_hit_before(double t_a, int id_a, double t_b, int id_b) {
  if (t_a < t_b - kRayTieEpsilon) return true;
  if (t_b < t_a - kRayTieEpsilon) return false;
  return id_a < id_b;
}

/// Bounding-volume hierarchy over a triangle soup. Immutable after
/// construction; holds its own copy of the geometry.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(const SceneMesh& mesh);

  int triangle_count() const { return static_cast<int>(tris_.size()); }
  const Triangle& triangle(int id) const { return tris_[static_cast<std::size_t>(id)]; }
  int label(int id) const { return labels_[static_cast<std::size_t>(id)]; }
  /// Unit geometric normal of a triangle (out of the solid by winding).
  const Vec3& normal(int id) const { return normals_[static_cast<std::size_t>(id)]; }
  Aabb bounds() const;

  /// Nearest hit along a unit direction, ties by lowest triangle id.
  std::optional<RayHit> raycast(const Vec3& origin, const Vec3& dir,
                                double t_max = std::numeric_limits<double>::infinity()) const;

  /// Every triangle the ray hits, sorted by (t, id).
  std::vector<RayHit> ray_hits(const Vec3& origin, const Vec3& dir) const;

  /// True if any triangle lies strictly closer than `radius` to segment a-b.
  bool capsule_overlaps(const Vec3& a, const Vec3& b, double radius) const;

  /// Sorted ids of all triangles strictly closer than `radius` to a-b.
  std::vector<int> capsule_hits(const Vec3& a, const Vec3& b, double radius) const;

  /// Minimum distance from segment a-b to the mesh (+inf if empty).
  double segment_distance(const Vec3& a, const Vec3& b) const;

  NearestPoint nearest(const Vec3& p) const;

  /// Triangles whose distance to p is at most `radius`.
  std::vector<int> triangles_near(const Vec3& p, double radius) const;

 private:
  struct Node {
    Aabb box;
    int left = -1;  // internal: child indices; leaf: left = -1
    int right = -1;
    int first = 0;  // leaf: range into order_
    int count = 0;
  };

  int build(int first, int count, std::vector<Vec3>& centroids);
  template <typename Visit, typename Prune>
  void traverse(Prune&& prune, Visit&& visit) const;

  std::vector<Triangle> tris_;
  std::vector<int> labels_;
  std::vector<Vec3> normals_;
  std::vector<Aabb> tri_boxes_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

inline SpatialIndex build_index(const SceneMesh& mesh) { return SpatialIndex(mesh); }

}  // namespace wander
