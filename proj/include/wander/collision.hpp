#pragma once

#include <optional>
#include <span>

#include "wander/geometry.hpp"
#include "wander/spatial_index.hpp"

namespace wander {

inline constexpr double kHumanCapsuleRadius = 0.18;
inline constexpr double kRobotCapsuleRadius = 0.20;

/// True iff the capsule a-b with `radius` touches no triangle (distance to
/// every triangle >= radius, exact segment-triangle distance).
bool seg_clear(const SpatialIndex& index, const Vec3& a, const Vec3& b, double radius);

struct PathCheck {
  bool ok = true;
  std::optional<std::size_t> first_bad_segment;
};

/// Validates consecutive segments of a polyline with >= 2 points.
PathCheck capsule_check_path(const SpatialIndex& index, std::span<const Vec3> polyline, double radius);

struct NudgeResult {
  Vec3 point = Vec3::Zero();
  double clearance = 0.0;
  double residual = 0.0;  // remaining deficit, 0 when satisfied
  int iterations = 0;
};

/// Pushes p along the distance gradient (away from the nearest surface
/// point) until its distance to the mesh is >= min_clearance. Each step
/// covers the whole remaining deficit. Throws StuckInGeometry when p lies on
/// the surface and the touching normals cancel.
NudgeResult nudge_away(const SpatialIndex& index, const Vec3& p, double min_clearance, int max_iter = 8);

inline std::optional<RayHit> raycast(const SpatialIndex& index, const Vec3& origin, const UnitVec3& dir) {
  return index.raycast(origin, dir.vec());
}

inline double distance_to_mesh(const SpatialIndex& index, const Vec3& p) {
  return index.nearest(p).distance;
}

}  // namespace wander
