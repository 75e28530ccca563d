#include "wander/collision.hpp"

#include <stdexcept>
#include <vector>

#include "wander/errors.hpp"

namespace wander {

bool seg_clear(const SpatialIndex& index, const Vec3& a, const Vec3& b, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("seg_clear: radius must be positive");
  return !index.capsule_overlaps(a, b, radius);
}

PathCheck capsule_check_path(const SpatialIndex& index, std::span<const Vec3> polyline, double radius) {
  if (polyline.size() < 2) throw std::invalid_argument("capsule_check_path: need at least 2 points");
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    if (!seg_clear(index, polyline[i], polyline[i + 1], radius)) return {false, i};
  }
  return {};
}

namespace {

constexpr double kOnSurface = 1e-9;

// Escape direction for a point lying on the mesh: mean of the distinct
// normals of the touching triangles.
Vec3 surface_escape_direction(const SpatialIndex& index, const Vec3& p) {
  std::vector<Vec3> normals;
  for (int id : index.triangles_near(p, 1e-6)) {
    const Vec3& n = index.normal(id);
    bool dup = false;
    for (const auto& m : normals) dup = dup || (m - n).norm() < 1e-6;
    if (!dup) normals.push_back(n);
  }
  Vec3 sum = Vec3::Zero();
  for (const auto& n : normals) sum += n;
  return sum;
}

}  // namespace

NudgeResult nudge_away(const SpatialIndex& index, const Vec3& p, double min_clearance, int max_iter) {
  if (!(min_clearance > 0)) throw std::invalid_argument("nudge_away: min_clearance must be positive");
  NudgeResult result;
  result.point = p;
  for (int iter = 0;; ++iter) {
    const NearestPoint near = index.nearest(result.point);
    result.clearance = near.distance;
    const double deficit = min_clearance - near.distance;
    if (deficit <= 0) {
      result.residual = 0.0;
      return result;
    }
    if (iter >= max_iter) {
      result.residual = deficit;
      return result;
    }
    Vec3 dir = result.point - near.point;
    if (dir.norm() < kOnSurface) dir = surface_escape_direction(index, result.point);
    if (dir.norm() < 1e-9) throw StuckInGeometry("no escape direction from surface point");
    dir.normalize();
    result.point += (deficit + 1e-7) * dir;
    result.iterations = iter + 1;
  }
}

}  // namespace wander
