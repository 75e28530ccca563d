#include "wander/spatial_index.hpp"

#include <algorithm>
#include <numeric>

#include "wander/scene.hpp"

namespace wander {

namespace {

constexpr int kLeafSize = 4;

Aabb triangle_box(const Triangle& t) {
  Aabb box(t.a);
  box.extend(t.b);
  box.extend(t.c);
  return box;
}

}  // namespace

SpatialIndex::SpatialIndex(const SceneMesh& mesh) {
  const int n = mesh.triangle_count();
  tris_.reserve(static_cast<std::size_t>(n));
  std::vector<Vec3> centroids;
  centroids.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    tris_.push_back(mesh.triangle(i));
    labels_.push_back(mesh.face_labels[static_cast<std::size_t>(i)]);
    normals_.push_back(tris_.back().normal());
    tri_boxes_.push_back(triangle_box(tris_.back()));
    centroids.push_back(tris_.back().centroid());
  }
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), 0);
  if (n > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * n));
    build(0, n, centroids);
  }
}

int SpatialIndex::build(int first, int count, std::vector<Vec3>& centroids) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroid_box;
  for (int i = first; i < first + count; ++i) {
    const int tri = order_[static_cast<std::size_t>(i)];
    box.extend(tri_boxes_[static_cast<std::size_t>(tri)]);
    centroid_box.extend(centroids[static_cast<std::size_t>(tri)]);
  }
  // Padding keeps zero-thickness boxes (flat triangles) robust in slab tests.
  box.min().array() -= 1e-9;
  box.max().array() += 1e-9;
  nodes_[static_cast<std::size_t>(node_id)].box = box;

  if (count <= kLeafSize) {
    auto& node = nodes_[static_cast<std::size_t>(node_id)];
    node.first = first;
    node.count = count;
    return node_id;
  }

  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  auto begin = order_.begin() + first;
  std::nth_element(begin, order_.begin() + mid, begin + count, [&](int a, int b) {
    const double ca = centroids[static_cast<std::size_t>(a)][axis];
    const double cb = centroids[static_cast<std::size_t>(b)][axis];
    return ca < cb || (ca == cb && a < b);
  });

  const int left = build(first, mid - first, centroids);
  const int right = build(mid, first + count - mid, centroids);
  auto& node = nodes_[static_cast<std::size_t>(node_id)];
  node.left = left;
  node.right = right;
  return node_id;
}

template <typename Visit, typename Prune>
void SpatialIndex::traverse(Prune&& prune, Visit&& visit) const {
  if (nodes_.empty()) return;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (prune(node.box)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) visit(order_[static_cast<std::size_t>(i)]);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

Aabb SpatialIndex::bounds() const { return nodes_.empty() ? Aabb() : nodes_.front().box; }

std::optional<RayHit> SpatialIndex::raycast(const Vec3& origin, const Vec3& dir,
                                            double t_max) const {
  const Vec3 inv = dir.cwiseInverse();
  double best_t = t_max;
  int best_id = -1;
  traverse(
      [&](const Aabb& box) {
        return intersect_ray_box(origin, inv, box, best_t + kRayTieEpsilon) ==
               std::numeric_limits<double>::infinity();
      },
      [&](int id) {
        const double t = intersect_ray_triangle(origin, dir, tris_[static_cast<std::size_t>(id)]);
        if (t < 0 || t > t_max) return;
        if (best_id < 0 || ray_hit_before(t, id, best_t, best_id)) {
          best_t = t;
          best_id = id;
        }
      });
  if (best_id < 0) return std::nullopt;
  return RayHit{best_t, best_id, labels_[static_cast<std::size_t>(best_id)], origin + best_t * dir};
}

std::vector<RayHit> SpatialIndex::ray_hits(const Vec3& origin, const Vec3& dir) const {
  const Vec3 inv = dir.cwiseInverse();
  std::vector<RayHit> hits;
  traverse(
      [&](const Aabb& box) {
        return intersect_ray_box(origin, inv, box, std::numeric_limits<double>::infinity()) ==
               std::numeric_limits<double>::infinity();
      },
      [&](int id) {
        const double t = intersect_ray_triangle(origin, dir, tris_[static_cast<std::size_t>(id)]);
        if (t >= 0) hits.push_back({t, id, labels_[static_cast<std::size_t>(id)], origin + t * dir});
      });
  std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
    return a.t < b.t || (a.t == b.t && a.triangle < b.triangle);
  });
  return hits;
}

namespace {

// Lower bound on distance from segment a-b to a box: distance from the
// segment's own box, cheap and conservative.
double segment_box_lower_bound(const Aabb& seg_box, const Aabb& box) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double gap = std::max({0.0, box.min()[i] - seg_box.max()[i], seg_box.min()[i] - box.max()[i]});
    d2 += gap * gap;
  }
  return std::sqrt(d2);
}

}  // namespace

bool SpatialIndex::capsule_overlaps(const Vec3& a, const Vec3& b, double radius) const {
  Aabb seg_box(a);
  seg_box.extend(b);
  bool hit = false;
  traverse([&](const Aabb& box) { return hit || segment_box_lower_bound(seg_box, box) >= radius; },
           [&](int id) {
             if (!hit && segment_triangle_distance(a, b, tris_[static_cast<std::size_t>(id)]) < radius) hit = true;
           });
  return hit;
}

std::vector<int> SpatialIndex::capsule_hits(const Vec3& a, const Vec3& b, double radius) const {
  Aabb seg_box(a);
  seg_box.extend(b);
  std::vector<int> out;
  traverse([&](const Aabb& box) { return segment_box_lower_bound(seg_box, box) >= radius; },
           [&](int id) {
             if (segment_triangle_distance(a, b, tris_[static_cast<std::size_t>(id)]) < radius) out.push_back(id);
           });
  std::sort(out.begin(), out.end());
  return out;
}

double SpatialIndex::segment_distance(const Vec3& a, const Vec3& b) const {
  Aabb seg_box(a);
  seg_box.extend(b);
  double best = std::numeric_limits<double>::infinity();
  traverse([&](const Aabb& box) { return segment_box_lower_bound(seg_box, box) >= best; },
           [&](int id) {
             best = std::min(best, segment_triangle_distance(a, b, tris_[static_cast<std::size_t>(id)]));
           });
  return best;
}

NearestPoint SpatialIndex::nearest(const Vec3& p) const {
  NearestPoint best;
  traverse([&](const Aabb& box) { return std::sqrt(box.squaredExteriorDistance(p)) > best.distance; },
           [&](int id) {
             const Vec3 q = closest_point_on_triangle(p, tris_[static_cast<std::size_t>(id)]);
             const double d = (p - q).norm();
             if (d < best.distance || (d == best.distance && id < best.triangle)) best = {d, id, q};
           });
  return best;
}

std::vector<int> SpatialIndex::triangles_near(const Vec3& p, double radius) const {
  std::vector<int> out;
  traverse([&](const Aabb& box) { return std::sqrt(box.squaredExteriorDistance(p)) > radius; },
           [&](int id) {
             const Vec3 q = closest_point_on_triangle(p, tris_[static_cast<std::size_t>(id)]);
             if ((p - q).norm() <= radius) out.push_back(id);
           });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace wander
