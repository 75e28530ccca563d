#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "wander/errors.hpp"
#include "wander/planner.hpp"
#include "wander/random.hpp"

namespace wander {

double edge_cost(const Vec3& a, const Vec3& b, double lambda_vertical) {
  return horizontal_distance(a, b) + lambda_vertical * std::abs(b.z() - a.z());
}

double polyline_length(std::span<const Vec3> polyline) {
  double len = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) len += (polyline[i] - polyline[i - 1]).norm();
  return len;
}

std::vector<std::vector<std::pair<int, double>>> Roadmap::adjacency() const {
  std::vector<std::vector<std::pair<int, double>>> adj(nodes.size());
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.cost);
    adj[static_cast<std::size_t>(e.j)].emplace_back(e.i, e.cost);
  }
  return adj;
}

ShortestPath shortest_path(const Roadmap& roadmap, int source, int target) {
  const auto adj = roadmap.adjacency();
  const std::size_t n = roadmap.nodes.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    if (v == target) break;
    for (const auto& [w, c] : adj[static_cast<std::size_t>(v)]) {
      const double nd = d + c;
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        prev[static_cast<std::size_t>(w)] = v;
        queue.emplace(nd, w);
      }
    }
  }
  if (!std::isfinite(dist[static_cast<std::size_t>(target)])) {
    throw NoPath("roadmap does not connect start and goal");
  }
  ShortestPath path;
  path.cost = dist[static_cast<std::size_t>(target)];
  for (int v = target; v >= 0; v = prev[static_cast<std::size_t>(v)]) path.nodes.push_back(v);
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

namespace {

// k-nearest-neighbor connection with capsule validation; ties by index.
void connect_knn(const SpatialIndex& index, Roadmap& map, int k, double lambda_vertical) {
  const int n = static_cast<int>(map.nodes.size());
  std::map<std::pair<int, int>, bool> tested;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    const Vec3& p = map.nodes[static_cast<std::size_t>(i)];
    auto d2 = [&](int j) { return (map.nodes[static_cast<std::size_t>(j)] - p).squaredNorm(); };
    const int take = std::min(n, k + 1);
    std::partial_sort(order.begin(), order.begin() + take, order.end(), [&](int a, int b) {
      const double da = d2(a), db = d2(b);
      return da < db || (da == db && a < b);
    });
    for (int r = 0; r < take; ++r) {
      const int j = order[static_cast<std::size_t>(r)];
      if (j == i) continue;
      const auto key = std::minmax(i, j);
      if (tested.count(key)) continue;
      const Vec3& q = map.nodes[static_cast<std::size_t>(j)];
      const double cost = edge_cost(p, q, lambda_vertical);
      const bool ok = cost > 0 && seg_clear(index, p, q, map.radius);
      tested[key] = ok;
      if (ok) map.edges.push_back({key.first, key.second, cost});
    }
  }
}

}  // namespace

Roadmap build_roadmap(const SpatialIndex& index, const StandableRegion& region, const Vec3& start,
                      const Vec3& goal, const PrmParams& params, std::uint64_t seed) {
  Roadmap map;
  map.radius = params.radius;
  map.nodes = {start, goal};
  map.sources = {NodeSource::global, NodeSource::global};

  Eigen::AlignedBox2d area(start.head<2>());
  area.extend(goal.head<2>());
  area.min().array() -= params.volume_margin;
  area.max().array() += params.volume_margin;
  std::vector<const StandableSample*> pool;
  for (const auto& s : region.samples) {
    if (area.contains(s.point.head<2>())) pool.push_back(&s);
  }

  std::mt19937_64 rng(mix_seed(seed, 0x50524d));
  const double half = region.params.sample_spacing_m / 2.0;
  std::uniform_real_distribution<double> jitter(-half, half);
  std::uniform_real_distribution<double> zjitter(-params.z_jitter, params.z_jitter);
  if (!pool.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const int max_attempts = params.n_nodes * 4;
    int accepted = 0;
    for (int attempt = 0; attempt < max_attempts && accepted < params.n_nodes; ++attempt) {
      const StandableSample& s = *pool[pick(rng)];
      const double jx = jitter(rng), jy = jitter(rng), jz = zjitter(rng);
      const Vec3 p = s.point + Vec3(jx, jy, params.eye_height + jz);
      if (index.nearest(p).distance < params.radius) continue;
      map.nodes.push_back(p);
      map.sources.push_back(NodeSource::global);
      ++accepted;
    }
  }
  connect_knn(index, map, params.k_neighbors, params.lambda_vertical);
  return map;
}

std::vector<Vec3> shortcut_path(const SpatialIndex& index, std::span<const Vec3> path, double radius) {
  std::vector<Vec3> out;
  if (path.empty()) return out;
  std::size_t i = 0;
  out.push_back(path[0]);
  while (i + 1 < path.size()) {
    std::size_t next = i + 1;
    for (std::size_t j = path.size() - 1; j > i + 1; --j) {
      if (seg_clear(index, path[i], path[j], radius)) {
        next = j;
        break;
      }
    }
    out.push_back(path[next]);
    i = next;
  }
  return out;
}

PrmResult plan_prm(const SpatialIndex& index, const StandableRegion& region, const Vec3& start,
                   const Vec3& goal, const PrmParams& params, std::uint64_t seed) {
  PrmResult result;
  // Detours can leave the start/goal box; grow it until it covers the whole
  // standable region before giving up.
  Eigen::AlignedBox2d extent(start.head<2>());
  extent.extend(goal.head<2>());
  for (const auto& s : region.samples) extent.extend(s.point.head<2>());
  PrmParams p = params;
  auto box_area = [&](double margin) {
    Eigen::AlignedBox2d b(start.head<2>());
    b.extend(goal.head<2>());
    b.min().array() -= margin;
    b.max().array() += margin;
    return b.volume();
  };
  for (int round = 0;; ++round) {
    result.roadmap = build_roadmap(index, region, start, goal, p,
                                   round == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(round)));
    try {
      result.roadmap_path = shortest_path(result.roadmap, 0, 1);
      break;
    } catch (const NoPath&) {
      Eigen::AlignedBox2d area(start.head<2>());
      area.extend(goal.head<2>());
      area.min().array() -= p.volume_margin;
      area.max().array() += p.volume_margin;
      if (area.contains(extent)) throw;
      p.volume_margin *= 2.0;
      // Keep the node density of the first box, within a fixed budget.
      const double ratio = box_area(p.volume_margin) / box_area(params.volume_margin);
      p.n_nodes = static_cast<int>(std::min(params.n_nodes * ratio, 4.0 * params.n_nodes));
    }
  }
  std::vector<Vec3> raw;
  for (int v : result.roadmap_path.nodes) raw.push_back(result.roadmap.nodes[static_cast<std::size_t>(v)]);
  result.polyline = shortcut_path(index, raw, params.radius);
  result.length = polyline_length(result.polyline);
  return result;
}

RepairResult repair_micro_prm(const SpatialIndex& index, std::span<const Vec3> polyline,
                              std::size_t first_bad_segment, const PrmParams& params,
                              std::uint64_t seed) {
  RepairResult result{std::vector<Vec3>(polyline.begin(), polyline.end()), false};
  if (capsule_check_path(index, polyline, params.radius).ok) {
    result.ok = true;
    return result;
  }
  if (first_bad_segment + 1 >= polyline.size()) return result;
  const Vec3& a = polyline[first_bad_segment];
  const Vec3& b = polyline[first_bad_segment + 1];
  if (index.nearest(a).distance < params.radius || index.nearest(b).distance < params.radius) {
    return result;
  }

  Roadmap micro;
  micro.radius = params.radius;
  micro.nodes = {a, b};
  micro.sources = {NodeSource::micro, NodeSource::micro};
  Aabb box(a);
  box.extend(b);
  box.min().array() -= params.micro_inflate;
  box.max().array() += params.micro_inflate;
  std::mt19937_64 rng(mix_seed(seed, 0x4d4943 + first_bad_segment));
  std::uniform_real_distribution<double> ux(box.min().x(), box.max().x());
  std::uniform_real_distribution<double> uy(box.min().y(), box.max().y());
  std::uniform_real_distribution<double> uz(box.min().z(), box.max().z());
  int accepted = 0;
  for (int attempt = 0; attempt < params.micro_nodes * 5 && accepted < params.micro_nodes; ++attempt) {
    const double x = ux(rng), y = uy(rng), z = uz(rng);
    const Vec3 p(x, y, z);
    if (index.nearest(p).distance < params.radius) continue;
    micro.nodes.push_back(p);
    micro.sources.push_back(NodeSource::micro);
    ++accepted;
  }
  connect_knn(index, micro, params.k_neighbors, params.lambda_vertical);

  ShortestPath sub;
  try {
    sub = shortest_path(micro, 0, 1);
  } catch (const NoPath&) {
    return result;
  }
  std::vector<Vec3> detour;
  for (int v : sub.nodes) detour.push_back(micro.nodes[static_cast<std::size_t>(v)]);
  detour = shortcut_path(index, detour, params.radius);

  std::vector<Vec3> repaired(polyline.begin(), polyline.begin() + static_cast<std::ptrdiff_t>(first_bad_segment));
  repaired.insert(repaired.end(), detour.begin(), detour.end());
  repaired.insert(repaired.end(), polyline.begin() + static_cast<std::ptrdiff_t>(first_bad_segment) + 2,
                  polyline.end());
  result.polyline = std::move(repaired);
  result.ok = true;
  return result;
}

RepairResult check_and_repair(const SpatialIndex& index, std::span<const Vec3> polyline,
                              const PrmParams& params, std::uint64_t seed) {
  RepairResult current{std::vector<Vec3>(polyline.begin(), polyline.end()), false};
  const std::size_t budget = polyline.size() + 2;
  for (std::size_t round = 0; round <= budget; ++round) {
    const PathCheck check = capsule_check_path(index, current.polyline, params.radius);
    if (check.ok) {
      current.ok = true;
      return current;
    }
    RepairResult next =
        repair_micro_prm(index, current.polyline, *check.first_bad_segment, params, mix_seed(seed, round));
    if (!next.ok) return {std::move(current.polyline), false};
    current = std::move(next);
  }
  current.ok = false;
  return current;
}

}  // namespace wander
