#include "wander/nav_episode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <set>

#include "wander/errors.hpp"
#include "wander/random.hpp"

namespace wander {

namespace {

constexpr double kFootLift = 0.02;

using QueueItem = std::pair<double, int>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

}  // namespace

int NavGraph::nearest(const Vec3& p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = (nodes[static_cast<std::size_t>(i)] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

bool body_clear(const SpatialIndex& index, const Vec3& eye, double radius, double eye_height) {
  const double floor = eye.z() - eye_height;
  const double bottom = floor + radius + kFootLift;
  const double top = std::max(eye.z(), bottom);
  return !index.capsule_overlaps(Vec3(eye.x(), eye.y(), bottom), Vec3(eye.x(), eye.y(), top), radius);
}

bool body_sweep_clear(const SpatialIndex& index, const Vec3& a, const Vec3& b, double radius,
                      double eye_height) {
  // Probe heights above the floor: foot, middle, eye.
  const double foot = radius + kFootLift;
  const std::array<double, 3> heights{foot, 0.5 * (foot + eye_height), eye_height};
  for (double h : heights) {
    const Vec3 lift(0, 0, h - eye_height);
    if (index.capsule_overlaps(a + lift, b + lift, radius)) return false;
  }
  return true;
}

NavGraph build_nav_graph(const SceneMesh& mesh, const SpatialIndex& index, const NavParams& params) {
  StandableParams sp;
  sp.sample_spacing_m = params.cell_m;
  sp.min_clearance_m = params.eye_height + 0.12;
  const StandableRegion region = compute_standable(mesh, index, sp);

  const double body_r = params.robot_radius + params.body_margin;
  NavGraph all;
  all.params = params;
  all.origin = region.origin;
  const Vec3 lift(0, 0, params.eye_height);
  for (const auto& s : region.samples) {
    const Vec3 eye = s.point + lift;
    if (!body_clear(index, eye, body_r, params.eye_height)) continue;
    all.by_cell[{s.cell.x(), s.cell.y()}].push_back(all.size());
    all.nodes.push_back(eye);
    all.cells.push_back(s.cell);
  }
  all.adjacency.resize(all.nodes.size());
  for (int i = 0; i < all.size(); ++i) {
    const Eigen::Vector2i c = all.cells[static_cast<std::size_t>(i)];
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        auto it = all.by_cell.find({c.x() + dx, c.y() + dy});
        if (it == all.by_cell.end()) continue;
        for (int j : it->second) {
          if (j < i) continue;
          const Vec3& a = all.nodes[static_cast<std::size_t>(i)];
          const Vec3& b = all.nodes[static_cast<std::size_t>(j)];
          if (std::abs(a.z() - b.z()) > params.max_step_height) continue;
          if (!body_sweep_clear(index, a, b, body_r, params.eye_height)) continue;
          const double w = (b - a).norm();
          all.adjacency[static_cast<std::size_t>(i)].emplace_back(j, w);
          all.adjacency[static_cast<std::size_t>(j)].emplace_back(i, w);
        }
      }
    }
  }

  // Largest connected component; ties keep the one with the lowest node.
  std::vector<int> comp(all.nodes.size(), -1);
  std::vector<int> comp_size;
  for (int i = 0; i < all.size(); ++i) {
    if (comp[static_cast<std::size_t>(i)] >= 0) continue;
    const int id = static_cast<int>(comp_size.size());
    comp_size.push_back(0);
    std::vector<int> stack{i};
    comp[static_cast<std::size_t>(i)] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++comp_size.back();
      for (const auto& [w, c] : all.adjacency[static_cast<std::size_t>(v)]) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = id;
          stack.push_back(w);
        }
      }
    }
  }
  if (comp_size.empty()) throw EmptyRegion("no robot-navigable cells");
  const int keep = static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());

  NavGraph g;
  g.params = params;
  g.origin = all.origin;
  std::vector<int> remap(all.nodes.size(), -1);
  for (int i = 0; i < all.size(); ++i) {
    if (comp[static_cast<std::size_t>(i)] != keep) continue;
    remap[static_cast<std::size_t>(i)] = g.size();
    g.nodes.push_back(all.nodes[static_cast<std::size_t>(i)]);
    g.cells.push_back(all.cells[static_cast<std::size_t>(i)]);
    g.by_cell[{g.cells.back().x(), g.cells.back().y()}].push_back(g.size() - 1);
  }
  g.adjacency.resize(g.nodes.size());
  for (int i = 0; i < all.size(); ++i) {
    const int ri = remap[static_cast<std::size_t>(i)];
    if (ri < 0) continue;
    for (const auto& [w, c] : all.adjacency[static_cast<std::size_t>(i)]) {
      g.adjacency[static_cast<std::size_t>(ri)].emplace_back(remap[static_cast<std::size_t>(w)], c);
    }
  }
  return g;
}

std::vector<int> sample_goal_points(const SceneMesh& mesh, const SpatialIndex& index,
                                    const NavGraph& graph, int instance, const NavParams& params) {
  auto it = mesh.instances.find(instance);
  if (it == mesh.instances.end()) throw ValidationError("instance " + std::to_string(instance) + " not in scene");
  const Instance& inst = it->second;
  const std::set<int> own(inst.triangles.begin(), inst.triangles.end());
  const double r2 = params.view_radius * params.view_radius;

  std::vector<int> goals;
  for (int i = 0; i < graph.size(); ++i) {
    const Vec3& eye = graph.nodes[static_cast<std::size_t>(i)];
    if (box_point_distance2(inst.box, eye) > r2) continue;
    const Vec3 to_center = inst.center - eye;
    const double dist = to_center.norm();
    if (dist < 1e-9) continue;
    const auto hit = index.raycast(eye, to_center / dist, dist);
    if (hit && !own.count(hit->triangle)) continue;
    goals.push_back(i);
  }
  if (goals.empty()) throw NoViewpoint("instance " + std::to_string(instance) + " has no viewpoint");
  return goals;
}

namespace {

std::vector<Vec3> corner_waypoints(const NavGraph& graph, const std::vector<int>& path) {
  std::vector<Vec3> out;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k == 0 || k + 1 == path.size()) {
      out.push_back(graph.nodes[static_cast<std::size_t>(path[k])]);
      continue;
    }
    const Eigen::Vector2i in = graph.cells[static_cast<std::size_t>(path[k])] -
                               graph.cells[static_cast<std::size_t>(path[k - 1])];
    const Eigen::Vector2i out_step = graph.cells[static_cast<std::size_t>(path[k + 1])] -
                                     graph.cells[static_cast<std::size_t>(path[k])];
    if (in != out_step) out.push_back(graph.nodes[static_cast<std::size_t>(path[k])]);
  }
  return out;
}

}  // namespace

GraphPath multi_goal_shortest_path(const NavGraph& graph, int start, const std::vector<int>& goals) {
  if (goals.empty()) throw std::invalid_argument("multi_goal_shortest_path: no goals");
  if (start < 0 || start >= graph.size()) throw std::invalid_argument("multi_goal_shortest_path: bad start");
  const std::set<int> goal_set(goals.begin(), goals.end());
  const std::size_t n = graph.nodes.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  MinQueue queue;
  dist[static_cast<std::size_t>(start)] = 0.0;
  queue.emplace(0.0, start);
  int reached = -1;
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    if (goal_set.count(v)) {
      reached = v;
      break;
    }
    for (const auto& [w, c] : graph.adjacency[static_cast<std::size_t>(v)]) {
      const double nd = d + c;
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        prev[static_cast<std::size_t>(w)] = v;
        queue.emplace(nd, w);
      }
    }
  }
  if (reached < 0) throw NoPath("no goal reachable from start");
  GraphPath path;
  path.cost = dist[static_cast<std::size_t>(reached)];
  for (int v = reached; v >= 0; v = prev[static_cast<std::size_t>(v)]) path.nodes.push_back(v);
  std::reverse(path.nodes.begin(), path.nodes.end());
  path.waypoints = corner_waypoints(graph, path.nodes);
  return path;
}

std::vector<double> distance_to_goals(const NavGraph& graph, const std::vector<int>& goals) {
  std::vector<double> dist(graph.nodes.size(), std::numeric_limits<double>::infinity());
  MinQueue queue;
  for (int g : goals) {
    dist[static_cast<std::size_t>(g)] = 0.0;
    queue.emplace(0.0, g);
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (const auto& [w, c] : graph.adjacency[static_cast<std::size_t>(v)]) {
      const double nd = d + c;
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        queue.emplace(nd, w);
      }
    }
  }
  return dist;
}

std::string to_string(ActionKind a) {
  switch (a) {
    case ActionKind::MOVE_FORWARD: return "MOVE_FORWARD";
    case ActionKind::TURN_LEFT: return "TURN_LEFT";
    case ActionKind::TURN_RIGHT: return "TURN_RIGHT";
  }
  return "?";
}

double heading_error_deg(const AgentState& state, const Vec3& target) {
  const Eigen::Vector2d d = target.head<2>() - state.position.head<2>();
  if (d.norm() < 1e-12) return 0.0;
  const double bearing = rad2deg(std::atan2(d.y(), d.x()));
  return wrap_deg180(state.heading_deg - bearing);
}

AgentState apply_action(const AgentState& state, ActionKind action, const NavParams& params) {
  AgentState next = state;
  ++next.step_count;
  switch (action) {
    case ActionKind::MOVE_FORWARD: {
      const double h = deg2rad(state.heading_deg);
      next.position.x() += params.move_m * std::cos(h);
      next.position.y() += params.move_m * std::sin(h);
      break;
    }
    case ActionKind::TURN_LEFT:
      next.heading_deg += params.turn_deg;
      if (next.heading_deg >= 360.0) next.heading_deg -= 360.0;
      break;
    case ActionKind::TURN_RIGHT:
      next.heading_deg -= params.turn_deg;
      if (next.heading_deg < 0.0) next.heading_deg += 360.0;
      break;
  }
  return next;
}

ActionKind next_greedy_step(const AgentState& state, const Vec3& waypoint, const NavParams& params) {
  const double e = heading_error_deg(state, waypoint);
  if (std::abs(e) <= params.heading_tolerance_deg) return ActionKind::MOVE_FORWARD;
  if (e == 180.0 || e < 0) return ActionKind::TURN_LEFT;
  return ActionKind::TURN_RIGHT;
}

std::vector<ActionKind> orient_to_target(const AgentState& state, const Vec3& target_center,
                                         const NavParams& params) {
  const double e = heading_error_deg(state, target_center);
  const double excess = std::abs(e) - params.heading_tolerance_deg;
  if (excess <= 0) return {};
  const int n = static_cast<int>(std::ceil(excess / params.turn_deg));
  const ActionKind turn = (e == 180.0 || e < 0) ? ActionKind::TURN_LEFT : ActionKind::TURN_RIGHT;
  return std::vector<ActionKind>(static_cast<std::size_t>(n), turn);
}

Pose agent_pose(const AgentState& state) {
  return {state.position, pitch_yaw_to_dir(state.heading_deg, 0.0)};
}

namespace {

double initial_heading(const Vec3& from, const Vec3& to) {
  const Eigen::Vector2d d = to.head<2>() - from.head<2>();
  if (d.norm() < 1e-12) return 0.0;
  double h = rad2deg(std::atan2(d.y(), d.x()));
  if (h < 0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

// Greedy following from one start node. Returns false on a hard stop.
void follow(const SpatialIndex& index, const NavGraph& graph, const GraphPath& path, const Vec3& target,
            const NavParams& params, Episode& ep) {
  AgentState state;
  state.position = graph.nodes[static_cast<std::size_t>(path.nodes.front())];
  state.heading_deg =
      initial_heading(state.position, path.waypoints.size() > 1 ? path.waypoints[1] : target);
  ep.poses.push_back(agent_pose(state));
  ep.headings.push_back(state.heading_deg);

  auto step = [&](ActionKind a) {
    const AgentState next = apply_action(state, a, params);
    if (a == ActionKind::MOVE_FORWARD) ep.traversed_m += (next.position - state.position).norm();
    state = next;
    ep.actions.push_back(a);
    ep.poses.push_back(agent_pose(state));
    ep.headings.push_back(state.heading_deg);
  };

  for (std::size_t k = 1; k < path.waypoints.size(); ++k) {
    const Vec3& wp = path.waypoints[k];
    while (horizontal_distance(state.position, wp) > params.near_m) {
      if (state.step_count >= params.max_steps) {
        ep.failure_reason = "step-cap";
        return;
      }
      const ActionKind a = next_greedy_step(state, wp, params);
      if (a == ActionKind::MOVE_FORWARD) {
        const AgentState next = apply_action(state, a, params);
        if (!body_sweep_clear(index, state.position, next.position, params.robot_radius, params.eye_height)) {
          ep.failure_reason = "blocked";
          return;
        }
      }
      step(a);
    }
  }
  for (ActionKind a : orient_to_target(state, target, params)) {
    if (state.step_count >= params.max_steps) {
      ep.failure_reason = "step-cap";
      return;
    }
    step(a);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : ep.goal_points) best = std::min(best, horizontal_distance(state.position, g));
  ep.success = best <= params.near_m;
  if (!ep.success) ep.failure_reason = "not-near-goal";
}

}  // namespace

Episode run_episode(const SceneMesh& mesh, const SpatialIndex& index, const NavGraph& graph, int instance,
                    const NavParams& params, std::uint64_t seed) {
  std::vector<int> goals;
  try {
    goals = sample_goal_points(mesh, index, graph, instance, params);
  } catch (const NoViewpoint& e) {
    throw EpisodeFailed("no-viewpoint", e.what());
  }
  const Vec3 target = mesh.instances.at(instance).center;
  const std::vector<double> dist = distance_to_goals(graph, goals);
  std::vector<int> starts;
  for (int i = 0; i < graph.size(); ++i) {
    const double d = dist[static_cast<std::size_t>(i)];
    if (d > 0 && d <= params.max_path_m) starts.push_back(i);
  }
  if (starts.empty()) throw EpisodeFailed("no-start", "no cell within the path cap of a goal");

  std::mt19937_64 rng(mix_seed(seed, 0x4e4156));
  std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
  for (int attempt = 0; attempt < params.start_retries; ++attempt) {
    const int s = starts[pick(rng)];
    GraphPath path;
    try {
      path = multi_goal_shortest_path(graph, s, goals);
    } catch (const NoPath& e) {
      throw EpisodeFailed("no-path", e.what());
    }
    Episode ep;
    ep.goal_instance = instance;
    ep.seed = seed;
    ep.planned_cost = path.cost;
    ep.waypoints = path.waypoints;
    for (int g : goals) ep.goal_points.push_back(graph.nodes[static_cast<std::size_t>(g)]);
    follow(index, graph, path, target, params, ep);
    if (ep.traversed_m <= params.max_path_m) return ep;
  }
  throw EpisodeFailed("length-cap", "traversed distance exceeds the path cap");
}

Trajectory episode_to_trajectory(const Episode& episode, int frames) {
  if (episode.poses.empty()) throw std::invalid_argument("episode has no poses");
  if (frames < 2) throw std::invalid_argument("episode_to_trajectory: need at least 2 frames");
  Trajectory traj;
  traj.seed = episode.seed;
  traj.total_length = episode.traversed_m;
  traj.situation.id = "nav-" + std::to_string(episode.goal_instance);
  traj.situation.situation_class = SituationClass::navigate;
  traj.situation.target_pose = episode.poses.back();
  traj.situation.anchor_instance = episode.goal_instance;
  const double last = static_cast<double>(episode.poses.size() - 1);
  for (int t = 0; t < frames; ++t) {
    const double u = static_cast<double>(t) / (frames - 1);
    const double s = u * last;
    const auto k = static_cast<std::size_t>(std::floor(s));
    traj.u.push_back(u);
    if (t == frames - 1 || k + 1 >= episode.poses.size()) {
      traj.frames.push_back(episode.poses.back());
      continue;
    }
    const double f = s - static_cast<double>(k);
    const Pose& a = episode.poses[k];
    const Pose& b = episode.poses[k + 1];
    traj.frames.push_back({lerp(a.position, b.position, f), slerp_dir(a.direction, b.direction, f)});
  }
  return traj;
}

}  // namespace wander
