#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wander/collision.hpp"
#include "wander/geometry.hpp"
#include "wander/planner.hpp"
#include "wander/scene.hpp"

namespace wander {

struct NavParams {
  double cell_m = 0.25;
  double robot_radius = kRobotCapsuleRadius;
  double eye_height = 0.88;
  double body_margin = 0.10;     // extra clearance for lattice cells
  double max_step_height = 0.05;  // largest |dz| between neighbor cells
  double view_radius = 1.0;
  double near_m = 0.25;
  double max_path_m = 5.0;
  int max_steps = 200;
  int start_retries = 8;
  double move_m = 0.25;
  double turn_deg = 10.0;
  double heading_tolerance_deg = 5.0;
};

/// 8-connected lattice of robot-navigable cells. Node positions are at eye
/// height above the supporting floor.
struct NavGraph {
  NavParams params;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  std::vector<Vec3> nodes;
  std::vector<Eigen::Vector2i> cells;
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  std::map<std::pair<int, int>, std::vector<int>> by_cell;

  int size() const { return static_cast<int>(nodes.size()); }
  /// Node closest to p (3D), -1 for an empty graph.
  int nearest(const Vec3& p) const;
};

/// Vertical body capsule at a floor point is clear of the mesh.
bool body_clear(const SpatialIndex& index, const Vec3& eye, double radius, double eye_height);
/// Horizontal body sweep between two eye points is clear at every probe height.
bool body_sweep_clear(const SpatialIndex& index, const Vec3& a, const Vec3& b, double radius,
                      double eye_height);

/// Keeps the largest connected component only.
NavGraph build_nav_graph(const SceneMesh& mesh, const SpatialIndex& index, const NavParams& params = {});

/// Graph nodes within view_radius of the instance box that see the instance
/// center. Throws NoViewpoint.
std::vector<int> sample_goal_points(const SceneMesh& mesh, const SpatialIndex& index,
                                    const NavGraph& graph, int instance, const NavParams& params = {});

struct GraphPath {
  std::vector<int> nodes;
  double cost = 0.0;
  std::vector<Vec3> waypoints;  // corner cells of `nodes`, endpoints included
};

/// Dijkstra from start, stopping at the first goal settled. Throws NoPath.
GraphPath multi_goal_shortest_path(const NavGraph& graph, int start, const std::vector<int>& goals);

/// Graph distance from every node to its nearest goal.
std::vector<double> distance_to_goals(const NavGraph& graph, const std::vector<int>& goals);

enum class ActionKind { MOVE_FORWARD, TURN_LEFT, TURN_RIGHT };

std::string to_string(ActionKind a);

struct AgentState {
  Vec3 position = Vec3::Zero();
  double heading_deg = 0.0;  // [0, 360), counter-clockwise from +x
  int step_count = 0;
};

/// Heading minus bearing to `target`, wrapped to (-180, 180]. Positive means
/// the target is to the right.
double heading_error_deg(const AgentState& state, const Vec3& target);

AgentState apply_action(const AgentState& state, ActionKind action, const NavParams& params = {});

ActionKind next_greedy_step(const AgentState& state, const Vec3& waypoint, const NavParams& params = {});

std::vector<ActionKind> orient_to_target(const AgentState& state, const Vec3& target_center,
                                         const NavParams& params = {});

struct Episode {
  int goal_instance = 0;
  std::vector<ActionKind> actions;
  std::vector<Pose> poses;  // initial pose plus one per action
  std::vector<double> headings;
  std::vector<Vec3> goal_points;
  std::vector<Vec3> waypoints;
  double planned_cost = 0.0;
  double traversed_m = 0.0;
  bool success = false;
  std::string failure_reason;  // step-cap or blocked when !success
  std::uint64_t seed = 0;
};

Pose agent_pose(const AgentState& state);

/// Start sampling, shortest path, greedy following and final orientation.
/// Throws EpisodeFailed (no-viewpoint, no-start, no-path, length-cap).
Episode run_episode(const SceneMesh& mesh, const SpatialIndex& index, const NavGraph& graph, int instance,
                    const NavParams& params, std::uint64_t seed);

/// F poses evenly spaced in action count (each action is one 0.25 m step
/// equivalent, so turn-only stretches keep frames); directions slerped.
Trajectory episode_to_trajectory(const Episode& episode, int frames = 21);

}  // namespace wander
