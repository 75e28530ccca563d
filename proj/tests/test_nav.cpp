#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wander/errors.hpp"
#include "wander/nav_episode.hpp"
#include "wander/path_json.hpp"
#include "wander/scene_builder.hpp"
#include "wander/spatial_index.hpp"

using namespace wander;

namespace {

int instance_labeled(const SceneMesh& mesh, const std::string& label) {
  for (const auto& [id, inst] : mesh.instances) {
    if (mesh.label_name(inst.label) == label) return id;
  }
  return -1;
}

// Folds the action list over the first pose with the literal action rules.
std::vector<Pose> replay(const Episode& ep) {
  Vec3 p = ep.poses.front().position;
  double h = ep.headings.front();
  std::vector<Pose> out{{p, pitch_yaw_to_dir(h, 0.0)}};
  for (ActionKind a : ep.actions) {
    if (a == ActionKind::MOVE_FORWARD) {
      p = Vec3(p.x() + 0.25 * std::cos(deg2rad(h)), p.y() + 0.25 * std::sin(deg2rad(h)), p.z());
    } else if (a == ActionKind::TURN_LEFT) {
      h += 10.0;
      if (h >= 360.0) h -= 360.0;
    } else {
      h -= 10.0;
      if (h < 0.0) h += 360.0;
    }
    out.push_back({p, pitch_yaw_to_dir(h, 0.0)});
  }
  return out;
}

}  // namespace

TEST_SUITE("nav") {
  TEST_CASE("greedy step sign convention") {
    const NavParams p;
    AgentState s{Vec3(0, 0, 0.88), 0.0, 0};
    CHECK(next_greedy_step(s, Vec3(2, 0, 0.88)) == ActionKind::MOVE_FORWARD);
    // Target 45 degrees to the right of heading 0 is at bearing -45.
    const Vec3 right(1, -1, 0.88);
    CHECK(next_greedy_step(s, right) == ActionKind::TURN_RIGHT);
    int turns = 0;
    while (next_greedy_step(s, right) != ActionKind::MOVE_FORWARD) {
      s = apply_action(s, next_greedy_step(s, right), p);
      ++turns;
    }
    CHECK(turns <= 5);
    const AgentState at5{Vec3(0, 0, 0.88), 5.0, 0};
    CHECK(next_greedy_step(at5, Vec3(1, 0, 0.88)) == ActionKind::MOVE_FORWARD);
  }

  TEST_CASE("orient to target") {
    AgentState s{Vec3(0, 0, 0), 32.0, 0};
    const auto a = orient_to_target(s, Vec3(1, 0, 0));
    CHECK(a == std::vector<ActionKind>(3, ActionKind::TURN_RIGHT));
    for (ActionKind k : a) s = apply_action(s, k);
    CHECK(std::abs(heading_error_deg(s, Vec3(1, 0, 0))) == doctest::Approx(2.0));

    CHECK(orient_to_target(AgentState{Vec3::Zero(), 0.0, 0}, Vec3(1, 0, 0)).empty());
    const auto back = orient_to_target(AgentState{Vec3::Zero(), 180.0, 0}, Vec3(1, 0, 0));
    CHECK(back == std::vector<ActionKind>(18, ActionKind::TURN_LEFT));
  }

  TEST_CASE("action semantics") {
    const AgentState s{Vec3(1, 1, 0.88), 355.0, 4};
    const AgentState l = apply_action(s, ActionKind::TURN_LEFT);
    CHECK(l.heading_deg == 5.0);
    CHECK(l.step_count == 5);
    const AgentState r = apply_action(AgentState{Vec3::Zero(), 5.0, 0}, ActionKind::TURN_RIGHT);
    CHECK(r.heading_deg == 355.0);
    const AgentState m = apply_action(AgentState{Vec3::Zero(), 90.0, 0}, ActionKind::MOVE_FORWARD);
    CHECK(m.position.isApprox(Vec3(0, 0.25, 0)));
  }

  TEST_CASE("graph shortest path examples") {
    const SceneMesh mesh = fixtures::empty_room();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const int start = g.nearest(Vec3(2, 4, 0.88));
    const int goal = g.nearest(Vec3(3, 4, 0.88));
    const GraphPath p = multi_goal_shortest_path(g, start, {goal});
    CHECK(p.nodes.size() == 5);
    CHECK(p.cost == doctest::Approx(1.0));
    CHECK(p.waypoints.size() == 2);

    const GraphPath self = multi_goal_shortest_path(g, start, {start});
    CHECK(self.nodes.size() == 1);
    CHECK(self.cost == 0.0);
    CHECK(self.waypoints.size() == 1);
  }

  TEST_CASE("multi-goal path picks the unobstructed goal") {
    const SceneMesh mesh = fixtures::u_wall();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const int start = g.nearest(Vec3(3.0, 4.0, 0.88));
    const int near_behind_wall = g.nearest(Vec3(5.0, 4.0, 0.88));  // inside the U, 2 m away
    const int open = g.nearest(Vec3(3.0, 1.0, 0.88));              // 3 m away in the open
    const GraphPath both = multi_goal_shortest_path(g, start, {near_behind_wall, open});
    const double c1 = multi_goal_shortest_path(g, start, {near_behind_wall}).cost;
    const double c2 = multi_goal_shortest_path(g, start, {open}).cost;
    CHECK(c1 > c2);
    CHECK(both.nodes.back() == open);
    CHECK(both.cost == doctest::Approx(std::min(c1, c2)));
  }

  TEST_CASE("goal points") {
    const SceneMesh mesh = fixtures::open_room_with_chair();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const int chair = instance_labeled(mesh, "chair");
    const auto goals = sample_goal_points(mesh, index, g, chair);
    CHECK(!goals.empty());
    const Aabb box = mesh.instances.at(chair).box;
    for (int v : goals) {
      const Vec3& p = g.nodes[static_cast<std::size_t>(v)];
      CHECK(box.exteriorDistance(Vec3(p.x(), p.y(), std::clamp(p.z(), box.min().z(), box.max().z()))) <= 1.0 + 1e-9);
    }

    const SceneMesh boxed = fixtures::cabinet_enclosed();
    const SpatialIndex bi(boxed);
    const NavGraph bg = build_nav_graph(boxed, bi);
    CHECK_THROWS_AS(sample_goal_points(boxed, bi, bg, instance_labeled(boxed, "chair")), NoViewpoint);
  }

  TEST_CASE("goal points against a wall are on the open side") {
    SceneBuilder b("wallside");
    auto shell = b.add_room_shell(Eigen::Vector2d(0, 0), Eigen::Vector2d(6, 6), 2.5);
    const int shelf = b.add_box("shelf", Vec3(2.5, 0, 0), Vec3(3.5, 0.4, 1.0));
    shell.push_back(shelf);
    b.add_room(0, shell);
    const SceneMesh mesh = b.build();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const auto goals = sample_goal_points(mesh, index, g, shelf);
    CHECK(!goals.empty());
    const Vec3 c = mesh.instances.at(shelf).center;
    for (int v : goals) {
      const Vec3& p = g.nodes[static_cast<std::size_t>(v)];
      CHECK(p.y() > 0.4);
      const auto hit = oracle::raycast(mesh, p, (c - p).normalized());
      REQUIRE(hit);
      CHECK(mesh.face_labels[static_cast<std::size_t>(hit->triangle)] == mesh.instances.at(shelf).label);
    }
  }

  TEST_CASE("open room episode, seed 3") {
    const SceneMesh mesh = fixtures::open_room_with_chair();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const Episode ep = run_episode(mesh, index, g, instance_labeled(mesh, "chair"), {}, 3);
    CHECK(ep.success);
    CHECK(ep.traversed_m <= 5.0);
    CHECK(ep.poses.size() == ep.actions.size() + 1);
  }

  TEST_CASE("step cap") {
    const SceneMesh mesh = fixtures::open_room_with_chair();
    const SpatialIndex index(mesh);
    NavParams p;
    p.max_steps = 2;
    const NavGraph g = build_nav_graph(mesh, index, p);
    const int chair = instance_labeled(mesh, "chair");
    int capped = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Episode full = run_episode(mesh, index, g, chair, {}, seed);
      const Episode ep = run_episode(mesh, index, g, chair, p, seed);
      if (full.actions.size() <= 2) continue;
      ++capped;
      CHECK(!ep.success);
      CHECK(ep.failure_reason == "step-cap");
      CHECK(ep.actions.size() == 2);
    }
    CHECK(capped > 0);
  }

  TEST_CASE("replay reproduces poses bit for bit") {
    const SceneMesh mesh = fixtures::apartment();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const int target = instance_labeled(mesh, "sofa");
    int episodes = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Episode ep;
      try {
        ep = run_episode(mesh, index, g, target, {}, seed);
      } catch (const EpisodeFailed&) {
        continue;
      }
      ++episodes;
      const auto poses = replay(ep);
      REQUIRE(poses.size() == ep.poses.size());
      for (std::size_t i = 0; i < poses.size(); ++i) {
        REQUIRE(poses[i].position == ep.poses[i].position);
        REQUIRE(poses[i].direction == ep.poses[i].direction);
      }
      // Every forward move stays clear for the robot body.
      for (std::size_t i = 0; i < ep.actions.size(); ++i) {
        if (ep.actions[i] != ActionKind::MOVE_FORWARD) continue;
        CHECK(body_sweep_clear(index, ep.poses[i].position, ep.poses[i + 1].position, g.params.robot_radius,
                               g.params.eye_height));
      }
      // Greedy following stays close to the graph optimum.
      if (ep.success) CHECK(ep.traversed_m <= ep.planned_cost + std::sqrt(2.0) * 0.25 + 0.25 + 1e-9);

      // JSON round trip keeps full precision.
      const Episode back = parse_episode_json(episode_json_text(ep));
      CHECK(back.actions == ep.actions);
      for (std::size_t i = 0; i < ep.poses.size(); ++i) CHECK(back.poses[i] == ep.poses[i]);
    }
    CHECK(episodes > 10);
  }

  TEST_CASE("episode to trajectory") {
    const SceneMesh mesh = fixtures::open_room_with_chair();
    const SpatialIndex index(mesh);
    const NavGraph g = build_nav_graph(mesh, index);
    const Episode ep = run_episode(mesh, index, g, instance_labeled(mesh, "chair"), {}, 3);
    const Trajectory t = episode_to_trajectory(ep, 21);
    CHECK(t.frame_count() == 21);
    CHECK(t.frames.front() == ep.poses.front());
    CHECK(t.frames.back().position == ep.poses.back().position);
    CHECK(t.u.front() == 0.0);
    CHECK(t.u.back() == 1.0);
  }
}
