#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "wander/collision.hpp"
#include "wander/errors.hpp"
#include "wander/planner.hpp"
#include "wander/random.hpp"
#include "wander/scene_builder.hpp"
#include "wander/spatial_index.hpp"

using namespace wander;

namespace {

SituationSpec spec_at(const SceneMesh& mesh, Vec3 p, Vec3 d, SituationClass cls = SituationClass::standing) {
  return {"t", cls, Pose{p, UnitVec3(d)}, mesh.instances.begin()->first, "test"};
}

double path_cost(const Roadmap& rm, const std::vector<int>& nodes) {
  double c = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    for (const auto& e : rm.edges) {
      if ((e.i == nodes[i - 1] && e.j == nodes[i]) || (e.j == nodes[i - 1] && e.i == nodes[i])) {
        c += e.cost;
        break;
      }
    }
  }
  return c;
}

// Shortest path at eye height on a 0.05 m grid, free where the brute-force
// clearance is at least r.
double grid_oracle(const SceneMesh& mesh, const Vec3& start, const Vec3& goal, double r) {
  const Aabb box = mesh.bounds();
  return oracle::grid_shortest(box.min().head<2>(), box.max().head<2>(), 0.05, start.head<2>(), goal.head<2>(),
                               [&](const Eigen::Vector2d& q) {
                                 return oracle::mesh_point_distance(mesh, Vec3(q.x(), q.y(), start.z())) >= r;
                               });
}

}  // namespace

TEST_SUITE("collision") {
  TEST_CASE("empty index is always clear") {
    const SpatialIndex empty;
    CHECK(seg_clear(empty, Vec3(0, 0, 0), Vec3(1, 1, 1), 5.0));
    CHECK(!empty.raycast(Vec3::Zero(), Vec3::UnitX()));
  }

  TEST_CASE("segment through a wall is blocked") {
    const SpatialIndex index(fixtures::sealed_wall());
    CHECK(!seg_clear(index, Vec3(2, 2, 1.6), Vec3(6, 2, 1.6), 0.01));
    CHECK_THROWS_AS(seg_clear(index, Vec3(2, 2, 1.6), Vec3(6, 2, 1.6), 0.0), std::invalid_argument);
  }

  TEST_CASE("parallel segment at radius plus or minus 1 mm") {
    const SceneMesh mesh = fixtures::empty_room();
    const SpatialIndex index(mesh);
    // Wall face at x = 0; segment parallel to it.
    const double r = 0.3;
    const Vec3 a1(r + 0.001, 2, 1.2), b1(r + 0.001, 6, 1.2);
    const Vec3 a2(r - 0.001, 2, 1.2), b2(r - 0.001, 6, 1.2);
    CHECK(seg_clear(index, a1, b1, r));
    CHECK(!seg_clear(index, a2, b2, r));
    CHECK(oracle::capsule_clear(mesh, a1, b1, r));
    CHECK(!oracle::capsule_clear(mesh, a2, b2, r));
  }

  TEST_CASE("symmetry and monotonicity in radius") {
    const SpatialIndex index(fixtures::apartment());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(0, 8), uy(0, 6), uz(0.2, 2.3);
    for (int i = 0; i < 300; ++i) {
      const Vec3 a(ux(rng), uy(rng), uz(rng)), b(ux(rng), uy(rng), uz(rng));
      for (double r : {0.05, 0.18, 0.4}) {
        const bool ab = seg_clear(index, a, b, r);
        CHECK(ab == seg_clear(index, b, a, r));
        if (!ab) CHECK(!seg_clear(index, a, b, r * 1.5));
      }
    }
  }

  TEST_CASE("capsule path check") {
    const SpatialIndex index(fixtures::sealed_wall());
    const std::vector<Vec3> free{{1, 1, 1.6}, {2, 2, 1.6}, {3, 1, 1.6}};
    CHECK(capsule_check_path(index, free, 0.18).ok);
    const std::vector<Vec3> crossing{{1, 1, 1.6}, {3, 1, 1.6}, {5, 1, 1.6}, {6, 2, 1.6}};
    const PathCheck c = capsule_check_path(index, crossing, 0.18);
    CHECK(!c.ok);
    REQUIRE(c.first_bad_segment.has_value());
    CHECK(*c.first_bad_segment == 1);
    const std::vector<Vec3> point{{1, 1, 1.6}, {1, 1, 1.6}};
    CHECK(capsule_check_path(index, point, 0.18).ok);
  }

  TEST_CASE("nudge examples") {
    const SceneMesh mesh = fixtures::empty_room();
    const SpatialIndex index(mesh);
    const Vec3 p(0.5, 4, 1.2);
    CHECK(nudge_away(index, p, 0.3).point == p);

    const NudgeResult wall = nudge_away(index, Vec3(0.05, 4, 1.2), 0.15);
    CHECK(wall.point.x() >= 0.15 - 1e-12);
    CHECK(wall.point.y() == doctest::Approx(4.0));
    CHECK(wall.point.z() == doctest::Approx(1.2));

    const NudgeResult corner = nudge_away(index, Vec3(0.0, 0.0, 1.2), 0.2);
    CHECK(oracle::mesh_point_distance(mesh, corner.point) >= 0.2 - 1e-9);
    CHECK(corner.point.x() == doctest::Approx(corner.point.y()));
  }

  TEST_CASE("raycast examples") {
    const SceneMesh mesh = fixtures::empty_room();
    const SpatialIndex index(mesh);
    const auto hit = raycast(index, Vec3(6, 4, 1.2), UnitVec3(1, 0, 0));
    REQUIRE(hit);
    CHECK(hit->t == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(index.normal(hit->triangle).x() < 0);  // front face toward the room

    // Floor quad is split along its diagonal; a ray down through the diagonal
    // touches both triangles and reports the lower id.
    const SceneMesh floor = fixtures::flat_floor();
    const SpatialIndex fi(floor);
    const auto hits = fi.ray_hits(Vec3(2, 2, 1), -Vec3::UnitZ());
    const auto down = fi.raycast(Vec3(2, 2, 1), -Vec3::UnitZ());
    REQUIRE(down);
    int lowest = 1 << 30;
    for (const auto& h : hits) {
      if (std::abs(h.t - down->t) < 1e-9) lowest = std::min(lowest, h.triangle);
    }
    CHECK(down->triangle == lowest);
  }
}

TEST_SUITE("planner") {
  TEST_CASE("lerp") {
    CHECK(lerp(Vec3(0, 0, 0), Vec3(2, 0, 0), 0.5) == Vec3(1, 0, 0));
    CHECK(lerp(Vec3(1, 2, 3), Vec3(4, 5, 6), 0.0) == Vec3(1, 2, 3));
    CHECK(lerp(Vec3(1, 2, 3), Vec3(1, 2, 3), 0.7) == Vec3(1, 2, 3));
  }

  TEST_CASE("slerp and pitch/yaw examples") {
    const UnitVec3 x(1, 0, 0), y(0, 1, 0);
    CHECK(slerp_dir(x, y, 0.5).vec().isApprox(Vec3(1, 1, 0).normalized(), 1e-12));
    CHECK(slerp_dir(x, y, 0.25).vec().isApprox(oracle::rodrigues(x.vec(), Vec3::UnitZ(), deg2rad(22.5)), 1e-12));
    CHECK(pitch_yaw_to_dir(0.0, 0.0).vec().isApprox(Vec3(1, 0, 0)));
    CHECK(pitch_yaw_to_dir(90.0, 0.0).vec().isApprox(Vec3(0, 1, 0)));
    CHECK(pitch_yaw_to_dir(0.0, 30.0).vec().isApprox(Vec3(std::cos(deg2rad(30.0)), 0, 0.5)));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int i = 0; i < 10000; ++i) {
      const UnitVec3 a(n(rng), n(rng), n(rng)), b(n(rng), n(rng), n(rng));
      const double u = std::uniform_real_distribution<double>(0, 1)(rng);
      const UnitVec3 s = slerp_dir(a, b, u);
      REQUIRE(std::abs(s.vec().norm() - 1.0) < 1e-9);
      const double theta = angle_between(a, b);
      if (theta < 3.1) REQUIRE(std::abs(angle_between(a, s) - u * theta) < 1e-6);
    }
  }

  TEST_CASE("resample") {
    const std::vector<Vec3> seg{{0, 0, 0}, {2, 0, 0}};
    const Resampled r = resample(seg, 21);
    REQUIRE(r.points.size() == 21);
    for (int i = 0; i < 21; ++i) {
      CHECK(r.points[static_cast<std::size_t>(i)].x() == doctest::Approx(0.1 * i).epsilon(1e-12));
      CHECK(r.u[static_cast<std::size_t>(i)] == doctest::Approx(0.05 * i).epsilon(1e-12));
    }
    CHECK(r.points.back() == seg.back());

    const std::vector<Vec3> ell{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
    const Resampled l = resample(ell, 5);
    CHECK(l.points[2].isApprox(Vec3(1, 0, 0), 1e-12));
    CHECK(l.points[1].isApprox(Vec3(0.5, 0, 0), 1e-12));
    CHECK(l.points[3].isApprox(Vec3(1, 0.5, 0), 1e-12));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<Vec3> poly;
    for (int i = 0; i < 9; ++i) poly.emplace_back(u(rng), u(rng), u(rng) * 0.1);
    const Resampled rr = resample(poly, 41);
    const double total = polyline_length(poly);
    CHECK(rr.total_length == doctest::Approx(total).epsilon(1e-12));
    // Arc length of each point along the input, recovered independently.
    auto arc_of = [&](const Vec3& p) {
      double best = 1e9, s = 0, at = 0;
      for (std::size_t i = 1; i < poly.size(); ++i) {
        const Vec3 d = poly[i] - poly[i - 1];
        const double t = std::clamp((p - poly[i - 1]).dot(d) / d.squaredNorm(), 0.0, 1.0);
        const double err = (poly[i - 1] + t * d - p).norm();
        if (err < best) {
          best = err;
          at = s + t * d.norm();
        }
        s += d.norm();
      }
      return at;
    };
    for (std::size_t i = 0; i < rr.points.size(); ++i) {
      CHECK(arc_of(rr.points[i]) == doctest::Approx(rr.u[i] * total).epsilon(1e-9));
    }
  }

  TEST_CASE("mono_z examples") {
    const std::vector<Vec3> rising{{0, 0, 0}, {1, 0, 0.3}, {2, 0, 0.1}, {3, 0, 0.5}};
    const auto out = mono_z(rising);
    CHECK(out[0].z() == 0.0);
    CHECK(out[1].z() == doctest::Approx(0.2));
    CHECK(out[2].z() == doctest::Approx(0.2));
    CHECK(out[3].z() == 0.5);
    const std::vector<Vec3> flat{{0, 0, 1}, {1, 0, 1}, {2, 0, 1}};
    CHECK(mono_z(flat) == flat);
    const std::vector<Vec3> mono{{0, 0, 0}, {1, 0, 0.1}, {2, 0, 0.4}};
    CHECK(mono_z(mono) == mono);
  }

  TEST_CASE("isotonic fit matches exhaustive enumeration") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + trial % 7;
      std::vector<double> y(static_cast<std::size_t>(n));
      for (auto& v : y) v = u(rng);
      const auto fit = isotonic_fit(y, -0.7, 0.8);
      const auto want = oracle::isotonic_enumerate(y, -0.7, 0.8);
      REQUIRE(fit.size() == want.size());
      for (std::size_t i = 0; i < fit.size(); ++i) CHECK(fit[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("end direction per situation class") {
    SceneBuilder b("ed");
    const int box = b.add_box("box", Vec3(2.9, -0.1, 0.5), Vec3(3.1, 0.1, 0.7));
    b.add_room(0, {box});
    const SceneMesh mesh = b.build();
    SituationSpec s{"s", SituationClass::sitting, Pose{Vec3(0, 0, 1.6), pitch_yaw_to_dir(40.0, -10.0)}, box, ""};
    CHECK(pitch_deg(end_direction(s, mesh)) == 0.0);
    CHECK(dir_to_pitch_yaw(end_direction(s, mesh)).yaw_deg == doctest::Approx(40.0));

    s.situation_class = SituationClass::interacting;
    s.target_pose.position = Vec3(2, 0, 1.6);  // center 1 m ahead, 1 m below
    CHECK(pitch_deg(end_direction(s, mesh)) == doctest::Approx(-30.0));
    CHECK(dir_to_pitch_yaw(end_direction(s, mesh)).yaw_deg == doctest::Approx(0.0));

    s.target_pose.position = Vec3(2, 0, 0.6);  // dead ahead
    const UnitVec3 d = end_direction(s, mesh);
    CHECK(d.vec().isApprox(Vec3(1, 0, 0), 1e-12));
  }

  TEST_CASE("direct plan examples") {
    const SceneMesh mesh = fixtures::empty_room();
    const auto spec = spec_at(mesh, Vec3(4, 4, 1.6), Vec3(1, 0, 0));
    const Trajectory t = plan_direct(Vec3(2, 4, 1.6), spec, UnitVec3(1, 0, 0), 21, 5);
    REQUIRE(t.frame_count() == 21);
    for (int i = 1; i < 21; ++i) {
      const auto& f = t.frames;
      CHECK((f[static_cast<std::size_t>(i)].position - f[static_cast<std::size_t>(i - 1)].position).norm() ==
            doctest::Approx(0.1).epsilon(1e-12));
    }
    const double p0 = pitch_deg(t.frames.front().direction);
    CHECK(p0 >= -30.0);
    CHECK(p0 <= 30.0);

    const Trajectory still = plan_direct(Vec3(4, 4, 1.6), spec, UnitVec3(1, 0, 0), 21, 5);
    for (const auto& f : still.frames) CHECK(f.position == Vec3(4, 4, 1.6));
    CHECK(still.frames.back().direction.vec().isApprox(Vec3(1, 0, 0)));
  }

  TEST_CASE("start pitch is uniform on [-30, 30]") {
    std::mt19937_64 rng(77);
    std::vector<double> p;
    for (int i = 0; i < 1000; ++i) p.push_back(pitch_deg(sample_start_direction(rng)));
    std::sort(p.begin(), p.end());
    CHECK(p.front() >= -30.0);
    CHECK(p.back() <= 30.0);
    double ks = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double f = (p[i] + 30.0) / 60.0;
      ks = std::max({ks, std::abs((i + 1.0) / p.size() - f), std::abs(f - static_cast<double>(i) / p.size())});
    }
    CHECK(ks < 1.628 / std::sqrt(1000.0));  // alpha = 0.01
  }
}

TEST_SUITE("prm") {
  TEST_CASE("Dijkstra cost equals Bellman-Ford on the frozen roadmap") {
    for (const char* name : {"u_wall", "two_rooms", "apartment"}) {
      CAPTURE(name);
      SceneMesh mesh;
      for (const auto& [n, make] : fixtures::all()) {
        if (n == name) mesh = make();
      }
      const SpatialIndex index(mesh);
      const StandableRegion region = compute_standable(mesh, index, {});
      const Aabb box = mesh.bounds();
      const Vec3 a(box.min().x() + 1.0, box.min().y() + 1.0, 1.6), b(box.max().x() - 1.0, box.max().y() - 1.0, 1.6);
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        PrmResult r;
        try {
          r = plan_prm(index, region, a, b, {}, seed);
        } catch (const NoPath&) {
          continue;
        }
        std::vector<oracle::Edge> edges;
        for (const auto& e : r.roadmap.edges) edges.push_back({e.i, e.j, e.cost});
        const auto dist = oracle::bellman_ford(static_cast<int>(r.roadmap.nodes.size()), edges, 0);
        CHECK(r.roadmap_path.cost == dist[1]);
        CHECK(path_cost(r.roadmap, r.roadmap_path.nodes) == doctest::Approx(r.roadmap_path.cost).epsilon(1e-12));
        // Every roadmap edge is a clear capsule by brute force.
        for (const auto& e : r.roadmap.edges) {
          REQUIRE(oracle::capsule_clear(mesh, r.roadmap.nodes[static_cast<std::size_t>(e.i)],
                                        r.roadmap.nodes[static_cast<std::size_t>(e.j)], r.roadmap.radius));
        }
      }
    }
  }

  TEST_CASE("open corridor path is nearly straight") {
    const SceneMesh mesh = fixtures::corridor();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    const Vec3 a(1, 1, 1.6), b(9, 1, 1.6);
    const PrmResult r = plan_prm(index, region, a, b, {}, 3);
    CHECK(r.length <= 1.05 * (b - a).norm());
  }

  TEST_CASE("U-shaped wall matches a dense grid oracle") {
    const SceneMesh mesh = fixtures::u_wall();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    const Vec3 a(5.3, 4.0, 1.6), b(2.5, 4.0, 1.6);
    const PrmParams params;
    const PrmResult r = plan_prm(index, region, a, b, params, 21);
    const double grid = grid_oracle(mesh, a, b, params.radius);
    CHECK(r.length > (b - a).norm());
    CHECK(std::abs(r.length - grid) <= 0.10 * grid);
  }

  TEST_CASE("sealed wall has no path") {
    const SceneMesh mesh = fixtures::sealed_wall();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    CHECK_THROWS_AS(plan_prm(index, region, Vec3(2, 2, 1.6), Vec3(6, 2, 1.6), {}, 1), NoPath);
  }

  TEST_CASE("micro-PRM repair") {
    const SceneMesh mesh = fixtures::pillar_room();
    const SpatialIndex index(mesh);
    const std::vector<Vec3> through{{1, 2, 1.6}, {5, 2, 1.6}};
    PrmParams params;
    const RepairResult r = repair_micro_prm(index, through, 0, params, 4);
    CHECK(r.ok);
    CHECK(capsule_check_path(index, r.polyline, params.radius).ok);
    CHECK(r.polyline.front() == through.front());
    CHECK(r.polyline.back() == through.back());

    const std::vector<Vec3> fine{{1, 1, 1.6}, {5, 1, 1.6}};
    const RepairResult same = repair_micro_prm(index, fine, 0, params, 4);
    CHECK(same.ok);
    CHECK(same.polyline == fine);

    // Through a full-height wall with a box too tight to leave it: no free
    // route exists inside the sampling volume.
    const SpatialIndex sealed(fixtures::sealed_wall());
    const std::vector<Vec3> across{{3.5, 2, 1.6}, {4.5, 2, 1.6}};
    params.micro_inflate = 0.05;
    CHECK(!repair_micro_prm(sealed, across, 0, params, 1).ok);
  }
}

TEST_SUITE("flythrough") {
  TEST_CASE("empty room, seed 7") {
    const SceneMesh mesh = fixtures::empty_room();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    const auto spec = spec_at(mesh, Vec3(4, 4, 1.6), Vec3(0, 1, 0));
    const Trajectory t = generate_flythrough(mesh, index, region, spec, {}, 7);
    CHECK(t.frame_count() == 21);
    const double d = horizontal_distance(t.frames.front().position, spec.target_pose.position);
    CHECK(d >= 1.5);
    CHECK(d <= 3.0);
    CHECK(t.frames.back().position.isApprox(spec.target_pose.position));
    CHECK(pitch_deg(t.frames.back().direction) == 0.0);
  }

  TEST_CASE("wall-divided rooms need a detour") {
    const SceneMesh mesh = fixtures::two_rooms();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    const auto spec = spec_at(mesh, Vec3(5.0, 3.5, 1.6), Vec3(1, 0, 0));
    int detours = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Trajectory t;
      try {
        t = generate_flythrough(mesh, index, region, spec, {}, seed);
      } catch (const GenerationFailed&) {
        continue;
      }
      CHECK(capsule_check_path(index, t.positions(), kHumanCapsuleRadius).ok);
      const Vec3 a = t.frames.front().position, b = t.frames.back().position;
      if (!seg_clear(index, a, b, kHumanCapsuleRadius)) {
        ++detours;
        CHECK(t.total_length > (b - a).norm());
      }
    }
    CHECK(detours > 0);
  }

  TEST_CASE("sealed target fails with no-path") {
    const SceneMesh mesh = fixtures::sealed_target();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    const auto spec = spec_at(mesh, Vec3(4.0, 4.4, 1.6), Vec3(0, -1, 0));
    try {
      generate_flythrough(mesh, index, region, spec, {}, 1);
      FAIL("expected GenerationFailed");
    } catch (const GenerationFailed& e) {
      CHECK(e.stage() == "no-path");
    }
  }

  TEST_CASE("generation is deterministic") {
    const SceneMesh mesh = fixtures::apartment();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    for (const auto& spec : fixtures::apartment_situations(mesh)) {
      for (std::uint64_t seed : {3u, 4u}) {
        try {
          const Trajectory a = generate_flythrough(mesh, index, region, spec, {}, seed);
          const Trajectory b = generate_flythrough(mesh, index, region, spec, {}, seed);
          CHECK(a.frames == b.frames);
          CHECK(a.u == b.u);
          CHECK(a.total_length == b.total_length);
        } catch (const GenerationFailed&) {
        }
      }
    }
  }

  TEST_CASE("navigate specs respect the length cap") {
    const SceneMesh mesh = fixtures::apartment();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    auto spec = fixtures::apartment_situations(mesh).front();
    spec.situation_class = SituationClass::navigate;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      try {
        CHECK(generate_flythrough(mesh, index, region, spec, {}, seed).total_length <= 5.0);
      } catch (const GenerationFailed& e) {
        CHECK((e.stage() == "length-cap" || e.stage() == "no-path"));
      }
    }
  }

  TEST_CASE("frame count must be 4N+1") {
    CHECK(valid_frame_count(21));
    CHECK(valid_frame_count(5));
    CHECK(!valid_frame_count(20));
    CHECK(!valid_frame_count(1));
  }
}
