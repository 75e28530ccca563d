#include <algorithm>
#include <cmath>

#include "wander/errors.hpp"
#include "wander/planner.hpp"
#include "wander/random.hpp"

namespace wander {

std::vector<Vec3> Trajectory::positions() const {
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.position);
  return out;
}

Resampled resample(std::span<const Vec3> polyline, int frames) {
  if (frames < 2) throw std::invalid_argument("resample: need at least 2 frames");
  std::vector<double> cumulative(polyline.size(), 0.0);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + (polyline[i] - polyline[i - 1]).norm();
  }
  Resampled out;
  out.total_length = polyline.empty() ? 0.0 : cumulative.back();
  if (!(out.total_length > 0)) throw std::invalid_argument("resample: polyline has zero length");

  out.points.reserve(static_cast<std::size_t>(frames));
  out.u.reserve(static_cast<std::size_t>(frames));
  std::size_t seg = 0;
  for (int t = 0; t < frames; ++t) {
    if (t == 0) {
      out.points.push_back(polyline.front());
      out.u.push_back(0.0);
      continue;
    }
    if (t == frames - 1) {
      out.points.push_back(polyline.back());
      out.u.push_back(1.0);
      continue;
    }
    const double u = static_cast<double>(t) / (frames - 1);
    const double s = u * out.total_length;
    while (seg + 2 < polyline.size() && cumulative[seg + 1] < s) ++seg;
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    const double f = seg_len > 0 ? (s - cumulative[seg]) / seg_len : 0.0;
    out.points.push_back(polyline[seg] + f * (polyline[seg + 1] - polyline[seg]));
    out.u.push_back(u);
  }
  return out;
}

std::vector<double> isotonic_fit(std::span<const double> values, double lo, double hi) {
  struct Block {
    double sum;
    double count;
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1.0});
    while (blocks.size() > 1) {
      const Block& last = blocks.back();
      const Block& prev = blocks[blocks.size() - 2];
      if (prev.sum / prev.count <= last.sum / last.count) break;
      const Block merged{prev.sum + last.sum, prev.count + last.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) {
    const double level = std::clamp(b.sum / b.count, lo, hi);
    for (int k = 0; k < static_cast<int>(b.count); ++k) out.push_back(level);
  }
  return out;
}

std::vector<Vec3> mono_z(std::span<const Vec3> points) {
  if (points.size() < 2) throw std::invalid_argument("mono_z: need at least 2 points");
  std::vector<Vec3> out(points.begin(), points.end());
  if (points.size() == 2) return out;
  const double z0 = points.front().z();
  const double z1 = points.back().z();
  const bool rising = z1 > z0;
  // Nonincreasing fits are nondecreasing fits of the negated sequence.
  const double sign = rising ? 1.0 : -1.0;
  std::vector<double> interior;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) interior.push_back(sign * points[i].z());
  const double lo = std::min(sign * z0, sign * z1);
  const double hi = std::max(sign * z0, sign * z1);
  const auto fit = isotonic_fit(interior, lo, hi);
  for (std::size_t i = 0; i < fit.size(); ++i) out[i + 1].z() = sign * fit[i];
  return out;
}

UnitVec3 end_direction(const SituationSpec& spec, const SceneMesh& mesh, double max_pitch_deg) {
  const Vec3& stored = spec.target_pose.direction.vec();
  double yaw = stored.head<2>().norm() > 1e-9 ? dir_to_pitch_yaw(spec.target_pose.direction).yaw_deg : 0.0;
  if (spec.situation_class != SituationClass::interacting) {
    return pitch_yaw_to_dir(yaw, 0.0);
  }
  const Vec3 to_anchor = mesh.instances.at(spec.anchor_instance).center - spec.target_pose.position;
  const double horiz = to_anchor.head<2>().norm();
  if (horiz > 1e-9) yaw = dir_to_pitch_yaw(UnitVec3(Vec3(to_anchor.x(), to_anchor.y(), 0.0))).yaw_deg;
  double elevation = rad2deg(std::atan2(to_anchor.z(), horiz));
  elevation = std::clamp(elevation, -max_pitch_deg, max_pitch_deg);
  return pitch_yaw_to_dir(yaw, elevation);
}

UnitVec3 sample_start_direction(std::mt19937_64& rng, double max_pitch_deg) {
  std::uniform_real_distribution<double> yaw(0.0, 360.0);
  std::uniform_real_distribution<double> pitch(-max_pitch_deg, max_pitch_deg);
  const double y = yaw(rng);
  const double p = pitch(rng);
  return pitch_yaw_to_dir(y, p);
}

Trajectory plan_direct(const Vec3& start, const SituationSpec& spec, const UnitVec3& end_dir,
                       int frames, std::uint64_t seed, double max_pitch_deg) {
  if (!valid_frame_count(frames)) throw std::invalid_argument("plan_direct: frame count must be 4N+1");
  std::mt19937_64 rng(mix_seed(seed, 0x444952));
  const UnitVec3 start_dir = sample_start_direction(rng, max_pitch_deg);
  const Vec3& goal = spec.target_pose.position;

  Trajectory traj;
  traj.situation = spec;
  traj.seed = seed;
  traj.total_length = (goal - start).norm();
  for (int t = 0; t < frames; ++t) {
    const double u = static_cast<double>(t) / (frames - 1);
    const Vec3 p = t == frames - 1 ? goal : lerp(start, goal, u);
    traj.u.push_back(u);
    traj.frames.push_back({p, slerp_dir(start_dir, end_dir, u)});
  }
  return traj;
}

namespace {

Trajectory generate_once(const SceneMesh& mesh, const SpatialIndex& index,
                         const StandableRegion& region, const SituationSpec& spec,
                         const FlythroughParams& params, std::uint64_t seed) {
  const double radius = params.capsule_radius;
  const double plan_radius = radius + params.plan_margin;
  const Vec3 lift(0, 0, params.eye_height);

  // Start candidates: standable samples whose eye point is clear.
  StandableRegion starts;
  starts.params = region.params;
  starts.origin = region.origin;
  for (const auto& s : region.samples) {
    if (index.nearest(s.point + lift).distance >= plan_radius) starts.samples.push_back(s);
  }
  Vec3 start;
  try {
    start = sample_start(starts, spec.target_pose.position, params.start_min_m, params.start_max_m,
                         mix_seed(seed, 0x535441));
  } catch (const NoCandidate& e) {
    throw GenerationFailed("no-start", e.what());
  }
  start += lift;

  SituationSpec effective = spec;
  const NudgeResult goal = nudge_away(index, spec.target_pose.position, plan_radius, params.nudge_max_iter);
  if (goal.residual > 0) throw GenerationFailed("no-path", "target pose is inside geometry");
  effective.target_pose.position = goal.point;
  const UnitVec3 end_dir = end_direction(effective, mesh, params.max_pitch_deg);

  if (seg_clear(index, start, goal.point, radius)) {
    Trajectory traj = plan_direct(start, effective, end_dir, params.frames, seed, params.max_pitch_deg);
    traj.situation = spec;
    return traj;
  }

  PrmParams prm = params.prm;
  prm.radius = plan_radius;
  prm.eye_height = params.eye_height;
  PrmResult planned;
  try {
    planned = plan_prm(index, region, start, goal.point, prm, mix_seed(seed, 0x505250));
  } catch (const NoPath& e) {
    throw GenerationFailed("no-path", e.what());
  }

  PrmParams check = prm;
  check.radius = radius;
  RepairResult path = check_and_repair(index, planned.polyline, check, mix_seed(seed, 0x434150));
  if (!path.ok) throw GenerationFailed("cap-check", "micro-PRM repair failed");

  std::mt19937_64 dir_rng(mix_seed(seed, 0x444952));
  const UnitVec3 start_dir = sample_start_direction(dir_rng, params.max_pitch_deg);

  for (int round = 0; round <= params.repair_rounds; ++round) {
    const Resampled rs = resample(path.polyline, params.frames);
    std::vector<Vec3> pts = mono_z(rs.points);
    try {
      for (auto& p : pts) p = nudge_away(index, p, radius, params.nudge_max_iter).point;
    } catch (const StuckInGeometry& e) {
      throw GenerationFailed("path-check", e.what());
    }
    const PathCheck final_check = capsule_check_path(index, pts, radius);
    if (final_check.ok) {
      Trajectory traj;
      traj.situation = spec;
      traj.seed = seed;
      traj.total_length = rs.total_length;
      traj.u = rs.u;
      for (std::size_t t = 0; t < pts.size(); ++t) {
        traj.frames.push_back({pts[t], slerp_dir(start_dir, end_dir, rs.u[t])});
      }
      return traj;
    }
    // Repair the frame polyline and resample it again.
    RepairResult repaired = check_and_repair(index, pts, check, mix_seed(seed, 0x525052 + round));
    if (!repaired.ok) break;
    path = std::move(repaired);
  }
  throw GenerationFailed("path-check", "resampled path collides");
}

}  // namespace

Trajectory generate_flythrough(const SceneMesh& mesh, const SpatialIndex& index,
                               const StandableRegion& region, const SituationSpec& spec,
                               const FlythroughParams& params, std::uint64_t seed) {
  if (!valid_frame_count(params.frames)) throw std::invalid_argument("frame count must be 4N+1");
  if (!mesh.instances.count(spec.anchor_instance)) {
    throw ValidationError("anchor instance " + std::to_string(spec.anchor_instance) + " not in scene");
  }
  if (spec.situation_class != SituationClass::navigate) {
    return generate_once(mesh, index, region, spec, params, seed);
  }
  for (int attempt = 0; attempt <= params.length_retries; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : mix_seed(seed, 0x4c454e + attempt);
    Trajectory traj = generate_once(mesh, index, region, spec, params, s);
    if (traj.total_length <= params.max_path_length_m) return traj;
  }
  throw GenerationFailed("length-cap", "no path within the length cap");
}

}  // namespace wander
