#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wander/collision.hpp"
#include "wander/geometry.hpp"
#include "wander/scene.hpp"

namespace wander {

// ---------------------------------------------------------------------------
// Roadmap

enum class NodeSource { global, micro };

struct RoadmapEdge {
  int i = 0;
  int j = 0;
  double cost = 0.0;
};

/// Undirected graph of capsule-validated edges. Node 0 is the query start
/// and node 1 the query goal.
struct Roadmap {
  std::vector<Vec3> nodes;
  std::vector<NodeSource> sources;
  std::vector<RoadmapEdge> edges;
  double radius = 0.0;

  std::vector<std::vector<std::pair<int, double>>> adjacency() const;
};

struct PrmParams {
  int n_nodes = 400;
  int k_neighbors = 12;
  double radius = kHumanCapsuleRadius;
  double lambda_vertical = 2.0;
  double eye_height = 1.60;     // lift from standable samples to node height
  double z_jitter = 0.20;       // uniform +- around eye height
  double volume_margin = 1.5;   // horizontal growth of the start/goal box
  int micro_nodes = 150;
  double micro_inflate = 0.75;  // growth of a failing segment's box
};

/// Horizontal length plus lambda times absolute height change.
double edge_cost(const Vec3& a, const Vec3& b, double lambda_vertical);

struct ShortestPath {
  std::vector<int> nodes;
  double cost = 0.0;
};

/// Dijkstra over the roadmap. Throws NoPath.
ShortestPath shortest_path(const Roadmap& roadmap, int source, int target);

Roadmap build_roadmap(const SpatialIndex& index, const StandableRegion& region, const Vec3& start,
                      const Vec3& goal, const PrmParams& params, std::uint64_t seed);

/// Greedy visibility shortcutting; never increases edge_cost of the path.
std::vector<Vec3> shortcut_path(const SpatialIndex& index, std::span<const Vec3> path, double radius);

double polyline_length(std::span<const Vec3> polyline);

struct PrmResult {
  std::vector<Vec3> polyline;  // shortcut path, start to goal
  double length = 0.0;         // Euclidean length of polyline
  ShortestPath roadmap_path;   // Dijkstra result on the frozen roadmap
  Roadmap roadmap;
};

/// Throws NoPath when the roadmap leaves start and goal disconnected.
PrmResult plan_prm(const SpatialIndex& index, const StandableRegion& region, const Vec3& start,
                   const Vec3& goal, const PrmParams& params, std::uint64_t seed);

struct RepairResult {
  std::vector<Vec3> polyline;
  bool ok = false;
};

/// Replaces segment `first_bad_segment` with a sub-path through a dense local
/// roadmap sampled in the segment's inflated box.
RepairResult repair_micro_prm(const SpatialIndex& index, std::span<const Vec3> polyline,
                              std::size_t first_bad_segment, const PrmParams& params,
                              std::uint64_t seed);

/// Repeatedly checks and repairs until the whole polyline is valid.
RepairResult check_and_repair(const SpatialIndex& index, std::span<const Vec3> polyline,
                              const PrmParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trajectory shaping

struct Resampled {
  std::vector<Vec3> points;
  std::vector<double> u;
  double total_length = 0.0;
};

/// F points equally spaced in arc length; endpoints preserved exactly.
Resampled resample(std::span<const Vec3> polyline, int frames);

/// Isotonic (pool-adjacent-violators) projection of the z sequence in the
/// direction of net height change, endpoints held fixed.
std::vector<Vec3> mono_z(std::span<const Vec3> points);

/// Least-squares nondecreasing fit of `values` with every value clamped to
/// [lo, hi].
std::vector<double> isotonic_fit(std::span<const double> values, double lo, double hi);

struct Trajectory {
  std::vector<Pose> frames;
  std::vector<double> u;
  double total_length = 0.0;
  SituationSpec situation;
  std::uint64_t seed = 0;

  int frame_count() const { return static_cast<int>(frames.size()); }
  std::vector<Vec3> positions() const;
};

/// True for F = 4N+1, N >= 1.
constexpr bool valid_frame_count(int frames) { return frames >= 5 && (frames - 1) % 4 == 0; }

/// Pitch-limited end view for the situation class.
UnitVec3 end_direction(const SituationSpec& spec, const SceneMesh& mesh, double max_pitch_deg = 30.0);

/// Uniform yaw in [0, 360), uniform pitch in [-max_pitch, max_pitch].
UnitVec3 sample_start_direction(std::mt19937_64& rng, double max_pitch_deg = 30.0);

Trajectory plan_direct(const Vec3& start, const SituationSpec& spec, const UnitVec3& end_dir,
                       int frames, std::uint64_t seed, double max_pitch_deg = 30.0);

struct FlythroughParams {
  int frames = 21;
  double capsule_radius = kHumanCapsuleRadius;
  double plan_margin = 0.05;  // extra planning radius so resampled chords stay clear
  double eye_height = 1.60;
  double start_min_m = 1.5;
  double start_max_m = 3.0;
  double max_pitch_deg = 30.0;
  double max_path_length_m = 5.0;  // navigate specs only
  int length_retries = 8;
  int nudge_max_iter = 8;
  int repair_rounds = 3;
  PrmParams prm;
};

/// Full fly-through generation. Throws GenerationFailed with stage
/// no-start, no-path, cap-check, path-check or length-cap.
Trajectory generate_flythrough(const SceneMesh& mesh, const SpatialIndex& index,
                               const StandableRegion& region, const SituationSpec& spec,
                               const FlythroughParams& params, std::uint64_t seed);

}  // namespace wander
