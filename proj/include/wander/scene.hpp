#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wander/geometry.hpp"

namespace wander {

struct Instance {
  int id = 0;
  int label = 0;
  std::vector<int> triangles;
  Vec3 center = Vec3::Zero();  // area-weighted centroid
  Aabb box;
};

struct Room {
  int id = 0;
  std::vector<int> instances;
};

/// Labeled triangle soup. Triangles are wound counter-clockwise when seen
/// from free space, so geometric normals point out of solids.
struct SceneMesh {
  std::string id;
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;
  std::vector<int> face_labels;
  std::map<int, Instance> instances;
  std::vector<Room> rooms;
  std::map<int, std::string> label_names;

  Triangle triangle(int i) const {
    const auto& t = triangles[static_cast<std::size_t>(i)];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  Aabb bounds() const;
  std::string label_name(int label) const;
};

/// Checks indices, triangle areas and instance membership, then computes
/// instance centers and boxes. Throws ValidationError.
void finalize_scene(SceneMesh& mesh);

SceneMesh load_scene(const std::filesystem::path& path);
SceneMesh parse_scene(const std::string& text);
std::string serialize_scene(const SceneMesh& mesh);
void save_scene(const SceneMesh& mesh, const std::filesystem::path& path);

/// OBJ geometry (v/f records, polygons fan-triangulated) plus a label table
/// {"label_names": {...}, "groups": {"obj group or object name": label},
///  "rooms": [{"id": 0, "groups": [...]}]}. Each group becomes one instance.
SceneMesh convert_obj(const std::filesystem::path& obj_path,
                      const std::filesystem::path& label_table_path, const std::string& scene_id);

// ---------------------------------------------------------------------------

enum class SituationClass { interacting, sitting, standing, navigate };

std::string to_string(SituationClass c);
SituationClass situation_class_from_string(const std::string& s);

struct SituationSpec {
  std::string id;
  SituationClass situation_class = SituationClass::standing;
  Pose target_pose;
  int anchor_instance = 0;
  std::string description;
};

/// Reads a JSON array of {"id","class","target":{"p","d"},"anchor","description"}.
/// Anchors must exist in `mesh`.
std::vector<SituationSpec> load_situations(const std::filesystem::path& path, const SceneMesh& mesh);
std::string serialize_situations(const std::vector<SituationSpec>& specs);

// ---------------------------------------------------------------------------

class SpatialIndex;

struct StandableParams {
  double max_slope_deg = 20.0;
  double min_clearance_m = 1.8;
  double sample_spacing_m = 0.25;
};

struct StandableSample {
  Vec3 point = Vec3::Zero();
  double clearance = 0.0;  // +inf when nothing is overhead
  int triangle = -1;
  Eigen::Vector2i cell = Eigen::Vector2i::Zero();
};

struct StandableRegion {
  StandableParams params;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  std::vector<StandableSample> samples;
};

/// Surface lift applied before clearance rays so the supporting triangle is
/// not re-hit.
inline constexpr double kSurfaceLift = 0.01;

/// Admission predicate for a single candidate point on `triangle`.
bool is_standable(const SpatialIndex& index, const Vec3& point, int triangle,
                  const StandableParams& params, double* clearance_out = nullptr);

/// Grid samples on up-facing surfaces with enough headroom. Throws EmptyRegion.
StandableRegion compute_standable(const SceneMesh& mesh, const SpatialIndex& index,
                                  const StandableParams& params);

/// Uniformly picks a region sample whose horizontal distance to `target`
/// lies in [d_min, d_max]. Throws NoCandidate.
Vec3 sample_start(const StandableRegion& region, const Vec3& target, double d_min, double d_max,
                  std::uint64_t seed);

/// Per room, the instances whose category occurs at most `max_distractors`
/// times in that room (7 chairs in one room: no chair is eligible there).
std::map<int, std::set<int>> filter_anchors(const SceneMesh& mesh, int max_distractors = 6);

}  // namespace wander
