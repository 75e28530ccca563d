#pragma once

#include <string>
#include <vector>

#include "wander/scene.hpp"

namespace wander {

/// Programmatic authoring of labeled scenes. Faces are emitted with normals
/// pointing out of solids (into free space).
class SceneBuilder {
 public:
  explicit SceneBuilder(std::string scene_id);

  /// Label id for a name, allocated on first use (0 is "unknown").
  int label(const std::string& name);
  int new_instance(const std::string& label_name);

  /// Quad a-b-c-d, counter-clockwise when seen from the free side.
  void add_quad(int instance, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
  void add_triangle(int instance, const Vec3& a, const Vec3& b, const Vec3& c);

  /// Solid box (outward normals), or a hollow cavity (inward normals).
  int add_box(const std::string& label_name, const Vec3& min, const Vec3& max, bool hollow = false);
  void add_box_to(int instance, const Vec3& min, const Vec3& max, bool hollow = false);

  /// Up-facing floor / down-facing ceiling rectangles.
  int add_floor(const Eigen::Vector2d& min, const Eigen::Vector2d& max, double z,
                const std::string& label_name = "floor");
  int add_ceiling(const Eigen::Vector2d& min, const Eigen::Vector2d& max, double z,
                  const std::string& label_name = "ceiling");

  /// Floor, ceiling and four wall boxes around the interior footprint.
  /// Returns {floor, ceiling, walls} instance ids.
  std::vector<int> add_room_shell(const Eigen::Vector2d& min, const Eigen::Vector2d& max, double height,
                                  double wall_thickness = 0.1);

  /// Geodesic sphere; inward normals when `inside` is true.
  int add_sphere(const std::string& label_name, const Vec3& center, double radius, int subdivisions,
                 bool inside);

  void add_room(int room_id, std::vector<int> instances);

  SceneMesh build();

 private:
  SceneMesh mesh_;
};

/// Synthetic scenes shipped with the project and used by the test suites.
namespace fixtures {

inline constexpr double kCeiling = 2.5;

SceneMesh unit_cube_room();
SceneMesh flat_floor();          // 4 x 4 m floor, ceiling at 2.5 m, no walls
SceneMesh empty_room();          // 8 x 8 m interior, walls, ceiling
SceneMesh two_rooms();           // 8 x 4 m split at x = 4 with a 1 m door
SceneMesh corridor();            // 10 x 2 m
SceneMesh u_wall();              // 8 x 8 m room, U-shaped wall opening to +x
SceneMesh sealed_wall();         // 8 x 4 m room split by a full-height wall
SceneMesh sealed_target();       // 8 x 8 m room with a closed 1.6 m booth at the center
SceneMesh pillar_room();         // 6 x 4 m room with a thin pillar at the center
SceneMesh ramp_room();           // flat floor plus a 45 degree ramp
SceneMesh table_covered();       // floor fully covered by a 0.5 m table
SceneMesh sphere(double radius = 2.0, int subdivisions = 4);  // inward sphere at origin
SceneMesh open_room_with_chair();
SceneMesh cabinet_enclosed();    // chair sealed inside a closed cabinet
SceneMesh apartment();           // three rooms with furniture

/// Human situations authored for the apartment fixture.
std::vector<SituationSpec> apartment_situations(const SceneMesh& apartment);

/// Names of every shipped fixture and its factory.
std::vector<std::pair<std::string, SceneMesh (*)()>> all();

}  // namespace fixtures

}  // namespace wander
