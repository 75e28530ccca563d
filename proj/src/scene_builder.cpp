#include "wander/scene_builder.hpp"

#include <array>
#include <cmath>
#include <map>

namespace wander {

SceneBuilder::SceneBuilder(std::string scene_id) {
  mesh_.id = std::move(scene_id);
  mesh_.label_names[0] = "unknown";
}

int SceneBuilder::label(const std::string& name) {
  for (const auto& [id, n] : mesh_.label_names) {
    if (n == name) return id;
  }
  const int id = mesh_.label_names.rbegin()->first + 1;
  mesh_.label_names[id] = name;
  return id;
}

int SceneBuilder::new_instance(const std::string& label_name) {
  const int id = mesh_.instances.empty() ? 1 : mesh_.instances.rbegin()->first + 1;
  Instance inst;
  inst.id = id;
  inst.label = label(label_name);
  mesh_.instances.emplace(id, std::move(inst));
  return id;
}

void SceneBuilder::add_triangle(int instance, const Vec3& a, const Vec3& b, const Vec3& c) {
  const int base = static_cast<int>(mesh_.vertices.size());
  mesh_.vertices.insert(mesh_.vertices.end(), {a, b, c});
  Instance& inst = mesh_.instances.at(instance);
  inst.triangles.push_back(mesh_.triangle_count());
  mesh_.triangles.emplace_back(base, base + 1, base + 2);
  mesh_.face_labels.push_back(inst.label);
}

void SceneBuilder::add_quad(int instance, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const int base = static_cast<int>(mesh_.vertices.size());
  mesh_.vertices.insert(mesh_.vertices.end(), {a, b, c, d});
  Instance& inst = mesh_.instances.at(instance);
  for (const Eigen::Vector3i& t : {Eigen::Vector3i(base, base + 1, base + 2), Eigen::Vector3i(base, base + 2, base + 3)}) {
    inst.triangles.push_back(mesh_.triangle_count());
    mesh_.triangles.push_back(t);
    mesh_.face_labels.push_back(inst.label);
  }
}

void SceneBuilder::add_box_to(int instance, const Vec3& lo, const Vec3& hi, bool hollow) {
  const double x0 = lo.x(), y0 = lo.y(), z0 = lo.z();
  const double x1 = hi.x(), y1 = hi.y(), z1 = hi.z();
  const std::array<std::array<Vec3, 4>, 6> faces{{
      {Vec3(x0, y0, z0), Vec3(x0, y1, z0), Vec3(x1, y1, z0), Vec3(x1, y0, z0)},  // -z
      {Vec3(x0, y0, z1), Vec3(x1, y0, z1), Vec3(x1, y1, z1), Vec3(x0, y1, z1)},  // +z
      {Vec3(x0, y0, z0), Vec3(x0, y0, z1), Vec3(x0, y1, z1), Vec3(x0, y1, z0)},  // -x
      {Vec3(x1, y0, z0), Vec3(x1, y1, z0), Vec3(x1, y1, z1), Vec3(x1, y0, z1)},  // +x
      {Vec3(x0, y0, z0), Vec3(x1, y0, z0), Vec3(x1, y0, z1), Vec3(x0, y0, z1)},  // -y
      {Vec3(x0, y1, z0), Vec3(x0, y1, z1), Vec3(x1, y1, z1), Vec3(x1, y1, z0)},  // +y
  }};
  for (const auto& f : faces) {
    if (hollow) {
      add_quad(instance, f[0], f[3], f[2], f[1]);
    } else {
      add_quad(instance, f[0], f[1], f[2], f[3]);
    }
  }
}

int SceneBuilder::add_box(const std::string& label_name, const Vec3& lo, const Vec3& hi, bool hollow) {
  const int inst = new_instance(label_name);
  add_box_to(inst, lo, hi, hollow);
  return inst;
}

int SceneBuilder::add_floor(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, double z,
                            const std::string& label_name) {
  const int inst = new_instance(label_name);
  add_quad(inst, Vec3(lo.x(), lo.y(), z), Vec3(hi.x(), lo.y(), z), Vec3(hi.x(), hi.y(), z),
           Vec3(lo.x(), hi.y(), z));
  return inst;
}

int SceneBuilder::add_ceiling(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, double z,
                              const std::string& label_name) {
  const int inst = new_instance(label_name);
  add_quad(inst, Vec3(lo.x(), lo.y(), z), Vec3(lo.x(), hi.y(), z), Vec3(hi.x(), hi.y(), z),
           Vec3(hi.x(), lo.y(), z));
  return inst;
}

std::vector<int> SceneBuilder::add_room_shell(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                                              double height, double t) {
  const int floor = add_floor(lo, hi, 0.0);
  const int ceiling = add_ceiling(lo, hi, height);
  const int walls = new_instance("wall");
  add_box_to(walls, Vec3(lo.x() - t, lo.y() - t, 0), Vec3(lo.x(), hi.y() + t, height));
  add_box_to(walls, Vec3(hi.x(), lo.y() - t, 0), Vec3(hi.x() + t, hi.y() + t, height));
  add_box_to(walls, Vec3(lo.x(), lo.y() - t, 0), Vec3(hi.x(), lo.y(), height));
  add_box_to(walls, Vec3(lo.x(), hi.y(), 0), Vec3(hi.x(), hi.y() + t, height));
  return {floor, ceiling, walls};
}

int SceneBuilder::add_sphere(const std::string& label_name, const Vec3& center, double radius,
                             int subdivisions, bool inside) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts{{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                          {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                     {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                     {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                     {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint[key] = id;
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.emplace_back(f[0], ab, ca);
      next.emplace_back(f[1], bc, ab);
      next.emplace_back(f[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    faces = std::move(next);
  }
  const int inst = new_instance(label_name);
  for (const auto& f : faces) {
    const Vec3 a = center + radius * verts[static_cast<std::size_t>(f[0])];
    const Vec3 b = center + radius * verts[static_cast<std::size_t>(f[1])];
    const Vec3 c = center + radius * verts[static_cast<std::size_t>(f[2])];
    if (inside) {
      add_triangle(inst, a, c, b);
    } else {
      add_triangle(inst, a, b, c);
    }
  }
  return inst;
}

void SceneBuilder::add_room(int room_id, std::vector<int> instances) {
  mesh_.rooms.push_back({room_id, std::move(instances)});
}

SceneMesh SceneBuilder::build() {
  SceneMesh out = mesh_;
  finalize_scene(out);
  return out;
}

// ---------------------------------------------------------------------------

namespace fixtures {

using V2 = Eigen::Vector2d;

SceneMesh unit_cube_room() {
  SceneBuilder b("unit_cube_room");
  const int floor = b.new_instance("floor");
  b.add_box_to(floor, Vec3(0, 0, 0), Vec3(1, 1, 1), /*hollow=*/true);
  b.add_room(0, {floor});
  return b.build();
}

SceneMesh flat_floor() {
  SceneBuilder b("flat_floor");
  const int floor = b.add_floor(V2(0, 0), V2(4, 4), 0.0);
  const int ceiling = b.add_ceiling(V2(0, 0), V2(4, 4), kCeiling);
  b.add_room(0, {floor, ceiling});
  return b.build();
}

SceneMesh empty_room() {
  SceneBuilder b("empty_room");
  auto shell = b.add_room_shell(V2(0, 0), V2(8, 8), kCeiling);
  b.add_room(0, shell);
  return b.build();
}

SceneMesh two_rooms() {
  SceneBuilder b("two_rooms");
  auto shell = b.add_room_shell(V2(0, 0), V2(8, 4), kCeiling);
  const int wall = b.new_instance("wall");
  b.add_box_to(wall, Vec3(3.95, 0, 0), Vec3(4.05, 1.5, kCeiling));
  b.add_box_to(wall, Vec3(3.95, 2.5, 0), Vec3(4.05, 4, kCeiling));
  const int chair_a = b.add_box("chair", Vec3(1.0, 1.0, 0), Vec3(1.4, 1.4, 0.45));
  const int chair_b = b.add_box("chair", Vec3(6.0, 3.0, 0), Vec3(6.4, 3.4, 0.45));
  b.add_room(0, {shell[0], shell[1], shell[2], wall, chair_a});
  b.add_room(1, {wall, chair_b});
  return b.build();
}

SceneMesh corridor() {
  SceneBuilder b("corridor");
  auto shell = b.add_room_shell(V2(0, 0), V2(10, 2), kCeiling);
  b.add_room(0, shell);
  return b.build();
}

SceneMesh u_wall() {
  SceneBuilder b("u_wall");
  auto shell = b.add_room_shell(V2(0, 0), V2(8, 8), kCeiling);
  const int wall = b.new_instance("wall");
  b.add_box_to(wall, Vec3(3.9, 2.4, 0), Vec3(4.1, 5.6, kCeiling));  // base of the U
  b.add_box_to(wall, Vec3(4.1, 2.4, 0), Vec3(6.5, 2.6, kCeiling));  // lower arm
  b.add_box_to(wall, Vec3(4.1, 5.4, 0), Vec3(6.5, 5.6, kCeiling));  // upper arm
  shell.push_back(wall);
  b.add_room(0, shell);
  return b.build();
}

SceneMesh sealed_wall() {
  SceneBuilder b("sealed_wall");
  auto shell = b.add_room_shell(V2(0, 0), V2(8, 4), kCeiling);
  const int wall = b.add_box("wall", Vec3(3.95, 0, 0), Vec3(4.05, 4, kCeiling));
  shell.push_back(wall);
  b.add_room(0, shell);
  return b.build();
}

SceneMesh sealed_target() {
  SceneBuilder b("sealed_target");
  auto shell = b.add_room_shell(V2(0, 0), V2(8, 8), kCeiling);
  const int booth = b.new_instance("booth");
  const double lo = 3.2, hi = 4.8, t = 0.1;
  b.add_box_to(booth, Vec3(lo - t, lo - t, 0), Vec3(lo, hi + t, kCeiling));
  b.add_box_to(booth, Vec3(hi, lo - t, 0), Vec3(hi + t, hi + t, kCeiling));
  b.add_box_to(booth, Vec3(lo, lo - t, 0), Vec3(hi, lo, kCeiling));
  b.add_box_to(booth, Vec3(lo, hi, 0), Vec3(hi, hi + t, kCeiling));
  const int stool = b.add_box("stool", Vec3(3.9, 3.9, 0), Vec3(4.1, 4.1, 0.5));
  shell.insert(shell.end(), {booth, stool});
  b.add_room(0, shell);
  return b.build();
}

SceneMesh pillar_room() {
  SceneBuilder b("pillar_room");
  auto shell = b.add_room_shell(V2(0, 0), V2(6, 4), kCeiling);
  const int pillar = b.add_box("pillar", Vec3(2.95, 1.95, 0), Vec3(3.05, 2.05, kCeiling));
  shell.push_back(pillar);
  b.add_room(0, shell);
  return b.build();
}

SceneMesh ramp_room() {
  SceneBuilder b("ramp_room");
  const int floor = b.add_floor(V2(0, 0), V2(2, 2), 0.0);
  const int ramp = b.new_instance("ramp");
  // 45 degree slope rising along +x from x = 2 to x = 3.
  b.add_quad(ramp, Vec3(2, 0, 0), Vec3(3, 0, 1), Vec3(3, 2, 1), Vec3(2, 2, 0));
  const int ceiling = b.add_ceiling(V2(0, 0), V2(3, 2), 4.0);
  b.add_room(0, {floor, ramp, ceiling});
  return b.build();
}

SceneMesh table_covered() {
  SceneBuilder b("table_covered");
  const int floor = b.add_floor(V2(0, 0), V2(4, 4), 0.0);
  const int underside = b.add_ceiling(V2(-0.1, -0.1), V2(4.1, 4.1), 0.5, "table");
  const int top = b.add_floor(V2(-0.1, -0.1), V2(4.1, 4.1), 0.52, "table");
  const int ceiling = b.add_ceiling(V2(-0.1, -0.1), V2(4.1, 4.1), 2.0);
  b.add_room(0, {floor, underside, top, ceiling});
  return b.build();
}

SceneMesh sphere(double radius, int subdivisions) {
  SceneBuilder b("sphere");
  const int s = b.add_sphere("sphere", Vec3::Zero(), radius, subdivisions, /*inside=*/true);
  b.add_room(0, {s});
  return b.build();
}

SceneMesh open_room_with_chair() {
  SceneBuilder b("open_room");
  auto shell = b.add_room_shell(V2(0, 0), V2(6, 6), kCeiling);
  const int chair = b.add_box("chair", Vec3(4.3, 4.3, 0), Vec3(4.8, 4.8, 0.45));
  shell.push_back(chair);
  b.add_room(0, shell);
  return b.build();
}

SceneMesh cabinet_enclosed() {
  SceneBuilder b("cabinet_enclosed");
  auto shell = b.add_room_shell(V2(0, 0), V2(6, 6), kCeiling);
  const int cabinet = b.add_box("cabinet", Vec3(2.5, 2.5, 0), Vec3(3.5, 3.5, 1.2));
  // Interior cavity walls face inward; the chair sits inside.
  const int cavity = b.new_instance("cabinet");
  b.add_box_to(cavity, Vec3(2.55, 2.55, 0.05), Vec3(3.45, 3.45, 1.15), /*hollow=*/true);
  const int chair = b.add_box("chair", Vec3(2.8, 2.8, 0.05), Vec3(3.2, 3.2, 0.5));
  shell.insert(shell.end(), {cabinet, cavity, chair});
  b.add_room(0, shell);
  return b.build();
}

SceneMesh apartment() {
  SceneBuilder b("apartment");
  auto shell = b.add_room_shell(V2(0, 0), V2(8, 6), kCeiling);
  const double h = kCeiling;

  const int wall_a = b.new_instance("wall");
  b.add_box_to(wall_a, Vec3(4.95, 0, 0), Vec3(5.05, 2.0, h));
  b.add_box_to(wall_a, Vec3(4.95, 4.0, 0), Vec3(5.05, 6, h));
  const int wall_b = b.new_instance("wall");
  b.add_box_to(wall_b, Vec3(5.05, 2.95, 0), Vec3(6.0, 3.05, h));
  b.add_box_to(wall_b, Vec3(7.0, 2.95, 0), Vec3(8, 3.05, h));

  // Living room.
  const int sofa = b.add_box("sofa", Vec3(0.5, 5.1, 0), Vec3(2.5, 6.0, 0.45));
  b.add_box_to(sofa, Vec3(0.5, 5.75, 0.45), Vec3(2.5, 6.0, 0.9));
  const int coffee = b.add_box("table", Vec3(1.0, 3.9, 0), Vec3(2.0, 4.5, 0.45));
  const int cabinet = b.add_box("cabinet", Vec3(1.0, 0, 0), Vec3(2.5, 0.45, 0.6));
  const int tv = b.add_box("tv", Vec3(1.25, 0.1, 0.6), Vec3(2.25, 0.2, 1.2));
  const int dining = b.add_box("table", Vec3(3.0, 1.0, 0), Vec3(4.2, 1.8, 0.75));
  const int chair1 = b.add_box("chair", Vec3(3.1, 0.5, 0), Vec3(3.5, 0.9, 0.45));
  const int chair2 = b.add_box("chair", Vec3(3.7, 0.5, 0), Vec3(4.1, 0.9, 0.45));
  const int chair3 = b.add_box("chair", Vec3(3.1, 1.9, 0), Vec3(3.5, 2.3, 0.45));
  const int chair4 = b.add_box("chair", Vec3(3.7, 1.9, 0), Vec3(4.1, 2.3, 0.45));
  const int bin = b.add_box("trash bin", Vec3(4.3, 5.3, 0), Vec3(4.6, 5.6, 0.4));

  // Kitchen.
  const int counter = b.add_box("counter", Vec3(5.05, 0, 0), Vec3(8, 0.6, 0.9));
  const int island = b.add_box("counter", Vec3(6.0, 1.3, 0), Vec3(7.0, 1.9, 0.9));
  const int fridge = b.add_box("refrigerator", Vec3(7.3, 2.2, 0), Vec3(8, 2.95, 1.8));

  // Bedroom.
  const int bed = b.add_box("bed", Vec3(6.0, 4.2, 0), Vec3(8, 6, 0.5));
  const int wardrobe = b.add_box("wardrobe", Vec3(5.05, 5.4, 0), Vec3(5.8, 6, 2.0));
  const int nightstand = b.add_box("nightstand", Vec3(7.5, 3.85, 0), Vec3(8, 4.2, 0.55));
  const int desk = b.add_box("desk", Vec3(7.4, 3.05, 0), Vec3(8, 3.8, 0.75));
  const int chair5 = b.add_box("chair", Vec3(6.9, 3.3, 0), Vec3(7.3, 3.7, 0.45));

  b.add_room(0, {shell[0], shell[1], shell[2], wall_a, sofa, coffee, cabinet, tv, dining, chair1, chair2,
                 chair3, chair4, bin});
  b.add_room(1, {wall_a, wall_b, counter, island, fridge});
  b.add_room(2, {wall_a, wall_b, bed, wardrobe, nightstand, desk, chair5});
  return b.build();
}

namespace {

int find_instance(const SceneMesh& mesh, const std::string& label, const Vec3& near) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, inst] : mesh.instances) {
    if (mesh.label_name(inst.label) != label) continue;
    const double d = (inst.center - near).norm();
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

}  // namespace

std::vector<SituationSpec> apartment_situations(const SceneMesh& apt) {
  auto spec = [&](std::string id, SituationClass cls, Vec3 p, Vec3 d, const std::string& anchor_label,
                  Vec3 anchor_near, std::string text) {
    return SituationSpec{std::move(id), cls, Pose{p, UnitVec3(d)}, find_instance(apt, anchor_label, anchor_near),
                         std::move(text)};
  };
  using SC = SituationClass;
  return {
      spec("sit_sofa", SC::sitting, {1.5, 5.4, 1.15}, {0, -1, 0}, "sofa", {1.5, 5.5, 0.3},
           "sit on the grey sofa facing the tv"),
      spec("interact_fridge", SC::interacting, {6.8, 2.55, 1.6}, {1, 0, 0}, "refrigerator", {7.6, 2.6, 0.9},
           "open the refrigerator in the kitchen"),
      spec("stand_living", SC::standing, {0.8, 2.5, 1.6}, {-1, 0, 0}, "cabinet", {1.7, 0.2, 0.3},
           "stand by the west wall of the living room"),
      spec("interact_counter", SC::interacting, {6.5, 1.0, 1.6}, {0, -1, 0}, "counter", {6.5, 0.3, 0.45},
           "wash hands at the kitchen counter"),
      spec("sit_bed", SC::sitting, {7.0, 4.35, 1.2}, {0, -1, 0}, "bed", {7.0, 5.1, 0.25},
           "sit on the edge of the bed"),
      spec("interact_tv", SC::interacting, {1.75, 1.4, 1.6}, {0, -1, 0}, "tv", {1.75, 0.15, 0.9},
           "switch on the tv"),
      spec("stand_dining", SC::standing, {3.6, 2.8, 1.6}, {0, -1, 0}, "table", {3.6, 1.4, 0.4},
           "stand behind the dining chairs"),
      spec("interact_wardrobe", SC::interacting, {5.45, 4.7, 1.6}, {0, 1, 0}, "wardrobe", {5.4, 5.7, 1.0},
           "take a coat from the wardrobe"),
      spec("interact_desk", SC::interacting, {7.6, 4.0, 1.6}, {0, -1, 0}, "desk", {7.7, 3.4, 0.4},
           "write at the desk in the bedroom"),
  };
}

std::vector<std::pair<std::string, SceneMesh (*)()>> all() {
  return {
      {"unit_cube_room", &unit_cube_room},
      {"flat_floor", &flat_floor},
      {"empty_room", &empty_room},
      {"two_rooms", &two_rooms},
      {"corridor", &corridor},
      {"u_wall", &u_wall},
      {"sealed_wall", &sealed_wall},
      {"sealed_target", &sealed_target},
      {"pillar_room", &pillar_room},
      {"ramp_room", &ramp_room},
      {"table_covered", &table_covered},
      {"sphere", [] { return sphere(); }},
      {"open_room", &open_room_with_chair},
      {"cabinet_enclosed", &cabinet_enclosed},
      {"apartment", &apartment},
  };
}

}  // namespace fixtures

}  // namespace wander
