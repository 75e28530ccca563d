#include "wander/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "wander/errors.hpp"
#include "wander/spatial_index.hpp"

namespace wander {

using json = nlohmann::ordered_json;

Aabb SceneMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

std::string SceneMesh::label_name(int label) const {
  auto it = label_names.find(label);
  return it == label_names.end() ? std::to_string(label) : it->second;
}

void finalize_scene(SceneMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) throw ValidationError("non-finite vertex");
  }
  if (mesh.face_labels.size() != mesh.triangles.size()) {
    throw ValidationError("labels count " + std::to_string(mesh.face_labels.size()) +
                          " != triangles count " + std::to_string(mesh.triangles.size()));
  }
  for (int i = 0; i < mesh.triangle_count(); ++i) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(i)];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) {
        throw ValidationError("triangle " + std::to_string(i) + " has out-of-range index " +
                              std::to_string(t[k]));
      }
    }
    if (!(mesh.triangle(i).area() > 1e-12)) {
      throw ValidationError("triangle " + std::to_string(i) + " is degenerate");
    }
  }
  for (auto& [id, inst] : mesh.instances) {
    if (inst.triangles.empty()) throw ValidationError("instance " + std::to_string(id) + " is empty");
    double area_sum = 0.0;
    Vec3 weighted = Vec3::Zero();
    inst.box = Aabb();
    for (int tri : inst.triangles) {
      if (tri < 0 || tri >= mesh.triangle_count()) {
        throw ValidationError("instance " + std::to_string(id) + " references missing triangle " +
                              std::to_string(tri));
      }
      const Triangle t = mesh.triangle(tri);
      const double area = t.area();
      area_sum += area;
      weighted += area * t.centroid();
      inst.box.extend(t.a);
      inst.box.extend(t.b);
      inst.box.extend(t.c);
    }
    inst.center = weighted / area_sum;
  }
  for (const auto& room : mesh.rooms) {
    for (int inst : room.instances) {
      if (!mesh.instances.count(inst)) {
        throw ValidationError("room " + std::to_string(room.id) + " references missing instance " +
                              std::to_string(inst));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Scene file

namespace {

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

SceneMesh parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene: ") + e.what());
  }
  SceneMesh mesh;
  try {
    mesh.id = doc.value("scene_id", std::string{});
    for (const auto& v : doc.at("vertices")) mesh.vertices.push_back(vec_from_json(v));
    for (const auto& t : doc.at("triangles")) {
      if (!t.is_array() || t.size() != 3) throw ParseError("triangle must have 3 indices");
      mesh.triangles.emplace_back(t[0].get<int>(), t[1].get<int>(), t[2].get<int>());
    }
    for (const auto& l : doc.at("labels")) mesh.face_labels.push_back(l.get<int>());
    for (const auto& ij : doc.at("instances")) {
      Instance inst;
      inst.id = ij.at("id").get<int>();
      inst.label = ij.at("label").get<int>();
      inst.triangles = ij.at("triangles").get<std::vector<int>>();
      if (mesh.instances.count(inst.id)) throw ParseError("duplicate instance id " + std::to_string(inst.id));
      mesh.instances.emplace(inst.id, std::move(inst));
    }
    for (const auto& rj : doc.value("rooms", json::array())) {
      mesh.rooms.push_back({rj.at("id").get<int>(), rj.at("instances").get<std::vector<int>>()});
    }
    const json names = doc.value("label_names", json::object());
    for (const auto& [key, name] : names.items()) {
      mesh.label_names[std::stoi(key)] = name.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("scene: label_names keys must be integers");
  }
  finalize_scene(mesh);
  return mesh;
}

SceneMesh load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  SceneMesh mesh = parse_scene(ss.str());
  if (mesh.id.empty()) mesh.id = path.stem().string();
  return mesh;
}

std::string serialize_scene(const SceneMesh& mesh) {
  json doc;
  doc["scene_id"] = mesh.id;
  json verts = json::array();
  for (const auto& v : mesh.vertices) verts.push_back({v.x(), v.y(), v.z()});
  doc["vertices"] = std::move(verts);
  json tris = json::array();
  for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  doc["triangles"] = std::move(tris);
  doc["labels"] = mesh.face_labels;
  json insts = json::array();
  for (const auto& [id, inst] : mesh.instances) {
    insts.push_back({{"id", id}, {"label", inst.label}, {"triangles", inst.triangles}});
  }
  doc["instances"] = std::move(insts);
  json rooms = json::array();
  for (const auto& r : mesh.rooms) rooms.push_back({{"id", r.id}, {"instances", r.instances}});
  doc["rooms"] = std::move(rooms);
  json names = json::object();
  for (const auto& [id, name] : mesh.label_names) names[std::to_string(id)] = name;
  doc["label_names"] = std::move(names);
  return doc.dump() + "\n";
}

void save_scene(const SceneMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene " + path.string());
  out << serialize_scene(mesh);
}

SceneMesh convert_obj(const std::filesystem::path& obj_path,
                      const std::filesystem::path& label_table_path, const std::string& scene_id) {
  std::ifstream tin(label_table_path);
  if (!tin) throw IoError("cannot open label table " + label_table_path.string());
  json table;
  try {
    table = json::parse(tin);
  } catch (const json::exception& e) {
    throw ParseError(std::string("label table: ") + e.what());
  }

  std::ifstream in(obj_path);
  if (!in) throw IoError("cannot open OBJ " + obj_path.string());

  SceneMesh mesh;
  mesh.id = scene_id;
  std::map<std::string, int> group_instance;
  std::string current_group = "default";
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError("OBJ line " + std::to_string(line_no) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "g" || tag == "o") {
      ls >> current_group;
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        int i = std::stoi(tok.substr(0, tok.find('/')));
        idx.push_back(i < 0 ? static_cast<int>(mesh.vertices.size()) + i : i - 1);
      }
      if (idx.size() < 3) throw ParseError("OBJ line " + std::to_string(line_no) + ": face needs 3 vertices");
      if (!group_instance.count(current_group)) {
        const int inst_id = static_cast<int>(group_instance.size()) + 1;
        group_instance[current_group] = inst_id;
        const auto& groups = table.value("groups", json::object());
        const int label = groups.contains(current_group) ? groups[current_group].get<int>() : 0;
        mesh.instances[inst_id] = Instance{inst_id, label, {}, Vec3::Zero(), Aabb()};
      }
      Instance& inst = mesh.instances[group_instance[current_group]];
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        inst.triangles.push_back(mesh.triangle_count());
        mesh.triangles.emplace_back(idx[0], idx[k], idx[k + 1]);
        mesh.face_labels.push_back(inst.label);
      }
    }
  }
  const json names = table.value("label_names", json::object());
  for (const auto& [key, name] : names.items()) {
    mesh.label_names[std::stoi(key)] = name.get<std::string>();
  }
  for (const auto& rj : table.value("rooms", json::array())) {
    Room room{rj.at("id").get<int>(), {}};
    for (const auto& g : rj.at("groups")) {
      auto it = group_instance.find(g.get<std::string>());
      if (it == group_instance.end()) throw ValidationError("room references unknown group " + g.get<std::string>());
      room.instances.push_back(it->second);
    }
    mesh.rooms.push_back(std::move(room));
  }
  finalize_scene(mesh);
  return mesh;
}

// ---------------------------------------------------------------------------
// Situations

std::string to_string(SituationClass c) {
  switch (c) {
    case SituationClass::interacting: return "interacting";
    case SituationClass::sitting: return "sitting";
    case SituationClass::standing: return "standing";
    case SituationClass::navigate: return "navigate";
  }
  return "standing";
}

SituationClass situation_class_from_string(const std::string& s) {
  if (s == "interacting") return SituationClass::interacting;
  if (s == "sitting") return SituationClass::sitting;
  if (s == "standing") return SituationClass::standing;
  if (s == "navigate") return SituationClass::navigate;
  throw ParseError("unknown situation class '" + s + "'");
}

std::vector<SituationSpec> load_situations(const std::filesystem::path& path, const SceneMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open situations " + path.string());
  std::vector<SituationSpec> out;
  try {
    const json doc = json::parse(in);
    for (const auto& sj : doc) {
      SituationSpec spec;
      spec.id = sj.at("id").get<std::string>();
      spec.situation_class = situation_class_from_string(sj.at("class").get<std::string>());
      spec.target_pose.position = vec_from_json(sj.at("target").at("p"));
      spec.target_pose.direction = UnitVec3(vec_from_json(sj.at("target").at("d")));
      spec.anchor_instance = sj.at("anchor").get<int>();
      spec.description = sj.value("description", std::string{});
      if (!mesh.instances.count(spec.anchor_instance)) {
        throw ValidationError("situation " + spec.id + ": anchor instance " +
                              std::to_string(spec.anchor_instance) + " not in scene");
      }
      out.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("situations: ") + e.what());
  }
  return out;
}

std::string serialize_situations(const std::vector<SituationSpec>& specs) {
  json doc = json::array();
  for (const auto& s : specs) {
    const Vec3& p = s.target_pose.position;
    const Vec3& d = s.target_pose.direction.vec();
    doc.push_back({{"id", s.id},
                   {"class", to_string(s.situation_class)},
                   {"target", {{"p", {p.x(), p.y(), p.z()}}, {"d", {d.x(), d.y(), d.z()}}}},
                   {"anchor", s.anchor_instance},
                   {"description", s.description}});
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Standable region

bool is_standable(const SpatialIndex& index, const Vec3& point, int triangle,
                  const StandableParams& params, double* clearance_out) {
  const double min_up = std::cos(deg2rad(params.max_slope_deg));
  if (index.normal(triangle).z() < min_up) return false;
  const Vec3 origin = point + Vec3(0, 0, kSurfaceLift);
  const auto hit = index.raycast(origin, Vec3::UnitZ());
  double clearance = std::numeric_limits<double>::infinity();
  if (hit) {
    // An up-facing first hit means the ray is leaving a solid.
    if (index.normal(hit->triangle).z() > 0.0) return false;
    clearance = hit->t + kSurfaceLift;
  }
  if (clearance_out) *clearance_out = clearance;
  return clearance >= params.min_clearance_m;
}

StandableRegion compute_standable(const SceneMesh& mesh, const SpatialIndex& index,
                                  const StandableParams& params) {
  if (!(params.max_slope_deg > 0 && params.min_clearance_m > 0 && params.sample_spacing_m > 0)) {
    throw std::invalid_argument("compute_standable: parameters must be positive");
  }
  StandableRegion region;
  region.params = params;
  if (mesh.triangles.empty()) throw EmptyRegion("scene has no geometry");
  const Aabb box = mesh.bounds();
  const double h = params.sample_spacing_m;
  // Lattice anchored at world multiples of the spacing.
  region.origin = (box.min().head<2>() / h).array().floor().matrix() * h;
  const int nx = static_cast<int>(std::floor((box.max().x() - region.origin.x()) / h + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((box.max().y() - region.origin.y()) / h + 1e-9)) + 1;
  const double top = box.max().z() + 1.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec3 origin(region.origin.x() + i * h, region.origin.y() + j * h, top);
      const auto hits = index.ray_hits(origin, -Vec3::UnitZ());
      double last_z = std::numeric_limits<double>::infinity();
      for (const auto& hit : hits) {
        if (std::abs(hit.point.z() - last_z) < 1e-6) continue;  // shared edge duplicate
        last_z = hit.point.z();
        // Wall and ceiling tops face up but are the outside of the shell.
        const std::string& label = mesh.label_name(mesh.face_labels[static_cast<std::size_t>(hit.triangle)]);
        if (label == "wall" || label == "ceiling") continue;
        double clearance = 0.0;
        if (is_standable(index, hit.point, hit.triangle, params, &clearance)) {
          region.samples.push_back({hit.point, clearance, hit.triangle, Eigen::Vector2i(i, j)});
        }
      }
    }
  }
  if (region.samples.empty()) throw EmptyRegion("no standable samples in scene " + mesh.id);
  return region;
}

Vec3 sample_start(const StandableRegion& region, const Vec3& target, double d_min, double d_max,
                  std::uint64_t seed) {
  if (!(d_min < d_max)) throw std::invalid_argument("sample_start: d_min must be < d_max");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < region.samples.size(); ++i) {
    const double d = horizontal_distance(region.samples[i].point, target);
    if (d >= d_min && d <= d_max) candidates.push_back(i);
  }
  if (candidates.empty()) throw NoCandidate("no standable sample in the start annulus");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return region.samples[candidates[pick(rng)]].point;
}

std::map<int, std::set<int>> filter_anchors(const SceneMesh& mesh, int max_distractors) {
  std::map<int, std::set<int>> eligible;
  for (const auto& room : mesh.rooms) {
    std::map<int, int> per_label;
    for (int inst : room.instances) ++per_label[mesh.instances.at(inst).label];
    auto& out = eligible[room.id];
    for (int inst : room.instances) {
      const int same_category = per_label[mesh.instances.at(inst).label];
      if (same_category <= max_distractors) out.insert(inst);
    }
  }
  return eligible;
}

}  // namespace wander
