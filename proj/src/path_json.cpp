#include "wander/path_json.hpp"

#include <json.hpp>

#include "wander/errors.hpp"
#include "wander/io.hpp"

namespace wander {

using json = nlohmann::ordered_json;

namespace {

json vec_json(const Vec3& v) { return json::array({round_sig9(v.x()), round_sig9(v.y()), round_sig9(v.z())}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("path.json: expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string path_json_text(const Trajectory& traj) {
  if (traj.frames.empty()) throw ValidationError("trajectory has no frames");
  json doc;
  json frames = json::array();
  for (const auto& f : traj.frames) frames.push_back({{"p", vec_json(f.position)}, {"d", vec_json(f.direction.vec())}});
  doc["frames"] = std::move(frames);
  json u = json::array();
  for (double v : traj.u) u.push_back(round_sig9(v));
  doc["u"] = std::move(u);
  doc["length_m"] = round_sig9(traj.total_length);
  doc["seed"] = traj.seed;
  const SituationSpec& s = traj.situation;
  doc["situation"] = {{"id", s.id},
                      {"class", to_string(s.situation_class)},
                      {"target", {{"p", vec_json(s.target_pose.position)}, {"d", vec_json(s.target_pose.direction.vec())}}},
                      {"anchor", s.anchor_instance},
                      {"description", s.description}};
  return doc.dump(2) + "\n";
}

Trajectory parse_path_json(const std::string& text) {
  Trajectory traj;
  try {
    const json doc = json::parse(text);
    for (const auto& f : doc.at("frames")) traj.frames.push_back({vec_from(f.at("p")), UnitVec3(vec_from(f.at("d")))});
    traj.u = doc.at("u").get<std::vector<double>>();
    traj.total_length = doc.at("length_m").get<double>();
    traj.seed = doc.at("seed").get<std::uint64_t>();
    const json& s = doc.at("situation");
    traj.situation.id = s.at("id").get<std::string>();
    traj.situation.situation_class = situation_class_from_string(s.at("class").get<std::string>());
    traj.situation.target_pose = {vec_from(s.at("target").at("p")), UnitVec3(vec_from(s.at("target").at("d")))};
    traj.situation.anchor_instance = s.at("anchor").get<int>();
    traj.situation.description = s.value("description", std::string{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("path.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("path.json: ") + e.what());
  }
  if (traj.frames.empty()) throw ParseError("path.json: no frames");
  if (traj.u.size() != traj.frames.size()) throw ParseError("path.json: u and frames differ in length");
  return traj;
}

void write_path_json(const Trajectory& traj, const std::filesystem::path& path) {
  write_file_atomic(path, path_json_text(traj));
}

Trajectory read_path_json(const std::filesystem::path& path) { return parse_path_json(read_text_file(path)); }

namespace {

json raw_vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

ActionKind action_from_string(const std::string& s) {
  if (s == "MOVE_FORWARD") return ActionKind::MOVE_FORWARD;
  if (s == "TURN_LEFT") return ActionKind::TURN_LEFT;
  if (s == "TURN_RIGHT") return ActionKind::TURN_RIGHT;
  throw ParseError("unknown action '" + s + "'");
}

}  // namespace

std::string episode_json_text(const Episode& ep) {
  json doc;
  doc["goal_instance"] = ep.goal_instance;
  doc["seed"] = ep.seed;
  doc["success"] = ep.success;
  doc["failure_reason"] = ep.failure_reason;
  doc["planned_cost"] = ep.planned_cost;
  doc["traversed_m"] = ep.traversed_m;
  json actions = json::array();
  for (ActionKind a : ep.actions) actions.push_back(to_string(a));
  doc["actions"] = std::move(actions);
  json poses = json::array();
  for (std::size_t i = 0; i < ep.poses.size(); ++i) {
    poses.push_back({{"p", raw_vec(ep.poses[i].position)}, {"heading_deg", ep.headings[i]}});
  }
  doc["poses"] = std::move(poses);
  json goals = json::array();
  for (const auto& g : ep.goal_points) goals.push_back(raw_vec(g));
  doc["goal_points"] = std::move(goals);
  json wps = json::array();
  for (const auto& w : ep.waypoints) wps.push_back(raw_vec(w));
  doc["waypoints"] = std::move(wps);
  return doc.dump(2) + "\n";
}

Episode parse_episode_json(const std::string& text) {
  Episode ep;
  try {
    const json doc = json::parse(text);
    ep.goal_instance = doc.at("goal_instance").get<int>();
    ep.seed = doc.at("seed").get<std::uint64_t>();
    ep.success = doc.at("success").get<bool>();
    ep.failure_reason = doc.value("failure_reason", std::string{});
    ep.planned_cost = doc.value("planned_cost", 0.0);
    ep.traversed_m = doc.value("traversed_m", 0.0);
    for (const auto& a : doc.at("actions")) ep.actions.push_back(action_from_string(a.get<std::string>()));
    for (const auto& p : doc.at("poses")) {
      AgentState s;
      s.position = vec_from(p.at("p"));
      s.heading_deg = p.at("heading_deg").get<double>();
      ep.poses.push_back(agent_pose(s));
      ep.headings.push_back(s.heading_deg);
    }
    for (const auto& g : doc.value("goal_points", json::array())) ep.goal_points.push_back(vec_from(g));
    for (const auto& w : doc.value("waypoints", json::array())) ep.waypoints.push_back(vec_from(w));
  } catch (const json::exception& e) {
    throw ParseError(std::string("episode: ") + e.what());
  }
  if (ep.poses.size() != ep.actions.size() + 1) throw ParseError("episode: poses must be actions + 1");
  return ep;
}

}  // namespace wander
