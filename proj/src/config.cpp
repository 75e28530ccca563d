#include "wander/config.hpp"

#include <functional>
#include <map>

#include <json.hpp>

#include "wander/errors.hpp"
#include "wander/io.hpp"

namespace wander {

using json = nlohmann::ordered_json;

namespace {

// Binds JSON keys of one section to struct fields, both directions.
class Section {
 public:
  template <typename T>
  Section& field(const std::string& key, T& value) {
    readers_[key] = [&value, key](const json& j) {
      try {
        value = j.get<T>();
      } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
      }
    };
    writers_.emplace_back(key, [&value] { return json(value); });
    return *this;
  }

  void read(const std::string& name, const json& j) const {
    if (!j.is_object()) throw ConfigError("config section '" + name + "' must be an object");
    for (const auto& [key, v] : j.items()) {
      auto it = readers_.find(key);
      if (it == readers_.end()) throw ConfigError("unknown config key '" + name + "." + key + "'");
      it->second(v);
    }
  }

  json write() const {
    json out = json::object();
    for (const auto& [key, w] : writers_) out[key] = w();
    return out;
  }

 private:
  std::map<std::string, std::function<void(const json&)>> readers_;
  std::vector<std::pair<std::string, std::function<json()>>> writers_;
};

std::vector<std::pair<std::string, Section>> sections(Config& c) {
  std::vector<std::pair<std::string, Section>> s;
  Section standable;
  standable.field("max_slope_deg", c.standable.max_slope_deg)
      .field("min_clearance_m", c.standable.min_clearance_m)
      .field("sample_spacing_m", c.standable.sample_spacing_m);
  s.emplace_back("standable", std::move(standable));

  auto& f = c.flythrough;
  Section fly;
  fly.field("frames", f.frames)
      .field("capsule_radius", f.capsule_radius)
      .field("plan_margin", f.plan_margin)
      .field("eye_height", f.eye_height)
      .field("start_min_m", f.start_min_m)
      .field("start_max_m", f.start_max_m)
      .field("max_pitch_deg", f.max_pitch_deg)
      .field("max_path_length_m", f.max_path_length_m)
      .field("length_retries", f.length_retries)
      .field("nudge_max_iter", f.nudge_max_iter)
      .field("repair_rounds", f.repair_rounds);
  s.emplace_back("flythrough", std::move(fly));

  auto& p = c.flythrough.prm;
  Section prm;
  prm.field("n_nodes", p.n_nodes)
      .field("k_neighbors", p.k_neighbors)
      .field("lambda_vertical", p.lambda_vertical)
      .field("z_jitter", p.z_jitter)
      .field("volume_margin", p.volume_margin)
      .field("micro_nodes", p.micro_nodes)
      .field("micro_inflate", p.micro_inflate);
  s.emplace_back("prm", std::move(prm));

  auto& n = c.nav;
  Section nav;
  nav.field("cell_m", n.cell_m)
      .field("robot_radius", n.robot_radius)
      .field("eye_height", n.eye_height)
      .field("body_margin", n.body_margin)
      .field("max_step_height", n.max_step_height)
      .field("view_radius", n.view_radius)
      .field("near_m", n.near_m)
      .field("max_path_m", n.max_path_m)
      .field("max_steps", n.max_steps)
      .field("start_retries", n.start_retries)
      .field("move_m", n.move_m)
      .field("turn_deg", n.turn_deg)
      .field("heading_tolerance_deg", n.heading_tolerance_deg);
  s.emplace_back("nav", std::move(nav));

  Section anchors;
  anchors.field("max_distractors", c.max_distractors);
  s.emplace_back("anchors", std::move(anchors));

  Section render;
  render.field("face_size", c.render.face_size).field("equirect_height", c.render.equirect_height);
  s.emplace_back("render", std::move(render));

  Section eval;
  eval.field("ssim_window", c.eval.ssim.window)
      .field("ssim_sigma", c.eval.ssim.sigma)
      .field("ssim_k1", c.eval.ssim.k1)
      .field("ssim_k2", c.eval.ssim.k2)
      .field("subsample_stride", c.eval.subsample_stride);
  s.emplace_back("eval", std::move(eval));

  Section judge;
  judge.field("attempts", c.judge.attempts).field("timeout_s", c.judge.timeout_s);
  s.emplace_back("judge", std::move(judge));
  return s;
}

void check(const Config& c) {
  if (!valid_frame_count(c.flythrough.frames)) throw ConfigError("flythrough.frames must be 4N+1 with N >= 1");
  if (c.flythrough.capsule_radius <= 0 || c.nav.robot_radius <= 0) throw ConfigError("radii must be positive");
  if (c.flythrough.start_min_m > c.flythrough.start_max_m) throw ConfigError("start_min_m exceeds start_max_m");
  if (c.standable.sample_spacing_m <= 0 || c.nav.cell_m <= 0) throw ConfigError("spacings must be positive");
  if (c.render.face_size < 1 || c.render.equirect_height < 1) throw ConfigError("render sizes must be positive");
  if (c.eval.subsample_stride < 1) throw ConfigError("eval.subsample_stride must be positive");
  if (c.eval.ssim.window < 1 || c.eval.ssim.window % 2 == 0) throw ConfigError("eval.ssim_window must be odd");
  if (c.judge.attempts < 1) throw ConfigError("judge.attempts must be positive");
}

}  // namespace

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  auto secs = sections(c);
  for (const auto& [name, value] : doc.items()) {
    auto it = std::find_if(secs.begin(), secs.end(), [&](const auto& s) { return s.first == name; });
    if (it == secs.end()) throw ConfigError("unknown config section '" + name + "'");
    it->second.read(name, value);
  }
  check(c);
  return c;
}

Config load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string config_text(const Config& config) {
  Config copy = config;
  json doc = json::object();
  for (const auto& [name, sec] : sections(copy)) doc[name] = sec.write();
  return doc.dump(2) + "\n";
}

}  // namespace wander
