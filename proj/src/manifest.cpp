#include "wander/manifest.hpp"

#include <json.hpp>

#include "wander/errors.hpp"
#include "wander/io.hpp"

namespace wander {

using json = nlohmann::ordered_json;

std::string manifest_text(const RunManifest& m) {
  json doc;
  doc["tool"] = "wander";
  doc["command"] = m.command;
  doc["argv"] = m.argv;
  doc["seed"] = m.root_seed;
  doc["scene_id"] = m.scene_id;
  doc["config"] = json::parse(config_text(m.config));
  json items = json::array();
  for (const auto& it : m.items) {
    json j;
    j["id"] = it.id;
    j["seed"] = it.seed;
    j["outcome"] = it.ok ? "ok" : "failed";
    if (!it.ok) j["error"] = {{"kind", it.error_kind}, {"stage", it.stage}, {"message", it.message}};
    j["outputs"] = it.outputs;
    if (!it.notes.empty()) {
      json notes = json::object();
      for (const auto& [k, v] : it.notes) notes[k] = v;
      j["notes"] = std::move(notes);
    }
    items.push_back(std::move(j));
  }
  doc["items"] = std::move(items);
  doc["exit_code"] = m.exit_code;
  return doc.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  try {
    const json doc = json::parse(text);
    m.command = doc.at("command").get<std::string>();
    m.argv = doc.at("argv").get<std::vector<std::string>>();
    m.root_seed = doc.at("seed").get<std::uint64_t>();
    m.scene_id = doc.value("scene_id", std::string{});
    m.config = parse_config(doc.at("config").dump());
    for (const auto& j : doc.at("items")) {
      ManifestItem it;
      it.id = j.at("id").get<std::string>();
      it.seed = j.at("seed").get<std::uint64_t>();
      it.ok = j.at("outcome").get<std::string>() == "ok";
      if (j.contains("error")) {
        it.error_kind = j["error"].value("kind", std::string{});
        it.stage = j["error"].value("stage", std::string{});
        it.message = j["error"].value("message", std::string{});
      }
      it.outputs = j.value("outputs", std::vector<std::string>{});
      if (j.contains("notes")) {
        for (const auto& [k, v] : j["notes"].items()) it.notes.emplace_back(k, v.get<std::string>());
      }
      m.items.push_back(std::move(it));
    }
    m.exit_code = doc.value("exit_code", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, manifest_text(m));
}

RunManifest read_manifest(const std::filesystem::path& path) { return parse_manifest(read_text_file(path)); }

}  // namespace wander
