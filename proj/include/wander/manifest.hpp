#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wander/config.hpp"

namespace wander {

struct ManifestItem {
  std::string id;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error_kind;  // e.g. GenerationFailed
  std::string stage;       // failure stage or reason
  std::string message;
  std::vector<std::string> outputs;  // relative to the output directory
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Record of one CLI run, sufficient to repeat it. No timestamps, so reruns
/// produce identical manifests apart from the output location.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // full argument list after the program name
  std::uint64_t root_seed = 0;
  Config config;
  std::string scene_id;
  std::vector<ManifestItem> items;
  int exit_code = 0;
};

std::string manifest_text(const RunManifest& m);
/// Throws ParseError.
RunManifest parse_manifest(const std::string& text);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace wander
