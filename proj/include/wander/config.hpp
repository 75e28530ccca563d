#pragma once

#include <filesystem>
#include <string>

#include "wander/metrics.hpp"
#include "wander/nav_episode.hpp"
#include "wander/planner.hpp"
#include "wander/scene.hpp"

namespace wander {

struct RenderParams {
  int face_size = 512;
  int equirect_height = 1024;
};

struct EvalParams {
  SsimParams ssim;
  int subsample_stride = 5;
};

struct JudgeParams {
  int attempts = 3;
  int timeout_s = 30;
};

/// Every tunable default in one place. Loaded from JSON; unknown keys are
/// errors.
struct Config {
  StandableParams standable;
  FlythroughParams flythrough;
  NavParams nav;
  int max_distractors = 6;
  RenderParams render;
  EvalParams eval;
  JudgeParams judge;
};

/// Throws ConfigError.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);
/// Full config with every key; parse_config(config_text(c)) == c.
std::string config_text(const Config& config);

}  // namespace wander
