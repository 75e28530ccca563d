#pragma once

#include <filesystem>
#include <string>

#include "wander/nav_episode.hpp"
#include "wander/planner.hpp"

namespace wander {

/// {"frames":[{"p":[x,y,z],"d":[dx,dy,dz]}...],"u":[...],"length_m":L,
///  "seed":n,"situation":{...}} with reals at 9 significant digits.
std::string path_json_text(const Trajectory& traj);
Trajectory parse_path_json(const std::string& text);

void write_path_json(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_path_json(const std::filesystem::path& path);

/// Actions, poses and headings at full double precision, so a replay can be
/// compared bit for bit.
std::string episode_json_text(const Episode& ep);
Episode parse_episode_json(const std::string& text);

}  // namespace wander
