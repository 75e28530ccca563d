#include "wander/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "wander/config.hpp"
#include "wander/errors.hpp"
#include "wander/image_io.hpp"
#include "wander/io.hpp"
#include "wander/judge.hpp"
#include "wander/manifest.hpp"
#include "wander/metrics.hpp"
#include "wander/nav_episode.hpp"
#include "wander/pano.hpp"
#include "wander/path_json.hpp"
#include "wander/qa_schema.hpp"
#include "wander/random.hpp"
#include "wander/scene_builder.hpp"
#include "wander/spatial_index.hpp"

namespace fs = std::filesystem;

namespace wander {

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn must not throw.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(jobs, n); ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const GenerationFailed*>(&e) || dynamic_cast<const EpisodeFailed*>(&e) ||
      dynamic_cast<const NoPath*>(&e) || dynamic_cast<const EmptyRegion*>(&e) ||
      dynamic_cast<const NoCandidate*>(&e) || dynamic_cast<const NoViewpoint*>(&e) ||
      dynamic_cast<const StuckInGeometry*>(&e)) {
    return kExitGeneration;
  }
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const SourceUnreachable*>(&e) ||
      dynamic_cast<const AllRetriesFailed*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitIo;
  }
  return kExitValidation;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const GenerationFailed*>(&e)) return "GenerationFailed";
  if (dynamic_cast<const EpisodeFailed*>(&e)) return "EpisodeFailed";
  if (dynamic_cast<const EmptyRegion*>(&e)) return "EmptyRegion";
  if (dynamic_cast<const NoPath*>(&e)) return "NoPath";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  return "Error";
}

std::string item_name(const std::string& base, int k, int count) {
  return count == 1 ? base : base + "_" + std::to_string(k);
}

std::string frame_stem(int t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "f%04d", t);
  return buf;
}

struct Context {
  std::uint64_t seed = 0;
  std::string config_path;
  int jobs = 1;
  std::optional<Config> config_override;  // set by rerun
  std::vector<std::string> argv;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  Config config() const {
    if (config_override) return *config_override;
    if (config_path.empty()) return {};
    return load_config(config_path);
  }

  RunManifest manifest(const std::string& command, const Config& cfg) const {
    RunManifest m;
    m.command = command;
    m.argv = argv;
    m.root_seed = seed;
    m.config = cfg;
    return m;
  }
};

int finish(RunManifest& m, const fs::path& path, int code) {
  m.exit_code = code;
  if (!path.empty()) write_manifest(m, path);
  return code;
}

fs::path manifest_path_for(const std::string& explicit_path, const fs::path& out, bool out_is_dir) {
  if (!explicit_path.empty()) return explicit_path;
  if (out.empty()) return {};
  if (out_is_dir) return out / "manifest.json";
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

bool structural_label(const std::string& name) {
  return name == "floor" || name == "wall" || name == "ceiling" || name == "unknown";
}

// ---------------------------------------------------------------------------

struct GenFlyArgs {
  std::string scene, situations, out, manifest;
  std::vector<std::string> only;
  int count = 1;
};

int cmd_gen_flythrough(const Context& ctx, const GenFlyArgs& a) {
  const Config cfg = ctx.config();
  RunManifest m = ctx.manifest("gen-flythrough", cfg);
  const fs::path out = a.out;
  const fs::path mpath = manifest_path_for(a.manifest, out, true);
  const SceneMesh mesh = load_scene(a.scene);
  m.scene_id = mesh.id;
  std::vector<SituationSpec> specs = load_situations(a.situations, mesh);
  if (!a.only.empty()) {
    std::erase_if(specs, [&](const SituationSpec& s) {
      return std::find(a.only.begin(), a.only.end(), s.id) == a.only.end();
    });
  }
  if (a.count < 1) throw ValidationError("--count must be positive");
  const SpatialIndex index(mesh);

  struct Job {
    const SituationSpec* spec;
    std::string id;
  };
  std::vector<Job> jobs;
  for (const auto& s : specs) {
    for (int k = 0; k < a.count; ++k) jobs.push_back({&s, item_name(s.id, k, a.count)});
  }
  m.items.resize(jobs.size());
  std::optional<StandableRegion> region;
  std::string region_error;
  try {
    region = compute_standable(mesh, index, cfg.standable);
  } catch (const EmptyRegion& e) {
    region_error = e.what();
  }

  parallel_for(static_cast<int>(jobs.size()), ctx.jobs, [&](int i) {
    ManifestItem& item = m.items[static_cast<std::size_t>(i)];
    item.id = jobs[static_cast<std::size_t>(i)].id;
    item.seed = derive_seed(ctx.seed, mesh.id, item.id);
    try {
      if (!region) throw GenerationFailed("no-start", region_error);
      const Trajectory traj =
          generate_flythrough(mesh, index, *region, *jobs[static_cast<std::size_t>(i)].spec, cfg.flythrough, item.seed);
      const std::string rel = item.id + "/path.json";
      write_path_json(traj, out / rel);
      item.outputs.push_back(rel);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.9g", round_sig9(traj.total_length));
      item.notes.emplace_back("length_m", buf);
    } catch (const GenerationFailed& e) {
      item.ok = false;
      item.error_kind = "GenerationFailed";
      item.stage = e.stage();
      item.message = e.what();
    } catch (const std::exception& e) {
      item.ok = false;
      item.error_kind = error_kind(e);
      item.message = e.what();
    }
  });

  int code = kExitOk;
  for (const auto& it : m.items) {
    if (!it.ok) {
      *ctx.err << it.id << ": " << it.message << "\n";
      code = std::max(code, it.error_kind == "IoError" ? int(kExitIo) : int(kExitGeneration));
    } else {
      *ctx.out << it.id << ": ok\n";
    }
  }
  return finish(m, mpath, code);
}

// ---------------------------------------------------------------------------

struct GenEpisodeArgs {
  std::string scene, out, manifest;
  std::vector<int> instances;
  int count = 1;
};

int cmd_gen_episode(const Context& ctx, const GenEpisodeArgs& a) {
  const Config cfg = ctx.config();
  RunManifest m = ctx.manifest("gen-episode", cfg);
  const fs::path out = a.out;
  const fs::path mpath = manifest_path_for(a.manifest, out, true);
  const SceneMesh mesh = load_scene(a.scene);
  m.scene_id = mesh.id;
  const SpatialIndex index(mesh);
  if (a.count < 1) throw ValidationError("--count must be positive");

  std::vector<int> targets = a.instances;
  if (targets.empty()) {
    std::set<int> eligible;
    for (const auto& [room, ids] : filter_anchors(mesh, cfg.max_distractors)) eligible.insert(ids.begin(), ids.end());
    for (int id : eligible) {
      if (!structural_label(mesh.label_name(mesh.instances.at(id).label))) targets.push_back(id);
    }
  }
  for (int id : targets) {
    if (!mesh.instances.count(id)) throw ValidationError("instance " + std::to_string(id) + " not in scene");
  }

  std::optional<NavGraph> graph;
  std::string graph_error;
  try {
    graph = build_nav_graph(mesh, index, cfg.nav);
  } catch (const EmptyRegion& e) {
    graph_error = e.what();
  }

  std::vector<std::pair<int, std::string>> jobs;
  for (int id : targets) {
    for (int k = 0; k < a.count; ++k) jobs.emplace_back(id, item_name("nav-" + std::to_string(id), k, a.count));
  }
  m.items.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), ctx.jobs, [&](int i) {
    ManifestItem& item = m.items[static_cast<std::size_t>(i)];
    const auto& [instance, id] = jobs[static_cast<std::size_t>(i)];
    item.id = id;
    item.seed = derive_seed(ctx.seed, mesh.id, id);
    try {
      if (!graph) throw EpisodeFailed("no-start", graph_error);
      const Episode ep = run_episode(mesh, index, *graph, instance, cfg.nav, item.seed);
      write_file_atomic(out / id / "episode.json", episode_json_text(ep));
      item.outputs.push_back(id + "/episode.json");
      if (!ep.success) {
        item.ok = false;
        item.error_kind = "EpisodeFailed";
        item.stage = ep.failure_reason;
        item.message = "episode ended without reaching a goal";
        return;
      }
      const Trajectory traj = episode_to_trajectory(ep, cfg.flythrough.frames);
      write_path_json(traj, out / id / "path.json");
      item.outputs.push_back(id + "/path.json");
    } catch (const EpisodeFailed& e) {
      item.ok = false;
      item.error_kind = "EpisodeFailed";
      item.stage = e.reason();
      item.message = e.what();
    } catch (const std::exception& e) {
      item.ok = false;
      item.error_kind = error_kind(e);
      item.message = e.what();
    }
  });

  int code = kExitOk;
  for (const auto& it : m.items) {
    if (!it.ok) {
      *ctx.err << it.id << ": " << it.message << " (" << it.stage << ")\n";
      code = std::max(code, it.error_kind == "IoError" ? int(kExitIo) : int(kExitGeneration));
    } else {
      *ctx.out << it.id << ": ok\n";
    }
  }
  return finish(m, mpath, code);
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string scene, path, out, manifest;
  int face_size = 0;
};

int cmd_render(const Context& ctx, const RenderArgs& a) {
  Config cfg = ctx.config();
  if (a.face_size > 0) cfg.render.face_size = a.face_size;
  RunManifest m = ctx.manifest("render", cfg);
  const fs::path out = a.out;
  const fs::path mpath = manifest_path_for(a.manifest, out, true);
  const SceneMesh mesh = load_scene(a.scene);
  m.scene_id = mesh.id;
  const SpatialIndex index(mesh);
  const Trajectory traj = read_path_json(a.path);
  const int n = traj.frame_count();
  m.items.resize(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  parallel_for(n, ctx.jobs, [&](int t) {
    ManifestItem& item = m.items[static_cast<std::size_t>(t)];
    item.id = frame_stem(t);
    item.seed = traj.seed;
    try {
      const RenderedFaces faces = render_faces(index, traj.frames[static_cast<std::size_t>(t)], cfg.render.face_size);
      for (Face f : kFaces) {
        const std::string d = item.id + "_depth_" + face_name(f) + ".png";
        const std::string s = item.id + "_semantic_" + face_name(f) + ".png";
        write_png(out / d, depth_to_mm(faces.depth[f]));
        write_png(out / s, faces.semantic[f]);
        item.outputs.push_back(d);
        item.outputs.push_back(s);
      }
    } catch (const std::exception& e) {
      item.ok = false;
      item.error_kind = error_kind(e);
      item.message = e.what();
    }
  });
  int code = kExitOk;
  for (const auto& it : m.items) {
    if (!it.ok) {
      *ctx.err << it.id << ": " << it.message << "\n";
      code = kExitIo;
    }
  }
  *ctx.out << "rendered " << n << " frames\n";
  return finish(m, mpath, code);
}

// ---------------------------------------------------------------------------

struct StitchArgs {
  std::string in, out, manifest;
  int height = 0;
};

int cmd_stitch(const Context& ctx, const StitchArgs& a) {
  Config cfg = ctx.config();
  if (a.height > 0) cfg.render.equirect_height = a.height;
  RunManifest m = ctx.manifest("stitch", cfg);
  const fs::path in = a.in, out = a.out;
  const fs::path mpath = manifest_path_for(a.manifest, out, true);
  if (!fs::is_directory(in)) throw IoError("not a directory: " + in.string());

  // (frame stem, channel) pairs that have a front face.
  const std::regex pattern(R"((f\d{4})_(depth|semantic|rgb)_front\.png)");
  std::vector<std::pair<std::string, std::string>> jobs;
  for (const auto& entry : fs::directory_iterator(in)) {
    std::smatch mt;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, mt, pattern)) jobs.emplace_back(mt[1].str(), mt[2].str());
  }
  std::sort(jobs.begin(), jobs.end());
  m.items.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), ctx.jobs, [&](int i) {
    const auto& [stem, channel] = jobs[static_cast<std::size_t>(i)];
    ManifestItem& item = m.items[static_cast<std::size_t>(i)];
    item.id = stem + "_" + channel;
    try {
      const std::string rel = item.id + ".png";
      auto face_path = [&](Face f) { return in / (stem + "_" + channel + "_" + face_name(f) + ".png"); };
      if (channel == "rgb") {
        CubemapFaceSet<std::uint8_t> faces;
        for (Face f : kFaces) faces[f] = read_png8(face_path(f));
        write_png(out / rel, cube_to_equirect(faces, cfg.render.equirect_height));
      } else {
        CubemapFaceSet<std::uint16_t> faces;
        for (Face f : kFaces) faces[f] = read_png16(face_path(f));
        write_png(out / rel, cube_to_equirect(faces, cfg.render.equirect_height));
      }
      item.outputs.push_back(rel);
    } catch (const std::exception& e) {
      item.ok = false;
      item.error_kind = error_kind(e);
      item.message = e.what();
    }
  });
  int code = jobs.empty() ? int(kExitValidation) : int(kExitOk);
  if (jobs.empty()) *ctx.err << "no cubemap faces found in " << in.string() << "\n";
  for (const auto& it : m.items) {
    if (!it.ok) {
      *ctx.err << it.id << ": " << it.message << "\n";
      code = std::max(code, it.error_kind == "IoError" ? int(kExitIo) : int(kExitValidation));
    }
  }
  *ctx.out << "stitched " << jobs.size() << " panoramas\n";
  return finish(m, mpath, code);
}

// ---------------------------------------------------------------------------

struct MetricsArgs {
  std::string a, b, out, manifest, external, channel = "depth";
  int stride = 0;
};

int cmd_metrics(const Context& ctx, const MetricsArgs& a) {
  Config cfg = ctx.config();
  if (a.stride > 0) cfg.eval.subsample_stride = a.stride;
  RunManifest m = ctx.manifest("metrics", cfg);
  const fs::path out = a.out;
  const fs::path mpath = manifest_path_for(a.manifest, out, false);
  if (a.channel != "depth" && a.channel != "semantic" && a.channel != "rgb") {
    throw ValidationError("--channel must be depth, semantic or rgb");
  }
  const std::regex pattern("f\\d{4}_" + a.channel + "\\.png");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(fs::path(a.a))) {
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, pattern)) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw ValidationError("no " + a.channel + " panoramas in " + a.a);
  names = subsample_frames(names, cfg.eval.subsample_stride);

  std::vector<double> scores(names.size());
  std::vector<std::string> errors(names.size());
  parallel_for(static_cast<int>(names.size()), ctx.jobs, [&](int i) {
    const std::string& name = names[static_cast<std::size_t>(i)];
    try {
      if (a.channel == "rgb") {
        const auto x = read_png8(fs::path(a.a) / name);
        const auto y = read_png8(fs::path(a.b) / name);
        scores[static_cast<std::size_t>(i)] = spherical_ssim(x, y, 255.0, cfg.eval.ssim);
      } else {
        const auto x = read_png16(fs::path(a.a) / name);
        const auto y = read_png16(fs::path(a.b) / name);
        scores[static_cast<std::size_t>(i)] = spherical_ssim(x, y, 65535.0, cfg.eval.ssim);
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw IoError(e);
  }

  std::vector<MetricRow> rows;
  for (std::size_t i = 0; i < names.size(); ++i) {
    MetricRow r;
    r.item = fs::path(names[i]).stem().string();
    r.s_ssim = scores[i];
    rows.push_back(r);
  }
  if (!a.external.empty()) {
    for (const MetricRow& ext : parse_metric_csv(read_text_file(a.external))) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricRow& r) { return r.item == ext.item; });
      if (it == rows.end()) {
        rows.push_back(ext);
        continue;
      }
      if (ext.fvd) it->fvd = ext.fvd;
      if (ext.end_fid) it->end_fid = ext.end_fid;
      if (ext.lpips) it->lpips = ext.lpips;
      if (ext.qa) it->qa = ext.qa;
      if (ext.s_ssim) it->s_ssim = ext.s_ssim;
    }
  }
  const MeanStd agg = mean_std(scores);
  rows.push_back({"mean", {}, {}, agg.mean, {}, {}});
  rows.push_back({"std", {}, {}, agg.std, {}, {}});

  const PngInfo info = read_png_info(fs::path(a.a) / names.front());
  std::vector<std::string> comments{
      "S-SSIM: SSIM per panorama frame (11x11 Gaussian window, sigma 1.5, longitude wrap), rows weighted by "
      "cos(latitude); mean/std rows aggregate frames (population std)",
      "channel: " + a.channel,
      "frames: " + std::to_string(names.size()) + " (stride " + std::to_string(cfg.eval.subsample_stride) + ")",
      "resolution: " + std::to_string(info.height) + "x" + std::to_string(info.width),
      "FVD, End-FID, LPIPS: external values only",
  };
  write_file_atomic(out, format_metric_report(comments, rows));
  ManifestItem item;
  item.id = "report";
  item.outputs.push_back(out.filename().string());
  m.items.push_back(item);
  *ctx.out << "S-SSIM mean " << agg.mean << " over " << names.size() << " frames\n";
  return finish(m, mpath, kExitOk);
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string truth, pred, judge_file, judge_url, out, manifest;
};

int cmd_score(const Context& ctx, const ScoreArgs& a) {
  const Config cfg = ctx.config();
  RunManifest m = ctx.manifest("score", cfg);
  const fs::path out = a.out;
  const fs::path mpath = manifest_path_for(a.manifest, out, false);
  const auto truth = parse_qa_text(read_text_file(a.truth));
  const auto pred = parse_qa_text(read_text_file(a.pred));
  if (truth.size() != pred.size()) throw LengthMismatch("truth and predictions differ in situation count");
  std::vector<JudgeRecord> records;
  std::vector<std::size_t> owner;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (truth[s].qa.size() != pred[s].qa.size()) {
      throw LengthMismatch("situation " + std::to_string(s) + ": truth and predictions differ in QA count");
    }
    for (std::size_t q = 0; q < truth[s].qa.size(); ++q) {
      records.push_back({truth[s].qa[q].question, truth[s].qa[q].answer, pred[s].qa[q].answer});
      owner.push_back(s);
    }
  }
  auto source = make_judge_source(a.judge_file.empty() ? std::nullopt : std::optional<fs::path>(a.judge_file),
                                  a.judge_url.empty() ? std::nullopt : std::optional<std::string>(a.judge_url),
                                  cfg.judge.attempts, cfg.judge.timeout_s);
  const auto raw = source->score(records);
  std::vector<int> all;
  std::vector<std::vector<int>> per(truth.size());
  std::vector<int> missing;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i]) {
      all.push_back(*raw[i]);
      per[owner[i]].push_back(*raw[i]);
    } else {
      missing.push_back(static_cast<int>(i));
    }
  }
  if (all.empty()) throw AllRetriesFailed("no record received a conforming judge score");

  std::vector<MetricRow> rows;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    MetricRow r;
    r.item = "situation_" + std::to_string(s);
    if (!per[s].empty()) r.qa = correctness(per[s]);
    rows.push_back(r);
  }
  rows.push_back({"overall", {}, {}, {}, {}, correctness(all)});
  std::string missing_list;
  for (int i : missing) missing_list += (missing_list.empty() ? "" : " ") + std::to_string(i);
  std::vector<std::string> comments{
      "QA: judge correctness in percent, scores 1..5 mapped linearly to 0..100",
      "records: " + std::to_string(records.size()),
      "scored: " + std::to_string(all.size()),
      "missing: " + std::to_string(missing.size()) + (missing.empty() ? "" : " (records " + missing_list + ")"),
  };
  write_file_atomic(out, format_metric_report(comments, rows));
  ManifestItem item;
  item.id = "report";
  item.outputs.push_back(out.filename().string());
  item.notes.emplace_back("missing", std::to_string(missing.size()));
  m.items.push_back(item);
  *ctx.out << "QA correctness " << correctness(all) << "% over " << all.size() << " records, " << missing.size()
           << " missing\n";
  return finish(m, mpath, kExitOk);
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> scenes, paths, qa;
  std::string perspective, manifest;
};

std::vector<std::string> check_path_file(const fs::path& p) {
  std::vector<std::string> problems;
  const Trajectory traj = read_path_json(p);
  if (!valid_frame_count(traj.frame_count())) {
    problems.push_back("frame count " + std::to_string(traj.frame_count()) + " is not 4N+1");
  }
  for (std::size_t i = 0; i < traj.u.size(); ++i) {
    if (traj.u[i] < 0 || traj.u[i] > 1 || (i > 0 && traj.u[i] < traj.u[i - 1])) {
      problems.push_back("u is not nondecreasing in [0, 1]");
      break;
    }
  }
  if (!traj.u.empty() && (traj.u.front() != 0.0 || traj.u.back() != 1.0)) problems.push_back("u must run from 0 to 1");
  for (const auto& f : traj.frames) {
    if (!f.position.allFinite()) {
      problems.push_back("non-finite position");
      break;
    }
  }
  return problems;
}

int cmd_validate(const Context& ctx, const ValidateArgs& a) {
  const Config cfg = ctx.config();
  RunManifest m = ctx.manifest("validate", cfg);
  std::optional<Perspective> persp;
  if (!a.perspective.empty()) {
    persp = perspective_from_string(a.perspective);
    if (!persp) throw ValidationError("--perspective must be robot or human");
  }
  int code = kExitOk;
  auto record = [&](const std::string& id, const std::vector<std::string>& problems, int fail_code) {
    ManifestItem item;
    item.id = id;
    if (!problems.empty()) {
      item.ok = false;
      item.error_kind = "ValidationError";
      item.message = problems.front();
      code = std::max(code, fail_code);
      for (const auto& p : problems) *ctx.err << id << ": " << p << "\n";
    } else {
      *ctx.out << id << ": ok\n";
    }
    m.items.push_back(item);
  };
  auto guarded = [&](const std::string& id, const std::function<std::vector<std::string>()>& fn) {
    try {
      record(id, fn(), kExitValidation);
    } catch (const std::exception& e) {
      record(id, {e.what()}, exit_code_for(e) == kExitIo ? int(kExitIo) : int(kExitValidation));
    }
  };
  for (const auto& s : a.scenes) {
    guarded(s, [&] {
      const SceneMesh mesh = load_scene(s);
      return std::vector<std::string>{};
    });
  }
  for (const auto& p : a.paths) guarded(p, [&] { return check_path_file(p); });
  for (const auto& q : a.qa) {
    guarded(q, [&] {
      std::vector<std::string> problems;
      for (const auto& v : validate_qa_file(q, persp)) problems.push_back(format_violation(v));
      return problems;
    });
  }
  return finish(m, manifest_path_for(a.manifest, {}, false), code);
}

// ---------------------------------------------------------------------------

struct ConvertArgs {
  std::string obj, labels, scene_id, out;
};

int cmd_convert_obj(const Context& ctx, const ConvertArgs& a) {
  const SceneMesh mesh = convert_obj(a.obj, a.labels, a.scene_id.empty() ? fs::path(a.obj).stem().string() : a.scene_id);
  write_file_atomic(a.out, serialize_scene(mesh));
  *ctx.out << "wrote " << mesh.triangle_count() << " triangles, " << mesh.instances.size() << " instances\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

int instance_with_label(const SceneMesh& mesh, const std::string& label) {
  for (const auto& [id, inst] : mesh.instances) {
    if (mesh.label_name(inst.label) == label) return id;
  }
  throw ValidationError("no instance labeled " + label);
}

std::vector<SituationSet> sample_qa_sets() {
  SituationSet robot;
  robot.situation = "Go to the refrigerator in the kitchen.";
  robot.perspective = Perspective::robot;
  robot.qa = {
      {"start", "Object Awareness", "What is within one meter of you?", "A dining chair is on your left."},
      {"start", "Navigability Reasoning", "Is the path ahead clear?", "Yes, the way ahead is open."},
      {"start", "Egocentric Direction", "Where is the refrigerator relative to you?", "Ahead and to the right."},
      {"path", "Landmark Sequencing", "Which do you pass first, the table or the counter?", "The table."},
      {"path", "Spatial Estimation", "How far is the refrigerator?", "About four meters."},
      {"path", "Obstacle Reasoning", "What blocks the direct route?", "The dining table."},
      {"path", "Route Planning", "How do you reach the refrigerator?", "Turn right, go through the door, go forward."},
      {"end", "Object Proximity", "Which is closer, the counter or the table?", "The counter."},
      {"end", "Affordance", "Where can you wash your hands?", "At the sink on the counter to your right."},
      {"end", "Egocentric Spatial Relation", "Where is the door?", "Behind you, about two meters."},
  };
  SituationSet human;
  human.situation = "Sit on the grey sofa facing the tv.";
  human.perspective = Perspective::human;
  human.qa = robot.qa;
  human.qa[6] = {"path", "Relative Distance Change", "Do you get closer to the tv while walking?",
                 "Closer at first, then farther."};
  return {robot, human};
}

struct FixturesArgs {
  std::string out;
};

int cmd_make_fixtures(const Context& ctx, const FixturesArgs& a) {
  const fs::path out = a.out;
  for (const auto& [name, make] : fixtures::all()) write_file_atomic(out / (name + ".json"), serialize_scene(make()));
  const SceneMesh apt = fixtures::apartment();
  write_file_atomic(out / "apartment_situations.json", serialize_situations(fixtures::apartment_situations(apt)));
  const SceneMesh sealed = fixtures::sealed_target();
  const SituationSpec inside{"inside_booth", SituationClass::standing, Pose{Vec3(4.0, 4.4, 1.6), UnitVec3(Vec3(0, -1, 0))},
                             instance_with_label(sealed, "stool"), "stand inside the closed booth"};
  write_file_atomic(out / "sealed_target_situations.json", serialize_situations({inside}));
  write_file_atomic(out / "qa_sample.json", write_qa_text(sample_qa_sets()));
  write_file_atomic(out / "config_defaults.json", config_text(Config{}));
  *ctx.out << "wrote fixtures to " << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, Context ctx);

struct RerunArgs {
  std::string manifest, out;
};

int cmd_rerun(const Context& ctx, const RerunArgs& a) {
  const RunManifest m = read_manifest(a.manifest);
  std::vector<std::string> argv;
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    const std::string& s = m.argv[i];
    // Drop output locations and the config file; the recorded config wins.
    // Thread count comes from this invocation, it never changes outputs.
    if ((s == "--manifest" || s == "--config" || s == "--jobs") && i + 1 < m.argv.size()) {
      ++i;
      continue;
    }
    if (s.rfind("--manifest=", 0) == 0 || s.rfind("--config=", 0) == 0 || s.rfind("--jobs=", 0) == 0) continue;
    if (!a.out.empty() && s == "--out" && i + 1 < m.argv.size()) {
      argv.push_back(s);
      argv.push_back(a.out);
      ++i;
      continue;
    }
    argv.push_back(s);
  }
  Context inner = ctx;
  inner.config_override = m.config;
  return dispatch(argv, inner);
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, Context ctx) {
  CLI::App app{"Situated fly-through and navigation episode generator"};
  app.name("wander");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", ctx.seed, "Root seed");
  app.add_option("--config", ctx.config_path, "JSON config overriding defaults")->check(CLI::ExistingFile);
  app.add_option("--jobs", ctx.jobs, "Worker threads")->check(CLI::PositiveNumber);

  GenFlyArgs fly;
  auto* c_fly = app.add_subcommand("gen-flythrough", "Human fly-through trajectories");
  c_fly->add_option("--scene", fly.scene)->required()->check(CLI::ExistingFile);
  c_fly->add_option("--situations", fly.situations)->required()->check(CLI::ExistingFile);
  c_fly->add_option("--situation", fly.only, "Only these situation ids");
  c_fly->add_option("--count", fly.count, "Seeds per situation");
  c_fly->add_option("--out", fly.out)->required();
  c_fly->add_option("--manifest", fly.manifest);

  GenEpisodeArgs epi;
  auto* c_epi = app.add_subcommand("gen-episode", "Robot navigation episodes");
  c_epi->add_option("--scene", epi.scene)->required()->check(CLI::ExistingFile);
  c_epi->add_option("--instance", epi.instances, "Target instances (default: eligible anchors)");
  c_epi->add_option("--count", epi.count, "Seeds per instance");
  c_epi->add_option("--out", epi.out)->required();
  c_epi->add_option("--manifest", epi.manifest);

  RenderArgs ren;
  auto* c_ren = app.add_subcommand("render", "Depth and semantic cubemap faces along a path");
  c_ren->add_option("--scene", ren.scene)->required()->check(CLI::ExistingFile);
  c_ren->add_option("--path", ren.path)->required()->check(CLI::ExistingFile);
  c_ren->add_option("--face-size", ren.face_size);
  c_ren->add_option("--out", ren.out)->required();
  c_ren->add_option("--manifest", ren.manifest);

  StitchArgs sti;
  auto* c_sti = app.add_subcommand("stitch", "Cubemap faces to equirectangular panoramas");
  c_sti->add_option("--in", sti.in)->required();
  c_sti->add_option("--height", sti.height);
  c_sti->add_option("--out", sti.out)->required();
  c_sti->add_option("--manifest", sti.manifest);

  MetricsArgs met;
  auto* c_met = app.add_subcommand("metrics", "Spherical SSIM between two panorama sets");
  c_met->add_option("--a", met.a)->required()->check(CLI::ExistingDirectory);
  c_met->add_option("--b", met.b)->required()->check(CLI::ExistingDirectory);
  c_met->add_option("--channel", met.channel);
  c_met->add_option("--stride", met.stride);
  c_met->add_option("--external", met.external, "CSV with externally computed FVD/End-FID/LPIPS/QA");
  c_met->add_option("--out", met.out)->required();
  c_met->add_option("--manifest", met.manifest);

  ScoreArgs sco;
  auto* c_sco = app.add_subcommand("score", "Judge predicted answers");
  c_sco->add_option("--truth", sco.truth)->required()->check(CLI::ExistingFile);
  c_sco->add_option("--pred", sco.pred)->required()->check(CLI::ExistingFile);
  c_sco->add_option("--judge-file", sco.judge_file);
  c_sco->add_option("--judge-url", sco.judge_url, "Judge endpoint (default: $JUDGE_ENDPOINT)");
  c_sco->add_option("--out", sco.out)->required();
  c_sco->add_option("--manifest", sco.manifest);

  ValidateArgs val;
  auto* c_val = app.add_subcommand("validate", "Check scenes, path.json and QA files");
  c_val->add_option("--scene", val.scenes);
  c_val->add_option("--path", val.paths);
  c_val->add_option("--qa", val.qa);
  c_val->add_option("--perspective", val.perspective);
  c_val->add_option("--manifest", val.manifest);

  ConvertArgs con;
  auto* c_con = app.add_subcommand("convert-obj", "OBJ plus label table to a scene file");
  c_con->add_option("--obj", con.obj)->required()->check(CLI::ExistingFile);
  c_con->add_option("--labels", con.labels)->required()->check(CLI::ExistingFile);
  c_con->add_option("--scene-id", con.scene_id);
  c_con->add_option("--out", con.out)->required();

  FixturesArgs fix;
  auto* c_fix = app.add_subcommand("make-fixtures", "Write the built-in scenes and sample inputs");
  c_fix->add_option("--out", fix.out)->required();

  RerunArgs rer;
  auto* c_rer = app.add_subcommand("rerun", "Repeat a recorded run");
  c_rer->add_option("--manifest", rer.manifest)->required()->check(CLI::ExistingFile);
  c_rer->add_option("--out", rer.out, "Write outputs here instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    *ctx.out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    *ctx.err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  if (ctx.argv.empty()) ctx.argv = args;

  if (c_fly->parsed()) return cmd_gen_flythrough(ctx, fly);
  if (c_epi->parsed()) return cmd_gen_episode(ctx, epi);
  if (c_ren->parsed()) return cmd_render(ctx, ren);
  if (c_sti->parsed()) return cmd_stitch(ctx, sti);
  if (c_met->parsed()) return cmd_metrics(ctx, met);
  if (c_sco->parsed()) return cmd_score(ctx, sco);
  if (c_val->parsed()) return cmd_validate(ctx, val);
  if (c_con->parsed()) return cmd_convert_obj(ctx, con);
  if (c_fix->parsed()) return cmd_make_fixtures(ctx, fix);
  if (c_rer->parsed()) {
    Context fresh = ctx;
    fresh.argv.clear();
    return cmd_rerun(fresh, rer);
  }
  return kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  try {
    return dispatch(args, ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace wander
