#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "wander/config.hpp"
#include "wander/errors.hpp"
#include "wander/image_io.hpp"
#include "wander/io.hpp"
#include "wander/manifest.hpp"
#include "wander/path_json.hpp"
#include "wander/planner.hpp"
#include "wander/scene_builder.hpp"
#include "wander/spatial_index.hpp"

using namespace wander;

TEST_SUITE("io") {
  TEST_CASE("png round trip") {
    testing::TempDir dir("png");
    std::mt19937_64 rng(4);
    Image<std::uint16_t> d(13, 7, 1);
    for (auto& v : d.data()) v = static_cast<std::uint16_t>(rng());
    write_png(dir / "d.png", d);
    const PngInfo info = read_png_info(dir / "d.png");
    CHECK(info.width == 13);
    CHECK(info.height == 7);
    CHECK(info.bit_depth == 16);
    CHECK(read_png16(dir / "d.png") == d);
    CHECK_THROWS_AS(read_png8(dir / "d.png"), ParseError);

    Image<std::uint8_t> rgb(5, 3, 3);
    for (auto& v : rgb.data()) v = static_cast<std::uint8_t>(rng());
    write_png(dir / "c.png", rgb);
    CHECK(read_png8(dir / "c.png") == rgb);
    CHECK(read_png_info(dir / "c.png").channels == 3);
    CHECK(encode_png(rgb) == read_text_file(dir / "c.png"));
    CHECK_THROWS_AS(read_png16(dir / "missing.png"), IoError);
  }

  TEST_CASE("atomic write") {
    testing::TempDir dir("atomic");
    const auto p = dir / "nested/deeper/f.txt";
    write_file_atomic(p, "one");
    write_file_atomic(p, "two");
    CHECK(read_text_file(p) == "two");
    int files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(p.parent_path())) ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(read_text_file(dir / "nope"), IoError);
  }

  TEST_CASE("config round trip and unknown keys") {
    Config c;
    c.flythrough.frames = 33;
    c.render.face_size = 64;
    c.nav.move_m = 0.5;
    const Config back = parse_config(config_text(c));
    CHECK(config_text(back) == config_text(c));
    CHECK(back.flythrough.frames == 33);
    CHECK(parse_config("{}").render.face_size == Config{}.render.face_size);
    CHECK(parse_config(R"({"render": {"face_size": 32}})").render.face_size == 32);
    CHECK_THROWS_AS(parse_config(R"({"render": {"face_sise": 32}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"rendering": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"render": {"face_size": "big"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1"), ConfigError);
  }

  TEST_CASE("manifest round trip") {
    RunManifest m;
    m.command = "gen-flythrough";
    m.argv = {"gen-flythrough", "--scene", "a.json"};
    m.root_seed = 0xffffffffffffffffULL;
    m.scene_id = "apartment";
    m.exit_code = 2;
    ManifestItem ok;
    ok.id = "sit_0";
    ok.seed = 123456789012345ULL;
    ok.outputs = {"sit_0/path.json"};
    ok.notes = {{"length_m", "2.5"}};
    ManifestItem bad;
    bad.id = "sit_1";
    bad.ok = false;
    bad.error_kind = "GenerationFailed";
    bad.stage = "no-path";
    bad.message = "no route";
    m.items = {ok, bad};
    const std::string text = manifest_text(m);
    const RunManifest back = parse_manifest(text);
    CHECK(manifest_text(back) == text);
    CHECK(back.root_seed == m.root_seed);
    CHECK(back.items[1].stage == "no-path");
    CHECK_THROWS_AS(parse_manifest("{"), ParseError);
  }

  TEST_CASE("path json round trip") {
    const SceneMesh mesh = fixtures::empty_room();
    const SpatialIndex index(mesh);
    const StandableRegion region = compute_standable(mesh, index, {});
    const auto specs = std::vector<SituationSpec>{
        {"chair_look", SituationClass::standing, Pose{Vec3(6, 6, 1.6), UnitVec3(1, 0, 0)},
                       mesh.instances.begin()->first, "look at the corner"}};
    const Trajectory t = generate_flythrough(mesh, index, region, specs[0], {}, 7);
    const Trajectory back = parse_path_json(path_json_text(t));
    REQUIRE(back.frame_count() == 21);
    for (int i = 0; i < 21; ++i) {
      const auto k = static_cast<std::size_t>(i);
      CHECK((back.frames[k].position - t.frames[k].position).cwiseAbs().maxCoeff() <= 1e-7);
      CHECK((back.frames[k].direction.vec() - t.frames[k].direction.vec()).cwiseAbs().maxCoeff() <= 1e-7);
      CHECK(std::abs(back.u[k] - t.u[k]) <= 1e-7);
    }
    CHECK(std::abs(back.total_length - t.total_length) <= 1e-7 * std::max(1.0, t.total_length));
    CHECK(back.seed == t.seed);
  }

  TEST_CASE("sig9 rounding is idempotent") {
    for (double v : {0.1, 1.0 / 3.0, 12345.678901234, -2.5e-7}) {
      CHECK(round_sig9(round_sig9(v)) == round_sig9(v));
      CHECK(std::abs(round_sig9(v) - v) <= 1e-8 * std::abs(v));
    }
  }
}
