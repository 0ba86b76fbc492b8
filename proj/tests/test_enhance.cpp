#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mvdc/enhance.hpp"
#include "mvdc/error.hpp"
#include "mvdc/evalkit.hpp"

using namespace mvdc;

namespace {

SceneConfig small_stripes() {
  SceneConfig cfg = stripes_scene();
  cfg.width = 256;
  cfg.height = 192;
  return cfg;
}

std::vector<DepthMap> rig_depths(const SceneConfig& cfg) {
  std::vector<DepthMap> maps;
  for (int i = 0; i < cfg.camera_count; ++i) {
    RenderedView v = gen_scene(cfg, scene_pose_x(cfg, i));
    maps.push_back({std::move(v.depth), scene_camera(cfg, i)});
  }
  return maps;
}

double rms_diff(const Grid8& a, const Grid8& b) {
  double s = 0.0;
  for (size_t p = 0; p < a.size(); ++p) {
    double d = static_cast<double>(a.data[p]) - b.data[p];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

TEST_SUITE("enhance") {

TEST_CASE("pixel update is the weighted rounded mean") {
  std::array<uint8_t, 3> v3{100, 102, 104};
  std::array<double, 3> w3{1.0, 1.0, 1.0};
  CHECK(update_pixel(v3, w3) == 102);

  std::array<uint8_t, 2> v2{100, 110};
  std::array<double, 2> w2{2.0, 1.0};
  CHECK(update_pixel(v2, w2) == 103);

  // Scaling all weights changes nothing.
  std::array<double, 2> w2b{0.4, 0.2};
  CHECK(update_pixel(v2, w2b) == 103);

  std::array<uint8_t, 1> v1{42};
  std::array<double, 1> w1{3.0};
  CHECK(update_pixel(v1, w1) == 42);
}

TEST_CASE("pixel update rejects malformed input") {
  std::array<uint8_t, 2> v{1, 2};
  std::array<double, 1> w1{1.0};
  CHECK_THROWS_AS(update_pixel(v, w1), DomainError);
  std::array<double, 2> w0{1.0, 0.0};
  CHECK_THROWS_AS(update_pixel(v, w0), DomainError);
  CHECK_THROWS_AS(update_pixel(std::span<const uint8_t>{},
                               std::span<const double>{}),
                  DomainError);
}

TEST_CASE("configuration is validated") {
  SceneConfig cfg = small_stripes();
  std::vector<DepthMap> maps = rig_depths(cfg);
  maps.pop_back();
  CHECK_THROWS_AS(enhance_depth_maps(maps, {}), ConfigError);

  maps = rig_depths(cfg);
  EnhanceConfig bad;
  bad.alpha_weight = 1.5;
  CHECK_THROWS_AS(enhance_depth_maps(maps, bad), ConfigError);
  bad = {};
  bad.max_sweeps = 0;
  CHECK_THROWS_AS(enhance_depth_maps(maps, bad), ConfigError);
  bad = {};
  bad.stop_rel = 0.0;
  CHECK_THROWS_AS(enhance_depth_maps(maps, bad), ConfigError);
}

TEST_CASE("clean maps converge in one sweep without change") {
  SceneConfig cfg = small_stripes();
  std::vector<DepthMap> maps = rig_depths(cfg);
  EnhanceResult res = enhance_depth_maps(maps, {});
  REQUIRE(res.log.size() == 1);
  CHECK(res.log[0].mean_energy == 0.0);
  CHECK(res.log[0].sweep == 1);
  for (size_t i = 0; i < maps.size(); ++i) {
    CHECK(res.maps[i].grid.data == maps[i].grid.data);
  }
}

TEST_CASE("noise on one map is repaired without disturbing the others") {
  SceneConfig cfg = small_stripes();
  std::vector<DepthMap> clean = rig_depths(cfg);
  std::vector<DepthMap> maps = clean;
  double sigma_n2 = (6.0 / 255.0) * (6.0 / 255.0);
  maps[1].grid = add_awgn(clean[1].grid, sigma_n2, 99);
  double before = psnr(maps[1].grid, clean[1].grid);

  EnhanceConfig cfg_e;
  cfg_e.alpha_weight = 1.0;
  EnhanceResult res = enhance_depth_maps(maps, cfg_e);

  double after = psnr(res.maps[1].grid, clean[1].grid);
  CHECK(after > before + 1.0);
  CHECK(rms_diff(res.maps[0].grid, clean[0].grid) <= 1.0);
  CHECK(rms_diff(res.maps[2].grid, clean[2].grid) <= 1.0);
  CHECK(rms_diff(res.maps[1].grid, clean[1].grid) <
        rms_diff(maps[1].grid, clean[1].grid));
}

TEST_CASE("sweeps reduce energy and unresolved pixels") {
  SceneConfig cfg = small_stripes();
  std::vector<DepthMap> maps = rig_depths(cfg);
  double sigma_n2 = (4.0 / 255.0) * (4.0 / 255.0);
  for (size_t i = 0; i < maps.size(); ++i) {
    maps[i].grid = add_awgn(maps[i].grid, sigma_n2, 50 + i);
  }
  EnhanceConfig cfg_e;
  cfg_e.alpha_weight = 1.0;
  EnhanceResult res = enhance_depth_maps(maps, cfg_e);

  REQUIRE(res.log.size() >= 2);
  CHECK(res.log.front().mean_energy > res.log.back().mean_energy);
  CHECK(res.log.back().unresolved <= res.log.front().unresolved);
  CHECK(res.log.back().accepted_fraction >=
        res.log.front().accepted_fraction);
  for (const SweepLogEntry& e : res.log) {
    CHECK(e.accepted_fraction >= 0.0);
    CHECK(e.accepted_fraction <= 1.0);
  }
  for (size_t i = 1; i < res.log.size(); ++i) {
    CHECK(res.log[i].sweep == res.log[i - 1].sweep + 1);
  }

  REQUIRE(res.unresolved.size() == maps.size());
  int64_t marked = 0;
  for (const Grid8& u : res.unresolved) {
    CHECK(u.width == cfg.width);
    for (uint8_t v : u.data) {
      CHECK((v == 0 || v == 255));
      marked += v == 255;
    }
  }
  CHECK(marked == res.log.back().unresolved);
}

TEST_CASE("sweep cap is honored") {
  SceneConfig cfg = small_stripes();
  std::vector<DepthMap> maps = rig_depths(cfg);
  for (size_t i = 0; i < maps.size(); ++i) {
    maps[i].grid = add_awgn(maps[i].grid, 0.002, 60 + i);
  }
  EnhanceConfig cfg_e;
  cfg_e.max_sweeps = 2;
  EnhanceResult res = enhance_depth_maps(maps, cfg_e);
  CHECK(res.log.size() <= 2);
}

TEST_CASE("inverse-baseline weighting still repairs noise") {
  SceneConfig cfg = small_stripes();
  std::vector<DepthMap> clean = rig_depths(cfg);
  std::vector<DepthMap> maps = clean;
  for (size_t i = 0; i < maps.size(); ++i) {
    maps[i].grid = add_awgn(clean[i].grid, 0.00025, 70 + i);
  }
  EnhanceConfig cfg_e;
  cfg_e.alpha_weight = 1.0;
  cfg_e.weighting = Weighting::InverseBaseline;
  EnhanceResult res = enhance_depth_maps(maps, cfg_e);
  double gain = psnr(res.maps[1].grid, clean[1].grid) -
                psnr(maps[1].grid, clean[1].grid);
  CHECK(gain > 0.5);
}

}  // TEST_SUITE
