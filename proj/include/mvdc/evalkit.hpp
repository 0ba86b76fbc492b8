#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mvdc/camera.hpp"
#include "mvdc/image.hpp"
#include "mvdc/warp.hpp"

namespace mvdc {

// Fronto-parallel textured rectangle. Extents are in scene units and get
// snapped to the layer's pixel-footprint lattice (z / focal) at render time
// so that every camera of the rig samples the same geometry. cell is the
// texture cell size in lattice units; outside [flat_lo, flat_hi) in u the
// layer renders its base color only.
struct SceneLayer {
  double z = 1.0;
  double x0 = -1e9, x1 = 1e9;
  double y0 = -1e9, y1 = 1e9;
  uint64_t seed = 0;
  int cell = 16;
  std::array<uint8_t, 3> base{};
  double amp = 0.0;
  double flat_lo = -1e9;
  double flat_hi = 1e9;
};

struct SceneConfig {
  int width = 512;
  int height = 384;
  double focal = 400.0;
  double z_min = 2.0;
  double z_max = 10.0;
  int camera_count = 3;
  double cam_x0 = 0.0;
  double cam_spacing = 0.1;
  SceneLayer background;  // extents ignored, always covers the frame
  std::vector<SceneLayer> layers;
};

void validate_scene_config(const SceneConfig& cfg);

SceneConfig layers_scene();
SceneConfig stripes_scene();

// x translation of camera i; poses between/outside rig cameras are allowed.
double scene_pose_x(const SceneConfig& cfg, int index);
CameraParams scene_camera(const SceneConfig& cfg, int index);
CameraParams scene_camera_at(const SceneConfig& cfg, const std::string& id,
                             double pose_x);

struct RenderedView {
  TextureImage texture;
  Grid8 depth;
};

RenderedView gen_scene(const SceneConfig& cfg, double pose_x);

// Counter-based hash utilities: stable across platforms and thread counts.
uint64_t hash_cell(uint64_t seed, uint64_t i, uint64_t j);
double hash01(uint64_t seed, uint64_t i, uint64_t j);
// Standard normal from a (seed, counter) pair via Box-Muller.
double gaussian_sample(uint64_t seed, uint64_t counter);

// d' = clamp(round(d + 255 * n), 0, 255) with n ~ N(0, sigma_n2) per pixel.
Grid8 add_awgn(const Grid8& depth, double sigma_n2, uint64_t seed);

double psnr(const Grid8& a, const Grid8& b);
double psnr(const TextureImage& a, const TextureImage& b);
// PSNR over pixels where mask == 0.
double mask_aware_psnr(const TextureImage& a, const TextureImage& b,
                       const Grid8& mask);

std::string serialize_scene_config(const SceneConfig& cfg);
SceneConfig parse_scene_config(const std::string& text);
SceneConfig load_scene_config(const std::string& path);
void save_scene_config(const SceneConfig& cfg, const std::string& path);

}  // namespace mvdc
