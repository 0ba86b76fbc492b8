#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvdc/camera.hpp"
#include "mvdc/consistency.hpp"
#include "mvdc/enhance.hpp"
#include "mvdc/image.hpp"
#include "mvdc/warp.hpp"

namespace mvdc {

struct SynthConfig {
  double alpha_weight = 0.5;
  double tau_color = 20.0;
  Weighting weighting = Weighting::Uniform;
  int inpaint_iters = 2000;
};

struct FuseCandidate {
  std::array<uint8_t, 3> rgb{};
  double weight = 1.0;
  double baseline = 0.0;  // distance from source camera to the virtual one
  int view = 0;
};

// Candidates within tau_color of each other (max pairwise RGB distance) fuse
// to a weighted mean; otherwise the nearest-camera candidate is copied.
std::optional<std::array<uint8_t, 3>> fuse_pixel(
    std::span<const FuseCandidate> cands, double tau_color);

struct SynthesisResult {
  TextureImage image;
  Grid8 holes;  // 255 where nothing projected (before inpainting)
  ConsistencyMap cons;
};

SynthesisResult synthesize_view(const std::vector<DepthMap>& depths,
                                const std::vector<TextureImage>& textures,
                                const CameraParams& virt,
                                const SynthConfig& cfg);

// Fills masked pixels from the outside in: each pass averages the known
// 4-neighbors, repeated until every per-pixel change drops below 0.5.
TextureImage inpaint(const TextureImage& img, const Grid8& mask,
                     int max_iters = 2000);

// Two-view reference: z-buffer warps, per-channel averaging where the views
// agree within tau_color, nearest-depth copy where they do not.
SynthesisResult baseline_two_view(const DepthMap& d0, const TextureImage& t0,
                                  const DepthMap& d1, const TextureImage& t1,
                                  const CameraParams& virt,
                                  const SynthConfig& cfg);

}  // namespace mvdc
