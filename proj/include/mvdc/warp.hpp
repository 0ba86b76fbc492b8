#pragma once

#include <cstdint>
#include <vector>

#include "mvdc/camera.hpp"
#include "mvdc/image.hpp"

namespace mvdc {

struct DepthMap {
  Grid8 grid;
  CameraParams cam;
};

// One forward-warped view: depth hypotheses, validity, and the source pixel
// that produced each hypothesis (texture fetch relies on it later).
struct WarpedView {
  Grid8 hyp;    // 0 where invalid (sentinel, guarded by valid)
  Grid8 valid;  // 0/1
  Grid<int32_t> src_y;  // -1 where invalid
  Grid<int32_t> src_x;
};

struct HypothesisStack {
  int width = 0;
  int height = 0;
  int k = 0;
  std::vector<Grid8> hyp;
  std::vector<Grid8> valid;
  std::vector<Grid<int32_t>> src_y;
  std::vector<Grid<int32_t>> src_x;
};

// Forward z-buffer warp of a full depth map into the principal view's grid.
// Collisions keep the larger depth pixel (nearer surface); equal-depth ties
// go to the smaller source (y, x). Output is independent of traversal order
// and worker count.
WarpedView warp_depth_map(const DepthMap& src, const CameraParams& principal);

HypothesisStack build_hypothesis_stack(const std::vector<DepthMap>& depths,
                                       const CameraParams& principal);

}  // namespace mvdc
