#pragma once

#include <cstdint>
#include <vector>

#include "mvdc/camera.hpp"
#include "mvdc/consistency.hpp"
#include "mvdc/warp.hpp"

namespace mvdc {

enum class Weighting : uint8_t {
  Uniform,
  InverseBaseline,
};

struct EnhanceConfig {
  double alpha_weight = 0.5;
  double stop_rel = 0.01;
  int max_sweeps = 10;
  Weighting weighting = Weighting::Uniform;
};

struct SweepLogEntry {
  int sweep = 0;
  double mean_energy = 0.0;       // mean accepted loop energy
  double accepted_fraction = 0.0; // accepted / tested pixels
  int64_t unresolved = 0;         // extreme-error pixels this sweep
};

struct EnhanceResult {
  std::vector<DepthMap> maps;
  std::vector<Grid8> unresolved;  // 255 where the last sweep found no subset
  std::vector<SweepLogEntry> log;
};

// Replacement value for one pixel: weighted mean of the accepted hypotheses,
// weights normalized by their maximum so equal weights reduce to a plain mean.
uint8_t update_pixel(std::span<const uint8_t> values,
                     std::span<const double> weights);

EnhanceResult enhance_depth_maps(const std::vector<DepthMap>& maps,
                                 const EnhanceConfig& cfg);

}  // namespace mvdc
