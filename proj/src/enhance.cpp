#include "mvdc/enhance.hpp"

#include <cmath>

#include "mvdc/error.hpp"
#include "mvdc/parallel.hpp"

namespace mvdc {

uint8_t update_pixel(std::span<const uint8_t> values,
                     std::span<const double> weights) {
  if (values.empty()) throw DomainError("update_pixel needs >= 1 value");
  if (values.size() != weights.size()) {
    throw DomainError("update_pixel: value/weight count mismatch");
  }
  double wmax = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("update_pixel: weights must be > 0");
    if (w > wmax) wmax = w;
  }
  // Normalizing by the largest weight makes equal weights reduce to an exact
  // plain mean.
  double num = 0.0;
  double den = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double w = weights[i] / wmax;
    num += w * values[i];
    den += w;
  }
  long v = std::lround(num / den);
  if (v < 0) v = 0;
  if (v > 255) v = 255;
  return static_cast<uint8_t>(v);
}

namespace {

// 1 / max(baseline, floor) per view, floor = half the smallest inter-camera
// baseline so the principal's own zero-distance hypothesis keeps the largest
// finite weight.
std::vector<double> view_weights(const std::vector<DepthMap>& maps,
                                 const CameraParams& principal,
                                 Weighting weighting) {
  const size_t k = maps.size();
  std::vector<double> w(k, 1.0);
  if (weighting == Weighting::Uniform) return w;
  double min_base = 0.0;
  bool any = false;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      double b = baseline_distance(maps[i].cam, maps[j].cam);
      if (b > 0.0 && (!any || b < min_base)) {
        min_base = b;
        any = true;
      }
    }
  }
  double floor_dist = any ? 0.5 * min_base : 1.0;
  for (size_t i = 0; i < k; ++i) {
    double b = baseline_distance(maps[i].cam, principal);
    w[i] = 1.0 / std::max(b, floor_dist);
  }
  return w;
}

}  // namespace

EnhanceResult enhance_depth_maps(const std::vector<DepthMap>& maps,
                                 const EnhanceConfig& cfg) {
  const int k = static_cast<int>(maps.size());
  if (k < 3) throw ConfigError("enhancement needs at least 3 depth maps");
  if (!(cfg.stop_rel > 0.0)) throw ConfigError("stop_rel must be > 0");
  if (cfg.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
  if (cfg.alpha_weight < 0.0 || cfg.alpha_weight > 1.0) {
    throw ConfigError("alpha_weight must be in [0,1]");
  }

  EnhanceResult res;
  res.maps = maps;
  res.unresolved.assign(k, Grid8());

  std::vector<bool> have_model(k, false);
  std::vector<CovarianceModel> model(k);
  const size_t total_px = static_cast<size_t>(maps[0].grid.width) *
                          maps[0].grid.height * k;
  double prev_mean = 0.0;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    int64_t energy_sum = 0;
    int64_t accepted = 0;
    int64_t unresolved = 0;

    for (int i = 0; i < k; ++i) {
      HypothesisStack stack =
          build_hypothesis_stack(res.maps, res.maps[i].cam);
      if (!have_model[i]) {
        model[i] = estimate_covariance(stack);
        have_model[i] = true;
      }
      ConsistencyMap cmap = test_image(stack, cfg.alpha_weight, model[i]);
      std::vector<double> wts =
          view_weights(res.maps, res.maps[i].cam, cfg.weighting);

      Grid8& grid = res.maps[i].grid;
      Grid8& mask = res.unresolved[i];
      mask = Grid8(grid.width, grid.height, 0);

      std::vector<int64_t> chunk_energy(grid.height, 0);
      std::vector<int64_t> chunk_accepted(grid.height, 0);
      std::vector<int64_t> chunk_unresolved(grid.height, 0);
      parallel_chunks(grid.height, [&](int y0, int y1) {
        uint8_t vals[8];
        double ws[8];
        for (int y = y0; y < y1; ++y) {
          for (int x = 0; x < grid.width; ++x) {
            if (cmap.status.at(y, x) ==
                static_cast<uint8_t>(PixelStatus::Accepted)) {
              uint8_t bits = cmap.subset.at(y, x);
              int m = 0;
              for (int j = 0; j < k; ++j) {
                if (bits & (1u << j)) {
                  vals[m] = stack.hyp[j].at(y, x);
                  ws[m] = wts[j];
                  ++m;
                }
              }
              grid.at(y, x) = update_pixel(std::span<const uint8_t>(vals, m),
                                           std::span<const double>(ws, m));
              chunk_energy[y] += cmap.energy.at(y, x);
              ++chunk_accepted[y];
            } else {
              mask.at(y, x) = 255;
              ++chunk_unresolved[y];
            }
          }
        }
      });
      for (int y = 0; y < grid.height; ++y) {
        energy_sum += chunk_energy[y];
        accepted += chunk_accepted[y];
        unresolved += chunk_unresolved[y];
      }
    }

    double mean_energy =
        accepted > 0 ? static_cast<double>(energy_sum) / accepted : 0.0;
    res.log.push_back({sweep, mean_energy,
                       static_cast<double>(accepted) / total_px, unresolved});

    bool stop;
    if (sweep == 1) {
      stop = mean_energy == 0.0;
    } else if (prev_mean == 0.0) {
      stop = mean_energy == 0.0;
    } else {
      stop = std::abs(mean_energy - prev_mean) / prev_mean < cfg.stop_rel;
    }
    prev_mean = mean_energy;
    if (stop) break;
  }
  return res;
}

}  // namespace mvdc
