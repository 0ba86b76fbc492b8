#include "mvdc/synth.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

#include "mvdc/error.hpp"
#include "mvdc/parallel.hpp"

namespace mvdc {

std::optional<std::array<uint8_t, 3>> fuse_pixel(
    std::span<const FuseCandidate> cands, double tau_color) {
  if (cands.empty()) return std::nullopt;
  if (tau_color < 0.0) throw DomainError("tau_color must be >= 0");

  double max_d2 = 0.0;
  for (size_t i = 0; i < cands.size(); ++i) {
    for (size_t j = i + 1; j < cands.size(); ++j) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        double d = static_cast<double>(cands[i].rgb[c]) - cands[j].rgb[c];
        d2 += d * d;
      }
      if (d2 > max_d2) max_d2 = d2;
    }
  }

  std::array<uint8_t, 3> out{};
  if (max_d2 <= tau_color * tau_color) {
    double wmax = 0.0;
    for (const FuseCandidate& c : cands) {
      if (!(c.weight > 0.0)) throw DomainError("fuse weights must be > 0");
      if (c.weight > wmax) wmax = c.weight;
    }
    for (int ch = 0; ch < 3; ++ch) {
      double num = 0.0;
      double den = 0.0;
      for (const FuseCandidate& c : cands) {
        double w = c.weight / wmax;
        num += w * c.rgb[ch];
        den += w;
      }
      long v = std::lround(num / den);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      out[ch] = static_cast<uint8_t>(v);
    }
    return out;
  }

  const FuseCandidate* best = &cands[0];
  for (const FuseCandidate& c : cands) {
    if (c.baseline < best->baseline ||
        (c.baseline == best->baseline && c.view < best->view)) {
      best = &c;
    }
  }
  return best->rgb;
}

namespace {

std::vector<double> ref_weights(const std::vector<DepthMap>& depths,
                                const CameraParams& virt,
                                Weighting weighting) {
  const size_t k = depths.size();
  std::vector<double> w(k, 1.0);
  if (weighting == Weighting::Uniform) return w;
  double min_base = 0.0;
  bool any = false;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      double b = baseline_distance(depths[i].cam, depths[j].cam);
      if (b > 0.0 && (!any || b < min_base)) {
        min_base = b;
        any = true;
      }
    }
  }
  double floor_dist = any ? 0.5 * min_base : 1.0;
  for (size_t i = 0; i < k; ++i) {
    double b = baseline_distance(depths[i].cam, virt);
    w[i] = 1.0 / std::max(b, floor_dist);
  }
  return w;
}

}  // namespace

SynthesisResult synthesize_view(const std::vector<DepthMap>& depths,
                                const std::vector<TextureImage>& textures,
                                const CameraParams& virt,
                                const SynthConfig& cfg) {
  const int k = static_cast<int>(depths.size());
  if (textures.size() != depths.size()) {
    throw ConfigError("texture/depth count mismatch");
  }
  if (k < 2) throw ConfigError("synthesis needs at least 2 reference views");
  for (int i = 0; i < k; ++i) {
    if (textures[i].width != depths[i].grid.width ||
        textures[i].height != depths[i].grid.height) {
      throw ConfigError("texture/depth resolution mismatch");
    }
  }
  if (cfg.tau_color < 0.0) throw ConfigError("tau_color must be >= 0");
  if (cfg.alpha_weight < 0.0 || cfg.alpha_weight > 1.0) {
    throw ConfigError("alpha_weight must be in [0,1]");
  }

  HypothesisStack stack = build_hypothesis_stack(depths, virt);
  SynthesisResult res;
  res.cons = test_image(stack, cfg.alpha_weight);
  res.image = TextureImage(stack.width, stack.height);
  res.holes = Grid8(stack.width, stack.height, 0);

  std::vector<double> wts = ref_weights(depths, virt, cfg.weighting);
  std::vector<double> bases(k);
  for (int i = 0; i < k; ++i) {
    bases[i] = baseline_distance(depths[i].cam, virt);
  }

  parallel_chunks(stack.height, [&](int y0, int y1) {
    FuseCandidate cands[8];
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < stack.width; ++x) {
        int n = 0;
        if (res.cons.status.at(y, x) ==
            static_cast<uint8_t>(PixelStatus::Accepted)) {
          uint8_t bits = res.cons.subset.at(y, x);
          for (int i = 0; i < k; ++i) {
            if (!(bits & (1u << i))) continue;
            int32_t sy = stack.src_y[i].at(y, x);
            int32_t sx = stack.src_x[i].at(y, x);
            if (sy < 0 || sx < 0) continue;
            const uint8_t* tp = textures[i].px(sy, sx);
            cands[n].rgb = {tp[0], tp[1], tp[2]};
            cands[n].weight = wts[i];
            cands[n].baseline = bases[i];
            cands[n].view = i;
            ++n;
          }
        }
        auto fused =
            fuse_pixel(std::span<const FuseCandidate>(cands, n), cfg.tau_color);
        uint8_t* px = res.image.px(y, x);
        if (fused) {
          px[0] = (*fused)[0];
          px[1] = (*fused)[1];
          px[2] = (*fused)[2];
        } else {
          px[0] = px[1] = px[2] = 0;
          res.holes.at(y, x) = 255;
        }
      }
    }
  });

  res.image = inpaint(res.image, res.holes, cfg.inpaint_iters);
  return res;
}

TextureImage inpaint(const TextureImage& img, const Grid8& mask,
                     int max_iters) {
  const int w = img.width;
  const int h = img.height;
  if (mask.width != w || mask.height != h) {
    throw ConfigError("inpaint: mask dimensions differ from image");
  }
  size_t masked = 0;
  for (size_t p = 0; p < mask.size(); ++p) {
    if (mask.data[p] != 0) ++masked;
  }
  if (masked == 0) return img;
  if (masked == mask.size()) {
    throw ValidationError("inpaint: image is fully masked");
  }

  const size_t n = static_cast<size_t>(w) * h;
  std::vector<double> cur(n * 3), next(n * 3);
  std::vector<uint8_t> filled_cur(n), filled_next(n);
  for (size_t p = 0; p < n; ++p) {
    filled_cur[p] = mask.data[p] == 0;
    for (int c = 0; c < 3; ++c) cur[p * 3 + c] = img.data[p * 3 + c];
  }

  for (int it = 0; it < max_iters; ++it) {
    std::atomic<uint64_t> max_change_bits{0};
    std::atomic<bool> newly_filled{false};
    std::atomic<bool> any_unfilled{false};

    parallel_chunks(h, [&](int y0, int y1) {
      double local_max = 0.0;
      bool local_new = false;
      bool local_unfilled = false;
      for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < w; ++x) {
          size_t p = static_cast<size_t>(y) * w + x;
          if (mask.data[p] == 0) {
            next[p * 3] = cur[p * 3];
            next[p * 3 + 1] = cur[p * 3 + 1];
            next[p * 3 + 2] = cur[p * 3 + 2];
            filled_next[p] = 1;
            continue;
          }
          double sum[3] = {0.0, 0.0, 0.0};
          int cnt = 0;
          auto take = [&](int ny, int nx) {
            size_t q = static_cast<size_t>(ny) * w + nx;
            if (!filled_cur[q]) return;
            sum[0] += cur[q * 3];
            sum[1] += cur[q * 3 + 1];
            sum[2] += cur[q * 3 + 2];
            ++cnt;
          };
          if (y > 0) take(y - 1, x);
          if (y + 1 < h) take(y + 1, x);
          if (x > 0) take(y, x - 1);
          if (x + 1 < w) take(y, x + 1);
          if (cnt == 0) {
            next[p * 3] = cur[p * 3];
            next[p * 3 + 1] = cur[p * 3 + 1];
            next[p * 3 + 2] = cur[p * 3 + 2];
            filled_next[p] = filled_cur[p];
            if (!filled_cur[p]) local_unfilled = true;
            continue;
          }
          for (int c = 0; c < 3; ++c) {
            double v = sum[c] / cnt;
            if (filled_cur[p]) {
              double ch = std::abs(v - cur[p * 3 + c]);
              if (ch > local_max) local_max = ch;
            }
            next[p * 3 + c] = v;
          }
          if (!filled_cur[p]) local_new = true;
          filled_next[p] = 1;
        }
      }
      uint64_t bits;
      std::memcpy(&bits, &local_max, sizeof bits);
      uint64_t prev = max_change_bits.load(std::memory_order_relaxed);
      double prev_d;
      std::memcpy(&prev_d, &prev, sizeof prev_d);
      while (local_max > prev_d &&
             !max_change_bits.compare_exchange_weak(
                 prev, bits, std::memory_order_relaxed)) {
        std::memcpy(&prev_d, &prev, sizeof prev_d);
      }
      if (local_new) newly_filled.store(true, std::memory_order_relaxed);
      if (local_unfilled) any_unfilled.store(true, std::memory_order_relaxed);
    });

    cur.swap(next);
    filled_cur.swap(filled_next);

    double max_change;
    uint64_t bits = max_change_bits.load();
    std::memcpy(&max_change, &bits, sizeof max_change);
    if (!newly_filled.load() && !any_unfilled.load() && max_change < 0.5) {
      break;
    }
  }

  TextureImage out = img;
  for (size_t p = 0; p < n; ++p) {
    if (mask.data[p] == 0) continue;
    for (int c = 0; c < 3; ++c) {
      long v = std::lround(cur[p * 3 + c]);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      out.data[p * 3 + c] = static_cast<uint8_t>(v);
    }
  }
  return out;
}

SynthesisResult baseline_two_view(const DepthMap& d0, const TextureImage& t0,
                                  const DepthMap& d1, const TextureImage& t1,
                                  const CameraParams& virt,
                                  const SynthConfig& cfg) {
  if (t0.width != d0.grid.width || t0.height != d0.grid.height ||
      t1.width != d1.grid.width || t1.height != d1.grid.height ||
      d0.grid.width != d1.grid.width || d0.grid.height != d1.grid.height) {
    throw ConfigError("baseline synthesis: resolution mismatch");
  }
  WarpedView w0 = warp_depth_map(d0, virt);
  WarpedView w1 = warp_depth_map(d1, virt);

  const int w = d0.grid.width;
  const int h = d0.grid.height;
  SynthesisResult res;
  res.image = TextureImage(w, h);
  res.holes = Grid8(w, h, 0);

  double tau2 = cfg.tau_color * cfg.tau_color;
  parallel_chunks(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        bool v0 = w0.valid.at(y, x) != 0;
        bool v1 = w1.valid.at(y, x) != 0;
        uint8_t* px = res.image.px(y, x);
        if (!v0 && !v1) {
          px[0] = px[1] = px[2] = 0;
          res.holes.at(y, x) = 255;
          continue;
        }
        const uint8_t* c0 =
            v0 ? t0.px(w0.src_y.at(y, x), w0.src_x.at(y, x)) : nullptr;
        const uint8_t* c1 =
            v1 ? t1.px(w1.src_y.at(y, x), w1.src_x.at(y, x)) : nullptr;
        if (v0 && v1) {
          double d2 = 0.0;
          for (int c = 0; c < 3; ++c) {
            double d = static_cast<double>(c0[c]) - c1[c];
            d2 += d * d;
          }
          if (d2 <= tau2) {
            for (int c = 0; c < 3; ++c) {
              px[c] = static_cast<uint8_t>(
                  std::lround((static_cast<int>(c0[c]) + c1[c]) / 2.0));
            }
          } else {
            const uint8_t* nearer =
                w0.hyp.at(y, x) >= w1.hyp.at(y, x) ? c0 : c1;
            px[0] = nearer[0];
            px[1] = nearer[1];
            px[2] = nearer[2];
          }
        } else {
          const uint8_t* only = v0 ? c0 : c1;
          px[0] = only[0];
          px[1] = only[1];
          px[2] = only[2];
        }
      }
    }
  });

  res.image = inpaint(res.image, res.holes, cfg.inpaint_iters);
  return res;
}

}  // namespace mvdc
