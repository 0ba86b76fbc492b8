#include "mvdc/evalkit.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "mvdc/error.hpp"
#include "mvdc/kernels.hpp"
#include "mvdc/io_formats.hpp"
#include "mvdc/parallel.hpp"

namespace mvdc {

uint64_t hash_cell(uint64_t seed, uint64_t i, uint64_t j) {
  uint64_t x = seed * 0x9E3779B97F4A7C15ull ^ i * 0xBF58476D1CE4E5B9ull ^
               j * 0x94D049BB133111EBull;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

double hash01(uint64_t seed, uint64_t i, uint64_t j) {
  return static_cast<double>(hash_cell(seed, i, j) >> 11) /
         static_cast<double>(1ull << 53);
}

double gaussian_sample(uint64_t seed, uint64_t counter) {
  double u1 = (static_cast<double>(hash_cell(seed, counter, 0) >> 11) + 0.5) /
              static_cast<double>(1ull << 53);
  double u2 = static_cast<double>(hash_cell(seed, counter, 1) >> 11) /
              static_cast<double>(1ull << 53);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void validate_scene_config(const SceneConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) {
    throw ConfigError("scene dimensions must be positive");
  }
  if (!(cfg.focal > 0.0)) throw ConfigError("focal length must be positive");
  if (!(cfg.z_min > 0.0) || !(cfg.z_min < cfg.z_max)) {
    throw ConfigError("need 0 < z_min < z_max");
  }
  if (cfg.camera_count < 1) throw ConfigError("need at least one camera");
  if (!(cfg.cam_spacing > 0.0)) {
    throw ConfigError("camera spacing must be positive");
  }
  auto check_layer = [&](const SceneLayer& l, const std::string& what) {
    if (!(l.z > cfg.z_min) || !(l.z < cfg.z_max)) {
      throw ConfigError(what + " depth outside (z_min, z_max)");
    }
    if (l.cell < 1) throw ConfigError(what + " cell size must be >= 1");
    if (l.amp < 0.0) throw ConfigError(what + " amplitude must be >= 0");
  };
  check_layer(cfg.background, "background");
  for (size_t i = 0; i < cfg.layers.size(); ++i) {
    check_layer(cfg.layers[i], "layer " + std::to_string(i));
  }
}

SceneConfig layers_scene() {
  SceneConfig cfg;
  cfg.camera_count = 5;
  cfg.cam_x0 = 0.3;
  cfg.cam_spacing = 0.1;
  cfg.background =
      {8.0, -1e9, 1e9, -1e9, 1e9, 7, 16, {90, 100, 120}, 60.0, -1e9, 5.35};
  cfg.layers = {
      {2.5, -1e9, -0.45, -1e9, 1e9, 41, 16, {220, 55, 50}, 70.0, -0.95, 1e9},
      {10.0 / 3.0, -1e9, 0.15, -1e9, 1e9, 42, 12, {60, 170, 190}, 70.0, -1e9,
       1e9},
      {4.0, -1e9, 0.85, -1e9, 1e9, 43, 10, {230, 200, 60}, 70.0, -1e9, 1e9},
      {5.0, -1e9, 1.55, -1e9, 1e9, 44, 8, {70, 70, 180}, 70.0, -1e9, 1e9},
  };
  return cfg;
}

SceneConfig stripes_scene() {
  SceneConfig cfg;
  cfg.camera_count = 3;
  cfg.cam_x0 = 0.0;
  cfg.cam_spacing = 0.05;
  cfg.background =
      {20.0 / 3.0, -1e9, 1e9, -1e9, 1e9, 7, 16, {90, 100, 120}, 70.0, -1e9,
       1e9};
  cfg.layers = {
      {5.0, -9.0, 9.0, -1.30, -0.55, 11, 24, {140, 95, 70}, 80.0, -1e9, 1e9},
      {4.0, -9.0, 9.0, -0.25, 0.30, 22, 19, {90, 140, 100}, 90.0, -1e9, 1e9},
      {20.0 / 6.0, -9.0, 9.0, 0.60, 1.40, 33, 16, {160, 150, 80}, 80.0, -1e9,
       1e9},
  };
  return cfg;
}

double scene_pose_x(const SceneConfig& cfg, int index) {
  return cfg.cam_x0 + cfg.cam_spacing * index;
}

CameraParams scene_camera_at(const SceneConfig& cfg, const std::string& id,
                             double pose_x) {
  double cx = (cfg.width - 1) / 2.0;
  double cy = (cfg.height - 1) / 2.0;
  return parallel_camera(id, cfg.focal, cx, cy, pose_x, cfg.z_min, cfg.z_max);
}

CameraParams scene_camera(const SceneConfig& cfg, int index) {
  if (index < 0 || index >= cfg.camera_count) {
    throw ConfigError("camera index outside the rig");
  }
  return scene_camera_at(cfg, "cam" + std::to_string(index),
                         scene_pose_x(cfg, index));
}

namespace {

// Snaps a scene-unit coordinate onto the pixel-footprint lattice of a layer
// so every rig camera sees identical geometry.
double snap_extent(double e, double p) { return std::nearbyint(e / p) * p; }

std::array<uint8_t, 3> cell_color(const SceneLayer& l, double focal, double u,
                                  double v) {
  double p = l.z / focal;
  double cell = l.cell * p;
  bool flat = u <= l.flat_lo || u >= l.flat_hi;
  std::array<uint8_t, 3> out{};
  int64_t cu = static_cast<int64_t>(std::floor(u / cell));
  int64_t cv = static_cast<int64_t>(std::floor(v / cell));
  uint64_t ci = static_cast<uint64_t>(cu) & 0xFFFFFFFull;
  uint64_t cj = static_cast<uint64_t>(cv) & 0xFFFFFFFull;
  for (int ch = 0; ch < 3; ++ch) {
    double val = l.base[ch];
    if (!flat) {
      double h = hash01(l.seed + ch, ci, cj);
      val = l.base[ch] + l.amp * (h - 0.5);
    }
    double r = std::nearbyint(val);
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    out[ch] = static_cast<uint8_t>(r);
  }
  return out;
}

}  // namespace

RenderedView gen_scene(const SceneConfig& cfg, double pose_x) {
  validate_scene_config(cfg);
  const int w = cfg.width;
  const int h = cfg.height;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const int nl = static_cast<int>(cfg.layers.size());

  struct Snapped {
    double x0, x1, y0, y1, z;
  };
  std::vector<Snapped> ext(nl);
  for (int li = 0; li < nl; ++li) {
    const SceneLayer& l = cfg.layers[li];
    double p = l.z / cfg.focal;
    ext[li] = {snap_extent(l.x0, p), snap_extent(l.x1, p),
               snap_extent(l.y0, p), snap_extent(l.y1, p), l.z};
  }

  RenderedView out;
  out.texture = TextureImage(w, h);
  out.depth = Grid8(w, h, 0);

  parallel_chunks(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      double diry = (y - cy) / cfg.focal;
      for (int x = 0; x < w; ++x) {
        double dirx = (x - cx) / cfg.focal;
        double zbest = cfg.background.z;
        int lbest = -1;
        for (int li = 0; li < nl; ++li) {
          double z = ext[li].z;
          if (!(z < zbest)) continue;
          double u = pose_x + dirx * z;
          double v = diry * z;
          if (u >= ext[li].x0 && u < ext[li].x1 && v >= ext[li].y0 &&
              v < ext[li].y1) {
            zbest = z;
            lbest = li;
          }
        }
        const SceneLayer& l = lbest < 0 ? cfg.background : cfg.layers[lbest];
        double u = pose_x + dirx * zbest;
        double v = diry * zbest;
        std::array<uint8_t, 3> rgb = cell_color(l, cfg.focal, u, v);
        uint8_t* px = out.texture.px(y, x);
        px[0] = rgb[0];
        px[1] = rgb[1];
        px[2] = rgb[2];
        out.depth.at(y, x) = static_cast<uint8_t>(
            pixel_from_depth(zbest, cfg.z_min, cfg.z_max));
      }
    }
  });
  return out;
}

Grid8 add_awgn(const Grid8& depth, double sigma_n2, uint64_t seed) {
  if (sigma_n2 < 0.0) throw DomainError("noise variance must be >= 0");
  Grid8 out(depth.width, depth.height);
  double scale = 255.0 * std::sqrt(sigma_n2);
  parallel_chunks(depth.height, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < depth.width; ++x) {
        uint64_t idx = static_cast<uint64_t>(y) * depth.width + x;
        double n = gaussian_sample(seed, idx);
        long v = std::lround(depth.at(y, x) + scale * n);
        if (v < 0) v = 0;
        if (v > 255) v = 255;
        out.at(y, x) = static_cast<uint8_t>(v);
      }
    }
  });
  return out;
}

namespace {

double psnr_from_sse(uint64_t sse, size_t n) {
  if (sse == 0) return 99.0;
  double mse = static_cast<double>(sse) / static_cast<double>(n);
  double v = 10.0 * std::log10(255.0 * 255.0 / mse);
  return v > 99.0 ? 99.0 : v;
}

}  // namespace

double psnr(const Grid8& a, const Grid8& b) {
  if (!a.same_size(b)) throw ConfigError("psnr: dimension mismatch");
  uint64_t sse =
      kern::active_ops().sse_u8(a.data.data(), b.data.data(), a.size());
  return psnr_from_sse(sse, a.size());
}

double psnr(const TextureImage& a, const TextureImage& b) {
  if (!a.same_size(b)) throw ConfigError("psnr: dimension mismatch");
  uint64_t sse =
      kern::active_ops().sse_u8(a.data.data(), b.data.data(), a.data.size());
  return psnr_from_sse(sse, a.data.size());
}

double mask_aware_psnr(const TextureImage& a, const TextureImage& b,
                       const Grid8& mask) {
  if (!a.same_size(b) || mask.width != a.width || mask.height != a.height) {
    throw ConfigError("psnr: dimension mismatch");
  }
  uint64_t sse = 0;
  size_t n = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (mask.at(y, x) != 0) continue;
      const uint8_t* pa = a.px(y, x);
      const uint8_t* pb = b.px(y, x);
      for (int c = 0; c < 3; ++c) {
        int d = static_cast<int>(pa[c]) - static_cast<int>(pb[c]);
        sse += static_cast<uint64_t>(d * d);
      }
      n += 3;
    }
  }
  if (n == 0) throw DomainError("psnr: empty evaluation set");
  return psnr_from_sse(sse, n);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_layer(const SceneLayer& l) {
  std::ostringstream ss;
  ss << fmt(l.z) << " " << fmt(l.x0) << " " << fmt(l.x1) << " " << fmt(l.y0)
     << " " << fmt(l.y1) << " " << l.seed << " " << l.cell << " "
     << static_cast<int>(l.base[0]) << " " << static_cast<int>(l.base[1])
     << " " << static_cast<int>(l.base[2]) << " " << fmt(l.amp) << " "
     << fmt(l.flat_lo) << " " << fmt(l.flat_hi);
  return ss.str();
}

}  // namespace

std::string serialize_scene_config(const SceneConfig& cfg) {
  std::ostringstream ss;
  ss << "width " << cfg.width << "\n";
  ss << "height " << cfg.height << "\n";
  ss << "focal " << fmt(cfg.focal) << "\n";
  ss << "z_min " << fmt(cfg.z_min) << "\n";
  ss << "z_max " << fmt(cfg.z_max) << "\n";
  ss << "cameras " << cfg.camera_count << "\n";
  ss << "cam_x0 " << fmt(cfg.cam_x0) << "\n";
  ss << "cam_spacing " << fmt(cfg.cam_spacing) << "\n";
  ss << "background " << fmt_layer(cfg.background) << "\n";
  for (const SceneLayer& l : cfg.layers) {
    ss << "layer " << fmt_layer(l) << "\n";
  }
  return ss.str();
}

SceneConfig parse_scene_config(const std::string& text) {
  SceneConfig cfg;
  cfg.layers.clear();
  std::istringstream in(text);
  std::string line;
  size_t offset = 0;
  bool saw_background = false;
  while (std::getline(in, line)) {
    size_t line_offset = offset;
    offset += line.size() + 1;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto want = [&](auto& v) {
      if (!(ls >> v)) {
        throw ParseError("bad value for key '" + key + "'", line_offset);
      }
    };
    auto read_layer = [&]() {
      SceneLayer l;
      int r = 0, g = 0, b = 0;
      want(l.z);
      want(l.x0);
      want(l.x1);
      want(l.y0);
      want(l.y1);
      want(l.seed);
      want(l.cell);
      want(r);
      want(g);
      want(b);
      want(l.amp);
      want(l.flat_lo);
      want(l.flat_hi);
      if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
        throw ParseError("layer base color outside [0,255]", line_offset);
      }
      l.base = {static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                static_cast<uint8_t>(b)};
      return l;
    };
    if (key == "width") {
      want(cfg.width);
    } else if (key == "height") {
      want(cfg.height);
    } else if (key == "focal") {
      want(cfg.focal);
    } else if (key == "z_min") {
      want(cfg.z_min);
    } else if (key == "z_max") {
      want(cfg.z_max);
    } else if (key == "cameras") {
      want(cfg.camera_count);
    } else if (key == "cam_x0") {
      want(cfg.cam_x0);
    } else if (key == "cam_spacing") {
      want(cfg.cam_spacing);
    } else if (key == "background") {
      cfg.background = read_layer();
      saw_background = true;
    } else if (key == "layer") {
      cfg.layers.push_back(read_layer());
    } else {
      throw ParseError("unknown key '" + key + "'", line_offset);
    }
  }
  if (!saw_background) throw ParseError("missing background line", offset);
  validate_scene_config(cfg);
  return cfg;
}

SceneConfig load_scene_config(const std::string& path) {
  return parse_scene_config(read_file_bytes(path));
}

void save_scene_config(const SceneConfig& cfg, const std::string& path) {
  write_file_bytes(path, serialize_scene_config(cfg));
}

}  // namespace mvdc
