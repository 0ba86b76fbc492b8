#include "mvdc/warp.hpp"

#include <atomic>
#include <cmath>

#include "mvdc/error.hpp"
#include "mvdc/parallel.hpp"

namespace mvdc {

namespace {

struct Mat3x3 {
  double m[3][3];
};

Mat3x3 mul(const Mat3x3& a, const Mat3x3& b) {
  Mat3x3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) s += a.m[i][l] * b.m[l][j];
      r.m[i][j] = s;
    }
  return r;
}

Mat3x3 from(const Mat3& a) {
  Mat3x3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a[i][j];
  return r;
}

Mat3x3 transposed(const Mat3& a) {
  Mat3x3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a[j][i];
  return r;
}

Mat3x3 inverse_intrinsics(const Mat3& a) {
  double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) < 1e-15) throw ConfigError("singular intrinsic matrix");
  Mat3x3 r{};
  r.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  r.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  r.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  r.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  r.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  r.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  r.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  r.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  r.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return r;
}

// h = z * (M * [x y 1]) + b maps a source pixel at source depth z to target
// homogeneous coordinates; M = A_p R_p R_sT A_s^-1, b = A_p (t_p - R_p R_sT t_s).
struct WarpTransform {
  Mat3x3 M;
  double b[3];
};

WarpTransform make_transform(const CameraParams& src,
                             const CameraParams& dst) {
  Mat3x3 rrt = mul(from(dst.R), transposed(src.R));
  WarpTransform t{};
  t.M = mul(from(dst.A), mul(rrt, inverse_intrinsics(src.A)));
  double c[3];
  for (int i = 0; i < 3; ++i) {
    double rt = rrt.m[i][0] * src.t[0] + rrt.m[i][1] * src.t[1] +
                rrt.m[i][2] * src.t[2];
    c[i] = dst.t[i] - rt;
  }
  for (int i = 0; i < 3; ++i) {
    t.b[i] = dst.A[i][0] * c[0] + dst.A[i][1] * c[1] + dst.A[i][2] * c[2];
  }
  return t;
}

}  // namespace

WarpedView warp_depth_map(const DepthMap& src, const CameraParams& principal) {
  const int w = src.grid.width;
  const int h = src.grid.height;
  if (w < 1 || h < 1) throw ConfigError("empty depth map");
  if (static_cast<size_t>(w) * h != src.grid.data.size()) {
    throw ConfigError("depth map size mismatch");
  }

  WarpTransform tf = make_transform(src.cam, principal);
  double zlut[256];
  for (int d = 0; d < 256; ++d) {
    zlut[d] = depth_from_pixel(d, src.cam.z_min, src.cam.z_max);
  }

  std::vector<uint64_t> buf(static_cast<size_t>(w) * h, 0);
  uint64_t* bp = buf.data();

  parallel_chunks(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        uint8_t d = src.grid.at(y, x);
        double z = zlut[d];
        double px = static_cast<double>(x);
        double py = static_cast<double>(y);
        double h0 = z * (tf.M.m[0][0] * px + tf.M.m[0][1] * py + tf.M.m[0][2]) +
                    tf.b[0];
        double h1 = z * (tf.M.m[1][0] * px + tf.M.m[1][1] * py + tf.M.m[1][2]) +
                    tf.b[1];
        double h2 = z * (tf.M.m[2][0] * px + tf.M.m[2][1] * py + tf.M.m[2][2]) +
                    tf.b[2];
        if (!(h2 > 1e-12)) continue;
        long xt = std::lround(h0 / h2);
        long yt = std::lround(h1 / h2);
        if (xt < 0 || xt >= w || yt < 0 || yt >= h) continue;
        uint64_t key =
            ((static_cast<uint64_t>(d) + 1) << 48) |
            ((0xFFFFFFull - static_cast<uint64_t>(y)) << 24) |
            (0xFFFFFFull - static_cast<uint64_t>(x));
        std::atomic_ref<uint64_t> cell(bp[static_cast<size_t>(yt) * w + xt]);
        uint64_t prev = cell.load(std::memory_order_relaxed);
        while (key > prev &&
               !cell.compare_exchange_weak(prev, key,
                                           std::memory_order_relaxed)) {
        }
      }
    }
  });

  WarpedView out;
  out.hyp = Grid8(w, h, 0);
  out.valid = Grid8(w, h, 0);
  out.src_y = Grid<int32_t>(w, h, -1);
  out.src_x = Grid<int32_t>(w, h, -1);
  parallel_chunks(h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        uint64_t key = bp[static_cast<size_t>(y) * w + x];
        if (key == 0) continue;
        out.hyp.at(y, x) = static_cast<uint8_t>((key >> 48) - 1);
        out.valid.at(y, x) = 1;
        out.src_y.at(y, x) =
            static_cast<int32_t>(0xFFFFFFull - ((key >> 24) & 0xFFFFFFull));
        out.src_x.at(y, x) =
            static_cast<int32_t>(0xFFFFFFull - (key & 0xFFFFFFull));
      }
    }
  });
  return out;
}

HypothesisStack build_hypothesis_stack(const std::vector<DepthMap>& depths,
                                       const CameraParams& principal) {
  if (depths.size() < 2) {
    throw ConfigError("need at least 2 depth maps for a hypothesis stack");
  }
  if (depths.size() > 8) {
    throw ConfigError("at most 8 reference views supported");
  }
  const int w = depths[0].grid.width;
  const int h = depths[0].grid.height;
  for (const DepthMap& d : depths) {
    if (d.grid.width != w || d.grid.height != h) {
      throw ConfigError("depth map resolutions differ");
    }
  }
  HypothesisStack stack;
  stack.width = w;
  stack.height = h;
  stack.k = static_cast<int>(depths.size());
  for (const DepthMap& d : depths) {
    WarpedView v = warp_depth_map(d, principal);
    stack.hyp.push_back(std::move(v.hyp));
    stack.valid.push_back(std::move(v.valid));
    stack.src_y.push_back(std::move(v.src_y));
    stack.src_x.push_back(std::move(v.src_x));
  }
  return stack;
}

}  // namespace mvdc
