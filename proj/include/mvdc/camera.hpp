#pragma once

#include <array>
#include <string>

#include "mvdc/error.hpp"

namespace mvdc {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

// Pinhole camera: pixel = dehom(A * (R * X + t)). Depth range bounds the
// 8-bit depth-pixel encoding for this viewpoint.
struct CameraParams {
  std::string id;
  Mat3 A{};
  Mat3 R{};
  Vec3 t{};
  double z_min = 0.0;
  double z_max = 0.0;
};

struct WorldPoint {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};

struct PixelCoord {
  double x = 0.0;
  double y = 0.0;
};

// Throws ValidationError unless R is orthonormal with det +1 (within r_tol),
// A is invertible and 0 < z_min < z_max.
void validate_camera(const CameraParams& cam, double r_tol = 1e-9);

CameraParams make_camera(std::string id, const Mat3& A, const Mat3& R,
                         const Vec3& t, double z_min, double z_max);

// Shared-intrinsics 1D-parallel rig member at x-position x.
CameraParams parallel_camera(std::string id, double focal, double cx,
                             double cy, double x, double z_min, double z_max);

double disparity_from_depth(double z, double f, double delta_l);
double depth_from_pixel(int d, double z_min, double z_max);
// Values outside [z_min, z_max] clamp; *clamped reports it when non-null.
int pixel_from_depth(double z, double z_min, double z_max,
                     bool* clamped = nullptr);

PixelCoord project(const CameraParams& cam, const WorldPoint& p);
WorldPoint backproject(const CameraParams& cam, const PixelCoord& px,
                       double z);
PixelCoord warp_pixel(const CameraParams& src, const CameraParams& dst,
                      const PixelCoord& px, double z);

// Non-throwing warp used by the dense passes; false when the point projects
// to infinity or behind the target camera.
bool try_warp_pixel(const CameraParams& src, const CameraParams& dst,
                    const PixelCoord& px, double z, PixelCoord* out);

Vec3 camera_center(const CameraParams& cam);
double baseline_distance(const CameraParams& a, const CameraParams& b);

}  // namespace mvdc
