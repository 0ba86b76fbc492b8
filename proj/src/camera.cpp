#include "mvdc/camera.hpp"

#include <cmath>
#include <utility>

namespace mvdc {

namespace {

constexpr double kProjEps = 1e-12;

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse3(const Mat3& m, const std::string& what) {
  double det = det3(m);
  if (std::abs(det) < 1e-15) {
    throw ConfigError("singular matrix: " + what);
  }
  Mat3 r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return r;
}

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Mat3 transpose3(const Mat3& m) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

}  // namespace

void validate_camera(const CameraParams& cam, double r_tol) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int l = 0; l < 3; ++l) dot += cam.R[l][i] * cam.R[l][j];
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - want) > r_tol) {
        throw ValidationError("camera " + cam.id + ": R not orthonormal");
      }
    }
  }
  if (std::abs(det3(cam.R) - 1.0) > 1e-6) {
    throw ValidationError("camera " + cam.id + ": det(R) != +1");
  }
  if (std::abs(det3(cam.A)) < 1e-15) {
    throw ValidationError("camera " + cam.id + ": A singular");
  }
  if (!(cam.z_min > 0.0) || !(cam.z_min < cam.z_max)) {
    throw ValidationError("camera " + cam.id + ": need 0 < z_min < z_max");
  }
}

CameraParams make_camera(std::string id, const Mat3& A, const Mat3& R,
                         const Vec3& t, double z_min, double z_max) {
  CameraParams cam{std::move(id), A, R, t, z_min, z_max};
  validate_camera(cam, 1e-6);
  return cam;
}

CameraParams parallel_camera(std::string id, double focal, double cx,
                             double cy, double x, double z_min, double z_max) {
  Mat3 A{{{focal, 0.0, cx}, {0.0, focal, cy}, {0.0, 0.0, 1.0}}};
  Mat3 R{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  Vec3 t{-x, 0.0, 0.0};
  return make_camera(std::move(id), A, R, t, z_min, z_max);
}

double disparity_from_depth(double z, double f, double delta_l) {
  if (!(z > 0.0) || !(f > 0.0) || !(delta_l > 0.0)) {
    throw DomainError("disparity_from_depth: inputs must be positive");
  }
  return f * delta_l / z;
}

double depth_from_pixel(int d, double z_min, double z_max) {
  if (d < 0 || d > 255) throw DomainError("depth pixel outside [0,255]");
  if (!(z_min > 0.0) || !(z_min < z_max)) {
    throw DomainError("need 0 < z_min < z_max");
  }
  return 1.0 / (d / 255.0 * (1.0 / z_min - 1.0 / z_max) + 1.0 / z_max);
}

int pixel_from_depth(double z, double z_min, double z_max, bool* clamped) {
  if (!(z_min > 0.0) || !(z_min < z_max)) {
    throw DomainError("need 0 < z_min < z_max");
  }
  bool clip = false;
  if (z < z_min) {
    z = z_min;
    clip = true;
  } else if (z > z_max) {
    z = z_max;
    clip = true;
  }
  if (clamped) *clamped = clip;
  double num = 1.0 / z - 1.0 / z_max;
  double den = 1.0 / z_min - 1.0 / z_max;
  long d = std::lround(255.0 * num / den);
  if (d < 0) d = 0;
  if (d > 255) d = 255;
  return static_cast<int>(d);
}

PixelCoord project(const CameraParams& cam, const WorldPoint& p) {
  Vec3 w{p.u, p.v, p.w};
  Vec3 c = mat_vec(cam.R, w);
  c[0] += cam.t[0];
  c[1] += cam.t[1];
  c[2] += cam.t[2];
  Vec3 h = mat_vec(cam.A, c);
  if (std::abs(h[2]) < kProjEps) {
    throw ProjectionError("point projects to infinity for camera " + cam.id);
  }
  return {h[0] / h[2], h[1] / h[2]};
}

WorldPoint backproject(const CameraParams& cam, const PixelCoord& px,
                       double z) {
  if (!(z > 0.0)) throw DomainError("backproject: depth must be positive");
  Mat3 Ainv = inverse3(cam.A, "A of camera " + cam.id);
  Vec3 ray = mat_vec(Ainv, {px.x, px.y, 1.0});
  ray[0] *= z;
  ray[1] *= z;
  ray[2] *= z;
  ray[0] -= cam.t[0];
  ray[1] -= cam.t[1];
  ray[2] -= cam.t[2];
  Vec3 w = mat_vec(transpose3(cam.R), ray);
  return {w[0], w[1], w[2]};
}

PixelCoord warp_pixel(const CameraParams& src, const CameraParams& dst,
                      const PixelCoord& px, double z) {
  return project(dst, backproject(src, px, z));
}

bool try_warp_pixel(const CameraParams& src, const CameraParams& dst,
                    const PixelCoord& px, double z, PixelCoord* out) {
  if (!(z > 0.0)) return false;
  WorldPoint w = backproject(src, px, z);
  Vec3 c = mat_vec(dst.R, {w.u, w.v, w.w});
  c[0] += dst.t[0];
  c[1] += dst.t[1];
  c[2] += dst.t[2];
  Vec3 h = mat_vec(dst.A, c);
  if (h[2] < kProjEps) return false;
  out->x = h[0] / h[2];
  out->y = h[1] / h[2];
  return true;
}

Vec3 camera_center(const CameraParams& cam) {
  Vec3 rt = mat_vec(transpose3(cam.R), cam.t);
  return {-rt[0], -rt[1], -rt[2]};
}

double baseline_distance(const CameraParams& a, const CameraParams& b) {
  Vec3 ca = camera_center(a);
  Vec3 cb = camera_center(b);
  double dx = ca[0] - cb[0];
  double dy = ca[1] - cb[1];
  double dz = ca[2] - cb[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace mvdc
