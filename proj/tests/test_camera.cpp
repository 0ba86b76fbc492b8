#include <doctest.h>

#include <cmath>
#include <random>

#include "mvdc/camera.hpp"
#include "mvdc/error.hpp"

using namespace mvdc;

namespace {

CameraParams simple_cam(double x) {
  return parallel_camera("c", 500.0, 320.0, 240.0, x, 1.0, 10.0);
}

}  // namespace

TEST_SUITE("camera") {

TEST_CASE("disparity is focal times baseline over depth") {
  CHECK(disparity_from_depth(448.251, 1732.875, 5.0) ==
        doctest::Approx(19.3292931861836337).epsilon(1e-15));
  CHECK(disparity_from_depth(2.0, 400.0, 0.1) == doctest::Approx(20.0));
  CHECK(disparity_from_depth(4.0, 400.0, 0.1) ==
        doctest::Approx(disparity_from_depth(2.0, 400.0, 0.1) / 2.0));
}

TEST_CASE("depth pixel decodes along the inverse-depth ramp") {
  CHECK(depth_from_pixel(0, 1.0, 10.0) == doctest::Approx(10.0));
  CHECK(depth_from_pixel(255, 1.0, 10.0) == doctest::Approx(1.0));
  CHECK(depth_from_pixel(128, 1.0, 10.0) ==
        doctest::Approx(1.81236673773987207).epsilon(1e-15));
}

TEST_CASE("pixel from depth inverts decode for all 256 values") {
  const double z_min = 2.0, z_max = 10.0;
  for (int d = 0; d < 256; ++d) {
    double z = depth_from_pixel(d, z_min, z_max);
    CHECK(pixel_from_depth(z, z_min, z_max) == d);
  }
}

TEST_CASE("out of range depth clamps and flags") {
  bool clamped = false;
  CHECK(pixel_from_depth(0.5, 1.0, 10.0, &clamped) == 255);
  CHECK(clamped);
  clamped = false;
  CHECK(pixel_from_depth(50.0, 1.0, 10.0, &clamped) == 0);
  CHECK(clamped);
  clamped = true;
  pixel_from_depth(5.0, 1.0, 10.0, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("projection matches hand computation") {
  CameraParams cam = simple_cam(0.0);
  PixelCoord px = project(cam, {1.0, 1.0, 5.0});
  CHECK(px.x == doctest::Approx(420.0));
  CHECK(px.y == doctest::Approx(340.0));
}

TEST_CASE("projection at zero homogeneous depth throws") {
  CameraParams cam = simple_cam(0.0);
  CHECK_THROWS_AS(project(cam, {1.0, 1.0, 0.0}), ProjectionError);
  PixelCoord out;
  CHECK_FALSE(try_warp_pixel(cam, cam, {0.0, 0.0}, 0.0, &out));
}

TEST_CASE("backproject then project recovers the pixel") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.0, 639.0), uy(0.0, 479.0),
      uz(1.5, 9.5), ut(-0.4, 0.4);
  for (int i = 0; i < 1000; ++i) {
    CameraParams cam = simple_cam(ut(rng));
    PixelCoord px{ux(rng), uy(rng)};
    double z = uz(rng);
    WorldPoint p = backproject(cam, px, z);
    PixelCoord back = project(cam, p);
    CHECK(std::abs(back.x - px.x) <= 1e-6);
    CHECK(std::abs(back.y - px.y) <= 1e-6);
  }
}

TEST_CASE("parallel rig warp shifts x only by the disparity") {
  CameraParams a = simple_cam(0.0);
  CameraParams b = simple_cam(0.1);
  for (double z : {1.0, 2.5, 5.0, 10.0}) {
    PixelCoord w = warp_pixel(a, b, {100.0, 200.0}, z);
    CHECK(w.y == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(w.x - 100.0 ==
          doctest::Approx(-disparity_from_depth(z, 500.0, 0.1)).epsilon(1e-9));
  }
}

TEST_CASE("identity warp is exact") {
  CameraParams cam = simple_cam(0.2);
  PixelCoord w = warp_pixel(cam, cam, {123.0, 45.0}, 3.0);
  CHECK(w.x == doctest::Approx(123.0).epsilon(1e-12));
  CHECK(w.y == doctest::Approx(45.0).epsilon(1e-12));
}

TEST_CASE("camera center and baseline") {
  CameraParams a = simple_cam(0.0);
  CameraParams b = simple_cam(5.0);
  Vec3 ca = camera_center(a);
  CHECK(ca[0] == doctest::Approx(0.0));
  Vec3 cb = camera_center(b);
  CHECK(cb[0] == doctest::Approx(5.0));
  CHECK(baseline_distance(a, b) == doctest::Approx(5.0));
}

TEST_CASE("validation rejects broken parameters") {
  CameraParams cam = simple_cam(0.0);
  CHECK_NOTHROW(validate_camera(cam));

  CameraParams bad_r = cam;
  bad_r.R[0][0] = 2.0;
  CHECK_THROWS_AS(validate_camera(bad_r), ValidationError);

  CameraParams mirror = cam;
  mirror.R[0][0] = -1.0;  // det -1, still orthonormal
  CHECK_THROWS_AS(validate_camera(mirror), ValidationError);

  CameraParams bad_a = cam;
  bad_a.A[0][0] = 0.0;
  bad_a.A[0][1] = 0.0;
  bad_a.A[0][2] = 0.0;
  CHECK_THROWS_AS(validate_camera(bad_a), ValidationError);

  CameraParams bad_z = cam;
  bad_z.z_min = -1.0;
  CHECK_THROWS_AS(validate_camera(bad_z), ValidationError);
  bad_z = cam;
  bad_z.z_min = bad_z.z_max;
  CHECK_THROWS_AS(validate_camera(bad_z), ValidationError);
}

TEST_CASE("make_camera validates") {
  Mat3 A{{{500, 0, 320}, {0, 500, 240}, {0, 0, 1}}};
  Mat3 R{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  CHECK_NOTHROW(make_camera("ok", A, R, {0, 0, 0}, 1.0, 10.0));
  R[1][1] = 3.0;
  CHECK_THROWS_AS(make_camera("bad", A, R, {0, 0, 0}, 1.0, 10.0),
                  ValidationError);
}

}  // TEST_SUITE
