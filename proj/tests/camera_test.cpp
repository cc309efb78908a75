#include <doctest.h>

#include <random>

#include "view/camera.hpp"
#include "view/sim.hpp"

using namespace view;

TEST_CASE("projection round-trips through de-projection") {
  const SimWorld world = make_default_world(Vec3{0.5, 0.5, 0.0});
  const CameraModel& cam = world.cam;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> height(0.0, 0.5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{coord(rng), coord(rng), height(rng)};
    const PixelPoint px = project(cam, p);
    const Vec3 back = deproject(cam, px, camera_depth(cam, p));
    CHECK((back - p).norm() < 1e-9);
  }
}

TEST_CASE("identity camera projects through the pinhole equations") {
  CameraModel cam;
  cam.fx = 600.0;
  cam.fy = 500.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  const Vec3 p{0.2, -0.1, 2.0};
  const PixelPoint px = project(cam, p);
  CHECK(px.u == doctest::Approx(320.0 + 600.0 * 0.2 / 2.0).epsilon(1e-12));
  CHECK(px.v == doctest::Approx(240.0 + 500.0 * -0.1 / 2.0).epsilon(1e-12));
  CHECK(camera_depth(cam, p) == doctest::Approx(2.0));
}

TEST_CASE("degenerate depths and poses are rejected") {
  CameraModel cam;
  cam.fx = cam.fy = 100.0;
  CHECK_THROWS_AS(deproject(cam, PixelPoint{0.0, 0.0}, 0.0), BadDepthError);
  CHECK_THROWS_AS(deproject(cam, PixelPoint{0.0, 0.0}, -1.0), BadDepthError);
  CHECK_THROWS_AS(project(cam, Vec3{0.0, 0.0, -1.0}), BehindCameraError);

  cam.extrinsic(0, 0) = 2.0;  // not a rotation
  CHECK_THROWS_AS(cam.validate(), ViewError);

  CameraModel flat;
  flat.fx = 0.0;
  CHECK_THROWS_AS(flat.validate(), ViewError);
}
