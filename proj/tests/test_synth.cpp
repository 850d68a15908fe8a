#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lanebev/json_io.hpp"
#include "lanebev/synth.hpp"
#include "test_support.hpp"
#include "warp_consistency.hpp"

using namespace lanebev;
using lanebev::testing::Gen;

namespace {

bool same_rig(const CameraRigd& a, const CameraRigd& b) {
  return a.intrinsics.matrix() == b.intrinsics.matrix() && a.extrinsics.rotation == b.extrinsics.rotation &&
         a.extrinsics.translation == b.extrinsics.translation && a.image_size == b.image_size;
}

}  // namespace

TEST_CASE("no lanes still gives a valid rig") {
  SceneParams p;
  p.n_lanes = 0;
  const SceneRecord s = generate_scene(p);
  CHECK(s.lanes.empty());
  CHECK_NOTHROW(validate(s.rig));
}

TEST_CASE("zero jitter is the canonical rig exactly") {
  SceneParams p;
  p.seed = 1234;
  p.max_curvature = 2e-4;
  CHECK(same_rig(generate_scene(p).rig, canonical_rig()));
  p.jitter_rotation_deg = 1.0;
  CHECK(!same_rig(generate_scene(p).rig, canonical_rig()));
}

TEST_CASE("flat ground has exactly zero height") {
  SceneParams p;
  p.max_curvature = 3e-4;
  p.seed = 5;
  for (const auto& lane : generate_scene(p).lanes)
    for (const auto& pt : lane.points) CHECK(pt.z() == 0.0);
}

TEST_CASE("lanes follow the parametric model") {
  Gen gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    SceneParams p;
    p.n_lanes = gen.integer(1, 6);
    p.lane_spacing = gen.uniform(2.8, 4.0);
    p.max_curvature = gen.uniform(0, 3e-4);
    p.hill_amplitude = gen.uniform(0, 2);
    p.hill_wavelength = gen.uniform(40, 200);
    p.seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30));
    const SceneRecord s = generate_scene(p);
    REQUIRE(static_cast<int>(s.lanes.size()) == p.n_lanes);

    // Recover c2 from the first lane: y(103) - y(3) = c2 (103^2 - 3^2).
    const auto& l0 = s.lanes[0].points;
    const double c2 = (l0.back().y() - l0.front().y()) / (103.0 * 103.0 - 9.0);
    CHECK(std::abs(c2) <= p.max_curvature);
    for (int k = 0; k < p.n_lanes; ++k) {
      const auto& pts = s.lanes[k].points;
      CHECK(s.lanes[k].id == k + 1);
      REQUIRE(pts.size() == 101);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double x = 3.0 + static_cast<double>(i);
        CHECK(pts[i].x() == x);
        const double y = (k - (p.n_lanes - 1) / 2.0) * p.lane_spacing + c2 * x * x;
        CHECK(std::abs(pts[i].y() - y) < 1e-9);
        CHECK(std::abs(pts[i].z() - p.hill_amplitude * std::sin(2 * std::numbers::pi * x / p.hill_wavelength)) <
              1e-12);
      }
    }
    // Lanes keep their order, so they never cross.
    if (p.lanes_separated())
      for (int k = 1; k < p.n_lanes; ++k)
        for (std::size_t i = 0; i < 101; ++i) CHECK(s.lanes[k].points[i].y() > s.lanes[k - 1].points[i].y());
  }
}

TEST_CASE("same seed gives a byte-identical record") {
  SceneParams p;
  p.n_lanes = 5;
  p.max_curvature = 3e-4;
  p.hill_amplitude = 1.5;
  p.jitter_rotation_deg = 1.0;
  p.jitter_translation = 0.2;
  p.seed = 77;
  const std::string a = dump_json(scene_to_json(generate_scene(p)));
  CHECK(a == dump_json(scene_to_json(generate_scene(p))));
  p.seed = 78;
  CHECK(a != dump_json(scene_to_json(generate_scene(p))));
}

TEST_CASE("scene parameter validation") {
  SceneParams p;
  p.n_lanes = -1;
  CHECK_THROWS_AS(generate_scene(p), Error);
  p = {};
  p.lane_spacing = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.hill_wavelength = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.max_curvature = 1e-4;
  CHECK(p.lanes_separated());
  p.max_curvature = 2e-3;
  CHECK(!p.lanes_separated());
}

TEST_CASE("uniform pattern renders uniformly over the visible ground") {
  const CameraRigd rig = canonical_rig();
  const GridSpec extent;
  const Image img = render_ground_pattern(rig, Image(40, 200, 1, 0.7f), extent, rig.image_size);
  int lit = 0;
  for (int v = 0; v < img.height(); ++v)
    for (int u = 0; u < img.width(); ++u) {
      const float value = img.at(v, u);
      if (value == 0.0f) continue;
      ++lit;
      CHECK(value == doctest::Approx(0.7f));
    }
  CHECK(lit > 10000);
  // Sky above the horizon stays black; the bottom centre sees road.
  CHECK(img.at(200, 512) == 0.0f);
  CHECK(img.at(560, 512) == doctest::Approx(0.7f));
}

TEST_CASE("a marked cell appears at its projected centre") {
  Gen gen(22);
  GridSpec extent;
  extent.x_min = 3;
  extent.x_max = 23;
  extent.y_min = -5;
  extent.y_max = 5;
  const double res = 0.05;
  for (int trial = 0; trial < 5; ++trial) {
    const CameraRigd rig = gen.rig();
    Image pattern(200, 400);
    // Gaussian mark at a random ground point, several pattern pixels wide.
    const double gx = gen.uniform(8, 15), gy = gen.uniform(-2, 2);
    for (int r = 0; r < 400; ++r)
      for (int c = 0; c < 200; ++c) {
        const double x = 3 + (r + 0.5) * res, y = -5 + (c + 0.5) * res;
        pattern.at(r, c) = static_cast<float>(std::exp(-((x - gx) * (x - gx) + (y - gy) * (y - gy)) / 0.02));
      }
    const Image img = render_ground_pattern(rig, pattern, extent, rig.image_size);
    const Eigen::Vector2d expected = project_ground_point(rig, gx, gy);
    double sw = 0, su = 0, sv = 0;
    for (int v = 0; v < img.height(); ++v)
      for (int u = 0; u < img.width(); ++u) {
        const double w = img.at(v, u);
        sw += w;
        su += w * u;
        sv += w * v;
      }
    REQUIRE(sw > 0);
    // Perspective skews the blob slightly, so the centroid sits within half a pixel.
    CHECK((Eigen::Vector2d(su / sw, sv / sw) - expected).norm() < 0.5);
  }
}

TEST_CASE("rendering with A then warping to B matches rendering with B") {
  Gen gen(23);
  for (int trial = 0; trial < 3; ++trial) {
    const CameraRigd a = gen.rig(), b = gen.rig();
    const auto r = lanebev::testing::two_path_difference(a, b);
    MESSAGE("two-path mean abs difference " << r.mean_abs_diff << " over " << r.pixels << " px");
    CHECK(r.pixels > 50000);
    CHECK(r.mean_abs_diff < 2.0);
    // A three pixel warp error breaks the bound.
    CHECK(lanebev::testing::two_path_difference(a, b, 5.0, 30.0, 3.0).mean_abs_diff > 2.0);
  }
}

TEST_CASE("checkerboard squares alternate") {
  GridSpec extent;
  extent.x_min = 0;
  extent.x_max = 4;
  extent.y_min = -2;
  extent.y_max = 2;
  const Image p = checkerboard_pattern(extent, 0.5, 1.0);
  CHECK(p.width() == 8);
  CHECK(p.height() == 8);
  CHECK(p.at(0, 0) != p.at(0, 2));
  CHECK(p.at(0, 0) == p.at(2, 2));
  CHECK(p.at(0, 0) == p.at(1, 1));
  CHECK_THROWS_AS(checkerboard_pattern(extent, 0, 1), Error);
}
