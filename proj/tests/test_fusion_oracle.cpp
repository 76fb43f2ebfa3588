#include <catch2/catch_amalgamated.hpp>

#include "relief/fusion_oracle.hpp"
#include "relief/range_image.hpp"
#include "relief/sensor.hpp"
#include "relief/terrain.hpp"

using namespace relief;

namespace {

// World-frame returns from both sensors at a pose, the way the evaluation
// harness feeds the oracle: raw lidar hits plus unclamped depth pixels,
// restricted to the operating range.
std::vector<Vec3> world_returns(const HeightField& field, const Pose& base) {
  std::vector<Vec3> out;
  const LidarModel lidar = LidarModel::default_model();
  const Pose lidar_pose = base.compose(lidar.mount);
  const PointCloud cloud = lidar_scan(lidar, base, field);
  for (const Vec3& p : cloud.points) {
    const double r = p.norm();
    if (r < kRangeClipMin || r > kRangeClipMax) continue;
    out.push_back(lidar_pose.apply(p));
  }
  const DepthCameraModel cam = DepthCameraModel::default_model();
  const Pose cam_pose = base.compose(cam.mount);
  const DepthImage depth = depth_render(cam, base, field);
  for (int v = 0; v < cam.height; ++v)
    for (int u = 0; u < cam.width; ++u) {
      const std::size_t i = depth.index(u, v);
      if (!depth.valid[i]) continue;
      if (depth.values[i] >= float(kRangeClipMax) - 1e-6f) continue;  // clamped
      out.push_back(cam_pose.apply(
          depth_pixel_to_point(cam, u, v, depth.values[i])));
    }
  return out;
}

Pose base_on(const HeightField& field, double x, double y, double yaw) {
  Pose p;
  p.position = {x, y, field.height_at(x, y) + 0.75};
  p.rotation = rot_z(yaw);
  return p;
}

}  // namespace

TEST_CASE("integrate EMA semantics") {
  ElevationBuffer buf;
  buf.recenter(0, 0);

  buf.integrate({}, 0);
  CHECK_FALSE(buf.any_observed());

  // first observation taken directly
  buf.integrate({Vec3{0.11, 0.11, 0.15}}, 1);
  const int n = buf.size();
  bool found = false;
  for (int ix = 0; ix < n && !found; ++ix)
    for (int iy = 0; iy < n && !found; ++iy)
      if (buf.observed(ix, iy)) {
        CHECK(buf.estimate(ix, iy) == 0.15f);
        found = true;
        // EMA with alpha = 0.5: 0.10 then 0.20 -> 0.15
        ElevationBuffer b2;
        b2.recenter(0, 0);
        b2.integrate({Vec3{0.11, 0.11, 0.10}}, 0);
        b2.integrate({Vec3{0.11, 0.11, 0.20}}, 1);
        CHECK(b2.estimate(ix, iy) == Catch::Approx(0.15));
      }
  CHECK(found);
}

TEST_CASE("per-scan max-z wins before the EMA") {
  ElevationBuffer buf;
  buf.recenter(0, 0);
  buf.integrate({Vec3{0.5, 0.5, 0.1}, Vec3{0.5, 0.5, 0.3}, Vec3{0.5, 0.5, 0.2}},
                0);
  const int n = buf.size();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      if (buf.observed(ix, iy)) CHECK(buf.estimate(ix, iy) == 0.3f);
}

TEST_CASE("query before any integrate flags everything uncovered") {
  ElevationBuffer buf;
  buf.recenter(0, 0);
  const auto res = buf.query(HeightmapSpec{}, Pose::identity());
  for (auto c : res.coverage) CHECK(c == 0);
}

TEST_CASE("query is pure") {
  ElevationBuffer buf;
  buf.recenter(0, 0);
  buf.integrate({Vec3{0.3, 0.1, 0.05}, Vec3{-0.2, 0.4, 0.1}}, 0);
  Pose base;
  base.position = {0, 0, 0.75};
  const auto a = buf.query(HeightmapSpec{}, base);
  const auto b = buf.query(HeightmapSpec{}, base);
  CHECK(a.heightmap.values == b.heightmap.values);
  CHECK(a.coverage == b.coverage);
}

TEST_CASE("recentering shifts content by whole cells") {
  ElevationBuffer buf;
  buf.recenter(0, 0);
  buf.integrate({Vec3{0.11, -0.07, 0.42}}, 0);
  buf.recenter(1.0, 0.5);
  int observed = 0;
  float kept = 0.0f;
  for (int ix = 0; ix < buf.size(); ++ix)
    for (int iy = 0; iy < buf.size(); ++iy)
      if (buf.observed(ix, iy)) {
        ++observed;
        kept = buf.estimate(ix, iy);
      }
  CHECK(observed == 1);
  CHECK(kept == 0.42f);
}

TEST_CASE("pivot-in-place oracle matches ground truth on flat terrain") {
  TerrainSpec tspec;
  tspec.kind = TerrainKind::flat;
  const HeightField field = generate(tspec);

  ElevationBuffer buf;
  buf.recenter(0, 0);
  const int scans = 24;
  for (int k = 0; k < scans; ++k) {
    const Pose base = base_on(field, 0, 0, 2.0 * kPi * k / scans);
    buf.integrate(world_returns(field, base), k);
  }
  const Pose base = base_on(field, 0, 0, 0.0);
  const auto res = buf.query(HeightmapSpec{}, base);
  const Heightmap truth = extract_ground_truth(HeightmapSpec{}, base, field);
  CHECK(mae(res.heightmap, truth) < 0.01);
}

TEST_CASE("pivot-in-place oracle handles a staircase") {
  TerrainSpec tspec;
  tspec.kind = TerrainKind::stairs_up;
  tspec.seed = 6;
  const HeightField field = generate(tspec);

  ElevationBuffer buf;
  buf.recenter(0, 0);
  const int scans = 24;
  for (int k = 0; k < scans; ++k) {
    const Pose base = base_on(field, 0, 0, 2.0 * kPi * k / scans);
    buf.integrate(world_returns(field, base), k);
  }
  const Pose base = base_on(field, 0, 0, 0.0);
  const auto res = buf.query(HeightmapSpec{}, base);
  const Heightmap truth = extract_ground_truth(HeightmapSpec{}, base, field);
  CHECK(mae(res.heightmap, truth) < 0.01);
}
