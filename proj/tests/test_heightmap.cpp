#include <catch2/catch_amalgamated.hpp>

#include "relief/heightmap.hpp"
#include "relief/terrain.hpp"

using namespace relief;

TEST_CASE("default spec geometry") {
  const HeightmapSpec spec;
  CHECK(spec.nx() == 15);
  CHECK(spec.ny() == 11);
  CHECK(spec.point_count() == 165);
  CHECK(spec.local_x(0) == Catch::Approx(-0.29));
  CHECK(spec.local_x(spec.nx() - 1) == Catch::Approx(0.69));
  CHECK(spec.local_y(0) == Catch::Approx(-0.35));
  CHECK(spec.local_y(spec.ny() - 1) == Catch::Approx(0.35));
}

TEST_CASE("fencepost counts across the resolution sweep") {
  for (double res : {0.06, 0.07, 0.08}) {
    HeightmapSpec spec;
    spec.resolution = res;
    const int nx = int(std::lround(0.98 / res)) + 1;
    const int ny = int(std::lround(0.70 / res)) + 1;
    CHECK(spec.nx() == nx);
    CHECK(spec.ny() == ny);
    CHECK(grid_points(spec, Pose::identity()).size() ==
          std::size_t(nx) * ny);
  }
  HeightmapSpec bad;
  bad.resolution = 0.03;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("grid rotates with yaw only") {
  HeightmapSpec spec;
  Pose yawed;
  yawed.rotation = rot_z(kPi / 2.0);
  const auto pts = grid_points(spec, yawed);
  // grid center should sit at base + (0, forward_offset)
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= double(pts.size());
  cy /= double(pts.size());
  CHECK(cx == Catch::Approx(0.0).margin(1e-12));
  CHECK(cy == Catch::Approx(0.2));
}

TEST_CASE("ground truth on flat terrain") {
  TerrainSpec tspec;
  tspec.kind = TerrainKind::flat;
  const HeightField f = generate(tspec);
  const HeightmapSpec spec;

  Pose base;
  const Heightmap zero = extract_ground_truth(spec, base, f);
  for (float v : zero.values) CHECK(v == 0.0f);

  base.position.z = 0.75;
  const Heightmap shifted = extract_ground_truth(spec, base, f);
  for (float v : shifted.values) CHECK(v == Catch::Approx(-0.75));
}

TEST_CASE("ground truth across a step partitions into two levels") {
  // a long run leaves a single riser at x = 3.0; stand just before it
  TerrainSpec tspec;
  tspec.kind = TerrainKind::stairs_up;
  tspec.stair_rise = 0.15;
  tspec.stair_run = 3.0;
  tspec.seed = 1;
  const HeightField f = generate(tspec);
  const HeightmapSpec spec;
  Pose base;
  base.position = {2.9, 0.0, 0.75};
  const Heightmap hm = extract_ground_truth(spec, base, f);
  int low = 0, high = 0;
  for (float v : hm.values) {
    if (std::abs(v + 0.75f) < 1e-5f) ++low;
    else if (std::abs(v + 0.60f) < 1e-5f) ++high;
  }
  CHECK(low + high == spec.point_count());
  CHECK(low > 0);
  CHECK(high > 0);
}

TEST_CASE("ground truth is invariant to base roll and pitch") {
  TerrainSpec tspec;
  tspec.kind = TerrainKind::rough;
  tspec.seed = 8;
  const HeightField f = generate(tspec);
  const HeightmapSpec spec;

  Pose level;
  level.position = {0.5, -0.3, 0.8};
  level.rotation = rot_z(0.7);
  Pose tilted = level;
  tilted.rotation = rot_zyx(0.7, 0.2, -0.15);

  const Heightmap a = extract_ground_truth(spec, level, f);
  const Heightmap b = extract_ground_truth(spec, tilted, f);
  for (std::size_t k = 0; k < a.values.size(); ++k)
    CHECK(a.values[k] == Catch::Approx(b.values[k]).margin(1e-9));
}

TEST_CASE("grid leaving the terrain is an error") {
  TerrainSpec tspec;
  tspec.kind = TerrainKind::flat;
  const HeightField f = generate(tspec);
  Pose base;
  base.position = {5.9, 0.0, 0.75};  // forward grid edge exits the field
  CHECK_THROWS_AS(extract_ground_truth(HeightmapSpec{}, base, f),
                  std::out_of_range);
}

TEST_CASE("mae examples and metric properties") {
  const HeightmapSpec spec;
  Heightmap a(spec), b(spec);
  CHECK(mae(a, b) == 0.0);

  for (auto& v : b.values) v = 0.02f;
  CHECK(mae(a, b) == Catch::Approx(0.02));
  CHECK(mae(b, a) == Catch::Approx(0.02));  // symmetry

  Heightmap half(spec);
  for (std::size_t k = 0; k < half.values.size(); ++k)
    half.values[k] = (k % 2 == 0) ? 0.04f : 0.0f;
  // 83 of 165 cells off by 0.04
  CHECK(mae(half, a) == Catch::Approx(0.04 * 83.0 / 165.0));

  // triangle inequality on random triples
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Heightmap x(spec), y(spec), z(spec);
    for (int k = 0; k < spec.point_count(); ++k) {
      x.values[k] = float(rng.uniform(-1, 1));
      y.values[k] = float(rng.uniform(-1, 1));
      z.values[k] = float(rng.uniform(-1, 1));
    }
    CHECK(mae(x, z) <= mae(x, y) + mae(y, z) + 1e-12);
  }

  HeightmapSpec other;
  other.resolution = 0.08;
  Heightmap c(other);
  CHECK_THROWS_AS(mae(a, c), std::invalid_argument);
}

TEST_CASE("spatial error map") {
  const HeightmapSpec spec;
  Heightmap t(spec);
  std::vector<Heightmap> preds, truths;

  // identical pairs -> zero grid
  preds.assign(3, t);
  truths.assign(3, t);
  for (double v : spatial_error_map(preds, truths)) CHECK(v == 0.0);

  // single pair, one cell off by 0.05
  Heightmap p = t;
  p.values[42] = 0.05f;
  const auto single = spatial_error_map({p}, {t});
  for (std::size_t k = 0; k < single.size(); ++k)
    CHECK(single[k] == Catch::Approx(k == 42 ? 0.05 : 0.0));

  // uniform per-pair errors {0.01, 0.03} -> all cells 0.02
  Heightmap p1 = t, p2 = t;
  for (auto& v : p1.values) v = 0.01f;
  for (auto& v : p2.values) v = 0.03f;
  for (double v : spatial_error_map({p1, p2}, {t, t}))
    CHECK(v == Catch::Approx(0.02));

  CHECK_THROWS_AS(spatial_error_map({}, {}), std::invalid_argument);
}
