#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "relief/range_image.hpp"
#include "relief/sensor.hpp"
#include "relief/terrain.hpp"

using namespace relief;

TEST_CASE("spherical projection axes") {
  const SphericalCoord fwd = spherical_project({1, 0, 0});
  CHECK(fwd.range == Catch::Approx(1.0));
  CHECK(fwd.azimuth == Catch::Approx(0.0));
  CHECK(fwd.inclination == Catch::Approx(0.0));

  const SphericalCoord up = spherical_project({0, 0, 1});
  CHECK(up.range == Catch::Approx(1.0));
  CHECK(up.inclination == Catch::Approx(kPi / 2));
  CHECK(inclination_to_row(up.inclination) == -1);  // outside the FOV

  const SphericalCoord diag = spherical_project({1, 1, 0});
  CHECK(diag.range == Catch::Approx(std::sqrt(2.0)));
  CHECK(diag.azimuth == Catch::Approx(kPi / 4));

  CHECK_THROWS_AS(spherical_project({0, 0, 0}), std::invalid_argument);
}

TEST_CASE("rasterize seam, forward bin and min rule") {
  // exactly behind: phi = pi -> column 0
  CHECK(azimuth_to_column(kPi) == 0);
  // forward: phi = 0 -> column 138
  PointCloud cloud;
  cloud.push({1, 0, 0}, 0, 0);
  RangeImage img = rasterize(cloud);
  CHECK(img.is_valid(35, 138));  // row = floor(52/59*40) = 35
  CHECK(img.at(35, 138) == 1.0f);

  // collision keeps the closer return
  PointCloud collide;
  collide.push({2, 0, 0}, 0, 0);
  collide.push({1, 0, 0}, 0, 0);
  const RangeImage c = rasterize(collide);
  CHECK(c.at(35, 138) == 1.0f);
}

TEST_CASE("row-wise gap fill") {
  RangeImage img;
  img.set(10, 50, 1.0f);
  img.set(10, 52, 3.0f);
  const RangeImage filled = fill_gaps_rowwise(img, 4);
  CHECK(filled.is_valid(10, 51));
  CHECK(filled.at(10, 51) == Catch::Approx(2.0));

  // a 6-pixel gap stays untouched at max_gap 4
  RangeImage wide;
  wide.set(5, 100, 1.0f);
  wide.set(5, 107, 2.0f);
  const RangeImage kept = fill_gaps_rowwise(wide, 4);
  for (int c = 101; c <= 106; ++c) CHECK_FALSE(kept.is_valid(5, c));

  // fully valid row unchanged
  RangeImage full;
  for (int c = 0; c < full.width; ++c) full.set(3, c, 1.5f);
  const RangeImage same = fill_gaps_rowwise(full, 4);
  for (int c = 0; c < full.width; ++c) CHECK(same.at(3, c) == 1.5f);
}

TEST_CASE("gap fill never touches valid pixels") {
  SplitMix64 rng(8);
  RangeImage img;
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (rng.next_double() < 0.6)
        img.set(r, c, float(rng.uniform(0.2, 3.0)));
  const RangeImage out = fill_gaps_rowwise(img, 4);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (img.is_valid(r, c)) {
        CHECK(out.is_valid(r, c));
        CHECK(out.at(r, c) == img.at(r, c));
      }
}

TEST_CASE("nearest fill basics and tie-break") {
  RangeImage single;
  single.set(20, 100, 2.5f);
  const RangeImage all = fill_nearest(single);
  CHECK(all.invalid_count() == 0);
  for (int r = 0; r < all.height; ++r)
    for (int c = 0; c < all.width; ++c) CHECK(all.at(r, c) == 2.5f);

  // equidistant sources: smaller row wins
  RangeImage tie;
  tie.set(0, 3, 1.0f);
  tie.set(2, 3, 2.0f);
  const RangeImage out = fill_nearest(tie);
  CHECK(out.at(1, 3) == 1.0f);

  // smaller column wins at equal row distance
  RangeImage tie2;
  tie2.set(7, 10, 1.25f);
  tie2.set(7, 14, 2.25f);
  const RangeImage out2 = fill_nearest(tie2);
  CHECK(out2.at(7, 12) == 1.25f);

  RangeImage empty;
  CHECK_THROWS_AS(fill_nearest(empty), std::invalid_argument);
}

TEST_CASE("nearest fill picks true euclidean nearest") {
  SplitMix64 rng(31);
  RangeImage img;
  for (int k = 0; k < 60; ++k) {
    const int r = int(rng.next_below(img.height));
    const int c = int(rng.next_below(img.width));
    img.set(r, c, float(rng.uniform(0.2, 3.0)));
  }
  const RangeImage out = fill_nearest(img);
  REQUIRE(out.invalid_count() == 0);

  // brute-force oracle with the same tie-break
  for (int r = 0; r < img.height; r += 7) {
    for (int c = 0; c < img.width; c += 23) {
      if (img.is_valid(r, c)) continue;
      long best_d2 = 1L << 40;
      int br = -1, bc = -1;
      for (int rr = 0; rr < img.height; ++rr)
        for (int cc = 0; cc < img.width; ++cc) {
          if (!img.is_valid(rr, cc)) continue;
          const long d2 =
              long(rr - r) * (rr - r) + long(cc - c) * (cc - c);
          if (d2 < best_d2 ||
              (d2 == best_d2 && (rr < br || (rr == br && cc < bc)))) {
            best_d2 = d2;
            br = rr;
            bc = cc;
          }
        }
      CHECK(out.at(r, c) == img.at(br, bc));
    }
  }
}

TEST_CASE("median filter constant, spike, ramp") {
  RangeImage constant;
  for (int r = 0; r < constant.height; ++r)
    for (int c = 0; c < constant.width; ++c) constant.set(r, c, 2.0f);
  const RangeImage mc = median_filter_3x3(constant);
  for (int r = 0; r < mc.height; ++r)
    for (int c = 0; c < mc.width; ++c) CHECK(mc.at(r, c) == 2.0f);

  RangeImage spike = constant;
  spike.set(20, 100, 9.0f);
  const RangeImage ms = median_filter_3x3(spike);
  CHECK(ms.at(20, 100) == 2.0f);

  // monotone separable ramp: interior pixels unchanged
  RangeImage ramp;
  for (int r = 0; r < ramp.height; ++r)
    for (int c = 0; c < ramp.width; ++c)
      ramp.set(r, c, 0.5f + 0.01f * r + 0.002f * c);
  const RangeImage mr = median_filter_3x3(ramp);
  for (int r = 1; r < ramp.height - 1; ++r)
    for (int c = 1; c < ramp.width - 1; ++c)
      CHECK(mr.at(r, c) == ramp.at(r, c));
}

TEST_CASE("median output values are a subset of input values") {
  SplitMix64 rng(17);
  RangeImage img;
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (rng.next_double() < 0.8)
        img.set(r, c, float(rng.uniform(0.2, 3.0)));
  const RangeImage out = median_filter_3x3(img);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      CHECK(out.is_valid(r, c) == img.is_valid(r, c));
      if (!out.is_valid(r, c)) continue;
      bool found = false;
      for (int dr = -1; dr <= 1 && !found; ++dr)
        for (int dc = -1; dc <= 1 && !found; ++dc) {
          const int rr = std::clamp(r + dr, 0, img.height - 1);
          const int cc = std::clamp(c + dc, 0, img.width - 1);
          found = img.is_valid(rr, cc) && img.at(rr, cc) == out.at(r, c);
        }
      CHECK(found);
    }
}

TEST_CASE("clip rules") {
  RangeImage img;
  img.set(0, 0, 5.0f);
  img.set(0, 1, 0.05f);
  img.set(0, 2, 1.7f);
  const RangeImage out = clip_ranges(img);
  CHECK(out.at(0, 0) == 3.0f);
  CHECK_FALSE(out.is_valid(0, 1));
  CHECK(out.at(0, 2) == 1.7f);
}

TEST_CASE("preprocess yields a dense in-range image") {
  TerrainSpec spec;
  spec.kind = TerrainKind::composite;
  spec.seed = 12;
  const HeightField f = generate(spec);
  Pose base;
  base.position = {-2.0, -2.0, 0.75};
  const PointCloud cloud = lidar_scan(LidarModel::default_model(), base, f);
  REQUIRE_FALSE(cloud.empty());
  const RangeImage img = preprocess(cloud);
  CHECK(img.invalid_count() == 0);
  for (float v : img.values) {
    CHECK(v >= float(kRangeClipMin));
    CHECK(v <= float(kRangeClipMax));
  }
  CHECK_THROWS_AS(preprocess(PointCloud{}), std::invalid_argument);
}

TEST_CASE("preprocess on an ideal one-point-per-bin cloud is rasterize+clip") {
  RangeImage full;
  for (int r = 0; r < full.height; ++r)
    for (int c = 0; c < full.width; ++c) full.set(r, c, 1.5f);
  const PointCloud cloud = unproject(full);
  REQUIRE(cloud.size() == std::size_t(full.width) * full.height);

  const RangeImage direct = clip_ranges(rasterize(cloud));
  const RangeImage piped = preprocess(cloud);
  CHECK(direct.values == piped.values);
  CHECK(direct.valid == piped.valid);
}

TEST_CASE("unproject/rasterize fixed point") {
  SplitMix64 rng(23);
  RangeImage img;
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (rng.next_double() < 0.5)
        img.set(r, c, float(rng.uniform(0.3, 2.9)));
  const RangeImage back = rasterize(unproject(img));
  CHECK(back.values == img.values);
  CHECK(back.valid == img.valid);
}

TEST_CASE("single pixel unprojects to its bin center") {
  RangeImage img;
  img.set(35, 138, 1.0f);
  const PointCloud cloud = unproject(img);
  REQUIRE(cloud.size() == 1);
  const double theta = row_center_inclination(35);
  const double phi = column_center_azimuth(138);
  CHECK(cloud.points[0].x == Catch::Approx(std::cos(theta) * std::cos(phi)));
  CHECK(cloud.points[0].y == Catch::Approx(std::cos(theta) * std::sin(phi)));
  CHECK(cloud.points[0].z == Catch::Approx(std::sin(theta)));
  CHECK(cloud.ring[0] == kRangeImageHeight - 1 - 35);
}

TEST_CASE("projection round trip quantization bound") {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const double r = rng.uniform(0.25, 3.0);
    const double phi = rng.uniform(-kPi, kPi);
    const double theta = rng.uniform(deg2rad(-7.0), deg2rad(52.0));
    const Vec3 p = direction_from_angles(phi, theta) * r;
    PointCloud one;
    one.push(p, 0, 0);
    const PointCloud back = unproject(rasterize(one));
    REQUIRE(back.size() == 1);
    const double err = (back.points[0] - p).norm();
    CHECK(err <= r * deg2rad(1.5) + 1e-6);
  }
}
