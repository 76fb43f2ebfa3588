#ifndef RELIEF_RANGE_IMAGE_HPP
#define RELIEF_RANGE_IMAGE_HPP

// Spherical projection of LiDAR clouds into a structured 276x40 range image
// and the preprocessing stack that turns a sparse projection into a dense,
// clipped image: rasterize -> clip -> row-wise gap fill -> 3x3 median ->
// nearest-neighbor fill -> 3x3 median.
//
// Clipping runs before the fills so interpolation only ever mixes in-range
// data. All stages are pure; collision and tie-break rules are fixed so two
// implementations agree bit-for-bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "relief/lidar_grid.hpp"
#include "relief/pgm.hpp"
#include "relief/sensor.hpp"

namespace relief {

struct SphericalCoord {
  double range = 0.0;        // meters, > 0
  double azimuth = 0.0;      // radians in (-pi, pi]
  double inclination = 0.0;  // radians in [-pi/2, pi/2]
};

struct RangeImage {
  int width = kRangeImageWidth;
  int height = kRangeImageHeight;
  std::vector<float> values;        // meters; row-major, row outer
  std::vector<std::uint8_t> valid;  // 0 = no data

  RangeImage()
      : values(std::size_t(kRangeImageWidth) * kRangeImageHeight, 0.0f),
        valid(std::size_t(kRangeImageWidth) * kRangeImageHeight, 0) {}

  std::size_t index(int u, int v) const { return std::size_t(v) * width + u; }
  float& at(int row, int col) { return values[index(col, row)]; }
  float at(int row, int col) const { return values[index(col, row)]; }
  bool is_valid(int row, int col) const { return valid[index(col, row)] != 0; }
  void set(int row, int col, float v) {
    values[index(col, row)] = v;
    valid[index(col, row)] = 1;
  }

  std::size_t invalid_count() const {
    std::size_t n = 0;
    for (auto v : valid) n += (v == 0);
    return n;
  }
};

inline SphericalCoord spherical_project(const Vec3& p) {
  const double r = p.norm();
  if (r == 0.0)
    throw std::invalid_argument("spherical_project: zero vector");
  SphericalCoord s;
  s.range = r;
  s.azimuth = std::atan2(p.y, p.x);
  s.inclination = std::atan2(p.z, std::hypot(p.x, p.y));
  return s;
}

// Bin the cloud into the angular grid. Points outside the vertical FOV are
// rejected; when several points land in one bin the smallest range wins
// (closest surface occludes).
inline RangeImage rasterize(const PointCloud& cloud) {
  RangeImage img;
  for (const Vec3& p : cloud.points) {
    const SphericalCoord s = spherical_project(p);
    const int row = inclination_to_row(s.inclination);
    if (row < 0) continue;
    const int col = azimuth_to_column(s.azimuth);
    const std::size_t i = img.index(col, row);
    if (!img.valid[i] || s.range < img.values[i]) {
      img.values[i] = static_cast<float>(s.range);
      img.valid[i] = 1;
    }
  }
  return img;
}

// Far returns clamp to max (they are genuinely "far"); sub-minimum returns
// are treated as self-occlusion artifacts and dropped.
inline RangeImage clip_ranges(const RangeImage& img,
                              double min_range = kRangeClipMin,
                              double max_range = kRangeClipMax) {
  RangeImage out = img;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!out.valid[i]) continue;
    if (out.values[i] < min_range) {
      out.valid[i] = 0;
      out.values[i] = 0.0f;
    } else if (out.values[i] > max_range) {
      out.values[i] = static_cast<float>(max_range);
    }
  }
  return out;
}

// Linear interpolation across short invalid runs within a row. Runs longer
// than max_gap, or touching the row ends, are left alone. No wrap-around:
// the seam at the rear is a true discontinuity.
inline RangeImage fill_gaps_rowwise(const RangeImage& img, int max_gap = 4) {
  RangeImage out = img;
  for (int row = 0; row < img.height; ++row) {
    int col = 0;
    while (col < img.width) {
      if (out.is_valid(row, col)) {
        ++col;
        continue;
      }
      int end = col;
      while (end < img.width && !out.is_valid(row, end)) ++end;
      const int run = end - col;
      const bool flanked = col > 0 && end < img.width;
      if (flanked && run <= max_gap) {
        const float left = out.at(row, col - 1);
        const float right = out.at(row, end);
        for (int k = 0; k < run; ++k) {
          const float t = float(k + 1) / float(run + 1);
          out.set(row, col + k, left + (right - left) * t);
        }
      }
      col = end;
    }
  }
  return out;
}

namespace detail {

// 1D squared-distance transform (lower envelope of parabolas); entries with
// infinite cost never join the envelope. Grid offsets are integers, so all
// resulting minima are exact integers even through double arithmetic.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    for (;;) {
      const int p = v[k];
      s = ((f[q] + q * double(q)) - (f[p] + p * double(p))) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
      if (k < 0) break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - double(v[j]);
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace detail

// Fill every invalid pixel with the value of the nearest valid pixel by
// Euclidean pixel distance; ties broken by smaller row, then smaller column.
// Exact: a squared-distance transform finds the minimum distance, then the
// few lattice offsets achieving it exactly are enumerated for the tie-break.
inline RangeImage fill_nearest(const RangeImage& img) {
  const int w = img.width, h = img.height;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  bool any_valid = false;
  for (auto v : img.valid) any_valid |= (v != 0);
  if (!any_valid)
    throw std::invalid_argument("fill_nearest: image has no valid pixels");

  // Column pass: squared distance to the nearest valid pixel in the same
  // column (simple two-sweep), then a row pass combines columns.
  std::vector<double> col_d(std::size_t(w) * h, kInf);
  for (int c = 0; c < w; ++c) {
    double dist = kInf;
    for (int r = 0; r < h; ++r) {
      dist = img.is_valid(r, c) ? 0.0 : dist + 1.0;
      col_d[std::size_t(r) * w + c] = dist;
    }
    dist = kInf;
    for (int r = h - 1; r >= 0; --r) {
      dist = img.is_valid(r, c) ? 0.0 : dist + 1.0;
      auto& cur = col_d[std::size_t(r) * w + c];
      cur = std::min(cur, dist);
    }
  }

  std::vector<double> f(w), d(w);
  std::vector<double> min_d2(std::size_t(w) * h, kInf);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double cd = col_d[std::size_t(r) * w + c];
      f[c] = std::isinf(cd) ? kInf : cd * cd;
    }
    detail::edt_1d(f, d);
    for (int c = 0; c < w; ++c) min_d2[std::size_t(r) * w + c] = d[c];
  }

  RangeImage out = img;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (img.is_valid(r, c)) continue;
      const auto d2 = static_cast<long>(min_d2[std::size_t(r) * w + c] + 0.5);
      const auto radius = static_cast<int>(std::sqrt(double(d2)) + 0.5);
      int best_r = -1, best_c = -1;
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        const long rem = d2 - long(dr) * dr;
        if (rem < 0) continue;
        const auto dc = static_cast<int>(std::sqrt(double(rem)) + 0.5);
        if (long(dc) * dc != rem) continue;
        for (const int cc : {c - dc, c + dc}) {
          if (cc < 0 || cc >= w) continue;
          if (!img.is_valid(rr, cc)) continue;
          if (best_r < 0 || rr < best_r || (rr == best_r && cc < best_c)) {
            best_r = rr;
            best_c = cc;
          }
          if (dc == 0) break;  // c-dc and c+dc coincide
        }
      }
      out.set(r, c, img.at(best_r, best_c));
    }
  }
  return out;
}

// 3x3 median with replicate-border padding. Invalid pixels neither
// contribute nor change: only the values of valid pixels are rewritten, from
// the median (lower median for even counts) of the valid neighborhood.
inline RangeImage median_filter_3x3(const RangeImage& img) {
  RangeImage out = img;
  float window[9];
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      if (!img.is_valid(r, c)) continue;
      int n = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = std::clamp(r + dr, 0, img.height - 1);
          const int cc = std::clamp(c + dc, 0, img.width - 1);
          if (img.is_valid(rr, cc)) window[n++] = img.at(rr, cc);
        }
      std::sort(window, window + n);
      out.at(r, c) = window[(n - 1) / 2];
    }
  }
  return out;
}

// Full preprocessing stack; output has no invalid pixels and all values in
// the clip range whenever the cloud has at least one in-FOV return.
inline RangeImage preprocess(const PointCloud& cloud, int max_gap = 4) {
  if (cloud.empty())
    throw std::invalid_argument("preprocess: empty point cloud");
  RangeImage img = rasterize(cloud);
  img = clip_ranges(img);
  img = fill_gaps_rowwise(img, max_gap);
  img = median_filter_3x3(img);
  img = fill_nearest(img);  // throws if no point survived FOV/clip rejection
  img = median_filter_3x3(img);
  return img;
}

// Map valid pixels back to Cartesian points through their bin-center angles.
// Ring indices count upward from the bottom of the FOV, mirroring row order.
inline PointCloud unproject(const RangeImage& img) {
  PointCloud cloud;
  for (int row = 0; row < img.height; ++row) {
    const double theta = row_center_inclination(row);
    for (int col = 0; col < img.width; ++col) {
      if (!img.is_valid(row, col)) continue;
      const double phi = column_center_azimuth(col);
      const Vec3 p = direction_from_angles(phi, theta) * double(img.at(row, col));
      cloud.push(p, img.height - 1 - row, col);
    }
  }
  return cloud;
}

// 16-bit PGM: range mapped linearly [0.2, 3.0] -> [1, 65535], invalid = 0.
inline void save_range_image_pgm(const RangeImage& img,
                                 const std::string& path) {
  std::vector<std::uint16_t> px =
      quantize16(img.values, float(kRangeClipMin), float(kRangeClipMax), 1);
  for (std::size_t i = 0; i < px.size(); ++i)
    if (!img.valid[i]) px[i] = 0;
  write_pgm16(path, img.width, img.height, px);
}

inline void save_depth_image_pgm(const DepthImage& img,
                                 const std::string& path) {
  std::vector<std::uint16_t> px =
      quantize16(img.values, float(kRangeClipMin), float(kRangeClipMax), 1);
  for (std::size_t i = 0; i < px.size(); ++i)
    if (!img.valid[i]) px[i] = 0;
  write_pgm16(path, img.width, img.height, px);
}

}  // namespace relief

#endif  // RELIEF_RANGE_IMAGE_HPP
