#ifndef RELIEF_HEIGHTFIELD_HPP
#define RELIEF_HEIGHTFIELD_HPP

// Dense ground-truth terrain grid. Elevation samples sit on a regular lattice
// (origin + i*cell_size along x, + j*cell_size along y) and queries between
// samples are bilinear. Queries outside the footprint are an error; callers
// are expected to keep trajectories inside the terrain.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "relief/io.hpp"

namespace relief {

enum class TerrainKind : std::uint32_t {
  flat = 0,
  slope = 1,
  stairs_up = 2,
  stairs_down = 3,
  steps = 4,
  rough = 5,
  composite = 6,
};

constexpr int kTerrainKindCount = 7;

inline const char* terrain_kind_name(TerrainKind k) {
  switch (k) {
    case TerrainKind::flat: return "flat";
    case TerrainKind::slope: return "slope";
    case TerrainKind::stairs_up: return "stairs_up";
    case TerrainKind::stairs_down: return "stairs_down";
    case TerrainKind::steps: return "steps";
    case TerrainKind::rough: return "rough";
    case TerrainKind::composite: return "composite";
  }
  return "unknown";
}

inline TerrainKind terrain_kind_from_name(const std::string& s) {
  for (int i = 0; i < kTerrainKindCount; ++i) {
    const auto k = static_cast<TerrainKind>(i);
    if (s == terrain_kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown terrain kind: " + s);
}

class HeightField {
 public:
  HeightField() = default;

  HeightField(double origin_x, double origin_y, double cell_size,
              std::size_t nx, std::size_t ny,
              TerrainKind kind = TerrainKind::flat)
      : origin_x_(origin_x),
        origin_y_(origin_y),
        cell_size_(cell_size),
        inv_cell_(1.0 / cell_size),
        nx_(nx),
        ny_(ny),
        kind_(kind),
        z_(nx * ny, 0.0f) {
    if (cell_size <= 0.0) throw std::invalid_argument("cell_size must be > 0");
    if (nx < 2 || ny < 2)
      throw std::invalid_argument("grid must be at least 2x2");
  }

  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double cell_size() const { return cell_size_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  TerrainKind kind() const { return kind_; }
  void set_kind(TerrainKind k) { kind_ = k; }

  double max_x() const { return origin_x_ + cell_size_ * double(nx_ - 1); }
  double max_y() const { return origin_y_ + cell_size_ * double(ny_ - 1); }

  float& at(std::size_t ix, std::size_t iy) {
    stats_valid_ = false;
    return z_[ix * ny_ + iy];
  }
  float at(std::size_t ix, std::size_t iy) const { return z_[ix * ny_ + iy]; }

  const std::vector<float>& elevations() const { return z_; }
  std::vector<float>& elevations() {
    stats_valid_ = false;
    return z_;
  }

  double sample_x(std::size_t ix) const { return origin_x_ + cell_size_ * double(ix); }
  double sample_y(std::size_t iy) const { return origin_y_ + cell_size_ * double(iy); }

  bool contains(double x, double y) const {
    return x >= origin_x_ && x <= max_x() && y >= origin_y_ && y <= max_y();
  }

  // Cached: ray casting consults these once per ray.
  float min_elevation() const {
    refresh_stats();
    return min_z_;
  }
  float max_elevation() const {
    refresh_stats();
    return max_z_;
  }

  // Bilinear interpolation of the four surrounding samples; exact at sample
  // points and continuous across cell boundaries.
  double height_at(double x, double y) const {
    if (!contains(x, y))
      throw std::out_of_range("HeightField::height_at: query outside footprint");
    return height_at_unchecked(x, y);
  }

  // Bilinear query without the bounds check; caller guarantees contains().
  double height_at_unchecked(double x, double y) const {
    const double fx = (x - origin_x_) * inv_cell_;
    const double fy = (y - origin_y_) * inv_cell_;
    const std::size_t ix = std::min(static_cast<std::size_t>(fx), nx_ - 2);
    const std::size_t iy = std::min(static_cast<std::size_t>(fy), ny_ - 2);
    const double tx = fx - double(ix);
    const double ty = fy - double(iy);
    const float* row0 = z_.data() + ix * ny_ + iy;
    const float* row1 = row0 + ny_;
    return (1.0 - tx) * ((1.0 - ty) * row0[0] + ty * row0[1]) +
           tx * ((1.0 - ty) * row1[0] + ty * row1[1]);
  }

  void check_finite() const {
    for (float v : z_)
      if (!std::isfinite(v))
        throw std::invalid_argument("HeightField: non-finite elevation");
  }

 private:
  void refresh_stats() const {
    if (stats_valid_) return;
    min_z_ = *std::min_element(z_.begin(), z_.end());
    max_z_ = *std::max_element(z_.begin(), z_.end());
    stats_valid_ = true;
  }

  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  double cell_size_ = 0.02;
  double inv_cell_ = 50.0;
  std::size_t nx_ = 2;
  std::size_t ny_ = 2;
  TerrainKind kind_ = TerrainKind::flat;
  std::vector<float> z_;  // row-major, x index outer, y index inner
  mutable bool stats_valid_ = false;
  mutable float min_z_ = 0.0f;
  mutable float max_z_ = 0.0f;
};

// .hfld layout: "HFLD", version u32, origin_x f64, origin_y f64,
// cell_size f64, width u32 (y samples), length u32 (x samples), then
// row-major f32 elevations (x outer, y inner). Little-endian throughout.
// The terrain kind travels in dataset manifests, not in this file.
constexpr std::uint32_t kHfldVersion = 1;

inline void save_hfld(const HeightField& f, const std::string& path) {
  BinaryWriter w(path);
  w.magic("HFLD");
  w.u32(kHfldVersion);
  w.f64(f.origin_x());
  w.f64(f.origin_y());
  w.f64(f.cell_size());
  w.u32(static_cast<std::uint32_t>(f.ny()));
  w.u32(static_cast<std::uint32_t>(f.nx()));
  w.f32_array(f.elevations());
  w.close();
}

inline HeightField load_hfld(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("HFLD");
  const std::uint32_t version = r.u32();
  if (version != kHfldVersion)
    throw DataError("unsupported .hfld version in " + path);
  const double ox = r.f64();
  const double oy = r.f64();
  const double cell = r.f64();
  const std::uint32_t width = r.u32();
  const std::uint32_t length = r.u32();
  HeightField f(ox, oy, cell, length, width);
  f.elevations() = r.f32_array(std::size_t(length) * width);
  f.check_finite();
  return f;
}

}  // namespace relief

#endif  // RELIEF_HEIGHTFIELD_HPP
