#ifndef RELIEF_HEIGHTMAP_HPP
#define RELIEF_HEIGHTMAP_HPP

// Robot-centric heightmap: a forward-shifted grid of base-relative terrain
// elevations, translated and yawed with the base but gravity-aligned (roll
// and pitch do not tilt the grid).
//
// Grid dimensions follow the fencepost convention (points, not cells):
// nx = round(length/resolution) + 1. The 0.98 m x 0.70 m grid at 7 cm then
// has 15 x 11 = 165 points. Flattening is row-major with the x index outer
// (rear to front) and the y index inner (right to left).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "relief/geometry.hpp"
#include "relief/heightfield.hpp"

namespace relief {

struct HeightmapSpec {
  double length = 0.98;          // x extent, meters
  double width = 0.70;           // y extent, meters
  double resolution = 0.07;      // meters per cell
  double forward_offset = 0.20;  // grid center shift along base heading

  int nx() const { return int(std::lround(length / resolution)) + 1; }
  int ny() const { return int(std::lround(width / resolution)) + 1; }
  int point_count() const { return nx() * ny(); }

  double local_x(int i) const {
    return forward_offset - 0.5 * length + i * resolution;
  }
  double local_y(int j) const { return -0.5 * width + j * resolution; }

  void validate() const {
    if (resolution < 0.04 || resolution > 0.12)
      throw std::invalid_argument("heightmap resolution must be in [0.04, 0.12] m");
    if (length <= 0.0 || width <= 0.0)
      throw std::invalid_argument("heightmap extents must be positive");
  }

  bool operator==(const HeightmapSpec& o) const {
    return length == o.length && width == o.width &&
           resolution == o.resolution && forward_offset == o.forward_offset;
  }
};

struct Heightmap {
  HeightmapSpec spec;
  std::vector<float> values;  // base-relative elevation, meters

  Heightmap() = default;
  explicit Heightmap(const HeightmapSpec& s)
      : spec(s), values(std::size_t(s.point_count()), 0.0f) {}

  float& at(int i, int j) { return values[std::size_t(i) * spec.ny() + j]; }
  float at(int i, int j) const { return values[std::size_t(i) * spec.ny() + j]; }
};

struct GridPoint {
  double x, y;
};

// World xy of every grid point. Only the base yaw rotates the grid.
inline std::vector<GridPoint> grid_points(const HeightmapSpec& spec,
                                          const Pose& base_pose) {
  spec.validate();
  const double yaw = base_pose.yaw();
  const double c = std::cos(yaw), s = std::sin(yaw);
  std::vector<GridPoint> pts;
  pts.reserve(std::size_t(spec.point_count()));
  for (int i = 0; i < spec.nx(); ++i) {
    const double lx = spec.local_x(i);
    for (int j = 0; j < spec.ny(); ++j) {
      const double ly = spec.local_y(j);
      pts.push_back({base_pose.position.x + c * lx - s * ly,
                     base_pose.position.y + s * lx + c * ly});
    }
  }
  return pts;
}

// Ground truth from the terrain ("virtual scanner"): terrain height at each
// grid point minus the base height. Throws if the grid leaves the terrain.
inline Heightmap extract_ground_truth(const HeightmapSpec& spec,
                                      const Pose& base_pose,
                                      const HeightField& field) {
  Heightmap hm(spec);
  const auto pts = grid_points(spec, base_pose);
  for (std::size_t k = 0; k < pts.size(); ++k)
    hm.values[k] =
        static_cast<float>(field.height_at(pts[k].x, pts[k].y) -
                           base_pose.position.z);
  return hm;
}

inline double mae(const Heightmap& pred, const Heightmap& truth) {
  if (!(pred.spec == truth.spec) || pred.values.size() != truth.values.size())
    throw std::invalid_argument("mae: heightmap specs differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < pred.values.size(); ++k)
    acc += std::abs(double(pred.values[k]) - double(truth.values[k]));
  return acc / double(pred.values.size());
}

// Per-cell MAE across a sequence of prediction/truth pairs, shaped nx x ny.
inline std::vector<double> spatial_error_map(
    const std::vector<Heightmap>& preds, const std::vector<Heightmap>& truths) {
  if (preds.empty() || preds.size() != truths.size())
    throw std::invalid_argument("spatial_error_map: need >= 1 aligned pair");
  const HeightmapSpec& spec = preds.front().spec;
  std::vector<double> cell(std::size_t(spec.point_count()), 0.0);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (!(preds[p].spec == spec) || !(truths[p].spec == spec))
      throw std::invalid_argument("spatial_error_map: heightmap specs differ");
    for (std::size_t k = 0; k < cell.size(); ++k)
      cell[k] += std::abs(double(preds[p].values[k]) -
                          double(truths[p].values[k]));
  }
  for (double& v : cell) v /= double(preds.size());
  return cell;
}

// CSV layout: nx rows (rear to front), ny columns (right to left), meters.
inline void save_heightmap_csv(const Heightmap& hm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int i = 0; i < hm.spec.nx(); ++i) {
    for (int j = 0; j < hm.spec.ny(); ++j) {
      if (j) out << ",";
      out << hm.at(i, j);
    }
    out << "\n";
  }
}

}  // namespace relief

#endif  // RELIEF_HEIGHTMAP_HPP
