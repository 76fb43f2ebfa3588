#ifndef RELIEF_FUSION_ORACLE_HPP
#define RELIEF_FUSION_ORACLE_HPP

// Deterministic temporal-fusion baseline: past point clouds accumulate in a
// world-frame rolling elevation buffer which is then queried like a
// heightmap. No learning anywhere; this is both the non-neural baseline and
// a correctness oracle for the rest of the pipeline.
//
// Buffer cells are 2 cm, matching the terrain generator lattice, and the
// buffer origin snaps to that lattice so cell centers line up with terrain
// samples; recentering shifts by whole cells only, so accumulated estimates
// never get resampled.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "relief/geometry.hpp"
#include "relief/heightmap.hpp"

namespace relief {

class ElevationBuffer {
 public:
  static constexpr double kCell = 0.02;     // meters
  static constexpr double kFootprint = 6.0; // meters per side
  static constexpr double kAlpha = 0.5;     // per-scan EMA weight

  ElevationBuffer() : n_(int(kFootprint / kCell)) {
    estimate_.assign(std::size_t(n_) * n_, 0.0f);
    weight_.assign(std::size_t(n_) * n_, 0.0f);
    last_update_.assign(std::size_t(n_) * n_, -1);
    recenter(0.0, 0.0);
  }

  int size() const { return n_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }

  bool observed(int ix, int iy) const { return weight_[idx(ix, iy)] > 0.0f; }
  float estimate(int ix, int iy) const { return estimate_[idx(ix, iy)]; }

  // Shift the window so it is centered on (cx, cy), moving content by whole
  // cells. Cells scrolled in arrive unobserved.
  void recenter(double cx, double cy) {
    const double half = 0.5 * kFootprint;
    // Keep cell centers on the odd-centimeter lattice (.., -0.01, 0.01, ..).
    const double nox =
        std::round((cx - half - 0.5 * kCell) / kCell) * kCell + 0.5 * kCell;
    const double noy =
        std::round((cy - half - 0.5 * kCell) / kCell) * kCell + 0.5 * kCell;
    const auto sx = static_cast<long>(std::llround((nox - origin_x_) / kCell));
    const auto sy = static_cast<long>(std::llround((noy - origin_y_) / kCell));
    if (!initialized_) {
      origin_x_ = nox;
      origin_y_ = noy;
      initialized_ = true;
      return;
    }
    if (sx == 0 && sy == 0) return;
    std::vector<float> est(estimate_.size(), 0.0f);
    std::vector<float> wgt(weight_.size(), 0.0f);
    std::vector<int> upd(last_update_.size(), -1);
    for (int ix = 0; ix < n_; ++ix) {
      const long ox = ix + sx;
      if (ox < 0 || ox >= n_) continue;
      for (int iy = 0; iy < n_; ++iy) {
        const long oy = iy + sy;
        if (oy < 0 || oy >= n_) continue;
        const std::size_t from = idx(int(ox), int(oy));
        const std::size_t to = idx(ix, iy);
        est[to] = estimate_[from];
        wgt[to] = weight_[from];
        upd[to] = last_update_[from];
      }
    }
    estimate_.swap(est);
    weight_.swap(wgt);
    last_update_.swap(upd);
    origin_x_ = nox;
    origin_y_ = noy;
  }

  // Fuse one world-frame scan: per cell, the highest point of this scan
  // (upper surface; robust to grazing hits on vertical faces) enters an EMA
  // with the stored estimate. First observation is taken directly.
  void integrate(const std::vector<Vec3>& cloud_world, int timestep) {
    touched_.clear();
    scratch_has_.assign(std::size_t(n_) * n_, 0);
    scratch_max_.assign(std::size_t(n_) * n_, 0.0f);
    for (const Vec3& p : cloud_world) {
      if (!p.finite()) throw std::invalid_argument("integrate: non-finite point");
      const long ix = cell_of(p.x, origin_x_);
      const long iy = cell_of(p.y, origin_y_);
      if (ix < 0 || ix >= n_ || iy < 0 || iy >= n_) continue;
      const std::size_t i = idx(int(ix), int(iy));
      const auto z = static_cast<float>(p.z);
      if (!scratch_has_[i] || z > scratch_max_[i]) {
        if (!scratch_has_[i]) touched_.push_back(i);
        scratch_has_[i] = 1;
        scratch_max_[i] = z;
      }
    }
    for (const std::size_t i : touched_) {
      const float candidate = scratch_max_[i];
      if (weight_[i] > 0.0f)
        estimate_[i] = static_cast<float>(kAlpha * candidate +
                                          (1.0 - kAlpha) * estimate_[i]);
      else
        estimate_[i] = candidate;
      weight_[i] += 1.0f;
      last_update_[i] = timestep;
    }
  }

  struct QueryResult {
    Heightmap heightmap;
    std::vector<std::uint8_t> coverage;  // 1 = supported by observed cells
  };

  // Bilinear interpolation of observed cells at each heightmap grid point
  // (weights renormalized over the observed subset), minus the base height.
  // Points with no observed support cell fall back to the nearest observed
  // estimate and are flagged uncovered.
  QueryResult query(const HeightmapSpec& spec, const Pose& base_pose) const {
    QueryResult out;
    out.heightmap = Heightmap(spec);
    out.coverage.assign(out.heightmap.values.size(), 0);
    const auto pts = grid_points(spec, base_pose);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double gx = (pts[k].x - origin_x_) / kCell;
      const double gy = (pts[k].y - origin_y_) / kCell;
      const int ix = int(std::floor(gx));
      const int iy = int(std::floor(gy));
      const double tx = gx - ix;
      const double ty = gy - iy;
      double wsum = 0.0, vsum = 0.0;
      const double w4[4] = {(1 - tx) * (1 - ty), (1 - tx) * ty,
                            tx * (1 - ty), tx * ty};
      const int cx4[4] = {ix, ix, ix + 1, ix + 1};
      const int cy4[4] = {iy, iy + 1, iy, iy + 1};
      for (int q = 0; q < 4; ++q) {
        if (cx4[q] < 0 || cx4[q] >= n_ || cy4[q] < 0 || cy4[q] >= n_) continue;
        if (!observed(cx4[q], cy4[q])) continue;
        wsum += w4[q];
        vsum += w4[q] * estimate(cx4[q], cy4[q]);
      }
      double value;
      if (wsum > 1e-12) {
        value = vsum / wsum;
        out.coverage[k] = 1;
      } else {
        value = nearest_observed(ix, iy);
      }
      out.heightmap.values[k] =
          static_cast<float>(value - base_pose.position.z);
    }
    return out;
  }

  bool any_observed() const {
    for (float w : weight_)
      if (w > 0.0f) return true;
    return false;
  }

 private:
  std::size_t idx(int ix, int iy) const { return std::size_t(ix) * n_ + iy; }

  static long cell_of(double v, double origin) {
    return std::lround((v - origin) / kCell);
  }

  // Exact nearest observed cell by Euclidean distance; scans outward in
  // Chebyshev rings and keeps going until no closer cell can exist.
  double nearest_observed(int ix, int iy) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    float best = 0.0f;
    bool found = false;
    for (int ring = 0; ring < n_; ++ring) {
      if (found && double(ring) * ring > best_d2) break;
      const int x0 = ix - ring, x1 = ix + ring;
      const int y0 = iy - ring, y1 = iy + ring;
      for (int x = x0; x <= x1; ++x) {
        for (int y = y0; y <= y1; ++y) {
          if (ring > 0 && x != x0 && x != x1 && y != y0 && y != y1) continue;
          if (x < 0 || x >= n_ || y < 0 || y >= n_) continue;
          if (!observed(x, y)) continue;
          const double dx = x - ix, dy = y - iy;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            best = estimate(x, y);
            found = true;
          }
        }
      }
    }
    if (!found)
      return 0.0;  // never-integrated buffer; caller sees coverage all-false
    return best;
  }

  int n_;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  bool initialized_ = false;
  std::vector<float> estimate_;
  std::vector<float> weight_;
  std::vector<int> last_update_;

  // integrate() scratch, reused across scans
  std::vector<std::uint8_t> scratch_has_;
  std::vector<float> scratch_max_;
  std::vector<std::size_t> touched_;
};

}  // namespace relief

#endif  // RELIEF_FUSION_ORACLE_HPP
