#ifndef RELIEF_TERRAIN_HPP
#define RELIEF_TERRAIN_HPP

// Seeded procedural terrain families: flat, slope, stairs (up/down), discrete
// steps, rough, and a composite of the four in quadrants.
//
// Grids are sampled at cell centers: a footprint of W x L meters at cell size
// c gives W/c x L/c samples at odd multiples of c/2, centered on the origin.
// Stair edges then fall exactly between adjacent cells, so along the stair
// axis neighboring cells differ by exactly the rise (or zero).
//
// All randomness comes from SplitMix64 streams derived from the spec seed;
// lattice noise values are keyed on node indices, so generation is a pure
// function of the spec on every platform.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "relief/geometry.hpp"
#include "relief/heightfield.hpp"
#include "relief/random.hpp"

namespace relief {

struct TerrainSpec {
  TerrainKind kind = TerrainKind::flat;
  std::uint64_t seed = 0;
  double footprint_x = 12.0;  // meters, field extent along x
  double footprint_y = 12.0;  // meters, field extent along y
  double cell_size = 0.02;

  // stairs
  double stair_rise = 0.15;  // meters, (0, 0.25]
  double stair_run = 0.30;   // meters

  // discrete steps (random raised tiles)
  double step_height_min = 0.05;
  double step_height_max = 0.18;
  double step_tile = 0.9;  // meters, tile side

  // rough (seeded value noise)
  double roughness_amplitude = 0.05;   // meters, [0, 0.15]
  double roughness_correlation = 0.5;  // meters, lattice spacing

  // slope
  double slope_grade = 0.10;  // rise over run, signed

  void validate() const {
    if (footprint_x < 4.0 || footprint_y < 4.0)
      throw std::invalid_argument("terrain footprint must be at least 4 m x 4 m");
    if (cell_size <= 0.0)
      throw std::invalid_argument("terrain cell size must be > 0");
    if (stair_rise <= 0.0 || stair_rise > 0.25)
      throw std::invalid_argument("stair rise must be in (0, 0.25]");
    if (stair_run < 2.0 * cell_size)
      throw std::invalid_argument("stair run too small for cell size");
    if (roughness_amplitude < 0.0 || roughness_amplitude > 0.15)
      throw std::invalid_argument("roughness amplitude must be in [0, 0.15]");
    if (roughness_correlation < 2.0 * cell_size)
      throw std::invalid_argument("roughness correlation length too small");
    if (step_height_min < 0.0 || step_height_max < step_height_min ||
        step_height_max > 0.25)
      throw std::invalid_argument("step height range invalid");
  }
};

namespace detail {

// Per-node value for lattice noise, keyed on (seed, ix, iy).
inline double lattice_value(std::uint64_t seed, std::int64_t ix,
                            std::int64_t iy, double amplitude) {
  const std::uint64_t key =
      static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL ^
      static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL ^ seed;
  SplitMix64 rng(key);
  return rng.uniform(-amplitude, amplitude);
}

// Bilinear value noise over a lattice of the given spacing.
inline double value_noise(std::uint64_t seed, double x, double y,
                          double spacing, double amplitude) {
  const double gx = x / spacing;
  const double gy = y / spacing;
  const auto ix = static_cast<std::int64_t>(std::floor(gx));
  const auto iy = static_cast<std::int64_t>(std::floor(gy));
  const double tx = gx - double(ix);
  const double ty = gy - double(iy);
  const double v00 = lattice_value(seed, ix, iy, amplitude);
  const double v01 = lattice_value(seed, ix, iy + 1, amplitude);
  const double v10 = lattice_value(seed, ix + 1, iy, amplitude);
  const double v11 = lattice_value(seed, ix + 1, iy + 1, amplitude);
  return (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) +
         tx * ((1.0 - ty) * v10 + ty * v11);
}

// Ascending staircase along +x: flat at 0 for x < 0, edges at positive
// multiples of `run`, capped at num_steps risers, flat landing beyond.
inline double stair_profile(double x, double rise, double run, int num_steps) {
  if (x < 0.0) return 0.0;
  const auto k = static_cast<long>(std::floor(x / run));
  const long step = k < num_steps ? k : num_steps;
  return rise * static_cast<double>(step);
}

// Raised rectangular tiles; roughly half the tiles are lifted.
inline double steps_profile(std::uint64_t seed, double x, double y,
                            const TerrainSpec& spec) {
  const auto tx = static_cast<std::int64_t>(std::floor(x / spec.step_tile));
  const auto ty = static_cast<std::int64_t>(std::floor(y / spec.step_tile));
  const std::uint64_t key =
      static_cast<std::uint64_t>(tx) * 0xA24BAED4963EE407ULL ^
      static_cast<std::uint64_t>(ty) * 0x9FB21C651E98DF25ULL ^ seed;
  SplitMix64 rng(key);
  if (rng.next_double() < 0.5) return 0.0;
  return rng.uniform(spec.step_height_min, spec.step_height_max);
}

}  // namespace detail

inline HeightField generate(const TerrainSpec& spec) {
  spec.validate();

  const auto nx = static_cast<std::size_t>(
      std::llround(spec.footprint_x / spec.cell_size));
  const auto ny = static_cast<std::size_t>(
      std::llround(spec.footprint_y / spec.cell_size));
  const double ox = -0.5 * spec.footprint_x + 0.5 * spec.cell_size;
  const double oy = -0.5 * spec.footprint_y + 0.5 * spec.cell_size;
  HeightField field(ox, oy, spec.cell_size, nx, ny, spec.kind);

  SplitMix64 rng(spec.seed);
  const double slope_azimuth =
      spec.kind == TerrainKind::slope ? rng.uniform(0.0, 2.0 * kPi) : 0.0;

  // Staircase occupies x >= 0 with riser edges at positive multiples of the
  // run, approach flat at level 0, and a landing left before the border.
  const double stair_span = 0.5 * spec.footprint_x - 1.0;
  const int stair_steps =
      std::max(1, static_cast<int>(stair_span / spec.stair_run));
  const double stair_top = spec.stair_rise * stair_steps;

  for (std::size_t i = 0; i < nx; ++i) {
    const double x = field.sample_x(i);
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = field.sample_y(j);
      double h = 0.0;
      switch (spec.kind) {
        case TerrainKind::flat:
          break;
        case TerrainKind::slope:
          h = spec.slope_grade *
              (x * std::cos(slope_azimuth) + y * std::sin(slope_azimuth));
          break;
        case TerrainKind::stairs_up:
          h = detail::stair_profile(x, spec.stair_rise, spec.stair_run,
                                    stair_steps);
          break;
        case TerrainKind::stairs_down:
          h = stair_top - detail::stair_profile(x, spec.stair_rise,
                                                spec.stair_run, stair_steps);
          break;
        case TerrainKind::steps:
          h = detail::steps_profile(spec.seed, x, y, spec);
          break;
        case TerrainKind::rough:
          h = detail::value_noise(spec.seed, x, y, spec.roughness_correlation,
                                  spec.roughness_amplitude);
          break;
        case TerrainKind::composite: {
          // Quadrants: flat (-x,-y), steps (+x,-y), stairs (-x,+y),
          // rough (+x,+y). Feature coordinates are quadrant-local.
          if (x < 0.0 && y < 0.0) {
            h = 0.0;
          } else if (x >= 0.0 && y < 0.0) {
            h = detail::steps_profile(spec.seed, x - 1.0, y, spec);
          } else if (x < 0.0 && y >= 0.0) {
            const int q_steps = std::max(
                1, static_cast<int>((0.4 * spec.footprint_x - 1.0) / spec.stair_run));
            h = detail::stair_profile(x + 0.5 * spec.footprint_x - 1.0,
                                      spec.stair_rise, spec.stair_run, q_steps);
          } else {
            h = detail::value_noise(spec.seed, x, y, spec.roughness_correlation,
                                    spec.roughness_amplitude);
          }
          break;
        }
      }
      field.at(i, j) = static_cast<float>(h);
    }
  }
  return field;
}

// One spec per (kind, index), kinds in enum order, parameters drawn from a
// SplitMix64 stream seeded with master_seed. Successive calls with the same
// master seed produce identical suites.
inline std::vector<TerrainSpec> terrain_suite_specs(std::uint64_t master_seed,
                                                    int count_per_kind) {
  if (count_per_kind < 1)
    throw std::invalid_argument("terrain_suite: count must be >= 1");
  std::vector<TerrainSpec> specs;
  specs.reserve(static_cast<std::size_t>(kTerrainKindCount) * count_per_kind);
  SplitMix64 stream(master_seed);
  for (int k = 0; k < kTerrainKindCount; ++k) {
    for (int i = 0; i < count_per_kind; ++i) {
      TerrainSpec s;
      s.kind = static_cast<TerrainKind>(k);
      s.seed = stream.next_u64();
      SplitMix64 p(s.seed);
      s.stair_rise = p.uniform(0.10, 0.17);
      s.stair_run = p.uniform(0.28, 0.35);
      s.step_height_min = 0.05;
      s.step_height_max = p.uniform(0.10, 0.18);
      s.roughness_amplitude = p.uniform(0.02, 0.06);
      s.roughness_correlation = p.uniform(0.35, 0.8);
      s.slope_grade = (p.next_double() < 0.5 ? -1.0 : 1.0) * p.uniform(0.05, 0.12);
      specs.push_back(s);
    }
  }
  return specs;
}

inline std::vector<HeightField> terrain_suite(std::uint64_t master_seed,
                                              int count_per_kind) {
  std::vector<HeightField> fields;
  for (const TerrainSpec& s : terrain_suite_specs(master_seed, count_per_kind))
    fields.push_back(generate(s));
  return fields;
}

}  // namespace relief

#endif  // RELIEF_TERRAIN_HPP
