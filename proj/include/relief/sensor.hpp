#ifndef RELIEF_SENSOR_HPP
#define RELIEF_SENSOR_HPP

// Exteroceptive sensor simulation: ray casting against a HeightField, a
// 40-channel / 276-column spinning LiDAR idealized as a regular angular grid,
// a pinhole depth camera storing z-depth, and the noise/occlusion corruption
// used for denoising pretraining.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "relief/geometry.hpp"
#include "relief/heightfield.hpp"
#include "relief/lidar_grid.hpp"
#include "relief/random.hpp"

namespace relief {

constexpr double kRangeClipMin = 0.2;  // meters
constexpr double kRangeClipMax = 3.0;  // meters

struct LidarModel {
  int channels = kRangeImageHeight;  // vertical rings
  int columns = kRangeImageWidth;    // azimuth steps, ~1.3 deg at 10 Hz
  double inclination_min_deg = kLidarInclinationMinDeg;
  double inclination_max_deg = kLidarInclinationMaxDeg;
  double max_range = 5.0;
  Pose mount;  // sensor pose in the base frame

  // Head-mounted unit pitched toward the ground ahead; a level mount at this
  // height would first meet flat ground far outside the 3 m operating range.
  static LidarModel default_model() {
    LidarModel m;
    m.mount.position = {0.0, 0.0, 0.40};
    m.mount.rotation = rot_y(deg2rad(30.0));  // pitch down
    return m;
  }

  double ring_inclination(int ring) const {
    return deg2rad(inclination_min_deg +
                   ring * (inclination_max_deg - inclination_min_deg) /
                       double(channels - 1));
  }
};

struct DepthCameraModel {
  int width = 160;
  int height = 120;
  double hfov_deg = 87.0;
  double vfov_deg = 58.0;
  double max_range = 5.0;
  Pose mount;  // optical axis along body +x before mounting

  static DepthCameraModel default_model() {
    DepthCameraModel m;
    m.mount.position = {0.0, 0.0, 0.35};
    m.mount.rotation = rot_y(deg2rad(45.0));  // pitch down toward near ground
    return m;
  }

  void validate() const {
    if (width != 160 || height != 120)
      throw std::invalid_argument("depth camera resolution is fixed at 160x120");
    if (hfov_deg <= 0.0 || hfov_deg >= 180.0 || vfov_deg <= 0.0 ||
        vfov_deg >= 180.0)
      throw std::invalid_argument("depth camera FOV must be in (0, 180) deg");
  }

  // Unit ray through the center of pixel (u, v), camera frame
  // (x forward / optical axis, y left, z up).
  Vec3 pixel_ray(int u, int v) const {
    const double fx = (width / 2.0) / std::tan(deg2rad(hfov_deg) / 2.0);
    const double fy = (height / 2.0) / std::tan(deg2rad(vfov_deg) / 2.0);
    const double off_u = (u + 0.5) - width / 2.0;
    const double off_v = (v + 0.5) - height / 2.0;
    return Vec3{1.0, -off_u / fx, -off_v / fy}.normalized();
  }
};

struct DepthImage {
  int width = 160;
  int height = 120;
  std::vector<float> values;        // z-depth, meters; row-major, v outer
  std::vector<std::uint8_t> valid;  // 0 = no return

  DepthImage() : values(160 * 120, 0.0f), valid(160 * 120, 0) {}
  DepthImage(int w, int h)
      : width(w), height(h), values(std::size_t(w) * h, 0.0f),
        valid(std::size_t(w) * h, 0) {}

  std::size_t index(int u, int v) const { return std::size_t(v) * width + u; }
  std::size_t size() const { return values.size(); }
};

struct PointCloud {
  std::vector<Vec3> points;       // sensor frame
  std::vector<std::uint16_t> ring;  // 0..channels-1
  std::vector<std::uint16_t> column;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void push(const Vec3& p, int r, int c) {
    points.push_back(p);
    ring.push_back(static_cast<std::uint16_t>(r));
    column.push_back(static_cast<std::uint16_t>(c));
  }
};

// First terrain intersection along origin + t*direction, t in (0, max_range].
// March in fixed 1 cm steps until the sample drops to or below the surface,
// then refine the bracketing interval with 20 bisections (final |dz| < 1 mm).
// Returns nullopt on a miss; throws if the sensor sits outside or below the
// terrain.
inline std::optional<double> raycast(const HeightField& field,
                                     const Vec3& origin, const Vec3& direction,
                                     double max_range) {
  constexpr double kStep = 0.01;
  if (max_range <= 0.0) throw std::invalid_argument("raycast: max_range <= 0");
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("raycast: direction must be unit length");
  if (!field.contains(origin.x, origin.y) ||
      origin.z <= field.height_at(origin.x, origin.y))
    throw std::invalid_argument("raycast: origin must be above the terrain");

  const double z_max = field.max_elevation();
  if (direction.z >= 0.0 && origin.z > z_max) return std::nullopt;

  // Descending rays are below every sample once past z_min, so the march is
  // guaranteed to terminate within this bound.
  double march_limit = max_range;
  if (direction.z < 0.0) {
    const double z_min = field.min_elevation();
    march_limit =
        std::min(march_limit, (origin.z - z_min) / -direction.z + kStep);
  } else if (direction.z > 0.0) {
    // nothing to hit once the ray climbs past the highest sample
    march_limit =
        std::min(march_limit, (z_max - origin.z) / direction.z + kStep);
  }

  // While the ray is above z_max no crossing can exist; fast-forward the
  // march to that boundary. Identical samples from there on.
  long k_start = 1;
  if (direction.z < 0.0 && origin.z > z_max) {
    const double t_skip = (origin.z - z_max) / -direction.z;
    if (t_skip >= max_range) return std::nullopt;
    k_start = std::max(1L, static_cast<long>(std::floor(t_skip / kStep)));
  }

  const auto total = static_cast<long>(std::ceil(march_limit / kStep));
  double t_prev = double(k_start - 1) * kStep;
  double t_hit = -1.0;
  for (long k = k_start; k <= total; ++k) {
    const double t = std::min(double(k) * kStep, max_range);
    const double x = origin.x + t * direction.x;
    const double y = origin.y + t * direction.y;
    if (!field.contains(x, y)) return std::nullopt;  // left the footprint
    const double z = origin.z + t * direction.z;
    if (direction.z >= 0.0 && z > z_max) return std::nullopt;
    if (z <= field.height_at_unchecked(x, y)) {
      t_hit = t;
      break;
    }
    t_prev = t;
    if (t >= max_range) break;
  }
  if (t_hit < 0.0) return std::nullopt;

  // The bracket endpoints are inside the footprint, so every midpoint is too.
  double lo = t_prev, hi = t_hit;
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double x = origin.x + mid * direction.x;
    const double y = origin.y + mid * direction.y;
    const double z = origin.z + mid * direction.z;
    if (z <= field.height_at_unchecked(x, y))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// One full revolution as a regular (ring, column) grid; rays are emitted at
// the range-image bin-center azimuths so an idealized scan rasterizes with
// one point per pixel. Hits are returned in the sensor frame; misses omitted.
inline PointCloud lidar_scan(const LidarModel& model, const Pose& base_pose,
                             const HeightField& field) {
  const Pose sensor = base_pose.compose(model.mount);
  PointCloud cloud;
  cloud.points.reserve(std::size_t(model.channels) * model.columns / 2);
  for (int ring = 0; ring < model.channels; ++ring) {
    const double theta = model.ring_inclination(ring);
    for (int col = 0; col < model.columns; ++col) {
      const double phi = column_center_azimuth(col);
      const Vec3 dir_sensor = direction_from_angles(phi, theta);
      const Vec3 dir_world = sensor.rotation * dir_sensor;
      const auto t = raycast(field, sensor.position, dir_world, model.max_range);
      if (t) cloud.push(dir_sensor * *t, ring, col);
    }
  }
  return cloud;
}

// Pinhole render storing z-depth (distance along the optical axis). Returns
// shallower than kRangeClipMin are dropped as self-occlusion artifacts;
// deeper than kRangeClipMax are clamped, preserving "far" ordering.
inline DepthImage depth_render(const DepthCameraModel& model,
                               const Pose& base_pose, const HeightField& field) {
  model.validate();
  const Pose camera = base_pose.compose(model.mount);
  DepthImage img(model.width, model.height);
  for (int v = 0; v < model.height; ++v) {
    for (int u = 0; u < model.width; ++u) {
      const Vec3 dir_cam = model.pixel_ray(u, v);
      const Vec3 dir_world = camera.rotation * dir_cam;
      const auto t =
          raycast(field, camera.position, dir_world, model.max_range);
      if (!t) continue;
      const double z_depth = *t * dir_cam.x;  // cosine onto the optical axis
      if (z_depth < kRangeClipMin) continue;
      const std::size_t i = img.index(u, v);
      img.values[i] = static_cast<float>(std::min(z_depth, kRangeClipMax));
      img.valid[i] = 1;
    }
  }
  return img;
}

// Recover the sensor-frame point for a depth pixel. Exact inverse of
// depth_render for unclamped pixels, since z-depth fixes the ray scale.
inline Vec3 depth_pixel_to_point(const DepthCameraModel& model, int u, int v,
                                 double z_depth) {
  const Vec3 ray = model.pixel_ray(u, v);
  const double t = z_depth / ray.x;
  return ray * t;
}

namespace detail {

template <typename ImageT>
int stamp_ellipse(ImageT& img, double cu, double cv, double a, double b,
                  long budget) {
  // Counts covered pixels first; stamps only when the budget allows.
  std::vector<std::size_t> hit;
  const int u0 = std::max(0, int(std::floor(cu - a)));
  const int u1 = std::min(img.width - 1, int(std::ceil(cu + a)));
  const int v0 = std::max(0, int(std::floor(cv - b)));
  const int v1 = std::min(img.height - 1, int(std::ceil(cv + b)));
  for (int v = v0; v <= v1; ++v)
    for (int u = u0; u <= u1; ++u) {
      const double du = (u - cu) / a;
      const double dv = (v - cv) / b;
      if (du * du + dv * dv <= 1.0) hit.push_back(img.index(u, v));
    }
  if (static_cast<long>(hit.size()) > budget) return -1;
  for (std::size_t i : hit) img.valid[i] = 0;
  return static_cast<int>(hit.size());
}

}  // namespace detail

// Training-time corruption: i.i.d. Gaussian range noise on valid pixels
// (re-clipped to the operating range) plus 1-3 random axis-aligned elliptical
// occlusions covering at most max_occlusion_fraction of the image area.
// Deterministic per seed. Zero sigma / zero fraction stages are skipped
// entirely so they cannot perturb the input.
template <typename ImageT>
ImageT corrupt(const ImageT& image, std::uint64_t seed, double noise_sigma,
               double max_occlusion_fraction) {
  if (noise_sigma < 0.0)
    throw std::invalid_argument("corrupt: noise_sigma must be >= 0");
  if (max_occlusion_fraction < 0.0 || max_occlusion_fraction > 0.2)
    throw std::invalid_argument("corrupt: occlusion fraction must be in [0, 0.2]");

  ImageT out = image;
  SplitMix64 rng(seed);

  if (noise_sigma > 0.0) {
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      if (!out.valid[i]) continue;
      double v = out.values[i] + noise_sigma * rng.gaussian();
      v = std::min(std::max(v, kRangeClipMin), kRangeClipMax);
      out.values[i] = static_cast<float>(v);
    }
  }

  if (max_occlusion_fraction > 0.0) {
    const long total_px = static_cast<long>(out.values.size());
    long budget = static_cast<long>(max_occlusion_fraction * total_px);
    const int count = 1 + static_cast<int>(rng.next_below(3));
    for (int e = 0; e < count && budget > 0; ++e) {
      const double cu = rng.uniform(0.0, out.width);
      const double cv = rng.uniform(0.0, out.height);
      const double share = rng.uniform(0.3, 1.0) / count;
      double area = share * max_occlusion_fraction * total_px;
      const double aspect = rng.uniform(0.4, 2.5);
      double a = std::max(1.0, std::sqrt(area * aspect / kPi));
      double b = std::max(1.0, a / aspect);
      // Shrink until the pixelized ellipse fits the remaining budget.
      for (int tries = 0; tries < 32; ++tries) {
        const int stamped = detail::stamp_ellipse(out, cu, cv, a, b, budget);
        if (stamped >= 0) {
          budget -= stamped;
          break;
        }
        a *= 0.8;
        b *= 0.8;
        if (a < 1.0 && b < 1.0) break;
      }
    }
  }
  return out;
}

}  // namespace relief

#endif  // RELIEF_SENSOR_HPP
