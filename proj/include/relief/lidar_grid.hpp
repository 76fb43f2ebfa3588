#ifndef RELIEF_LIDAR_GRID_HPP
#define RELIEF_LIDAR_GRID_HPP

// Angular grid shared by the scan simulator and the spherical projection.
//
// Azimuth: 360 degrees over 276 columns, seam at the rear of the base.
// phi = +pi (rear) maps to column 0, phi = 0 (front) to column 138; columns
// advance clockwise when viewed from above (decreasing phi).
// Inclination: [-7, +52] degrees over 40 rows, row 0 at the top (+52).

#include <cmath>

#include "relief/geometry.hpp"

namespace relief {

constexpr int kRangeImageWidth = 276;
constexpr int kRangeImageHeight = 40;
constexpr double kLidarInclinationMinDeg = -7.0;
constexpr double kLidarInclinationMaxDeg = 52.0;
constexpr double kLidarInclinationSpanDeg =
    kLidarInclinationMaxDeg - kLidarInclinationMinDeg;  // 59

inline int azimuth_to_column(double phi) {
  const double t = (kPi - phi) / (2.0 * kPi) * kRangeImageWidth;
  int c = static_cast<int>(std::floor(t));
  if (c < 0) c = 0;
  if (c >= kRangeImageWidth) c = kRangeImageWidth - 1;
  return c;
}

// Row for an inclination inside the FOV; -1 when outside. A hair of slack at
// the boundary keeps rays emitted exactly on the FOV edge from being dropped
// after a round trip through Cartesian coordinates.
inline int inclination_to_row(double theta) {
  constexpr double kEdgeTolDeg = 1e-9;
  const double deg = rad2deg(theta);
  if (deg < kLidarInclinationMinDeg - kEdgeTolDeg ||
      deg > kLidarInclinationMaxDeg + kEdgeTolDeg)
    return -1;
  const double t =
      (kLidarInclinationMaxDeg - deg) / kLidarInclinationSpanDeg * kRangeImageHeight;
  int r = static_cast<int>(std::floor(t));
  if (r < 0) r = 0;
  if (r >= kRangeImageHeight) r = kRangeImageHeight - 1;
  return r;
}

inline double column_center_azimuth(int column) {
  return kPi - (column + 0.5) * (2.0 * kPi / kRangeImageWidth);
}

inline double row_center_inclination(int row) {
  return deg2rad(kLidarInclinationMaxDeg -
                 (row + 0.5) * kLidarInclinationSpanDeg / kRangeImageHeight);
}

inline Vec3 direction_from_angles(double azimuth, double inclination) {
  const double c = std::cos(inclination);
  return {c * std::cos(azimuth), c * std::sin(azimuth), std::sin(inclination)};
}

}  // namespace relief

#endif  // RELIEF_LIDAR_GRID_HPP
