#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace constel {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps into [0, period).
inline double wrap_positive(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

inline double wrap360(double deg) { return wrap_positive(deg, 360.0); }
inline double wrap24(double hours) { return wrap_positive(hours, 24.0); }

/// Wraps into [-180, 180).
inline double wrap180(double deg) { return wrap_positive(deg + 180.0, 360.0) - 180.0; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

inline Vec3 unit_from_latlon(double lat_deg, double lon_deg) {
  const double phi = deg2rad(lat_deg);
  const double lam = deg2rad(lon_deg);
  return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

inline double lat_of(const Vec3& v) { return rad2deg(std::asin(std::clamp(v.z, -1.0, 1.0))); }
inline double lon_of(const Vec3& v) { return rad2deg(std::atan2(v.y, v.x)); }

/// Great-circle central angle in degrees (haversine form, well conditioned for small angles).
inline double central_angle_deg(double lat1, double lon1, double lat2, double lon2) {
  const double dphi = deg2rad(lat2 - lat1);
  const double dlam = deg2rad(lon2 - lon1);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(deg2rad(lat1)) * std::cos(deg2rad(lat2)) * s2 * s2;
  return rad2deg(2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0))));
}

}  // namespace constel
