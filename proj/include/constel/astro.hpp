#pragma once

// Circular-orbit mechanics with secular J2: periods, nodal precession,
// sun-synchronous inclination, repeat ground tracks and ground-track
// propagation in the earth-fixed and sun-fixed frames.
//
// Frame conventions:
//   t = 0 is midnight UTC at Greenwich. The inertial x axis points at the
//   Greenwich meridian at t = 0, so the Greenwich hour angle is w_E * t.
//   The mean sun sits at right ascension 180 deg at t = 0 and advances at
//   360 deg per tropical year. With these choices an orbit with RAAN r at
//   t = 0 has LTAN r / 15 hours.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "constel/error.hpp"
#include "constel/geo.hpp"
#include "constel/io.hpp"

namespace constel {

struct EarthConstants {
  double equatorial_radius_km;
  double gravitational_parameter_km3_s2;
  double j2;
  double sidereal_day_s;
  double tropical_year_days;

  constexpr double earth_rotation_rate_deg_s() const { return 360.0 / sidereal_day_s; }
};

inline constexpr EarthConstants kEarth{6378.137, 398600.4418, 1.08262668e-3, 86164.0905, 365.2422};

inline constexpr double kSecondsPerDay = 86400.0;

/// Mean-sun right-ascension rate in deg/s; the sun-synchronous precession target.
constexpr double sun_mean_motion_deg_s() {
  return 360.0 / (kEarth.tropical_year_days * kSecondsPerDay);
}

constexpr double sun_mean_motion_deg_day() { return 360.0 / kEarth.tropical_year_days; }

/// Circular orbit. Eccentricity is always zero.
struct OrbitSpec {
  double altitude_km = 0.0;
  double inclination_deg = 0.0;
  double raan_deg = 0.0;   ///< at epoch
  double phase_deg = 0.0;  ///< argument of latitude at epoch
  double epoch_s = 0.0;    ///< seconds from reference midnight UTC

  bool retrograde() const { return inclination_deg > 90.0; }

  void validate() const {
    require(std::isfinite(altitude_km) && altitude_km > 0.0, ErrorKind::invalid_input,
            "altitude_km must be > 0");
    require(std::isfinite(inclination_deg) && inclination_deg >= 0.0 && inclination_deg <= 180.0,
            ErrorKind::invalid_input, "inclination_deg must be in [0, 180]");
    require(std::isfinite(raan_deg) && std::isfinite(phase_deg) && std::isfinite(epoch_s),
            ErrorKind::invalid_input, "orbit angles and epoch must be finite");
  }
};

namespace detail {
inline void check_altitude(double altitude_km) {
  require(std::isfinite(altitude_km) && altitude_km >= 0.0, ErrorKind::invalid_input,
          "altitude_km must be >= 0");
}
inline void check_inclination(double inclination_deg) {
  require(std::isfinite(inclination_deg) && inclination_deg >= 0.0 && inclination_deg <= 180.0,
          ErrorKind::invalid_input, "inclination_deg must be in [0, 180]");
}
// 1.5 * J2 * (Re/a)^2, the common secular J2 factor for circular orbits.
inline double j2_factor(double altitude_km) {
  const double ratio = kEarth.equatorial_radius_km / (kEarth.equatorial_radius_km + altitude_km);
  return 1.5 * kEarth.j2 * ratio * ratio;
}
}  // namespace detail

inline double semi_major_axis_km(double altitude_km) {
  return kEarth.equatorial_radius_km + altitude_km;
}

/// Keplerian mean motion in rad/s.
inline double mean_motion_rad_s(double altitude_km) {
  detail::check_altitude(altitude_km);
  const double a = semi_major_axis_km(altitude_km);
  return std::sqrt(kEarth.gravitational_parameter_km3_s2 / (a * a * a));
}

/// Keplerian period 2*pi*sqrt(a^3/mu), seconds.
inline double orbital_period(double altitude_km) {
  return 2.0 * kPi / mean_motion_rad_s(altitude_km);
}

/// Secular J2 RAAN drift in deg/s.
inline double nodal_precession_rate_deg_s(double altitude_km, double inclination_deg) {
  detail::check_inclination(inclination_deg);
  const double n = mean_motion_rad_s(altitude_km);
  return rad2deg(-detail::j2_factor(altitude_km) * n * std::cos(deg2rad(inclination_deg)));
}

/// Secular J2 RAAN drift in deg/day (negative = westward).
inline double nodal_precession_rate(double altitude_km, double inclination_deg) {
  return nodal_precession_rate_deg_s(altitude_km, inclination_deg) * kSecondsPerDay;
}

/// Rate of the argument of latitude including the secular J2 terms of both
/// perigee motion and mean anomaly: n * (1 + 1.5 J2 (Re/a)^2 (4 cos^2 i - 1)).
inline double argument_of_latitude_rate_deg_s(double altitude_km, double inclination_deg) {
  detail::check_inclination(inclination_deg);
  const double n = mean_motion_rad_s(altitude_km);
  const double c = std::cos(deg2rad(inclination_deg));
  return rad2deg(n * (1.0 + detail::j2_factor(altitude_km) * (4.0 * c * c - 1.0)));
}

/// Draconic period: time between successive ascending-node crossings.
inline double nodal_period(double altitude_km, double inclination_deg) {
  return 360.0 / argument_of_latitude_rate_deg_s(altitude_km, inclination_deg);
}

/// Time for the earth to turn once relative to the precessing orbit plane.
inline double nodal_day(double altitude_km, double inclination_deg) {
  return 360.0 / (kEarth.earth_rotation_rate_deg_s() -
                  nodal_precession_rate_deg_s(altitude_km, inclination_deg));
}

/// Inclination whose J2 precession equals the mean sun's motion. Uses the
/// closed form cos i = -sdot / (1.5 J2 (Re/a)^2 n); result lies in (90, 180).
inline double sun_synchronous_inclination(double altitude_km) {
  const double n = mean_motion_rad_s(altitude_km);
  const double cos_i =
      -deg2rad(sun_mean_motion_deg_s()) / (detail::j2_factor(altitude_km) * n);
  if (!(cos_i >= -1.0 && cos_i <= 1.0)) {
    fail(ErrorKind::no_sun_sync_solution,
         "no sun-synchronous inclination at altitude " + std::to_string(altitude_km) + " km");
  }
  return rad2deg(std::acos(cos_i));
}

/// p nodal days = q nodal periods at the given altitude and inclination.
struct RgtSolution {
  int repeat_days_p = 1;
  int orbits_q = 1;
  double altitude_km = 0.0;
  double inclination_deg = 0.0;

  double repeat_period_s() const { return orbits_q * nodal_period(altitude_km, inclination_deg); }
};

inline constexpr const char* kRgtModel = "nodal-j2: q*T_node = p*T_nodal_day";

namespace detail {
// Positive below the repeat altitude, negative above it.
inline double rgt_residual(double altitude_km, double inclination_deg, int p, int q) {
  const double node_rate = argument_of_latitude_rate_deg_s(altitude_km, inclination_deg);
  const double day_rate =
      kEarth.earth_rotation_rate_deg_s() - nodal_precession_rate_deg_s(altitude_km, inclination_deg);
  return p * node_rate - q * day_rate;
}
}  // namespace detail

/// Every coprime (p, q) with p <= max_repeat_days whose repeat altitude lies in
/// [alt_min_km, alt_max_km]; bisection to 1 m, sorted by altitude.
inline std::vector<RgtSolution> find_rgt_orbits(double alt_min_km, double alt_max_km,
                                                 double inclination_deg, int max_repeat_days) {
  detail::check_altitude(alt_min_km);
  detail::check_inclination(inclination_deg);
  require(alt_min_km < alt_max_km, ErrorKind::invalid_input, "alt_min_km must be < alt_max_km");
  require(max_repeat_days >= 1, ErrorKind::invalid_input, "max_repeat_days must be >= 1");

  auto revs_per_day = [&](double h) {
    return argument_of_latitude_rate_deg_s(h, inclination_deg) /
           (kEarth.earth_rotation_rate_deg_s() - nodal_precession_rate_deg_s(h, inclination_deg));
  };
  const double r_hi = revs_per_day(alt_min_km);
  const double r_lo = revs_per_day(alt_max_km);

  std::vector<RgtSolution> out;
  for (int p = 1; p <= max_repeat_days; ++p) {
    const int q_min = static_cast<int>(std::ceil(p * r_lo));
    const int q_max = static_cast<int>(std::floor(p * r_hi));
    for (int q = std::max(1, q_min); q <= q_max; ++q) {
      if (std::gcd(p, q) != 1) continue;
      double lo = alt_min_km;
      double hi = alt_max_km;
      const double f_lo = detail::rgt_residual(lo, inclination_deg, p, q);
      const double f_hi = detail::rgt_residual(hi, inclination_deg, p, q);
      if (f_lo == 0.0) {
        out.push_back({p, q, lo, inclination_deg});
        continue;
      }
      if ((f_lo > 0.0) == (f_hi > 0.0)) continue;
      while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if ((detail::rgt_residual(mid, inclination_deg, p, q) > 0.0) == (f_lo > 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out.push_back({p, q, 0.5 * (lo + hi), inclination_deg});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const RgtSolution& a, const RgtSolution& b) { return a.altitude_km < b.altitude_km; });
  return out;
}

/// Mean solar time in hours: utc hour of day + lon / 15, wrapped to [0, 24).
inline double local_solar_time(double lon_deg, double utc_s) {
  return wrap24(wrap_positive(utc_s / 3600.0, 24.0) + lon_deg / 15.0);
}

enum class Frame { earth, solar };

/// One propagated sample. Both horizontal coordinates are filled; `lon_deg`
/// is earth-fixed and `lst_h` is the mean local solar time under the satellite.
struct GroundTrackSample {
  double time_s = 0.0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double lst_h = 0.0;
  double alt_km = 0.0;
};

/// Unit vector of argument of latitude u on a plane with the given node longitude.
inline Vec3 orbit_direction(double node_deg, double u_deg, double sin_i, double cos_i) {
  const double cn = std::cos(deg2rad(node_deg));
  const double sn = std::sin(deg2rad(node_deg));
  const double cu = std::cos(deg2rad(u_deg));
  const double su = std::sin(deg2rad(u_deg));
  return {cn * cu - sn * su * cos_i, sn * cu + cn * su * cos_i, su * sin_i};
}

/// Precomputed secular rates; evaluating positions is then a handful of trig calls.
class CircularPropagator {
 public:
  explicit CircularPropagator(const OrbitSpec& orbit)
      : orbit_(orbit),
        raan_rate_(0.0),
        u_rate_(0.0),
        sin_i_(0.0),
        cos_i_(0.0) {
    orbit_.validate();
    raan_rate_ = nodal_precession_rate_deg_s(orbit.altitude_km, orbit.inclination_deg);
    u_rate_ = argument_of_latitude_rate_deg_s(orbit.altitude_km, orbit.inclination_deg);
    sin_i_ = std::sin(deg2rad(orbit.inclination_deg));
    cos_i_ = std::cos(deg2rad(orbit.inclination_deg));
  }

  const OrbitSpec& orbit() const { return orbit_; }
  double raan_rate_deg_s() const { return raan_rate_; }
  double u_rate_deg_s() const { return u_rate_; }

  double raan_at(double t) const { return orbit_.raan_deg + raan_rate_ * (t - orbit_.epoch_s); }
  double u_at(double t) const { return orbit_.phase_deg + u_rate_ * (t - orbit_.epoch_s); }

  /// Earth-fixed unit vector of the subsatellite point at absolute time t.
  Vec3 earth_fixed(double t) const {
    return direction(raan_at(t) - kEarth.earth_rotation_rate_deg_s() * t, u_at(t));
  }

  /// Unit vector in the sun-fixed frame; the x axis points at the mean sun.
  Vec3 sun_fixed(double t) const { return direction(raan_at(t) - sun_ra(t), u_at(t)); }

  GroundTrackSample sample(double t) const {
    const Vec3 e = earth_fixed(t);
    const Vec3 s = sun_fixed(t);
    GroundTrackSample out;
    out.time_s = t;
    out.lat_deg = lat_of(e);
    out.lon_deg = wrap180(lon_of(e));
    out.lst_h = wrap24(12.0 + lon_of(s) / 15.0);
    out.alt_km = orbit_.altitude_km;
    return out;
  }

  static double sun_ra(double t) { return 180.0 + sun_mean_motion_deg_s() * t; }

 private:
  Vec3 direction(double node_deg, double u_deg) const {
    return orbit_direction(node_deg, u_deg, sin_i_, cos_i_);
  }

  OrbitSpec orbit_;
  double raan_rate_;
  double u_rate_;
  double sin_i_;
  double cos_i_;
};

/// Samples t = epoch + k*step for k*step <= duration. Circular two-body motion
/// with secular J2 drift of both RAAN and argument of latitude.
inline std::vector<GroundTrackSample> propagate_ground_track(const OrbitSpec& orbit,
                                                             double duration_s, double step_s,
                                                             Frame frame = Frame::earth) {
  (void)frame;  // both coordinates are always filled; the frame picks the CSV columns
  require(std::isfinite(duration_s) && duration_s > 0.0, ErrorKind::invalid_input,
          "duration_s must be > 0");
  require(std::isfinite(step_s) && step_s > 0.0 && step_s <= duration_s, ErrorKind::invalid_input,
          "step_s must be in (0, duration_s]");
  const CircularPropagator prop(orbit);
  const auto count = static_cast<std::size_t>(std::floor(duration_s / step_s + 1e-9)) + 1;
  std::vector<GroundTrackSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(prop.sample(orbit.epoch_s + static_cast<double>(k) * step_s));
  }
  return out;
}

inline void write_ground_track_csv(std::ostream& os, const std::vector<GroundTrackSample>& samples,
                                   Frame frame) {
  os << (frame == Frame::earth ? "time_s,lat_deg,lon_deg,alt_km\n" : "time_s,lat_deg,lst_h,alt_km\n");
  for (const auto& s : samples) {
    os << fmt_num(s.time_s) << ',' << fmt_num(s.lat_deg) << ','
       << fmt_num(frame == Frame::earth ? s.lon_deg : s.lst_h) << ',' << fmt_num(s.alt_km) << '\n';
  }
}

}  // namespace constel
