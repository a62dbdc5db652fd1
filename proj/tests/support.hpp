#pragma once

// Independent oracles used by the unit and acceptance tests. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kMu = 398600.4418;
inline constexpr double kRe = 6378.137;
inline constexpr double kJ2 = 1.08262668e-3;

inline double d2r(double d) { return d * kPi / 180.0; }
inline double r2d(double r) { return r * 180.0 / kPi; }

/// Haversine great-circle distance, degrees.
inline double haversine_deg(double lat1, double lon1, double lat2, double lon2) {
  const double dlat = d2r(lat2 - lat1), dlon = d2r(lon2 - lon1);
  const double a = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(d2r(lat1)) * std::cos(d2r(lat2)) * std::pow(std::sin(dlon / 2), 2);
  return r2d(2.0 * std::asin(std::min(1.0, std::sqrt(a))));
}

using V3 = std::array<double, 3>;

inline V3 add(const V3& a, const V3& b, double s = 1.0) { return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]}; }

/// Two-body plus J2 acceleration in an inertial frame, km/s^2.
inline V3 accel(const V3& r) {
  const double r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
  const double rn = std::sqrt(r2);
  const double k = -kMu / (r2 * rn);
  const double z2 = r[2] * r[2] / r2;
  const double f = 1.5 * kJ2 * kMu * kRe * kRe / (r2 * r2 * rn);
  return {k * r[0] + f * r[0] * (5 * z2 - 1), k * r[1] + f * r[1] * (5 * z2 - 1), k * r[2] + f * r[2] * (5 * z2 - 3)};
}

struct State {
  V3 r, v;
};

inline State rk4_step(const State& s, double h) {
  auto deriv = [](const State& x) { return State{x.v, accel(x.r)}; };
  const State k1 = deriv(s);
  const State k2 = deriv({add(s.r, k1.r, h / 2), add(s.v, k1.v, h / 2)});
  const State k3 = deriv({add(s.r, k2.r, h / 2), add(s.v, k2.v, h / 2)});
  const State k4 = deriv({add(s.r, k3.r, h), add(s.v, k3.v, h)});
  State out = s;
  for (int i = 0; i < 3; ++i) {
    out.r[i] += h / 6 * (k1.r[i] + 2 * k2.r[i] + 2 * k3.r[i] + k4.r[i]);
    out.v[i] += h / 6 * (k1.v[i] + 2 * k2.v[i] + 2 * k3.v[i] + k4.v[i]);
  }
  return out;
}

/// RAAN of the osculating orbit plane, degrees (unwrapped by the caller).
inline double raan_deg(const State& s) {
  const V3 h{s.r[1] * s.v[2] - s.r[2] * s.v[1], s.r[2] * s.v[0] - s.r[0] * s.v[2], s.r[0] * s.v[1] - s.r[1] * s.v[0]};
  return r2d(std::atan2(h[0], -h[1]));
}

/// Numerically propagates a circular orbit (RAAN 0, start at the ascending
/// node) and fits a line to the unwrapped RAAN history. Returns deg/day.
inline double measured_raan_drift_deg_day(double altitude_km, double inclination_deg, double days = 10.0,
                                          double step_s = 10.0) {
  const double a = kRe + altitude_km;
  const double v = std::sqrt(kMu / a);
  const double i = d2r(inclination_deg);
  State s{{a, 0, 0}, {0, v * std::cos(i), v * std::sin(i)}};
  const int steps = static_cast<int>(days * 86400.0 / step_s);
  const int every = std::max(1, static_cast<int>(600.0 / step_s));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, prev = raan_deg(s), unwrapped = prev;
  int n = 0;
  for (int k = 0; k <= steps; ++k) {
    if (k % every == 0) {
      const double cur = raan_deg(s);
      double d = cur - prev;
      if (d > 180) d -= 360;
      if (d < -180) d += 360;
      unwrapped += d;
      prev = cur;
      const double t = k * step_s / 86400.0;
      sx += t;
      sy += unwrapped;
      sxx += t * t;
      sxy += t * unwrapped;
      ++n;
    }
    s = rk4_step(s, step_s);
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
#ifdef CONSTEL_TEST_TMP
  std::filesystem::path p = std::filesystem::path(CONSTEL_TEST_TMP) / name;
#else
  std::filesystem::path p = std::filesystem::temp_directory_path() / ("constel_" + name);
#endif
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Minimum number of planes (multiset over `candidates` trace sets, size up
/// to max_k) whose cover counts meet integer `demand` everywhere; -1 if none.
inline int brute_force_min_cover(const std::vector<std::vector<std::size_t>>& candidates,
                                 const std::vector<int>& demand, int max_k) {
  const int c = static_cast<int>(candidates.size());
  std::vector<int> count(demand.size(), 0);
  auto ok = [&] {
    for (std::size_t x = 0; x < demand.size(); ++x)
      if (count[x] < demand[x]) return false;
    return true;
  };
  // Depth-first over non-decreasing candidate indices.
  std::vector<int> pick;
  auto rec = [&](auto&& self, int start, int k) -> bool {
    if (static_cast<int>(pick.size()) == k) return ok();
    for (int j = start; j < c; ++j) {
      for (auto cell : candidates[j]) ++count[cell];
      pick.push_back(j);
      const bool found = self(self, j, k);
      pick.pop_back();
      for (auto cell : candidates[j]) --count[cell];
      if (found) return true;
    }
    return false;
  };
  for (int k = 0; k <= max_k; ++k)
    if (rec(rec, 0, k)) return k;
  return -1;
}

/// Type-7 (linear interpolation) quantile, written out independently.
inline double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(v.size() - 1, lo + 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

}  // namespace oracle
