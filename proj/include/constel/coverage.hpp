#pragma once

// Footprint geometry and minimum-satellite sizing for a single repeat ground
// track and for Walker-delta shells.
//
// Both sizing searches have a plain brute-force counterpart here
// (count_uncovered_*_samples) that re-derives coverage from haversine
// distances over the same sample set. The searches never call them.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "constel/astro.hpp"
#include "constel/error.hpp"
#include "constel/geo.hpp"
#include "constel/io.hpp"
#include "constel/parallel.hpp"

namespace constel {

/// Earth central angle of the footprint edge: acos(Re/(Re+h) * cos e) - e, degrees.
inline double earth_central_angle(double altitude_km, double min_elevation_deg) {
  detail::check_altitude(altitude_km);
  require(std::isfinite(min_elevation_deg) && min_elevation_deg >= 0.0 && min_elevation_deg < 90.0,
          ErrorKind::invalid_input, "min_elevation_deg must be in [0, 90)");
  const double ratio = kEarth.equatorial_radius_km / (kEarth.equatorial_radius_km + altitude_km);
  const double eps = deg2rad(min_elevation_deg);
  return rad2deg(std::acos(ratio * std::cos(eps)) - eps);
}

/// Coverage footprint. Normally derived from a minimum elevation angle; a fixed
/// central angle can be pinned instead (useful for sweeps over lambda itself).
struct FootprintSpec {
  double min_elevation_deg = 25.0;
  double fixed_central_angle_deg = 0.0;  ///< > 0 overrides the elevation geometry

  static FootprintSpec from_elevation(double elevation_deg) {
    require(std::isfinite(elevation_deg) && elevation_deg >= 0.0 && elevation_deg < 90.0,
            ErrorKind::invalid_input, "min_elevation_deg must be in [0, 90)");
    return FootprintSpec{elevation_deg, 0.0};
  }

  static FootprintSpec from_central_angle(double lambda_deg) {
    require(std::isfinite(lambda_deg) && lambda_deg > 0.0, ErrorKind::invalid_input,
            "central angle must be > 0");
    return FootprintSpec{0.0, std::min(lambda_deg, 180.0)};
  }

  double central_angle_deg(double altitude_km) const {
    if (fixed_central_angle_deg > 0.0) return fixed_central_angle_deg;
    return earth_central_angle(altitude_km, min_elevation_deg);
  }

  std::string describe() const {
    if (fixed_central_angle_deg > 0.0) return "central_angle_deg=" + fmt_num(fixed_central_angle_deg);
    return "min_elevation_deg=" + fmt_num(min_elevation_deg);
  }
};

/// Sampling used by every coverage search and oracle.
struct CoverageResolution {
  double time_step_s = 60.0;
  double grid_step_deg = 1.0;
};

/// True iff the great-circle distance between subpoint and target is <= lambda.
inline bool is_covered(double sat_lat, double sat_lon, double tgt_lat, double tgt_lon,
                       double lambda_deg) {
  return central_angle_deg(sat_lat, sat_lon, tgt_lat, tgt_lon) <= lambda_deg;
}

/// Latitude band |lat| <= band_limit discretized into cells; `covered` is scratch space.
struct CoverageGrid {
  double lat_step_deg = 1.0;
  double lon_step_deg = 1.0;
  double band_limit_deg = 90.0;
  int n_lat = 0;
  int n_lon = 0;
  std::vector<std::uint8_t> covered;

  static CoverageGrid make(double band_limit_deg, double lat_step_deg, double lon_step_deg) {
    require(band_limit_deg >= 0.0 && band_limit_deg <= 90.0, ErrorKind::invalid_input,
            "band_limit_deg must be in [0, 90]");
    require(lat_step_deg > 0.0 && lon_step_deg > 0.0, ErrorKind::invalid_input,
            "grid steps must be > 0");
    CoverageGrid g;
    g.lat_step_deg = lat_step_deg;
    g.lon_step_deg = lon_step_deg;
    g.band_limit_deg = band_limit_deg;
    g.n_lat = std::max(1, static_cast<int>(std::ceil(2.0 * band_limit_deg / lat_step_deg - 1e-9)));
    g.n_lon = static_cast<int>(std::ceil(360.0 / lon_step_deg - 1e-9));
    g.covered.assign(g.size(), 0);
    return g;
  }

  std::size_t size() const { return static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon); }

  double lat_center(int i) const {
    return std::min(-band_limit_deg + (i + 0.5) * lat_step_deg, band_limit_deg);
  }
  double lon_center(int j) const { return -180.0 + (j + 0.5) * lon_step_deg; }
};

/// Walker-delta i:T/P/F at one altitude.
struct WalkerConfig {
  double inclination_deg = 0.0;
  int total_sats = 0;
  int planes = 0;
  int phasing = 0;
  double altitude_km = 0.0;

  int sats_per_plane() const { return planes > 0 ? total_sats / planes : 0; }

  void validate() const {
    require(total_sats >= 1 && planes >= 1 && total_sats % planes == 0, ErrorKind::invalid_input,
            "walker: planes must divide total_sats");
    require(phasing >= 0 && phasing < planes, ErrorKind::invalid_input,
            "walker: phasing must be in [0, planes)");
    detail::check_altitude(altitude_km);
    detail::check_inclination(inclination_deg);
  }

  double raan_of(int plane) const { return 360.0 * plane / planes; }
  double phase_of(int plane, int slot) const {
    return 360.0 * slot / sats_per_plane() + 360.0 * phasing * plane / total_sats;
  }

  std::vector<OrbitSpec> satellites() const {
    validate();
    std::vector<OrbitSpec> out;
    out.reserve(static_cast<std::size_t>(total_sats));
    for (int j = 0; j < planes; ++j) {
      for (int k = 0; k < sats_per_plane(); ++k) {
        out.push_back({altitude_km, inclination_deg, raan_of(j), phase_of(j, k), 0.0});
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Single repeat ground track
// ---------------------------------------------------------------------------

/// Track points are spaced so consecutive samples are at most grid_step_deg
/// apart along the orbit.
inline std::size_t rgt_track_point_count(const RgtSolution& rgt, double spacing_deg) {
  const double period = rgt.repeat_period_s();
  const double rate = argument_of_latitude_rate_deg_s(rgt.altitude_km, rgt.inclination_deg);
  return static_cast<std::size_t>(std::ceil(period * rate / spacing_deg - 1e-9));
}

inline OrbitSpec rgt_reference_orbit(const RgtSolution& rgt) {
  return OrbitSpec{rgt.altitude_km, rgt.inclination_deg, 0.0, 0.0, 0.0};
}

/// Number of sampled offsets t_j = j * step with t_j < slot (at least one).
inline std::size_t sampled_offset_count(double slot_s, double step_s) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(slot_s / step_s - 1e-12)));
}

namespace detail {

struct Arc {
  double start = 0.0;   ///< in [0, period)
  double length = 0.0;  ///< may wrap past period
};

// For every track point, the set of track times whose subpoint lies within
// lambda of it, as arcs on the circle [0, period).
struct RgtVisibility {
  double period_s = 0.0;
  std::vector<std::vector<Arc>> arcs;
};

inline RgtVisibility rgt_visibility(const RgtSolution& rgt, double lambda_deg, double spacing_deg) {
  const CircularPropagator prop(rgt_reference_orbit(rgt));
  RgtVisibility vis;
  vis.period_s = rgt.repeat_period_s();
  const std::size_t m = rgt_track_point_count(rgt, spacing_deg);
  const double h = vis.period_s / static_cast<double>(m);
  std::vector<Vec3> pts(m);
  for (std::size_t k = 0; k < m; ++k) pts[k] = prop.earth_fixed(static_cast<double>(k) * h);
  const double c = std::cos(deg2rad(std::min(lambda_deg, 180.0)));
  vis.arcs.resize(m);

  parallel_for(m, [&](std::size_t i) {
    const Vec3 p = pts[i];
    std::vector<std::uint8_t> in(m);
    std::size_t outside = m;
    for (std::size_t k = 0; k < m; ++k) {
      in[k] = p.dot(pts[k]) >= c;
      if (!in[k]) outside = k;
    }
    auto& arcs = vis.arcs[i];
    if (outside == m) {
      arcs.push_back({0.0, vis.period_s});
      return;
    }
    // Boundary between samples a (value va) and a + h, refined by bisection.
    auto refine = [&](double lo, double hi, bool lo_inside) {
      for (int it = 0; it < 40 && hi - lo > 1e-7; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool mid_inside = p.dot(prop.earth_fixed(mid)) >= c;
        if (mid_inside == lo_inside) lo = mid; else hi = mid;
      }
      return 0.5 * (lo + hi);
    };
    double start = 0.0;
    for (std::size_t step = 1; step <= m; ++step) {
      const std::size_t k = (outside + step) % m;
      const std::size_t prev = (outside + step - 1) % m;
      const double t_prev = static_cast<double>(outside + step - 1) * h;
      const double t_k = t_prev + h;
      if (!in[prev] && in[k]) start = refine(t_prev, t_k, false);
      if (in[prev] && !in[k]) {
        const double end = refine(t_prev, t_k, true);
        arcs.push_back({wrap_positive(start, vis.period_s), end - start});
      }
    }
  });
  return vis;
}

// Does every sampled offset t_j hit, for every track point, a lattice
// t_j + k * (period / n) inside one of that point's arcs?
inline bool rgt_lattice_covers(const RgtVisibility& vis, int n, double time_step_s) {
  const double slot = vis.period_s / n;
  const std::size_t nt = sampled_offset_count(slot, time_step_s);
  for (const auto& arcs : vis.arcs) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double t = static_cast<double>(j) * time_step_s;
      bool hit = false;
      for (const auto& arc : arcs) {
        if (arc.length >= slot || wrap_positive(t - arc.start, slot) <= arc.length) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Smallest N such that N satellites equally spaced in time along the repeat
/// track keep every sampled track point within lambda of some satellite at
/// every sampled instant. Scans N upward, so N - 1 always fails.
inline int min_sats_single_rgt(const RgtSolution& rgt, const FootprintSpec& fp,
                               const CoverageResolution& res = {}, int max_sats = 100000) {
  require(rgt.repeat_days_p >= 1 && rgt.orbits_q >= 1, ErrorKind::invalid_input, "invalid RGT");
  require(res.time_step_s > 0.0 && res.grid_step_deg > 0.0, ErrorKind::invalid_input,
          "resolution must be positive");
  const double lambda = fp.central_angle_deg(rgt.altitude_km);
  const auto vis = detail::rgt_visibility(rgt, lambda, res.grid_step_deg);
  for (int n = 1; n <= max_sats; ++n) {
    if (detail::rgt_lattice_covers(vis, n, res.time_step_s)) return n;
  }
  fail(ErrorKind::infeasible, "single-RGT coverage needs more than " + std::to_string(max_sats) +
                                  " satellites (p=" + std::to_string(rgt.repeat_days_p) +
                                  ", q=" + std::to_string(rgt.orbits_q) + ")");
}

/// Brute-force oracle: counts (track point, instant) samples not within lambda
/// of any of the n satellites, using haversine distances on propagated
/// subpoints. Stops once `stop_after` misses are found.
inline std::size_t count_uncovered_rgt_samples(
    const RgtSolution& rgt, const FootprintSpec& fp, int n_sats, const CoverageResolution& res = {},
    std::size_t stop_after = std::numeric_limits<std::size_t>::max()) {
  require(n_sats >= 1, ErrorKind::invalid_input, "n_sats must be >= 1");
  const double lambda = fp.central_angle_deg(rgt.altitude_km);
  const CircularPropagator prop(rgt_reference_orbit(rgt));
  const double period = rgt.repeat_period_s();
  const std::size_t m = rgt_track_point_count(rgt, res.grid_step_deg);
  const double h = period / static_cast<double>(m);
  const double slot = period / n_sats;
  const std::size_t nt = sampled_offset_count(slot, res.time_step_s);
  const auto n = static_cast<std::size_t>(n_sats);

  std::vector<GroundTrackSample> sats(nt * n);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      sats[j * n + k] = prop.sample(static_cast<double>(j) * res.time_step_s + static_cast<double>(k) * slot);
    }
  }
  std::size_t misses = 0;
  for (std::size_t i = 0; i < m && misses < stop_after; ++i) {
    const double s = static_cast<double>(i) * h;
    const auto target = prop.sample(s);
    for (std::size_t j = 0; j < nt && misses < stop_after; ++j) {
      const double t = static_cast<double>(j) * res.time_step_s;
      // Visit satellites nearest along-track first; the predicate is unchanged.
      const auto nearest = static_cast<long long>(std::llround((s - t) / slot));
      bool hit = false;
      for (std::size_t d = 0; d < n && !hit; ++d) {
        const long long off = (d % 2 == 0) ? static_cast<long long>(d / 2) : -static_cast<long long>(d / 2 + 1);
        const auto k = static_cast<std::size_t>(((nearest + off) % n_sats + n_sats) % n_sats);
        const auto& sat = sats[j * n + k];
        hit = is_covered(sat.lat_deg, sat.lon_deg, target.lat_deg, target.lon_deg, lambda);
      }
      if (!hit) ++misses;
    }
  }
  return misses;
}

// ---------------------------------------------------------------------------
// Walker-delta shells
// ---------------------------------------------------------------------------

struct WalkerSearchCaps {
  int max_total_sats = 5000;
};

namespace detail {

// Checks one Walker configuration against every band cell at every sampled
// instant of one orbital period. Cells are probed first at t = 0 so most
// infeasible patterns are rejected after a few hundred distance tests.
class WalkerCoverageEvaluator {
 public:
  WalkerCoverageEvaluator(double altitude_km, double inclination_deg, double lambda_deg,
                          double band_deg, const CoverageResolution& res)
      : grid_(CoverageGrid::make(band_deg, res.grid_step_deg, res.grid_step_deg)),
        altitude_km_(altitude_km),
        inclination_deg_(inclination_deg),
        lambda_deg_(std::min(lambda_deg, 180.0)),
        cos_lambda_(std::cos(deg2rad(std::min(lambda_deg, 180.0)))),
        sin_i_(std::sin(deg2rad(inclination_deg))),
        cos_i_(std::cos(deg2rad(inclination_deg))),
        node_rate_(nodal_precession_rate_deg_s(altitude_km, inclination_deg) -
                   kEarth.earth_rotation_rate_deg_s()),
        u_rate_(argument_of_latitude_rate_deg_s(altitude_km, inclination_deg)) {
    const double period = orbital_period(altitude_km);
    for (double t = 0.0; t < period - 1e-9; t += res.time_step_s) instants_.push_back(t);
    cells_.resize(grid_.size());
    row_sin_.resize(static_cast<std::size_t>(grid_.n_lat));
    row_cos_.resize(static_cast<std::size_t>(grid_.n_lat));
    for (int i = 0; i < grid_.n_lat; ++i) {
      row_sin_[static_cast<std::size_t>(i)] = std::sin(deg2rad(grid_.lat_center(i)));
      row_cos_[static_cast<std::size_t>(i)] = std::cos(deg2rad(grid_.lat_center(i)));
      for (int j = 0; j < grid_.n_lon; ++j) {
        cells_[index(i, j)] = unit_from_latlon(grid_.lat_center(i), grid_.lon_center(j));
      }
    }
    const std::size_t n = cells_.size();
    std::size_t stride = 7919;
    while (std::gcd(stride, n) != 1) stride += 2;
    const std::size_t probes = std::min<std::size_t>(n, 256);
    for (std::size_t k = 0; k < probes; ++k) probe_order_.push_back((k * stride) % n);
  }

  // cos/sin of every multiple of 360/total; all Walker node and phase angles
  // at t = 0 are such multiples.
  struct AngleTable {
    int total = 0;
    std::vector<double> c;
    std::vector<double> s;
  };

  static AngleTable angle_table(int total) {
    AngleTable tab;
    tab.total = total;
    tab.c.resize(static_cast<std::size_t>(total));
    tab.s.resize(static_cast<std::size_t>(total));
    for (int m = 0; m < total; ++m) {
      const double a = 2.0 * kPi * m / total;
      tab.c[static_cast<std::size_t>(m)] = std::cos(a);
      tab.s[static_cast<std::size_t>(m)] = std::sin(a);
    }
    return tab;
  }

  bool feasible(int total, int planes, int phasing) const {
    return feasible(angle_table(total), planes, phasing);
  }

  bool feasible(const AngleTable& tab, int planes, int phasing) const {
    const int total = tab.total;
    const int per_plane = total / planes;
    std::vector<Vec3> sats(static_cast<std::size_t>(total));
    auto positions = [&](double t) {
      const double cdn = std::cos(deg2rad(node_rate_ * t));
      const double sdn = std::sin(deg2rad(node_rate_ * t));
      const double cdu = std::cos(deg2rad(u_rate_ * t));
      const double sdu = std::sin(deg2rad(u_rate_ * t));
      for (int j = 0; j < planes; ++j) {
        const auto node_idx = static_cast<std::size_t>(j * per_plane);
        const double cn = tab.c[node_idx] * cdn - tab.s[node_idx] * sdn;
        const double sn = tab.s[node_idx] * cdn + tab.c[node_idx] * sdn;
        for (int k = 0; k < per_plane; ++k) {
          const auto u_idx = static_cast<std::size_t>((k * planes + phasing * j) % total);
          const double cu = tab.c[u_idx] * cdu - tab.s[u_idx] * sdu;
          const double su = tab.s[u_idx] * cdu + tab.c[u_idx] * sdu;
          sats[static_cast<std::size_t>(j * per_plane + k)] = {cn * cu - sn * su * cos_i_,
                                                               sn * cu + cn * su * cos_i_, su * sin_i_};
        }
      }
    };
    positions(instants_.front());
    for (auto idx : probe_order_) {
      bool hit = false;
      for (const auto& s : sats) {
        if (s.dot(cells_[idx]) >= cos_lambda_) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
    std::vector<std::uint32_t> stamp(cells_.size(), 0);
    for (std::size_t ti = 0; ti < instants_.size(); ++ti) {
      if (ti > 0) positions(instants_[ti]);
      const auto mark = static_cast<std::uint32_t>(ti + 1);
      for (const auto& s : sats) rasterize(s, stamp, mark);
      for (auto v : stamp) {
        if (v != mark) return false;
      }
    }
    return true;
  }

  // Lower bound from areas: caps of radius lambda + half a cell diagonal must
  // tile the band shrunk by one cell.
  int area_lower_bound() const {
    if (lambda_deg_ >= 180.0) return 1;
    const double pad = grid_.lat_step_deg * std::sqrt(0.5);
    const double band = std::max(0.0, grid_.band_limit_deg - grid_.lat_step_deg);
    const double cap = 1.0 - std::cos(deg2rad(std::min(180.0, lambda_deg_ + pad)));
    return std::max(1, static_cast<int>(std::ceil(2.0 * std::sin(deg2rad(band)) / cap - 1e-9)));
  }

  double altitude_km() const { return altitude_km_; }
  double inclination_deg() const { return inclination_deg_; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.n_lon) + static_cast<std::size_t>(j);
  }

  void rasterize(const Vec3& s, std::vector<std::uint32_t>& stamp, std::uint32_t mark) const {
    const double lat_s = lat_of(s);
    const double lon_s = lon_of(s);
    const double sin_s = s.z;
    const double cos_s = std::sqrt(std::max(0.0, 1.0 - s.z * s.z));
    const double step = grid_.lat_step_deg;
    const int i_lo = std::max(0, static_cast<int>(std::floor((lat_s - lambda_deg_ + grid_.band_limit_deg) / step - 0.5)));
    const int i_hi = std::min(grid_.n_lat - 1,
                              static_cast<int>(std::ceil((lat_s + lambda_deg_ + grid_.band_limit_deg) / step - 0.5)));
    for (int i = i_lo; i <= i_hi; ++i) {
      const double denom = row_cos_[static_cast<std::size_t>(i)] * cos_s;
      const double num = cos_lambda_ - row_sin_[static_cast<std::size_t>(i)] * sin_s;
      int j_lo = 0;
      int j_hi = grid_.n_lon - 1;
      if (denom > 1e-12) {
        const double r = num / denom;
        if (r > 1.0 + 1e-9) continue;
        if (r > -1.0) {
          const double w = rad2deg(std::acos(std::min(1.0, r))) + 1e-6;
          j_lo = static_cast<int>(std::ceil((lon_s - w + 180.0) / grid_.lon_step_deg - 0.5));
          j_hi = static_cast<int>(std::floor((lon_s + w + 180.0) / grid_.lon_step_deg - 0.5));
          if (j_hi - j_lo + 1 >= grid_.n_lon) {
            j_lo = 0;
            j_hi = grid_.n_lon - 1;
          }
        }
      }
      for (int jj = j_lo; jj <= j_hi; ++jj) {
        const int j = ((jj % grid_.n_lon) + grid_.n_lon) % grid_.n_lon;
        const auto idx = index(i, j);
        if (stamp[idx] != mark && s.dot(cells_[idx]) >= cos_lambda_) stamp[idx] = mark;
      }
    }
  }

  CoverageGrid grid_;
  double altitude_km_;
  double inclination_deg_;
  double lambda_deg_;
  double cos_lambda_;
  double sin_i_;
  double cos_i_;
  double node_rate_;
  double u_rate_;
  std::vector<double> instants_;
  std::vector<Vec3> cells_;
  std::vector<double> row_sin_;
  std::vector<double> row_cos_;
  std::vector<std::size_t> probe_order_;
};

}  // namespace detail

/// Smallest-T Walker shell (ties: smallest P, then F) covering every band cell
/// at every sampled instant over one orbital period.
inline WalkerConfig min_walker_total(double altitude_km, double inclination_deg,
                                     const FootprintSpec& fp, double band_limit_deg,
                                     const CoverageResolution& res = {},
                                     const WalkerSearchCaps& caps = {}) {
  detail::check_altitude(altitude_km);
  detail::check_inclination(inclination_deg);
  const double lambda = fp.central_angle_deg(altitude_km);
  const double reach = std::min(inclination_deg, 180.0 - inclination_deg) + lambda;
  require(band_limit_deg >= 0.0 && band_limit_deg <= 90.0, ErrorKind::invalid_input,
          "band_limit_deg must be in [0, 90]");
  require(band_limit_deg <= reach || lambda >= 90.0, ErrorKind::invalid_input,
          "band_limit_deg exceeds inclination + central angle");
  const detail::WalkerCoverageEvaluator eval(altitude_km, inclination_deg, lambda, band_limit_deg, res);

  struct Candidate {
    int planes;
    int phasing;
  };
  std::vector<Candidate> candidates;
  for (int total = eval.area_lower_bound(); total <= caps.max_total_sats; ++total) {
    candidates.clear();
    for (int planes = 1; planes <= total; ++planes) {
      if (total % planes != 0) continue;
      for (int f = 0; f < planes; ++f) candidates.push_back({planes, f});
    }
    // Lowest feasible index wins, so the answer is independent of scheduling.
    const auto table = detail::WalkerCoverageEvaluator::angle_table(total);
    std::atomic<std::size_t> best{candidates.size()};
    const std::size_t workers = std::max<std::size_t>(1, thread_count());
    parallel_for(workers, [&](std::size_t w) {
      for (std::size_t c = w; c < candidates.size(); c += workers) {
        if (c >= best.load()) return;
        if (eval.feasible(table, candidates[c].planes, candidates[c].phasing)) {
          std::size_t cur = best.load();
          while (c < cur && !best.compare_exchange_weak(cur, c)) {
          }
          return;
        }
      }
    });
    if (best.load() < candidates.size()) {
      const auto& c = candidates[best.load()];
      return WalkerConfig{inclination_deg, total, c.planes, c.phasing, altitude_km};
    }
  }
  fail(ErrorKind::infeasible, "no Walker configuration up to " + std::to_string(caps.max_total_sats) +
                                  " satellites covers the band");
}

/// Brute-force oracle for a Walker shell: counts (cell, instant) samples with
/// no satellite within lambda, via haversine on propagated subpoints.
inline std::size_t count_uncovered_walker_samples(
    const WalkerConfig& cfg, const FootprintSpec& fp, double band_limit_deg,
    const CoverageResolution& res = {},
    std::size_t stop_after = std::numeric_limits<std::size_t>::max()) {
  const double lambda = fp.central_angle_deg(cfg.altitude_km);
  const auto grid = CoverageGrid::make(band_limit_deg, res.grid_step_deg, res.grid_step_deg);
  std::vector<CircularPropagator> props;
  for (const auto& o : cfg.satellites()) props.emplace_back(o);
  const double period = orbital_period(cfg.altitude_km);
  std::size_t misses = 0;
  std::vector<GroundTrackSample> subs(props.size());
  std::size_t last = 0;
  for (double t = 0.0; t < period - 1e-9 && misses < stop_after; t += res.time_step_s) {
    for (std::size_t s = 0; s < props.size(); ++s) subs[s] = props[s].sample(t);
    for (int i = 0; i < grid.n_lat && misses < stop_after; ++i) {
      for (int j = 0; j < grid.n_lon && misses < stop_after; ++j) {
        const double lat = grid.lat_center(i);
        const double lon = grid.lon_center(j);
        // Try the satellite that covered the previous cell first; the
        // predicate is unchanged, only the visiting order.
        bool hit = is_covered(subs[last].lat_deg, subs[last].lon_deg, lat, lon, lambda);
        for (std::size_t s = 0; s < subs.size() && !hit; ++s) {
          if (is_covered(subs[s].lat_deg, subs[s].lon_deg, lat, lon, lambda)) {
            hit = true;
            last = s;
          }
        }
        if (!hit) ++misses;
      }
    }
  }
  return misses;
}

// ---------------------------------------------------------------------------
// Survey
// ---------------------------------------------------------------------------

/// 2 x (largest distance from any band cell to the repeat track), degrees.
/// The track is sampled at a quarter of the grid step.
inline double rgt_max_gap_deg(const RgtSolution& rgt, double band_limit_deg,
                              const CoverageResolution& res = {}) {
  const CircularPropagator prop(rgt_reference_orbit(rgt));
  const double spacing = res.grid_step_deg / 4.0;
  const std::size_t m = rgt_track_point_count(rgt, spacing);
  const double h = rgt.repeat_period_s() / static_cast<double>(m);
  struct Point {
    double lat;
    Vec3 v;
  };
  std::vector<Point> pts(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3 v = prop.earth_fixed(static_cast<double>(k) * h);
    pts[k] = {lat_of(v), v};
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.lat < b.lat; });

  const auto grid = CoverageGrid::make(band_limit_deg, res.grid_step_deg, res.grid_step_deg);
  std::vector<double> row_worst(static_cast<std::size_t>(grid.n_lat), 0.0);
  parallel_for(static_cast<std::size_t>(grid.n_lat), [&](std::size_t i) {
    const double lat = grid.lat_center(static_cast<int>(i));
    const auto pivot = static_cast<std::ptrdiff_t>(
        std::lower_bound(pts.begin(), pts.end(), lat, [](const Point& p, double x) { return p.lat < x; }) -
        pts.begin());
    double worst = 0.0;
    for (int j = 0; j < grid.n_lon; ++j) {
      const Vec3 cell = unit_from_latlon(lat, grid.lon_center(j));
      double best_dot = -2.0;
      double best_angle = 180.0;
      // Expand outward in latitude; stop once the latitude gap alone exceeds the best distance.
      std::ptrdiff_t lo = pivot - 1;
      std::ptrdiff_t hi = pivot;
      const auto n = static_cast<std::ptrdiff_t>(pts.size());
      while (lo >= 0 || hi < n) {
        const double dlo = lo >= 0 ? lat - pts[static_cast<std::size_t>(lo)].lat : 1e9;
        const double dhi = hi < n ? pts[static_cast<std::size_t>(hi)].lat - lat : 1e9;
        const bool take_lo = dlo <= dhi;
        const double dlat = take_lo ? dlo : dhi;
        if (dlat > best_angle) break;
        const auto& p = pts[static_cast<std::size_t>(take_lo ? lo-- : hi++)];
        const double d = p.v.dot(cell);
        if (d > best_dot) {
          best_dot = d;
          best_angle = rad2deg(std::acos(std::clamp(d, -1.0, 1.0)));
        }
      }
      worst = std::max(worst, best_angle);
    }
    row_worst[i] = worst;
  });
  return 2.0 * *std::max_element(row_worst.begin(), row_worst.end());
}

struct RgtUniformity {
  RgtSolution rgt;
  bool uniform = false;
  double max_gap_deg = 0.0;
};

/// Flags an RGT non-uniform when some band cell is farther than lambda from
/// the whole repeat track. Band defaults to each RGT's inclination limit.
inline std::vector<RgtUniformity> rgt_uniform_coverage_survey(
    const std::vector<RgtSolution>& rgts, const FootprintSpec& fp, const CoverageResolution& res = {},
    std::optional<double> band_limit_deg = std::nullopt) {
  require(!rgts.empty(), ErrorKind::invalid_input, "survey needs at least one RGT");
  std::vector<RgtUniformity> out;
  for (const auto& rgt : rgts) {
    const double band = band_limit_deg.value_or(std::min(rgt.inclination_deg, 180.0 - rgt.inclination_deg));
    const double gap = rgt_max_gap_deg(rgt, band, res);
    out.push_back({rgt, gap / 2.0 <= fp.central_angle_deg(rgt.altitude_km), gap});
  }
  return out;
}

struct SurveyRow {
  RgtSolution rgt;
  std::optional<int> min_sats_rgt;
  std::optional<WalkerConfig> walker;
  bool uniform = false;
  double max_gap_deg = 0.0;
  std::string error;
};

/// One row per RGT: single-track minimum, Walker minimum at the same
/// altitude/inclination/footprint (band = inclination), uniformity flag.
inline std::vector<SurveyRow> rgt_survey_table(const std::vector<RgtSolution>& rgts,
                                               const FootprintSpec& fp,
                                               const CoverageResolution& res = {},
                                               const WalkerSearchCaps& caps = {}) {
  const auto flags = rgt_uniform_coverage_survey(rgts, fp, res);
  std::vector<SurveyRow> rows;
  for (const auto& f : flags) {
    SurveyRow row;
    row.rgt = f.rgt;
    row.uniform = f.uniform;
    row.max_gap_deg = f.max_gap_deg;
    try {
      row.min_sats_rgt = min_sats_single_rgt(f.rgt, fp, res);
    } catch (const Error& e) {
      row.error = e.what();
    }
    try {
      const double band = std::min(f.rgt.inclination_deg, 180.0 - f.rgt.inclination_deg);
      row.walker = min_walker_total(f.rgt.altitude_km, f.rgt.inclination_deg, fp, band, res, caps);
    } catch (const Error& e) {
      if (!row.error.empty()) row.error += "; ";
      row.error += e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_survey_csv(std::ostream& os, const std::vector<SurveyRow>& rows) {
  os << "p,q,altitude_km,min_sats_rgt,min_walker_total,uniform_flag,max_gap_deg\n";
  for (const auto& r : rows) {
    os << r.rgt.repeat_days_p << ',' << r.rgt.orbits_q << ',' << fmt_num(r.rgt.altitude_km) << ','
       << (r.min_sats_rgt ? fmt_num(*r.min_sats_rgt) : std::string("NA")) << ','
       << (r.walker ? fmt_num(r.walker->total_sats) : std::string("NA")) << ',' << (r.uniform ? 1 : 0)
       << ',' << fmt_num(r.max_gap_deg) << '\n';
  }
}

}  // namespace constel
