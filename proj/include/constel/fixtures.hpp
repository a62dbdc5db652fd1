#pragma once

// Seeded synthetic inputs for tests and demos. All randomness in the
// toolkit lives here.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "constel/demand.hpp"
#include "constel/io.hpp"
#include "constel/radiation.hpp"

namespace constel::fixtures {

/// mt19937_64 output is fixed by the standard; distributions are not, so
/// the conversion to [0, 1) is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

struct Cluster {
  double lat_deg;
  double lon_deg;
  double peak;
  double sigma_deg;
};

/// Adds a Gaussian bump (in great-circle distance, cut at 4 sigma).
inline void add_cluster(PopulationGrid& g, const Cluster& c) {
  const Vec3 center = unit_from_latlon(c.lat_deg, c.lon_deg);
  const double reach = 4.0 * c.sigma_deg;
  const int i0 = g.lat_index(std::max(-90.0, c.lat_deg - reach));
  const int i1 = g.lat_index(std::min(90.0, c.lat_deg + reach));
  for (int i = i0; i <= i1; ++i) {
    for (int j = 0; j < g.n_lon; ++j) {
      const double d = rad2deg(std::acos(std::clamp(unit_from_latlon(g.lat_center(i), g.lon_center(j)).dot(center), -1.0, 1.0)));
      if (d > reach) continue;
      g.at(i, j) += c.peak * std::exp(-0.5 * d * d / (c.sigma_deg * c.sigma_deg));
    }
  }
}

/// Two clusters on a zero background; their latitude rows are the only
/// local maxima of the latitude profile.
inline PopulationGrid two_cluster_population(double lat_a = 23.75, double lat_b = -12.25) {
  auto g = PopulationGrid::zeros();
  add_cluster(g, {lat_a, 77.25, 900.0, 1.5});
  add_cluster(g, {lat_b, -45.25, 400.0, 1.5});
  return g;
}

/// Populated band with a smooth background and seeded urban clusters,
/// concentrated at northern mid latitudes.
inline PopulationGrid synthetic_population(std::uint64_t seed) {
  Rng rng(seed);
  auto g = PopulationGrid::zeros();
  for (int i = 0; i < g.n_lat; ++i) {
    const double lat = g.lat_center(i);
    if (lat < -55.0 || lat > 70.0) continue;
    const double base = 1.0 + 9.0 * std::exp(-0.5 * std::pow((lat - 25.0) / 18.0, 2));
    for (int j = 0; j < g.n_lon; ++j) g.at(i, j) = base;
  }
  for (int c = 0; c < 24; ++c) {
    const bool north = rng.uniform() < 0.75;
    const double lat = north ? rng.uniform(5.0, 55.0) : rng.uniform(-40.0, 5.0);
    const double lon = rng.uniform(-180.0, 180.0);
    const double peak = std::exp(rng.uniform(std::log(200.0), std::log(5000.0)));
    add_cluster(g, {lat, lon, peak, rng.uniform(0.5, 2.0)});
  }
  return g;
}

/// Smooth diurnal traffic shape (arbitrary units): overnight trough,
/// daytime plateau, evening peak.
inline double traffic_shape(double hour) {
  constexpr double tau = 2.0 * kPi;
  return 1.0 + 0.55 * std::sin(tau * (hour - 10.0) / 24.0) + 0.3 * std::exp(-0.5 * std::pow((hour - 21.0) / 1.8, 2));
}

/// Sites with random scales and multiplicative noise, 5-minute samples.
inline std::vector<ThroughputSample> synthetic_series(std::uint64_t seed, int sites = 12, int days = 7) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<ThroughputSample> out;
  for (int s = 0; s < sites; ++s) {
    const double scale = std::pow(10.0, rng.uniform(6.0, 9.0));
    const std::string id = "site" + std::to_string(s);
    for (int k = 0; k < days * 288; ++k) {
      const double t = 300.0 * k;
      const double noise = 1.0 + rng.uniform(-0.1, 0.1);
      out.push_back({id, t, std::round(scale * traffic_shape(t / 3600.0) * noise)});
    }
  }
  return out;
}

/// One site, one day, value 2 + sin(2 pi t / day) at t = 5, 15, 25 min
/// into every half-hour bin.
inline std::vector<ThroughputSample> sinusoid_series() {
  std::vector<ThroughputSample> out;
  for (int k = 0; k < 144; ++k) {
    const double t = 300.0 + 600.0 * k;
    out.push_back({"sine", t, 2.0 + std::sin(2.0 * kPi * t / kSecondsPerDay)});
  }
  return out;
}

inline void write_series_csv(std::ostream& os, const std::vector<ThroughputSample>& s) {
  os << "site_id,timestamp_s,bytes\n";
  for (const auto& x : s) os << x.site << ',' << fmt_num(x.timestamp_s) << ',' << fmt_num(x.bytes) << '\n';
}

/// Synthetic map sampled on a 2-degree grid at three altitudes.
inline GriddedMap gridded_synthetic_map(const SyntheticMapParams& p = {}) {
  std::vector<double> lat, lon;
  for (int v = -90; v <= 90; v += 2) lat.push_back(v);
  for (int v = -180; v < 180; v += 2) lon.push_back(v);
  GriddedMap g(lat, lon, {500.0, 560.0, 620.0});
  g.fill_from(SyntheticMap(p));
  return g;
}

struct FixturePaths {
  std::filesystem::path population;
  std::filesystem::path two_cluster_population;
  std::filesystem::path series;
  std::filesystem::path sinusoid_series;
  std::filesystem::path zero_demand;
  std::filesystem::path radiation_grid;
};

inline FixturePaths write_all(const std::filesystem::path& dir, std::uint64_t seed) {
  FixturePaths p{dir / "population.csv", dir / "population_two_cluster.csv", dir / "series.csv",
                 dir / "series_sinusoid.csv", dir / "demand_zero.csv", dir / "radiation_grid.csv"};
  {
    auto out = open_output(p.population);
    write_population_grid_csv(out, synthetic_population(seed));
  }
  {
    auto out = open_output(p.two_cluster_population);
    write_population_grid_csv(out, two_cluster_population());
  }
  {
    auto out = open_output(p.series);
    write_series_csv(out, synthetic_series(seed));
  }
  {
    auto out = open_output(p.sinusoid_series);
    write_series_csv(out, sinusoid_series());
  }
  {
    auto out = open_output(p.zero_demand);
    write_demand_grid_csv(out, DemandGrid::zeros(0.5, 0.5));
  }
  save_gridded_map(p.radiation_grid, gridded_synthetic_map());
  return p;
}

}  // namespace constel::fixtures
