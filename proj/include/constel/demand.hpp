#pragma once

// Sun-fixed demand model: population by latitude x diurnal traffic shape,
// gridded over latitude and local solar time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "constel/astro.hpp"
#include "constel/error.hpp"
#include "constel/io.hpp"

namespace constel {

namespace detail {

inline int bin_count(double span, double step, const char* what) {
  require(std::isfinite(step) && step > 0.0, ErrorKind::invalid_input, std::string(what) + " must be > 0");
  const double n = span / step;
  const double r = std::round(n);
  require(std::abs(n - r) < 1e-9 && r >= 1.0, ErrorKind::invalid_input,
          std::string(what) + " must divide " + fmt_num(span));
  return static_cast<int>(r);
}

// Linear interpolation between closest ranks; q = 0.5 gives the usual median.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, q);
}

}  // namespace detail

/// Population density on a regular lat/lon grid covering the globe.
struct PopulationGrid {
  double lat_step_deg = 0.5;
  double lon_step_deg = 0.5;
  int n_lat = 0;
  int n_lon = 0;
  std::vector<double> density;  ///< row-major, row 0 at the south pole

  static PopulationGrid zeros(double lat_step_deg = 0.5, double lon_step_deg = 0.5) {
    PopulationGrid g;
    g.lat_step_deg = lat_step_deg;
    g.lon_step_deg = lon_step_deg;
    g.n_lat = detail::bin_count(180.0, lat_step_deg, "lat_step_deg");
    g.n_lon = detail::bin_count(360.0, lon_step_deg, "lon_step_deg");
    g.density.assign(static_cast<std::size_t>(g.n_lat) * static_cast<std::size_t>(g.n_lon), 0.0);
    return g;
  }

  double lat_center(int i) const { return -90.0 + (i + 0.5) * lat_step_deg; }
  double lon_center(int j) const { return -180.0 + (j + 0.5) * lon_step_deg; }
  int lat_index(double lat) const {
    return std::clamp(static_cast<int>(std::floor((lat + 90.0) / lat_step_deg)), 0, n_lat - 1);
  }
  int lon_index(double lon) const {
    return std::clamp(static_cast<int>(std::floor((wrap180(lon) + 180.0) / lon_step_deg)), 0, n_lon - 1);
  }
  double& at(int i, int j) {
    return density[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_lon) + static_cast<std::size_t>(j)];
  }
  double at(int i, int j) const {
    return density[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_lon) + static_cast<std::size_t>(j)];
  }
};

/// Reads `lat_deg,lon_deg,density` rows (cell centers, optional header).
/// Cells not listed stay zero.
inline PopulationGrid read_population_grid(std::istream& in, const std::string& source,
                                           double lat_step_deg = 0.5, double lon_step_deg = 0.5) {
  auto grid = PopulationGrid::zeros(lat_step_deg, lon_step_deg);
  std::vector<std::uint8_t> seen(grid.density.size(), 0);
  CsvReader reader(in, source);
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.next(f)) {
    if (first && is_header_row(f)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 3) fail(ErrorKind::parse, reader.where() + ": expected 3 fields lat_deg,lon_deg,density");
    const double lat = parse_double(f[0], reader.where());
    const double lon = parse_double(f[1], reader.where());
    const double d = parse_double(f[2], reader.where());
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
      fail(ErrorKind::validation, reader.where() + ": coordinates out of range");
    }
    if (!std::isfinite(d) || d < 0.0) {
      fail(ErrorKind::validation, reader.where() + ": density must be finite and >= 0");
    }
    const int i = grid.lat_index(lat);
    const int j = grid.lon_index(lon);
    const auto idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.n_lon) + static_cast<std::size_t>(j);
    if (seen[idx]) fail(ErrorKind::validation, reader.where() + ": duplicate cell");
    seen[idx] = 1;
    grid.density[idx] = d;
  }
  return grid;
}

inline PopulationGrid load_population_grid(const std::filesystem::path& path, double lat_step_deg = 0.5,
                                           double lon_step_deg = 0.5) {
  auto in = open_input(path);
  return read_population_grid(in, path.string(), lat_step_deg, lon_step_deg);
}

inline void write_population_grid_csv(std::ostream& os, const PopulationGrid& g, bool skip_zero = true) {
  os << "lat_deg,lon_deg,density\n";
  for (int i = 0; i < g.n_lat; ++i) {
    for (int j = 0; j < g.n_lon; ++j) {
      if (skip_zero && g.at(i, j) == 0.0) continue;
      os << fmt_num(g.lat_center(i)) << ',' << fmt_num(g.lon_center(j)) << ',' << fmt_num(g.at(i, j)) << '\n';
    }
  }
}

/// Max density over all longitudes, per latitude bin.
struct LatitudeProfile {
  double lat_step_deg = 0.5;
  std::vector<double> values;

  double lat_center(std::size_t i) const { return -90.0 + (static_cast<double>(i) + 0.5) * lat_step_deg; }
};

inline LatitudeProfile latitude_max_profile(const PopulationGrid& g) {
  LatitudeProfile p;
  p.lat_step_deg = g.lat_step_deg;
  p.values.assign(static_cast<std::size_t>(g.n_lat), 0.0);
  for (int i = 0; i < g.n_lat; ++i) {
    double m = 0.0;
    for (int j = 0; j < g.n_lon; ++j) m = std::max(m, g.at(i, j));
    p.values[static_cast<std::size_t>(i)] = m;
  }
  return p;
}

enum class DiurnalStatistic { median, p95 };

inline std::string to_string(DiurnalStatistic s) { return s == DiurnalStatistic::median ? "median" : "p95"; }

inline DiurnalStatistic parse_statistic(const std::string& s) {
  if (s == "median") return DiurnalStatistic::median;
  if (s == "p95") return DiurnalStatistic::p95;
  fail(ErrorKind::invalid_input, "statistic must be 'median' or 'p95', got '" + s + "'");
}

/// Site-median-normalized throughput by time of day.
struct DiurnalProfile {
  double bin_h = 0.5;
  std::vector<double> median;
  std::vector<double> p95;
  std::vector<std::size_t> samples;  ///< per bin
  std::size_t sites_used = 0;
  std::vector<std::string> warnings;

  std::size_t bins() const { return median.size(); }
  const std::vector<double>& curve(DiurnalStatistic s) const { return s == DiurnalStatistic::median ? median : p95; }

  /// Multiplier for a time of day in hours (wrapped).
  double at(double hour, DiurnalStatistic s = DiurnalStatistic::median) const {
    const auto& c = curve(s);
    const auto b = static_cast<std::size_t>(std::floor(wrap24(hour) / bin_h));
    return c[std::min(b, c.size() - 1)];
  }
};

struct ThroughputSample {
  std::string site;
  double timestamp_s = 0.0;
  double bytes = 0.0;
};

/// Bins per-site-normalized samples by time of day. Timestamps are seconds
/// in the sites' local clock after adding `tz_offset_h`.
inline DiurnalProfile diurnal_profile_from_samples(const std::vector<ThroughputSample>& samples,
                                                   double bin_h = 0.5, double tz_offset_h = 0.0) {
  require(!samples.empty(), ErrorKind::validation, "throughput series is empty");
  const int n_bins = detail::bin_count(24.0, bin_h, "bin_h");
  DiurnalProfile prof;
  prof.bin_h = bin_h;

  std::map<std::string, std::vector<std::size_t>> by_site;
  for (std::size_t k = 0; k < samples.size(); ++k) by_site[samples[k].site].push_back(k);

  std::vector<std::vector<double>> binned(static_cast<std::size_t>(n_bins));
  for (const auto& [site, idx] : by_site) {
    std::vector<double> vals;
    vals.reserve(idx.size());
    for (auto k : idx) vals.push_back(samples[k].bytes);
    const double med = detail::quantile(vals, 0.5);
    if (!(med > 0.0)) {
      prof.warnings.push_back("site '" + site + "' skipped: median throughput is zero");
      continue;
    }
    ++prof.sites_used;
    for (auto k : idx) {
      const double hour = wrap24(samples[k].timestamp_s / 3600.0 + tz_offset_h);
      const auto b = std::min(static_cast<std::size_t>(std::floor(hour / bin_h)), binned.size() - 1);
      binned[b].push_back(samples[k].bytes / med);
    }
  }
  require(prof.sites_used > 0, ErrorKind::validation, "no site has a positive median throughput");

  prof.median.resize(binned.size());
  prof.p95.resize(binned.size());
  prof.samples.resize(binned.size());
  for (std::size_t b = 0; b < binned.size(); ++b) {
    auto& v = binned[b];
    std::sort(v.begin(), v.end());
    prof.samples[b] = v.size();
    if (v.empty()) prof.warnings.push_back("time-of-day bin " + std::to_string(b) + " has no samples; set to 0");
    prof.median[b] = detail::quantile_sorted(v, 0.5);
    prof.p95[b] = detail::quantile_sorted(v, 0.95);
  }
  return prof;
}

/// Reads `site_id,timestamp_s,bytes` rows (optional header).
inline std::vector<ThroughputSample> read_throughput_series(std::istream& in, const std::string& source) {
  std::vector<ThroughputSample> out;
  CsvReader reader(in, source);
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.next(f)) {
    if (first && f.size() == 3) {
      double dummy = 0.0;
      first = false;
      if (!try_parse_double(f[1], dummy)) continue;  // header
    }
    first = false;
    if (f.size() != 3) fail(ErrorKind::parse, reader.where() + ": expected 3 fields site_id,timestamp_s,bytes");
    ThroughputSample s{std::string(f[0]), parse_double(f[1], reader.where()), parse_double(f[2], reader.where())};
    if (!std::isfinite(s.timestamp_s) || !std::isfinite(s.bytes) || s.bytes < 0.0) {
      fail(ErrorKind::validation, reader.where() + ": timestamp and bytes must be finite, bytes >= 0");
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline DiurnalProfile diurnal_profile_from_series(const std::filesystem::path& path, double bin_h = 0.5,
                                                  double tz_offset_h = 0.0) {
  auto in = open_input(path);
  return diurnal_profile_from_samples(read_throughput_series(in, path.string()), bin_h, tz_offset_h);
}

inline void write_diurnal_csv(std::ostream& os, const DiurnalProfile& p) {
  os << "tod_h,median,p95,samples\n";
  for (std::size_t b = 0; b < p.bins(); ++b) {
    os << fmt_num((static_cast<double>(b) + 0.5) * p.bin_h) << ',' << fmt_num(p.median[b]) << ','
       << fmt_num(p.p95[b]) << ',' << p.samples[b] << '\n';
  }
}

/// Demand on latitude x local-solar-time cells, in single-satellite
/// capacity units. The peak cell equals the bandwidth multiplier M.
struct DemandGrid {
  double lat_step_deg = 0.5;
  double lst_step_h = 0.5;
  int n_lat = 0;
  int n_lst = 0;
  double multiplier = 1.0;
  DiurnalStatistic statistic = DiurnalStatistic::median;
  std::vector<double> values;  ///< row-major [lat][lst], row 0 at the south pole

  static DemandGrid zeros(double lat_step_deg, double lst_step_h) {
    DemandGrid g;
    g.lat_step_deg = lat_step_deg;
    g.lst_step_h = lst_step_h;
    g.n_lat = detail::bin_count(180.0, lat_step_deg, "lat_step_deg");
    g.n_lst = detail::bin_count(24.0, lst_step_h, "lst_step_h");
    g.values.assign(g.size(), 0.0);
    return g;
  }

  std::size_t size() const { return static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lst); }
  std::size_t index(int i, int k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_lst) + static_cast<std::size_t>(k);
  }
  double& at(int i, int k) { return values[index(i, k)]; }
  double at(int i, int k) const { return values[index(i, k)]; }
  double lat_center(int i) const { return -90.0 + (i + 0.5) * lat_step_deg; }
  double lst_center(int k) const { return (k + 0.5) * lst_step_h; }

  double total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  double peak() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
};

namespace detail {

// Max of source bins [k*src, (k+1)*src) overlapping target bin [lo, hi).
inline double max_over_overlap(const std::vector<double>& src, double src_step, double origin, double lo,
                               double hi) {
  const double eps = 1e-9 * src_step;
  const auto n = static_cast<long long>(src.size());
  long long k0 = static_cast<long long>(std::floor((lo - origin) / src_step + 1e-9));
  long long k1 = static_cast<long long>(std::ceil((hi - origin) / src_step - 1e-9)) - 1;
  k0 = std::clamp(k0, 0LL, n - 1);
  k1 = std::clamp(k1, k0, n - 1);
  double m = 0.0;
  for (long long k = k0; k <= k1; ++k) {
    const double a = origin + static_cast<double>(k) * src_step;
    if (a + src_step <= lo + eps || a >= hi - eps) continue;
    m = std::max(m, src[static_cast<std::size_t>(k)]);
  }
  return m;
}

}  // namespace detail

/// D(lat, lst) = M * P(lat)/max P * s(lst)/max s. Profiles are resampled to
/// the target steps by taking the max over overlapping source bins.
inline DemandGrid build_demand_grid(const LatitudeProfile& lat_profile, const DiurnalProfile& diurnal,
                                    double multiplier, double lat_step_deg = 0.5, double lst_step_h = 0.5,
                                    DiurnalStatistic stat = DiurnalStatistic::median) {
  require(std::isfinite(multiplier) && multiplier > 0.0, ErrorKind::invalid_input, "M must be > 0");
  require(!lat_profile.values.empty() && diurnal.bins() > 0, ErrorKind::invalid_input, "empty profile");
  auto g = DemandGrid::zeros(lat_step_deg, lst_step_h);
  g.multiplier = multiplier;
  g.statistic = stat;

  std::vector<double> p(static_cast<std::size_t>(g.n_lat));
  for (int i = 0; i < g.n_lat; ++i) {
    const double lo = -90.0 + i * lat_step_deg;
    p[static_cast<std::size_t>(i)] =
        detail::max_over_overlap(lat_profile.values, lat_profile.lat_step_deg, -90.0, lo, lo + lat_step_deg);
  }
  std::vector<double> s(static_cast<std::size_t>(g.n_lst));
  const auto& curve = diurnal.curve(stat);
  for (int k = 0; k < g.n_lst; ++k) {
    const double lo = k * lst_step_h;
    s[static_cast<std::size_t>(k)] = detail::max_over_overlap(curve, diurnal.bin_h, 0.0, lo, lo + lst_step_h);
  }
  const double p_max = *std::max_element(p.begin(), p.end());
  const double s_max = *std::max_element(s.begin(), s.end());
  require(p_max > 0.0, ErrorKind::validation, "latitude profile is identically zero");
  require(s_max > 0.0, ErrorKind::validation, "diurnal profile is identically zero");
  for (int i = 0; i < g.n_lat; ++i) {
    const double pi = p[static_cast<std::size_t>(i)] / p_max;
    for (int k = 0; k < g.n_lst; ++k) g.at(i, k) = multiplier * pi * (s[static_cast<std::size_t>(k)] / s_max);
  }
  return g;
}

inline void write_demand_grid_csv(std::ostream& os, const DemandGrid& g) {
  os << "lat_deg,lst_h,demand\n";
  for (int i = 0; i < g.n_lat; ++i) {
    for (int k = 0; k < g.n_lst; ++k) {
      os << fmt_num(g.lat_center(i)) << ',' << fmt_num(g.lst_center(k)) << ',' << fmt_num(g.at(i, k)) << '\n';
    }
  }
}

/// Reads a full `lat_deg,lst_h,demand` grid. Steps are inferred from the
/// first cell centers; every cell must be present exactly once.
inline DemandGrid read_demand_grid(std::istream& in, const std::string& source) {
  struct Row {
    double lat, lst, d;
    std::string where;
  };
  std::vector<Row> rows;
  CsvReader reader(in, source);
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.next(f)) {
    if (first && is_header_row(f)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 3) fail(ErrorKind::parse, reader.where() + ": expected 3 fields lat_deg,lst_h,demand");
    rows.push_back({parse_double(f[0], reader.where()), parse_double(f[1], reader.where()),
                    parse_double(f[2], reader.where()), reader.where()});
  }
  require(!rows.empty(), ErrorKind::validation, source + ": demand grid is empty");
  double min_lat = rows.front().lat, min_lst = rows.front().lst;
  for (const auto& r : rows) {
    min_lat = std::min(min_lat, r.lat);
    min_lst = std::min(min_lst, r.lst);
  }
  auto g = DemandGrid::zeros(2.0 * (min_lat + 90.0), 2.0 * min_lst);
  std::vector<std::uint8_t> seen(g.size(), 0);
  for (const auto& r : rows) {
    const double fi = (r.lat + 90.0) / g.lat_step_deg - 0.5;
    const double fk = r.lst / g.lst_step_h - 0.5;
    const double ri = std::round(fi), rk = std::round(fk);
    if (std::abs(fi - ri) > 1e-6 || std::abs(fk - rk) > 1e-6 || ri < 0 || ri >= g.n_lat || rk < 0 ||
        rk >= g.n_lst) {
      fail(ErrorKind::validation, r.where + ": not a cell center of the inferred grid");
    }
    if (!std::isfinite(r.d) || r.d < 0.0) fail(ErrorKind::validation, r.where + ": demand must be finite and >= 0");
    const auto idx = g.index(static_cast<int>(ri), static_cast<int>(rk));
    if (seen[idx]) fail(ErrorKind::validation, r.where + ": duplicate cell");
    seen[idx] = 1;
    g.values[idx] = r.d;
  }
  require(std::all_of(seen.begin(), seen.end(), [](std::uint8_t v) { return v != 0; }), ErrorKind::validation,
          source + ": demand grid is missing cells");
  g.multiplier = g.peak();
  return g;
}

inline DemandGrid load_demand_grid(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_demand_grid(in, path.string());
}

/// Earth-frame demand at one instant on the population grid.
struct EarthDemandField {
  double utc_hour = 0.0;
  PopulationGrid field;
};

/// field(lat, lon) = density(lat, lon) * s(local solar time at lon).
inline EarthDemandField demand_snapshot_earth_frame(const PopulationGrid& grid, const DiurnalProfile& diurnal,
                                                    double utc_hour,
                                                    DiurnalStatistic stat = DiurnalStatistic::median) {
  require(std::isfinite(utc_hour), ErrorKind::invalid_input, "utc_hour must be finite");
  EarthDemandField out{utc_hour, grid};
  for (int j = 0; j < grid.n_lon; ++j) {
    const double s = diurnal.at(local_solar_time(grid.lon_center(j), utc_hour * 3600.0), stat);
    for (int i = 0; i < grid.n_lat; ++i) out.field.at(i, j) = grid.at(i, j) * s;
  }
  return out;
}

inline void write_earth_field_csv(std::ostream& os, const EarthDemandField& f, bool skip_zero = true) {
  os << "lat_deg,lon_deg,demand\n";
  const auto& g = f.field;
  for (int i = 0; i < g.n_lat; ++i) {
    for (int j = 0; j < g.n_lon; ++j) {
      if (skip_zero && g.at(i, j) == 0.0) continue;
      os << fmt_num(g.lat_center(i)) << ',' << fmt_num(g.lon_center(j)) << ',' << fmt_num(g.at(i, j)) << '\n';
    }
  }
}

}  // namespace constel
