#pragma once

// Trapped-particle flux maps and fluence accumulated along circular orbits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "constel/astro.hpp"
#include "constel/error.hpp"
#include "constel/geo.hpp"
#include "constel/io.hpp"
#include "constel/parallel.hpp"

namespace constel {

enum class Species { electron = 0, proton = 1 };

inline constexpr std::array<Species, 2> kAllSpecies{Species::electron, Species::proton};

inline std::string to_string(Species s) { return s == Species::electron ? "electron" : "proton"; }

inline Species parse_species(std::string_view s) {
  if (s == "electron") return Species::electron;
  if (s == "proton") return Species::proton;
  fail(ErrorKind::parse, "unknown species '" + std::string(s) + "'");
}

/// Flux lookup in particles / cm^2 / s.
class RadiationMap {
 public:
  virtual ~RadiationMap() = default;
  virtual double flux(double lat_deg, double lon_deg, double alt_km, Species s) const = 0;
  virtual std::string describe() const = 0;

  /// Both species at an earth-fixed unit vector.
  virtual std::array<double, 2> fluxes(const Vec3& p, double alt_km) const {
    const double lat = lat_of(p);
    const double lon = lon_of(p);
    return {flux(lat, lon, alt_km, Species::electron), flux(lat, lon, alt_km, Species::proton)};
  }
};

class UniformMap final : public RadiationMap {
 public:
  UniformMap(double electron, double proton) : values_{electron, proton} {
    require(electron >= 0.0 && proton >= 0.0, ErrorKind::invalid_input, "flux must be >= 0");
  }
  double flux(double, double, double, Species s) const override { return values_[static_cast<std::size_t>(s)]; }
  std::array<double, 2> fluxes(const Vec3&, double) const override { return values_; }
  std::string describe() const override {
    return "uniform electron=" + fmt_num(values_[0]) + " proton=" + fmt_num(values_[1]);
  }

 private:
  std::array<double, 2> values_;
};

/// Analytic stand-in: a South Atlantic Anomaly Gaussian in great-circle
/// distance plus an outer-belt Gaussian in |dipole magnetic latitude|.
/// Defaults are illustrative, not geophysical.
struct SyntheticMapParams {
  double saa_lat_deg = -30.0;
  double saa_lon_deg = -50.0;
  double saa_sigma_deg = 14.0;
  double saa_electron = 2.0e4;
  double saa_proton = 1.0e3;
  double belt_maglat_deg = 62.0;
  double belt_sigma_deg = 4.0;
  double belt_electron = 2.2e3;
  double belt_proton = 5.0;
  double pole_lat_deg = 80.65;
  double pole_lon_deg = -72.68;
  double reference_alt_km = 560.0;
  double alt_scale_km = 0.0;  ///< > 0: flux *= exp((alt - reference) / scale)

  void validate() const {
    require(saa_sigma_deg > 0.0 && belt_sigma_deg > 0.0, ErrorKind::invalid_input, "sigmas must be > 0");
    require(saa_electron >= 0.0 && saa_proton >= 0.0 && belt_electron >= 0.0 && belt_proton >= 0.0,
            ErrorKind::invalid_input, "amplitudes must be >= 0");
    require(alt_scale_km >= 0.0, ErrorKind::invalid_input, "alt_scale_km must be >= 0");
  }

  nlohmann::json to_json() const {
    return {{"saa_lat_deg", saa_lat_deg},       {"saa_lon_deg", saa_lon_deg},
            {"saa_sigma_deg", saa_sigma_deg},   {"saa_electron", saa_electron},
            {"saa_proton", saa_proton},         {"belt_maglat_deg", belt_maglat_deg},
            {"belt_sigma_deg", belt_sigma_deg}, {"belt_electron", belt_electron},
            {"belt_proton", belt_proton},       {"pole_lat_deg", pole_lat_deg},
            {"pole_lon_deg", pole_lon_deg},     {"reference_alt_km", reference_alt_km},
            {"alt_scale_km", alt_scale_km}};
  }
};

class SyntheticMap final : public RadiationMap {
 public:
  explicit SyntheticMap(SyntheticMapParams p = {})
      : p_(p), saa_(unit_from_latlon(p.saa_lat_deg, p.saa_lon_deg)), pole_(unit_from_latlon(p.pole_lat_deg, p.pole_lon_deg)) {
    p_.validate();
  }

  const SyntheticMapParams& params() const { return p_; }

  double flux(double lat_deg, double lon_deg, double alt_km, Species s) const override {
    return fluxes(unit_from_latlon(lat_deg, lon_deg), alt_km)[static_cast<std::size_t>(s)];
  }

  std::array<double, 2> fluxes(const Vec3& p, double alt_km) const override {
    const double d = rad2deg(std::acos(std::clamp(p.dot(saa_), -1.0, 1.0)));
    const double saa = std::exp(-0.5 * (d * d) / (p_.saa_sigma_deg * p_.saa_sigma_deg));
    const double maglat = rad2deg(std::asin(std::clamp(p.dot(pole_), -1.0, 1.0)));
    const double db = std::abs(maglat) - p_.belt_maglat_deg;
    const double belt = std::exp(-0.5 * (db * db) / (p_.belt_sigma_deg * p_.belt_sigma_deg));
    const double alt = p_.alt_scale_km > 0.0 ? std::exp((alt_km - p_.reference_alt_km) / p_.alt_scale_km) : 1.0;
    return {alt * (p_.saa_electron * saa + p_.belt_electron * belt), alt * (p_.saa_proton * saa + p_.belt_proton * belt)};
  }

  /// Dipole magnetic latitude of a geographic point, degrees.
  double magnetic_latitude(double lat_deg, double lon_deg) const {
    return rad2deg(std::asin(std::clamp(unit_from_latlon(lat_deg, lon_deg).dot(pole_), -1.0, 1.0)));
  }

  std::string describe() const override { return "synthetic " + p_.to_json().dump(); }

 private:
  SyntheticMapParams p_;
  Vec3 saa_;
  Vec3 pole_;
};

/// Flux tabulated on lat x lon x alt nodes per species. Bilinear in lat/lon
/// (longitude periodic), linear in altitude, no extrapolation.
class GriddedMap final : public RadiationMap {
 public:
  GriddedMap(std::vector<double> lat, std::vector<double> lon, std::vector<double> alt)
      : lat_(std::move(lat)), lon_(std::move(lon)), alt_(std::move(alt)) {
    check_axis(lat_, "lat_deg");
    check_axis(lon_, "lon_deg");
    check_axis(alt_, "alt_km");
    require(lat_.front() >= -90.0 && lat_.back() <= 90.0, ErrorKind::validation, "lat axis outside [-90, 90]");
    require(lon_.front() >= -180.0 && lon_.back() < lon_.front() + 360.0, ErrorKind::validation,
            "lon axis must span less than 360 degrees starting at >= -180");
    for (auto& v : data_) v.assign(lat_.size() * lon_.size() * alt_.size(), 0.0);
  }

  const std::vector<double>& lat_axis() const { return lat_; }
  const std::vector<double>& lon_axis() const { return lon_; }
  const std::vector<double>& alt_axis() const { return alt_; }

  double& node(Species s, std::size_t i, std::size_t j, std::size_t k) {
    return data_[static_cast<std::size_t>(s)][(i * lon_.size() + j) * alt_.size() + k];
  }
  double node(Species s, std::size_t i, std::size_t j, std::size_t k) const {
    return data_[static_cast<std::size_t>(s)][(i * lon_.size() + j) * alt_.size() + k];
  }

  double flux(double lat_deg, double lon_deg, double alt_km, Species s) const override {
    if (!(lat_deg >= lat_.front() && lat_deg <= lat_.back())) {
      fail(ErrorKind::out_of_range, "latitude " + fmt_num(lat_deg) + " outside gridded map");
    }
    if (!(alt_km >= alt_.front() && alt_km <= alt_.back())) {
      fail(ErrorKind::out_of_range, "altitude " + fmt_num(alt_km) + " km outside gridded map");
    }
    const auto [i0, i1, wi] = bracket(lat_, lat_deg);
    const auto [k0, k1, wk] = bracket(alt_, alt_km);
    // Longitude: periodic, the last node connects to the first + 360.
    const double lon = lon_.front() + wrap360(lon_deg - lon_.front());
    std::size_t j0 = lon_.size() - 1, j1 = 0;
    double wj = 0.0;
    if (lon_.size() == 1) {
      j0 = j1 = 0;
    } else if (lon <= lon_.back()) {
      std::tie(j0, j1, wj) = bracket(lon_, lon);
    } else {
      wj = (lon - lon_.back()) / (lon_.front() + 360.0 - lon_.back());
    }
    auto lerp = [](double a, double b, double w) { return w == 0.0 ? a : (w == 1.0 ? b : a + w * (b - a)); };
    auto at_alt = [&](std::size_t i, std::size_t j) { return lerp(node(s, i, j, k0), node(s, i, j, k1), wk); };
    const double a = lerp(at_alt(i0, j0), at_alt(i0, j1), wj);
    const double b = lerp(at_alt(i1, j0), at_alt(i1, j1), wj);
    return lerp(a, b, wi);
  }

  std::string describe() const override {
    return "gridded " + std::to_string(lat_.size()) + "x" + std::to_string(lon_.size()) + "x" +
           std::to_string(alt_.size());
  }

  /// Samples another map on this grid's nodes.
  void fill_from(const RadiationMap& src) {
    for (auto s : kAllSpecies)
      for (std::size_t i = 0; i < lat_.size(); ++i)
        for (std::size_t j = 0; j < lon_.size(); ++j)
          for (std::size_t k = 0; k < alt_.size(); ++k) node(s, i, j, k) = src.flux(lat_[i], lon_[j], alt_[k], s);
  }

  nlohmann::json axes_json() const {
    return {{"format", "constel-radiation-grid"},
            {"lat_deg", lat_},
            {"lon_deg", lon_},
            {"alt_km", alt_},
            {"species", {"electron", "proton"}},
            {"flux_units", "particles/cm^2/s"}};
  }

  void write_csv(std::ostream& os) const {
    os << "lat_deg,lon_deg,alt_km,species,flux\n";
    for (std::size_t i = 0; i < lat_.size(); ++i)
      for (std::size_t j = 0; j < lon_.size(); ++j)
        for (std::size_t k = 0; k < alt_.size(); ++k)
          for (auto s : kAllSpecies)
            os << fmt_num(lat_[i]) << ',' << fmt_num(lon_[j]) << ',' << fmt_num(alt_[k]) << ',' << to_string(s)
               << ',' << fmt_num(node(s, i, j, k)) << '\n';
  }

 private:
  static void check_axis(const std::vector<double>& a, const char* name) {
    require(!a.empty(), ErrorKind::validation, std::string(name) + " axis is empty");
    for (std::size_t i = 0; i < a.size(); ++i) {
      require(std::isfinite(a[i]), ErrorKind::validation, std::string(name) + " axis has a non-finite value");
      if (i > 0) require(a[i] > a[i - 1], ErrorKind::validation, std::string(name) + " axis must be strictly increasing");
    }
  }

  // Indices and weight for x inside [a.front(), a.back()].
  static std::tuple<std::size_t, std::size_t, double> bracket(const std::vector<double>& a, double x) {
    if (a.size() == 1) return {0, 0, 0.0};
    auto it = std::upper_bound(a.begin(), a.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - a.begin());
    if (hi >= a.size()) return {a.size() - 1, a.size() - 1, 0.0};  // x == back
    const std::size_t lo = hi - 1;
    return {lo, hi, (x - a[lo]) / (a[hi] - a[lo])};
  }

  std::vector<double> lat_;
  std::vector<double> lon_;
  std::vector<double> alt_;
  std::array<std::vector<double>, 2> data_;
};

/// Loads `lat_deg,lon_deg,alt_km,species,flux` with the JSON axes sidecar
/// (same stem, .json). Every node must be listed once per declared species.
inline GriddedMap load_gridded_map(const std::filesystem::path& csv_path) {
  const auto side = sidecar_path(csv_path);
  nlohmann::json meta;
  {
    auto in = open_input(side);
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::parse, side.string() + ": " + e.what());
    }
  }
  auto axis = [&](const char* key) {
    if (!meta.contains(key) || !meta[key].is_array()) fail(ErrorKind::validation, side.string() + ": missing axis " + key);
    return meta[key].get<std::vector<double>>();
  };
  GriddedMap map(axis("lat_deg"), axis("lon_deg"), axis("alt_km"));
  std::vector<Species> declared;
  for (const auto& s : meta.value("species", nlohmann::json::array({"electron", "proton"}))) {
    declared.push_back(parse_species(s.get<std::string>()));
  }
  auto index_of = [](const std::vector<double>& a, double v, const std::string& where, const char* name) {
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) fail(ErrorKind::validation, where + ": " + name + " value not on the declared axis");
    return static_cast<std::size_t>(it - a.begin());
  };
  const std::size_t n_nodes = map.lat_axis().size() * map.lon_axis().size() * map.alt_axis().size();
  std::array<std::vector<std::uint8_t>, 2> seen;
  for (auto& v : seen) v.assign(n_nodes, 0);

  auto in = open_input(csv_path);
  CsvReader reader(in, csv_path.string());
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.next(f)) {
    if (first && is_header_row(f)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 5) fail(ErrorKind::parse, reader.where() + ": expected 5 fields lat_deg,lon_deg,alt_km,species,flux");
    const auto w = reader.where();
    const auto i = index_of(map.lat_axis(), parse_double(f[0], w), w, "lat_deg");
    const auto j = index_of(map.lon_axis(), parse_double(f[1], w), w, "lon_deg");
    const auto k = index_of(map.alt_axis(), parse_double(f[2], w), w, "alt_km");
    const Species s = parse_species(f[3]);
    const double v = parse_double(f[4], w);
    if (!std::isfinite(v) || v < 0.0) fail(ErrorKind::validation, w + ": flux must be finite and >= 0");
    const std::size_t n = (i * map.lon_axis().size() + j) * map.alt_axis().size() + k;
    auto& mark = seen[static_cast<std::size_t>(s)][n];
    if (mark) fail(ErrorKind::validation, w + ": duplicate node");
    mark = 1;
    map.node(s, i, j, k) = v;
  }
  for (auto s : declared) {
    const auto& m = seen[static_cast<std::size_t>(s)];
    require(std::all_of(m.begin(), m.end(), [](std::uint8_t v) { return v != 0; }), ErrorKind::validation,
            csv_path.string() + ": missing " + to_string(s) + " nodes");
  }
  return map;
}

inline void save_gridded_map(const std::filesystem::path& csv_path, const GriddedMap& map) {
  {
    auto out = open_output(csv_path);
    map.write_csv(out);
  }
  auto side = open_output(sidecar_path(csv_path));
  side << map.axes_json().dump(2) << '\n';
}

struct ExposureResult {
  std::array<double, 2> fluence{0.0, 0.0};  ///< particles / cm^2, by species
  double window_s = 0.0;

  double operator[](Species s) const { return fluence[static_cast<std::size_t>(s)]; }
};

/// Trapezoidal fluence along the earth-frame track over [start, start + duration].
/// Nodes are start + k * step; a shorter final interval closes the window.
inline ExposureResult accumulate_exposure(const OrbitSpec& orbit, const RadiationMap& map, double duration_s,
                                          double step_s = 60.0, double start_s = 0.0) {
  require(std::isfinite(duration_s) && duration_s > 0.0, ErrorKind::invalid_input, "duration_s must be > 0");
  require(std::isfinite(step_s) && step_s > 0.0, ErrorKind::invalid_input, "step_s must be > 0");
  orbit.validate();
  const CircularPropagator prop(orbit);
  const auto n_full = static_cast<std::size_t>(std::floor(duration_s / step_s + 1e-9));
  ExposureResult r;
  r.window_s = duration_s;
  std::array<double, 2> prev = map.fluxes(prop.earth_fixed(start_s), orbit.altitude_km);
  for (std::size_t k = 1; k <= n_full; ++k) {
    const auto cur = map.fluxes(prop.earth_fixed(start_s + static_cast<double>(k) * step_s), orbit.altitude_km);
    for (std::size_t s = 0; s < 2; ++s) r.fluence[s] += 0.5 * step_s * (prev[s] + cur[s]);
    prev = cur;
  }
  const double rest = duration_s - static_cast<double>(n_full) * step_s;
  if (rest > 1e-9 * step_s) {
    const auto cur = map.fluxes(prop.earth_fixed(start_s + duration_s), orbit.altitude_km);
    for (std::size_t s = 0; s < 2; ++s) r.fluence[s] += 0.5 * rest * (prev[s] + cur[s]);
  }
  return r;
}

struct ExposureSettings {
  double duration_s = kSecondsPerDay;
  double step_s = 60.0;
  int raan_samples = 8;
};

/// Mean exposure over `raan_samples` RAANs offset by 360/n from the orbit's own.
inline ExposureResult raan_averaged_exposure(const OrbitSpec& orbit, const RadiationMap& map,
                                             const ExposureSettings& cfg = {}) {
  require(cfg.raan_samples >= 1, ErrorKind::invalid_input, "raan_samples must be >= 1");
  ExposureResult mean;
  mean.window_s = cfg.duration_s;
  for (int k = 0; k < cfg.raan_samples; ++k) {
    OrbitSpec o = orbit;
    o.raan_deg = wrap360(orbit.raan_deg + 360.0 * k / cfg.raan_samples);
    const auto r = accumulate_exposure(o, map, cfg.duration_s, cfg.step_s, o.epoch_s);
    for (std::size_t s = 0; s < 2; ++s) mean.fluence[s] += r.fluence[s];
  }
  for (auto& v : mean.fluence) v /= cfg.raan_samples;
  return mean;
}

struct InclinationExposure {
  double inclination_deg = 0.0;
  ExposureResult exposure;
};

inline std::vector<InclinationExposure> exposure_vs_inclination(double altitude_km,
                                                                const std::vector<double>& inclinations,
                                                                const RadiationMap& map,
                                                                const ExposureSettings& cfg = {}) {
  require(!inclinations.empty(), ErrorKind::invalid_input, "inclination list is empty");
  std::vector<InclinationExposure> out(inclinations.size());
  parallel_for(inclinations.size(), [&](std::size_t i) {
    out[i] = {inclinations[i],
              raan_averaged_exposure(OrbitSpec{altitude_km, inclinations[i], 0.0, 0.0, 0.0}, map, cfg)};
  });
  return out;
}

/// Smallest inclination whose fluence is within `rel_tol` of the sweep
/// maximum. RAAN-averaged exposure is symmetric under i -> 180 - i up to
/// quadrature noise, so mirror pairs are ties rather than distinct peaks.
inline double argmax_inclination(const std::vector<InclinationExposure>& rows, Species s,
                                 double rel_tol = 1e-3) {
  require(!rows.empty(), ErrorKind::invalid_input, "empty sweep");
  double best = 0.0;
  for (const auto& r : rows) best = std::max(best, r.exposure[s]);
  double incl = rows.front().inclination_deg;
  bool found = false;
  for (const auto& r : rows) {
    if (r.exposure[s] >= best * (1.0 - rel_tol) && (!found || r.inclination_deg < incl)) {
      incl = r.inclination_deg;
      found = true;
    }
  }
  return incl;
}

inline void write_inclination_exposure_csv(std::ostream& os, const std::vector<InclinationExposure>& rows) {
  os << "inclination_deg,species,fluence\n";
  for (const auto& r : rows)
    for (auto s : kAllSpecies)
      os << fmt_num(r.inclination_deg) << ',' << to_string(s) << ',' << fmt_num(r.exposure[s]) << '\n';
}

/// Exposures keyed by orbit, reusable across calls with identical settings.
struct ExposureCache {
  using Key = std::tuple<double, double, double, double, double>;
  std::optional<std::tuple<double, double, int>> settings;
  std::map<Key, ExposureResult> values;
};

/// Per-satellite RAAN-averaged exposure. Orbits that differ only by a
/// multiple of 360/raan_samples in RAAN share one evaluation.
inline std::vector<ExposureResult> satellite_exposures(const std::vector<OrbitSpec>& sats, const RadiationMap& map,
                                                       const ExposureSettings& cfg = {},
                                                       ExposureCache* cache = nullptr) {
  require(cfg.raan_samples >= 1, ErrorKind::invalid_input, "raan_samples must be >= 1");
  ExposureCache local;
  ExposureCache& c = cache ? *cache : local;
  const auto settings = std::make_tuple(cfg.duration_s, cfg.step_s, cfg.raan_samples);
  if (!c.settings) c.settings = settings;
  require(*c.settings == settings, ErrorKind::invalid_input, "exposure cache reused with different settings");

  const double period = 360.0 / cfg.raan_samples;
  std::vector<ExposureCache::Key> keys(sats.size());
  std::vector<OrbitSpec> todo;
  std::vector<ExposureCache::Key> todo_keys;
  for (std::size_t k = 0; k < sats.size(); ++k) {
    OrbitSpec o = sats[k];
    o.raan_deg = wrap_positive(o.raan_deg, period);
    keys[k] = {o.altitude_km, o.inclination_deg, o.raan_deg, o.phase_deg, o.epoch_s};
    if (c.values.count(keys[k])) continue;
    c.values.emplace(keys[k], ExposureResult{});
    todo.push_back(o);
    todo_keys.push_back(keys[k]);
  }
  std::vector<ExposureResult> fresh(todo.size());
  parallel_for(todo.size(), [&](std::size_t u) { fresh[u] = raan_averaged_exposure(todo[u], map, cfg); });
  for (std::size_t u = 0; u < todo.size(); ++u) c.values[todo_keys[u]] = fresh[u];
  std::vector<ExposureResult> out(sats.size());
  for (std::size_t k = 0; k < sats.size(); ++k) out[k] = c.values.at(keys[k]);
  return out;
}

inline std::array<double, 2> median_fluence(const std::vector<ExposureResult>& per_sat) {
  require(!per_sat.empty(), ErrorKind::invalid_input, "no satellites");
  std::array<double, 2> out{};
  for (std::size_t s = 0; s < 2; ++s) {
    std::vector<double> v;
    v.reserve(per_sat.size());
    for (const auto& r : per_sat) v.push_back(r.fluence[s]);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out[s] = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  return out;
}

inline void write_exposure_csv(std::ostream& os, const std::vector<ExposureResult>& per_sat) {
  os << "sat_id,species,fluence\n";
  for (std::size_t k = 0; k < per_sat.size(); ++k)
    for (auto s : kAllSpecies) os << k << ',' << to_string(s) << ',' << fmt_num(per_sat[k][s]) << '\n';
}

}  // namespace constel
