#pragma once

// Demand-driven constellation design: greedy sun-synchronous plane cover on
// the latitude x local-solar-time grid, a multi-shell Walker-delta baseline,
// and the sweep that compares them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "constel/astro.hpp"
#include "constel/coverage.hpp"
#include "constel/demand.hpp"
#include "constel/error.hpp"
#include "constel/io.hpp"
#include "constel/radiation.hpp"

namespace constel {

/// ceil(180 / lambda): equally spaced satellites whose footprints overlap
/// along the orbit (spacing <= 2 lambda).
inline int sats_per_ss_plane(double altitude_km, const FootprintSpec& fp) {
  const double lambda = fp.central_angle_deg(altitude_km);
  require(lambda > 0.0, ErrorKind::invalid_input, "central angle must be > 0");
  return std::max(1, static_cast<int>(std::ceil(180.0 / lambda - 1e-9)));
}

struct SSPlane {
  double ltan_h = 0.0;
  double altitude_km = 0.0;
  double inclination_deg = 0.0;
  int n_sats = 0;

  static SSPlane make(double ltan_h, double altitude_km, const FootprintSpec& fp) {
    return {wrap24(ltan_h), altitude_km, sun_synchronous_inclination(altitude_km), sats_per_ss_plane(altitude_km, fp)};
  }

  /// At epoch 0 the mean sun sits at RA 180, so RAAN = 15 * LTAN.
  std::vector<OrbitSpec> satellites() const {
    std::vector<OrbitSpec> out;
    for (int k = 0; k < n_sats; ++k)
      out.push_back({altitude_km, inclination_deg, wrap360(15.0 * ltan_h), 360.0 * k / n_sats, 0.0});
    return out;
  }
};

/// Demand cells whose centers lie within lambda of the plane's trace. In the
/// sun-fixed frame an SS orbit is a fixed great circle, with LST mapped to
/// longitude at 15 deg/h and the ascending node at (0, ltan).
inline std::vector<std::size_t> ss_plane_trace_cells(const SSPlane& plane, const DemandGrid& grid,
                                                     const FootprintSpec& fp) {
  const double lambda = std::min(90.0, fp.central_angle_deg(plane.altitude_km));
  const double sin_lambda = std::sin(deg2rad(lambda));
  const double si = std::sin(deg2rad(plane.inclination_deg));
  const double ci = std::cos(deg2rad(plane.inclination_deg));
  std::vector<double> sin_alpha(static_cast<std::size_t>(grid.n_lst));
  for (int k = 0; k < grid.n_lst; ++k)
    sin_alpha[static_cast<std::size_t>(k)] = std::sin(deg2rad(15.0 * (grid.lst_center(k) - plane.ltan_h)));
  std::vector<std::size_t> cells;
  for (int i = 0; i < grid.n_lat; ++i) {
    const double phi = deg2rad(grid.lat_center(i));
    const double cp = std::cos(phi), sp = std::sin(phi);
    for (int k = 0; k < grid.n_lst; ++k) {
      // Sine of the distance from the cell center to the orbit's great circle.
      const double d = -si * cp * sin_alpha[static_cast<std::size_t>(k)] + ci * sp;
      if (std::abs(d) <= sin_lambda) cells.push_back(grid.index(i, k));
    }
  }
  return cells;
}

enum class DesignVariant { ss, walker };

inline std::string to_string(DesignVariant v) { return v == DesignVariant::ss ? "ss" : "walker"; }

struct AuditEntry {
  int iteration = 0;
  int lat_index = 0;
  int lst_index = 0;
  double cell_residual = 0.0;  ///< residual of the selected cell before this step
  double ltan_h = 0.0;         ///< SS: chosen plane
  std::optional<WalkerConfig> shell;  ///< Walker: chosen shell
  double band_deg = 0.0;       ///< Walker: |lat| covered by the shell
  double removed = 0.0;        ///< total residual removed by this step
  double residual_after = 0.0; ///< total residual after this step
};

struct ConstellationDesign {
  DesignVariant variant = DesignVariant::ss;
  double altitude_km = 0.0;
  std::vector<SSPlane> planes;
  std::vector<WalkerConfig> shells;
  std::vector<double> shell_bands_deg;
  int total_sats = 0;
  double initial_demand = 0.0;
  std::vector<AuditEntry> audit;
  DemandGrid residual;

  int n_planes() const {
    if (variant == DesignVariant::ss) return static_cast<int>(planes.size());
    int n = 0;
    for (const auto& s : shells) n += s.planes;
    return n;
  }

  std::vector<OrbitSpec> satellites() const {
    std::vector<OrbitSpec> out;
    for (const auto& p : planes)
      for (const auto& o : p.satellites()) out.push_back(o);
    for (const auto& s : shells)
      for (const auto& o : s.satellites()) out.push_back(o);
    return out;
  }
};

namespace detail {

// Max-residual cell; ties: larger |lat|, then smaller LST, then lower row.
inline std::optional<std::pair<int, int>> select_max_cell(const DemandGrid& r) {
  std::optional<std::pair<int, int>> best;
  auto better = [&](int i, int k) {
    const double v = r.at(i, k), bv = r.at(best->first, best->second);
    if (v != bv) return v > bv;
    const double a = std::abs(r.lat_center(i)), ba = std::abs(r.lat_center(best->first));
    if (a != ba) return a > ba;
    if (k != best->second) return k < best->second;
    return i < best->first;
  };
  for (int i = 0; i < r.n_lat; ++i)
    for (int k = 0; k < r.n_lst; ++k)
      if (r.at(i, k) > 0.0 && (!best || better(i, k))) best = {i, k};
  return best;
}

inline double subtract_unit(DemandGrid& r, const std::vector<std::size_t>& cells) {
  double removed = 0.0;
  for (auto c : cells) {
    const double take = std::min(1.0, r.values[c]);
    r.values[c] -= take;
    removed += take;
  }
  return removed;
}

inline std::string cell_name(const DemandGrid& g, int i, int k) {
  return "(lat " + fmt_num(g.lat_center(i)) + ", lst " + fmt_num(g.lst_center(k)) + " h)";
}

}  // namespace detail

/// Greedy SS-plane cover. Each plane removes one capacity unit from every
/// cell on its trace, clamped at zero; planes may repeat at one LTAN.
/// Candidate LTANs sit at the grid's LST bin centers.
inline ConstellationDesign greedy_ss_cover(const DemandGrid& demand, double altitude_km, const FootprintSpec& fp) {
  for (double v : demand.values)
    require(std::isfinite(v) && v >= 0.0, ErrorKind::validation, "demand must be finite and >= 0");
  ConstellationDesign d;
  d.variant = DesignVariant::ss;
  d.altitude_km = altitude_km;
  d.residual = demand;
  d.initial_demand = demand.total();
  const SSPlane proto = SSPlane::make(0.0, altitude_km, fp);

  std::vector<std::vector<std::size_t>> traces(static_cast<std::size_t>(demand.n_lst));
  std::vector<std::vector<std::uint8_t>> member(traces.size(), std::vector<std::uint8_t>(demand.size(), 0));
  for (int c = 0; c < demand.n_lst; ++c) {
    SSPlane p = proto;
    p.ltan_h = demand.lst_center(c);
    traces[static_cast<std::size_t>(c)] = ss_plane_trace_cells(p, demand, fp);
    for (auto cell : traces[static_cast<std::size_t>(c)]) member[static_cast<std::size_t>(c)][cell] = 1;
  }
  for (int i = 0; i < demand.n_lat; ++i) {
    for (int k = 0; k < demand.n_lst; ++k) {
      if (demand.at(i, k) <= 0.0) continue;
      const auto idx = demand.index(i, k);
      const bool reachable = std::any_of(member.begin(), member.end(), [&](const auto& m) { return m[idx] != 0; });
      if (!reachable)
        fail(ErrorKind::uncoverable_demand, "no SS plane at " + fmt_num(altitude_km) + " km covers cell " +
                                                detail::cell_name(demand, i, k));
    }
  }

  double residual_total = d.initial_demand;
  while (auto cell = detail::select_max_cell(d.residual)) {
    const auto idx = d.residual.index(cell->first, cell->second);
    int best_c = -1;
    double best_score = -1.0;
    for (int c = 0; c < demand.n_lst; ++c) {
      if (!member[static_cast<std::size_t>(c)][idx]) continue;
      double score = 0.0;
      for (auto t : traces[static_cast<std::size_t>(c)]) score += std::min(1.0, d.residual.values[t]);
      if (score > best_score) {
        best_score = score;
        best_c = c;
      }
    }
    AuditEntry e;
    e.iteration = static_cast<int>(d.audit.size());
    e.lat_index = cell->first;
    e.lst_index = cell->second;
    e.cell_residual = d.residual.values[idx];
    e.ltan_h = demand.lst_center(best_c);
    e.removed = detail::subtract_unit(d.residual, traces[static_cast<std::size_t>(best_c)]);
    residual_total = d.residual.total();
    e.residual_after = residual_total;
    d.audit.push_back(e);
    SSPlane p = proto;
    p.ltan_h = e.ltan_h;
    d.planes.push_back(p);
  }
  d.total_sats = static_cast<int>(d.planes.size()) * proto.n_sats;
  return d;
}

/// Memoized min_walker_total keyed by (altitude, inclination, band).
class WalkerSizer {
 public:
  WalkerSizer(FootprintSpec fp, CoverageResolution res = {}, WalkerSearchCaps caps = {})
      : fp_(fp), res_(res), caps_(caps) {}

  WalkerConfig operator()(double altitude_km, double inclination_deg, double band_deg) {
    const auto key = std::make_tuple(altitude_km, inclination_deg, band_deg);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto cfg = min_walker_total(altitude_km, inclination_deg, fp_, band_deg, res_, caps_);
    cache_.emplace(key, cfg);
    return cfg;
  }

  const FootprintSpec& footprint() const { return fp_; }

 private:
  FootprintSpec fp_;
  CoverageResolution res_;
  WalkerSearchCaps caps_;
  std::map<std::tuple<double, double, double>, WalkerConfig> cache_;
};

struct WalkerCoverOptions {
  std::vector<double> altitudes_km;  ///< cycled per added shell
  double inclination_step_deg = 5.0;
  double min_inclination_deg = 30.0;
  double max_inclination_deg = 90.0;
};

inline std::vector<double> default_shell_altitudes(double base_km) { return {base_km + 10.0, base_km - 10.0}; }

/// Multi-shell Walker baseline: each shell targets the max-residual cell,
/// takes inclination = |lat| rounded up to the step (clamped to [min, max]),
/// is sized for band |lat| <= inclination, and removes one unit from every
/// cell in that band at all local times.
inline ConstellationDesign greedy_walker_cover(const DemandGrid& demand, const WalkerCoverOptions& opt,
                                               WalkerSizer& sizer) {
  require(!opt.altitudes_km.empty(), ErrorKind::invalid_input, "shell altitude list is empty");
  require(opt.inclination_step_deg > 0.0, ErrorKind::invalid_input, "inclination step must be > 0");
  require(opt.min_inclination_deg <= opt.max_inclination_deg && opt.max_inclination_deg <= 90.0,
          ErrorKind::invalid_input, "inclination limits must satisfy min <= max <= 90");
  for (double v : demand.values)
    require(std::isfinite(v) && v >= 0.0, ErrorKind::validation, "demand must be finite and >= 0");
  ConstellationDesign d;
  d.variant = DesignVariant::walker;
  d.altitude_km = opt.altitudes_km.front();
  d.residual = demand;
  d.initial_demand = demand.total();

  double min_lambda = 180.0;
  for (double a : opt.altitudes_km) min_lambda = std::min(min_lambda, sizer.footprint().central_angle_deg(a));
  for (int i = 0; i < demand.n_lat; ++i) {
    if (std::abs(demand.lat_center(i)) <= opt.max_inclination_deg + min_lambda) continue;
    for (int k = 0; k < demand.n_lst; ++k)
      if (demand.at(i, k) > 0.0)
        fail(ErrorKind::uncoverable_demand,
             "cell " + detail::cell_name(demand, i, k) + " lies beyond max inclination + central angle");
  }

  while (auto cell = detail::select_max_cell(d.residual)) {
    const double abs_lat = std::abs(demand.lat_center(cell->first));
    double incl = std::ceil(abs_lat / opt.inclination_step_deg - 1e-9) * opt.inclination_step_deg;
    incl = std::clamp(incl, opt.min_inclination_deg, opt.max_inclination_deg);
    const double band = std::max(incl, abs_lat);
    const double alt = opt.altitudes_km[d.shells.size() % opt.altitudes_km.size()];
    const WalkerConfig cfg = sizer(alt, incl, band);

    std::vector<std::size_t> cells;
    for (int i = 0; i < demand.n_lat; ++i) {
      if (std::abs(demand.lat_center(i)) > band) continue;
      for (int k = 0; k < demand.n_lst; ++k) cells.push_back(demand.index(i, k));
    }
    AuditEntry e;
    e.iteration = static_cast<int>(d.audit.size());
    e.lat_index = cell->first;
    e.lst_index = cell->second;
    e.cell_residual = d.residual.at(cell->first, cell->second);
    e.shell = cfg;
    e.band_deg = band;
    e.removed = detail::subtract_unit(d.residual, cells);
    e.residual_after = d.residual.total();
    d.audit.push_back(e);
    d.shells.push_back(cfg);
    d.shell_bands_deg.push_back(band);
    d.total_sats += cfg.total_sats;
  }
  return d;
}

/// Cells a single audit step subtracted from.
inline std::vector<std::size_t> audit_step_cells(const ConstellationDesign& d, const AuditEntry& e,
                                                 const DemandGrid& grid, const FootprintSpec& fp) {
  if (d.variant == DesignVariant::ss) {
    return ss_plane_trace_cells(SSPlane::make(e.ltan_h, d.altitude_km, fp), grid, fp);
  }
  std::vector<std::size_t> cells;
  for (int i = 0; i < grid.n_lat; ++i) {
    if (std::abs(grid.lat_center(i)) > e.band_deg) continue;
    for (int k = 0; k < grid.n_lst; ++k) cells.push_back(grid.index(i, k));
  }
  return cells;
}

/// Re-applies the audit log to `initial`; returns the final residual and
/// checks every step's recorded reduction.
inline DemandGrid replay_audit(const ConstellationDesign& d, const DemandGrid& initial, const FootprintSpec& fp) {
  DemandGrid r = initial;
  for (const auto& e : d.audit) {
    const double removed = detail::subtract_unit(r, audit_step_cells(d, e, initial, fp));
    if (removed != e.removed || r.total() != e.residual_after) {
      fail(ErrorKind::validation, "audit step " + std::to_string(e.iteration) + " does not replay");
    }
  }
  return r;
}

inline std::array<double, 2> constellation_median_exposure(const ConstellationDesign& d, const RadiationMap& map,
                                                           const ExposureSettings& cfg = {},
                                                           ExposureCache* cache = nullptr) {
  const auto sats = d.satellites();
  require(!sats.empty(), ErrorKind::invalid_input, "design has no satellites");
  return median_fluence(satellite_exposures(sats, map, cfg, cache));
}

inline nlohmann::json design_to_json(const ConstellationDesign& d, const DemandGrid& demand) {
  nlohmann::json j;
  j["variant"] = to_string(d.variant);
  j["altitude_km"] = d.altitude_km;
  j["total_sats"] = d.total_sats;
  j["n_planes"] = d.n_planes();
  j["initial_demand"] = d.initial_demand;
  j["residual_demand"] = d.residual.total();
  j["planes"] = nlohmann::json::array();
  for (const auto& p : d.planes)
    j["planes"].push_back({{"ltan_h", p.ltan_h},
                           {"altitude_km", p.altitude_km},
                           {"inclination_deg", p.inclination_deg},
                           {"n_sats", p.n_sats}});
  j["shells"] = nlohmann::json::array();
  for (std::size_t s = 0; s < d.shells.size(); ++s) {
    const auto& w = d.shells[s];
    j["shells"].push_back({{"altitude_km", w.altitude_km},
                           {"inclination_deg", w.inclination_deg},
                           {"band_deg", d.shell_bands_deg[s]},
                           {"total_sats", w.total_sats},
                           {"planes", w.planes},
                           {"phasing", w.phasing}});
  }
  j["audit"] = nlohmann::json::array();
  for (const auto& e : d.audit) {
    nlohmann::json a{{"iteration", e.iteration},
                     {"lat_deg", demand.lat_center(e.lat_index)},
                     {"lst_h", demand.lst_center(e.lst_index)},
                     {"cell_residual", e.cell_residual},
                     {"removed", e.removed},
                     {"residual_after", e.residual_after}};
    if (d.variant == DesignVariant::ss) {
      a["ltan_h"] = e.ltan_h;
    } else {
      a["shell_inclination_deg"] = e.shell->inclination_deg;
      a["shell_altitude_km"] = e.shell->altitude_km;
      a["band_deg"] = e.band_deg;
    }
    j["audit"].push_back(a);
  }
  return j;
}

struct SweepConfig {
  std::vector<double> multipliers{1, 2, 4, 8, 16};
  double altitude_km = 560.0;
  FootprintSpec footprint;
  CoverageResolution resolution;
  WalkerSearchCaps caps;
  double lat_step_deg = 0.5;
  double lst_step_h = 0.5;
  DiurnalStatistic statistic = DiurnalStatistic::median;
  WalkerCoverOptions walker;  ///< empty altitude list -> base +/- 10 km
  ExposureSettings exposure;
};

struct SweepRow {
  double multiplier = 0.0;
  DesignVariant method = DesignVariant::ss;
  std::optional<int> total_sats;
  std::optional<int> n_planes;
  std::optional<std::array<double, 2>> median_fluence;
  double aggregate_demand = 0.0;
  std::string error;
};

/// Both designs per multiplier plus their median per-satellite fluence.
/// A failing design is recorded in its row and the sweep continues.
inline std::vector<SweepRow> design_sweep(const LatitudeProfile& lat_profile, const DiurnalProfile& diurnal,
                                          const SweepConfig& cfg, const RadiationMap& map) {
  require(!cfg.multipliers.empty(), ErrorKind::invalid_input, "no multipliers");
  for (std::size_t k = 0; k < cfg.multipliers.size(); ++k) {
    require(cfg.multipliers[k] > 0.0, ErrorKind::invalid_input, "multipliers must be > 0");
    if (k > 0) require(cfg.multipliers[k] > cfg.multipliers[k - 1], ErrorKind::invalid_input, "multipliers must ascend");
  }
  WalkerCoverOptions wopt = cfg.walker;
  if (wopt.altitudes_km.empty()) wopt.altitudes_km = default_shell_altitudes(cfg.altitude_km);
  WalkerSizer sizer(cfg.footprint, cfg.resolution, cfg.caps);
  ExposureCache cache;
  std::vector<SweepRow> rows;
  for (double m : cfg.multipliers) {
    const auto grid = build_demand_grid(lat_profile, diurnal, m, cfg.lat_step_deg, cfg.lst_step_h, cfg.statistic);
    for (auto method : {DesignVariant::ss, DesignVariant::walker}) {
      SweepRow row;
      row.multiplier = m;
      row.method = method;
      row.aggregate_demand = grid.total();
      try {
        const auto d = method == DesignVariant::ss ? greedy_ss_cover(grid, cfg.altitude_km, cfg.footprint)
                                                   : greedy_walker_cover(grid, wopt, sizer);
        row.total_sats = d.total_sats;
        row.n_planes = d.n_planes();
        if (d.total_sats > 0) row.median_fluence = constellation_median_exposure(d, map, cfg.exposure, &cache);
      } catch (const Error& e) {
        row.error = std::string(to_string(e.kind())) + ": " + e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "M,method,total_sats,n_planes,median_electron_fluence,median_proton_fluence\n";
  auto opt_int = [](const std::optional<int>& v) { return v ? fmt_num(*v) : std::string("NA"); };
  for (const auto& r : rows) {
    os << fmt_num(r.multiplier) << ',' << to_string(r.method) << ',' << opt_int(r.total_sats) << ','
       << opt_int(r.n_planes) << ','
       << (r.median_fluence ? fmt_num((*r.median_fluence)[0]) : std::string("NA")) << ','
       << (r.median_fluence ? fmt_num((*r.median_fluence)[1]) : std::string("NA")) << '\n';
  }
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json e{{"M", r.multiplier}, {"method", to_string(r.method)}, {"aggregate_demand", r.aggregate_demand}};
    if (r.total_sats) e["total_sats"] = *r.total_sats;
    if (!r.error.empty()) e["error"] = r.error;
    j.push_back(e);
  }
  return j;
}

}  // namespace constel
