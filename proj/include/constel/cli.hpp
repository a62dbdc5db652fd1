#pragma once

// Command-line front end. `run` is callable in-process; tools/constel.cpp
// only forwards argv.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "constel/astro.hpp"
#include "constel/coverage.hpp"
#include "constel/demand.hpp"
#include "constel/design.hpp"
#include "constel/error.hpp"
#include "constel/fixtures.hpp"
#include "constel/io.hpp"
#include "constel/parallel.hpp"
#include "constel/radiation.hpp"

namespace constel::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kValidation = 1, kUsage = 2 };

namespace detail {

/// Flat `key = value` file; '#' starts a comment line.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::parse, path.string() + ":" + std::to_string(n) + ": expected key = value");
    std::string key(trim(t.substr(0, eq)));
    std::string value(trim(t.substr(eq + 1)));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out.emplace_back(key, value);
  }
  return out;
}

inline bool has_flag(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

inline std::optional<std::string> flag_value(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return std::nullopt;
}

inline std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (auto f : split_csv(s)) out.push_back(parse_double(f, what));
  return out;
}

}  // namespace detail

/// Output sink: a file when `path` is set, otherwise the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (!path.empty()) file_ = std::make_unique<std::ofstream>(open_output(path));
    os_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& stream() { return *os_; }
  bool is_file() const { return !path_.empty(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

struct Context {
  std::string command;
  std::string config_hash;

  std::string header() const {
    return std::string("# constel ") + kVersion + " command=" + command + " config_hash=" + config_hash + "\n";
  }
  nlohmann::json meta() const {
    return {{"tool", "constel"}, {"version", kVersion}, {"command", command}, {"config_hash", config_hash}};
  }
};

inline void write_sidecar(const Sink& sink, const nlohmann::json& j) {
  if (!sink.is_file()) return;
  auto out = open_output(sidecar_path(sink.path()));
  out << j.dump(2) << '\n';
}

inline std::unique_ptr<RadiationMap> make_map(const std::string& spec) {
  if (spec == "synthetic") return std::make_unique<SyntheticMap>();
  return std::make_unique<GriddedMap>(load_gridded_map(spec));
}

struct Options {
  // shared
  double alt = 560.0;
  double incl = 65.0;
  double min_elev = 25.0;
  double time_step = 60.0;
  double grid_step = 1.0;
  int max_walker = 5000;
  std::string out;
  // astro
  double raan = 0.0, phase = 0.0, duration = 86400.0, step = 60.0;
  std::string frame = "earth";
  double alt_min = 400.0, alt_max = 1500.0;
  int max_days = 3;
  // coverage
  double band = -1.0;
  int rgt_p = 0, rgt_q = 0;
  // demand
  std::string population, series, demand;
  double M = 1.0, lat_step = 0.5, lst_step = 0.5, bin_h = 0.5, tz_offset = 0.0, utc_hour = 0.0;
  std::string statistic = "median";
  std::string M_list = "1,2,4,8,16";
  // radiation
  std::string map = "synthetic";
  double incl_min = 0.0, incl_max = 180.0, incl_step = 5.0;
  int raans = 8;
  double exposure_step = 60.0;
  // design
  double shell_offset = 10.0, min_incl = 30.0, max_incl = 90.0;
  // fixtures
  std::uint64_t seed = 7;
  std::string out_dir = "fixtures";
};

namespace detail {

inline FootprintSpec footprint(const Options& o) { return FootprintSpec::from_elevation(o.min_elev); }
inline CoverageResolution resolution(const Options& o) { return {o.time_step, o.grid_step}; }
inline WalkerSearchCaps caps(const Options& o) { return {o.max_walker}; }
inline ExposureSettings exposure(const Options& o) { return {o.duration, o.exposure_step, o.raans}; }

inline DemandGrid demand_from_inputs(const Options& o, double multiplier, nlohmann::json* meta) {
  const auto pop = load_population_grid(o.population);
  const auto diurnal = diurnal_profile_from_series(o.series, o.bin_h, o.tz_offset);
  auto g = build_demand_grid(latitude_max_profile(pop), diurnal, multiplier, o.lat_step, o.lst_step,
                             parse_statistic(o.statistic));
  if (meta) {
    (*meta)["population_hash"] = file_hash(o.population);
    (*meta)["series_hash"] = file_hash(o.series);
    (*meta)["warnings"] = diurnal.warnings;
  }
  return g;
}

}  // namespace detail

/// Parses and executes one command line. Errors go to `err` as a single
/// `error: kind=<kind> message=<text>` line.
inline int run(std::vector<std::string> args, std::ostream& real_out, std::ostream& err) {
  std::ostringstream out;  // stdout is only written once the command succeeds
  CLI::App app{"constel: LEO constellation sizing against sun-fixed demand", "constel"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.fallthrough();  // --threads and --config may follow the subcommand
  app.set_version_flag("--version", kVersion);
  Options o;
  unsigned threads = thread_count();
  std::string config;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--config", config, "flat key = value file; command-line flags take precedence");

  std::map<std::string, std::function<void(const Context&)>> actions;
  auto out_opt = [&](CLI::App* s, const char* help = "output file (default: stdout)") {
    s->add_option("--out", o.out, help);
  };
  auto footprint_opts = [&](CLI::App* s) {
    s->add_option("--min-elev", o.min_elev, "minimum elevation angle, deg")->check(CLI::Range(0.0, 89.999));
    s->add_option("--time-step", o.time_step, "coverage sampling step, s")->check(CLI::PositiveNumber);
    s->add_option("--grid-step", o.grid_step, "coverage grid step, deg")->check(CLI::PositiveNumber);
    s->add_option("--max-walker", o.max_walker, "Walker search cap on total satellites")->check(CLI::PositiveNumber);
  };
  auto demand_opts = [&](CLI::App* s) {
    s->add_option("--population", o.population, "population CSV lat_deg,lon_deg,density")->required();
    s->add_option("--series", o.series, "throughput CSV site_id,timestamp_s,bytes")->required();
    s->add_option("--lat-step", o.lat_step, "demand grid latitude step, deg");
    s->add_option("--lst-step", o.lst_step, "demand grid local-time step, h");
    s->add_option("--bin-h", o.bin_h, "diurnal profile bin width, h");
    s->add_option("--tz-offset", o.tz_offset, "hours added to series timestamps to get local time");
    s->add_option("--statistic", o.statistic, "diurnal statistic feeding the grid")
        ->check(CLI::IsMember({"median", "p95"}));
  };
  auto exposure_opts = [&](CLI::App* s) {
    s->add_option("--map", o.map, "'synthetic' or a gridded flux CSV with JSON sidecar");
    s->add_option("--duration", o.duration, "integration window, s")->check(CLI::PositiveNumber);
    s->add_option("--exposure-step", o.exposure_step, "integration step, s")->check(CLI::PositiveNumber);
    s->add_option("--raans", o.raans, "RAAN samples averaged per orbit")->check(CLI::PositiveNumber);
  };

  // period
  {
    auto* s = app.add_subcommand("period", "Keplerian orbital period");
    s->add_option("--alt", o.alt, "altitude, km");
    out_opt(s);
    actions["period"] = [&](const Context& ctx) {
      Sink sink(o.out, out);
      sink.stream() << ctx.header() << "altitude_km,period_s\n"
                    << fmt_num(o.alt) << ',' << fmt_num(orbital_period(o.alt)) << '\n';
    };
  }
  // ssinc
  {
    auto* s = app.add_subcommand("ssinc", "sun-synchronous inclination");
    s->add_option("--alt", o.alt, "altitude, km");
    out_opt(s);
    actions["ssinc"] = [&](const Context& ctx) {
      Sink sink(o.out, out);
      sink.stream() << ctx.header() << "altitude_km,inclination_deg\n"
                    << fmt_num(o.alt) << ',' << fmt_num(sun_synchronous_inclination(o.alt)) << '\n';
    };
  }
  // ground-track
  {
    auto* s = app.add_subcommand("ground-track", "propagate a circular orbit's ground track");
    s->add_option("--alt", o.alt, "altitude, km");
    s->add_option("--incl", o.incl, "inclination, deg");
    s->add_option("--raan", o.raan, "RAAN at epoch, deg");
    s->add_option("--phase", o.phase, "argument of latitude at epoch, deg");
    s->add_option("--duration", o.duration, "duration, s");
    s->add_option("--step", o.step, "sample step, s");
    s->add_option("--frame", o.frame, "earth or solar")->check(CLI::IsMember({"earth", "solar"}));
    out_opt(s);
    actions["ground-track"] = [&](const Context& ctx) {
      const OrbitSpec orbit{o.alt, o.incl, o.raan, o.phase, 0.0};
      const Frame f = o.frame == "earth" ? Frame::earth : Frame::solar;
      const auto samples = propagate_ground_track(orbit, o.duration, o.step, f);
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      write_ground_track_csv(sink.stream(), samples, f);
    };
  }
  // rgt-survey
  {
    auto* s = app.add_subcommand("rgt-survey", "enumerate repeat ground tracks and size their coverage");
    s->add_option("--alt-min", o.alt_min, "lowest altitude, km");
    s->add_option("--alt-max", o.alt_max, "highest altitude, km");
    s->add_option("--incl", o.incl, "inclination, deg");
    s->add_option("--max-days", o.max_days, "largest repeat period p, days")->check(CLI::PositiveNumber);
    footprint_opts(s);
    out_opt(s, "survey CSV (a .json sidecar is written next to it)");
    actions["rgt-survey"] = [&](const Context& ctx) {
      const auto rgts = find_rgt_orbits(o.alt_min, o.alt_max, o.incl, o.max_days);
      require(!rgts.empty(), ErrorKind::validation, "no repeat ground track in the altitude band");
      const auto rows = rgt_survey_table(rgts, detail::footprint(o), detail::resolution(o), detail::caps(o));
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      write_survey_csv(sink.stream(), rows);
      nlohmann::json j{{"meta", ctx.meta()}, {"rgt_model", kRgtModel}, {"footprint", detail::footprint(o).describe()}};
      j["rows"] = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json e{{"p", r.rgt.repeat_days_p},
                         {"q", r.rgt.orbits_q},
                         {"central_angle_deg", detail::footprint(o).central_angle_deg(r.rgt.altitude_km)}};
        if (r.walker) e["walker"] = {{"total", r.walker->total_sats}, {"planes", r.walker->planes}, {"phasing", r.walker->phasing}};
        if (!r.error.empty()) e["error"] = r.error;
        j["rows"].push_back(e);
      }
      write_sidecar(sink, j);
    };
  }
  // coverage-min
  {
    auto* s = app.add_subcommand("coverage-min", "minimum Walker shell, or minimum satellites on one RGT");
    s->add_option("--alt", o.alt, "altitude, km (Walker mode)");
    s->add_option("--incl", o.incl, "inclination, deg");
    s->add_option("--band", o.band, "covered |lat| limit, deg (default: min(incl, 180 - incl))");
    s->add_option("--rgt-p", o.rgt_p, "repeat days; with --rgt-q selects RGT mode");
    s->add_option("--rgt-q", o.rgt_q, "revolutions per repeat");
    footprint_opts(s);
    out_opt(s);
    actions["coverage-min"] = [&](const Context& ctx) {
      const auto fp = detail::footprint(o);
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      if (o.rgt_p > 0 || o.rgt_q > 0) {
        require(o.rgt_p > 0 && o.rgt_q > 0, ErrorKind::invalid_input, "--rgt-p and --rgt-q go together");
        const auto all = find_rgt_orbits(1.0, 5000.0, o.incl, o.rgt_p);
        auto it = std::find_if(all.begin(), all.end(), [&](const RgtSolution& r) {
          return r.repeat_days_p == o.rgt_p && r.orbits_q == o.rgt_q;
        });
        require(it != all.end(), ErrorKind::validation, "no LEO repeat ground track with that p and q");
        const int n = min_sats_single_rgt(*it, fp, detail::resolution(o));
        sink.stream() << "p,q,altitude_km,central_angle_deg,min_sats_rgt\n"
                      << it->repeat_days_p << ',' << it->orbits_q << ',' << fmt_num(it->altitude_km) << ','
                      << fmt_num(fp.central_angle_deg(it->altitude_km)) << ',' << n << '\n';
        return;
      }
      const double band = o.band >= 0.0 ? o.band : std::min(o.incl, 180.0 - o.incl);
      const auto w = min_walker_total(o.alt, o.incl, fp, band, detail::resolution(o), detail::caps(o));
      sink.stream() << "altitude_km,inclination_deg,band_deg,central_angle_deg,total_sats,planes,phasing\n"
                    << fmt_num(o.alt) << ',' << fmt_num(o.incl) << ',' << fmt_num(band) << ','
                    << fmt_num(fp.central_angle_deg(o.alt)) << ',' << w.total_sats << ',' << w.planes << ','
                    << w.phasing << '\n';
    };
  }
  // demand-build
  {
    auto* s = app.add_subcommand("demand-build", "latitude x local-time demand grid");
    demand_opts(s);
    s->add_option("--M", o.M, "bandwidth multiplier (peak cell demand)")->check(CLI::PositiveNumber);
    out_opt(s, "grid CSV (a .json sidecar is written next to it)");
    actions["demand-build"] = [&](const Context& ctx) {
      nlohmann::json j{{"meta", ctx.meta()}};
      const auto g = detail::demand_from_inputs(o, o.M, &j);
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      write_demand_grid_csv(sink.stream(), g);
      j["M"] = o.M;
      j["lat_step_deg"] = g.lat_step_deg;
      j["lst_step_h"] = g.lst_step_h;
      j["statistic"] = to_string(g.statistic);
      j["aggregate_demand"] = g.total();
      j["peak_demand"] = g.peak();
      write_sidecar(sink, j);
    };
  }
  // demand-snapshot
  {
    auto* s = app.add_subcommand("demand-snapshot", "earth-frame demand field at one UTC hour");
    demand_opts(s);
    s->add_option("--utc-hour", o.utc_hour, "UTC hour of the snapshot");
    out_opt(s);
    actions["demand-snapshot"] = [&](const Context& ctx) {
      const auto pop = load_population_grid(o.population);
      const auto diurnal = diurnal_profile_from_series(o.series, o.bin_h, o.tz_offset);
      const auto f = demand_snapshot_earth_frame(pop, diurnal, o.utc_hour, parse_statistic(o.statistic));
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      write_earth_field_csv(sink.stream(), f);
    };
  }
  // radiation-sweep
  {
    auto* s = app.add_subcommand("radiation-sweep", "RAAN-averaged fluence versus inclination");
    s->add_option("--alt", o.alt, "altitude, km");
    s->add_option("--incl-min", o.incl_min, "first inclination, deg");
    s->add_option("--incl-max", o.incl_max, "last inclination, deg");
    s->add_option("--incl-step", o.incl_step, "inclination step, deg")->check(CLI::PositiveNumber);
    exposure_opts(s);
    out_opt(s, "CSV (a .json sidecar is written next to it)");
    actions["radiation-sweep"] = [&](const Context& ctx) {
      std::vector<double> incl;
      for (int k = 0; o.incl_min + k * o.incl_step <= o.incl_max + 1e-9; ++k) incl.push_back(o.incl_min + k * o.incl_step);
      const auto map = make_map(o.map);
      const auto rows = exposure_vs_inclination(o.alt, incl, *map, detail::exposure(o));
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      write_inclination_exposure_csv(sink.stream(), rows);
      nlohmann::json j{{"meta", ctx.meta()}, {"map", map->describe()}};
      for (auto sp : kAllSpecies) j["argmax_inclination_deg"][to_string(sp)] = argmax_inclination(rows, sp);
      write_sidecar(sink, j);
    };
  }
  // design-ss / design-walker
  auto design_cmd = [&](const char* name, const char* help, bool ss) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--demand", o.demand, "demand grid CSV lat_deg,lst_h,demand")->required();
    s->add_option("--alt", o.alt, ss ? "plane altitude, km" : "base altitude, km");
    if (!ss) {
      s->add_option("--shell-offset", o.shell_offset, "shells alternate base + offset, base - offset, km");
      s->add_option("--incl-step", o.incl_step, "shell inclination rounding step, deg")->check(CLI::PositiveNumber);
      s->add_option("--min-incl", o.min_incl, "lowest shell inclination, deg");
      s->add_option("--max-incl", o.max_incl, "highest shell inclination, deg");
    }
    footprint_opts(s);
    out_opt(s, "design JSON (default: stdout)");
    actions[name] = [&, ss](const Context& ctx) {
      const auto demand = load_demand_grid(o.demand);
      const auto fp = detail::footprint(o);
      ConstellationDesign d;
      if (ss) {
        d = greedy_ss_cover(demand, o.alt, fp);
      } else {
        WalkerSizer sizer(fp, detail::resolution(o), detail::caps(o));
        WalkerCoverOptions w{{o.alt + o.shell_offset, o.alt - o.shell_offset}, o.incl_step, o.min_incl, o.max_incl};
        d = greedy_walker_cover(demand, w, sizer);
      }
      nlohmann::json j{{"meta", ctx.meta()}, {"footprint", fp.describe()}, {"design", design_to_json(d, demand)}};
      if (!ss) j["baseline_note"] = "reconstructed multi-shell Walker baseline; capacity subtracted uniformly in local time";
      Sink sink(o.out, out);
      sink.stream() << j.dump(2) << '\n';
    };
  };
  design_cmd("design-ss", "greedy sun-synchronous plane cover of a demand grid", true);
  design_cmd("design-walker", "greedy multi-shell Walker-delta cover of a demand grid", false);
  // sweep
  {
    auto* s = app.add_subcommand("sweep", "SS versus Walker satellite counts and median fluence over M");
    demand_opts(s);
    s->add_option("--M", o.M_list, "comma-separated ascending multipliers");
    s->add_option("--alt", o.alt, "altitude, km");
    s->add_option("--shell-offset", o.shell_offset, "Walker shells alternate alt + offset, alt - offset, km");
    footprint_opts(s);
    exposure_opts(s);
    out_opt(s, "sweep CSV (a .json sidecar is written next to it)");
    actions["sweep"] = [&](const Context& ctx) {
      SweepConfig cfg;
      cfg.multipliers = detail::parse_list(o.M_list, "--M");
      cfg.altitude_km = o.alt;
      cfg.footprint = detail::footprint(o);
      cfg.resolution = detail::resolution(o);
      cfg.caps = detail::caps(o);
      cfg.lat_step_deg = o.lat_step;
      cfg.lst_step_h = o.lst_step;
      cfg.statistic = parse_statistic(o.statistic);
      cfg.walker.altitudes_km = {o.alt + o.shell_offset, o.alt - o.shell_offset};
      cfg.exposure = detail::exposure(o);
      const auto pop = load_population_grid(o.population);
      const auto diurnal = diurnal_profile_from_series(o.series, o.bin_h, o.tz_offset);
      const auto map = make_map(o.map);
      const auto rows = design_sweep(latitude_max_profile(pop), diurnal, cfg, *map);
      Sink sink(o.out, out);
      sink.stream() << ctx.header();
      write_sweep_csv(sink.stream(), rows);
      nlohmann::json j{{"meta", ctx.meta()},
                       {"map", map->describe()},
                       {"footprint", cfg.footprint.describe()},
                       {"population_hash", file_hash(o.population)},
                       {"series_hash", file_hash(o.series)},
                       {"warnings", diurnal.warnings},
                       {"M_axis", "peak single-cell demand; aggregate_demand per row"},
                       {"rows", sweep_to_json(rows)}};
      write_sidecar(sink, j);
    };
  }
  // fixtures
  {
    auto* s = app.add_subcommand("fixtures", "write seeded synthetic input files");
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--out-dir", o.out_dir, "output directory");
    actions["fixtures"] = [&](const Context& ctx) {
      const auto p = fixtures::write_all(o.out_dir, o.seed);
      out << ctx.header() << "file\n";
      for (const auto& f : {p.population, p.two_cluster_population, p.series, p.sinusoid_series, p.zero_demand,
                            p.radiation_grid})
        out << f.generic_string() << '\n';
    };
  }

  try {
    // Config keys become flags unless given on the command line. Keys of
    // other subcommands are ignored so one file can serve several commands.
    if (auto cfg_path = detail::flag_value(args, "config")) {
      CLI::App* sub = nullptr;
      for (const auto& a : args) {
        if ((sub = app.get_subcommand_no_throw(a))) break;
      }
      const auto all_subs = app.get_subcommands([](CLI::App*) { return true; });
      for (const auto& [key, value] : detail::read_config(*cfg_path)) {
        bool known = false;
        for (auto* c : all_subs) known = known || c->get_option_no_throw("--" + key) != nullptr;
        known = known || key == "threads";
        if (!known) throw CLI::ExtrasError("unknown config key '" + key + "'", CLI::ExitCodes::ExtrasError);
        if (detail::has_flag(args, key)) continue;
        if (key == "threads") {
          args.insert(args.begin(), "--threads=" + value);
        } else if (sub && sub->get_option_no_throw("--" + key)) {
          args.push_back("--" + key + "=" + value);
        }
      }
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, real_out, err);
      return kOk;
    }
    err << "error: kind=usage message=" << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: kind=" << to_string(e.kind()) << " message=" << e.what() << '\n';
    return kValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  set_thread_count(threads);
  std::ostringstream canon;
  for (const auto* opt : sub->get_options()) {
    const auto& name = opt->get_name();
    if (name == "--out" || name == "--help" || name.empty()) continue;
    const auto& res = opt->results();
    std::string v;
    for (std::size_t i = 0; i < res.size(); ++i) v += (i ? "," : "") + res[i];
    canon << name << '=' << (res.empty() ? opt->get_default_str() : v) << '\n';
  }
  const Context ctx{sub->get_name(), hex64(fnv1a64(canon.str()))};
  try {
    actions.at(sub->get_name())(ctx);
  } catch (const Error& e) {
    err << "error: kind=" << to_string(e.kind()) << " message=" << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: kind=internal message=" << e.what() << '\n';
    return kValidation;
  }
  real_out << out.str();
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out, err);
}

}  // namespace constel::cli
