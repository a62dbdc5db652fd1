#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "constel/demand.hpp"
#include "constel/fixtures.hpp"
#include "support.hpp"

using namespace constel;

namespace {

PopulationGrid read_pop(const std::string& text) {
  std::istringstream in(text);
  return read_population_grid(in, "inline");
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::io;
}

DiurnalProfile constant_diurnal() {
  std::vector<ThroughputSample> s;
  for (int k = 0; k < 288; ++k) s.push_back({"a", 300.0 * k, 5.0});
  return diurnal_profile_from_samples(s);
}

}  // namespace

TEST(Population, SingleRowGivesSingleCell) {
  const auto g = read_pop("lat_deg,lon_deg,density\n10.25,20.25,5.0\n");
  int nonzero = 0;
  for (double d : g.density) nonzero += d != 0.0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(g.at(g.lat_index(10.25), g.lon_index(20.25)), 5.0);
}

TEST(Population, EmptyFileIsAllZero) {
  const auto g = read_pop("");
  EXPECT_EQ(g.n_lat, 360);
  EXPECT_EQ(g.n_lon, 720);
  for (double d : g.density) ASSERT_EQ(d, 0.0);
}

TEST(Population, RejectsBadRows) {
  EXPECT_EQ(kind_of([] { read_pop("10.25,20.25,-1\n"); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([] { read_pop("95,20.25,1\n"); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([] { read_pop("10.25,20.25,1\n10.25,20.25,2\n"); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([] { read_pop("10.25,20.25\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { read_pop("10.25,abc,1\n"); }), ErrorKind::parse);
}

TEST(Population, CsvRoundTrip) {
  const auto g = fixtures::two_cluster_population();
  std::stringstream ss;
  write_population_grid_csv(ss, g);
  const auto back = read_population_grid(ss, "roundtrip");
  for (std::size_t k = 0; k < g.density.size(); ++k) ASSERT_NEAR(back.density[k], g.density[k], 1e-12 * g.density[k]);
}

TEST(LatitudeProfile, UniformGridGivesConstantProfile) {
  auto g = PopulationGrid::zeros();
  std::fill(g.density.begin(), g.density.end(), 3.5);
  for (double v : latitude_max_profile(g).values) EXPECT_EQ(v, 3.5);
}

TEST(LatitudeProfile, SingleCellOnlyInItsBin) {
  const auto p = latitude_max_profile(read_pop("10.25,20.25,5\n"));
  for (std::size_t i = 0; i < p.values.size(); ++i) EXPECT_EQ(p.values[i] != 0.0, std::abs(p.lat_center(i) - 10.25) < 1e-9);
}

TEST(LatitudeProfile, TwoClustersGiveTwoLocalMaximaAtPlantedLatitudes) {
  const auto g = fixtures::two_cluster_population(23.75, -12.25);
  const auto p = latitude_max_profile(g);
  std::vector<double> brute(static_cast<std::size_t>(g.n_lat), 0.0);
  for (int i = 0; i < g.n_lat; ++i)
    for (int j = 0; j < g.n_lon; ++j) brute[i] = std::max(brute[i], g.density[i * g.n_lon + j]);
  ASSERT_EQ(p.values, brute);
  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < brute.size(); ++i)
    if (brute[i] > brute[i - 1] && brute[i] > brute[i + 1]) maxima.push_back(p.lat_center(i));
  ASSERT_EQ(maxima.size(), 2u);
  EXPECT_DOUBLE_EQ(maxima[0], -12.25);
  EXPECT_DOUBLE_EQ(maxima[1], 23.75);
}

TEST(Diurnal, ConstantThroughputGivesUnitBins) {
  const auto d = constant_diurnal();
  for (double v : d.median) EXPECT_EQ(v, 1.0);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(Diurnal, SinusoidReproducesClosedFormMedians) {
  const auto s = fixtures::sinusoid_series();
  std::vector<double> vals;
  for (const auto& x : s) vals.push_back(x.bytes);
  const double global = oracle::quantile7(vals, 0.5);
  const auto d = diurnal_profile_from_samples(s);
  ASSERT_EQ(d.bins(), 48u);
  for (std::size_t b = 0; b < 48; ++b) {
    // Three samples per bin at +5, +15, +25 min; the bin never straddles an extremum.
    const double t_mid = 1800.0 * b + 900.0;
    EXPECT_NEAR(d.median[b], (2.0 + std::sin(2.0 * oracle::kPi * t_mid / 86400.0)) / global, 1e-9) << b;
  }
}

TEST(Diurnal, ScaleInvariantPerSite) {
  const auto base = fixtures::synthetic_series(3, 1, 3);
  auto copy = base, scaled = base;
  for (auto& x : copy) x.site = "other";
  for (auto& x : scaled) {
    x.site = "other";
    x.bytes *= 10.0;
  }
  auto same = base, mixed = base;
  same.insert(same.end(), copy.begin(), copy.end());
  mixed.insert(mixed.end(), scaled.begin(), scaled.end());
  const auto a = diurnal_profile_from_samples(same);
  const auto b = diurnal_profile_from_samples(mixed);
  const auto c = diurnal_profile_from_samples(base);
  for (std::size_t k = 0; k < a.bins(); ++k) {
    EXPECT_NEAR(a.median[k], b.median[k], 1e-12);
    EXPECT_NEAR(a.p95[k], b.p95[k], 1e-12);
    EXPECT_NEAR(a.median[k], c.median[k], 1e-12);
  }
}

TEST(Diurnal, P95MatchesTypeSevenQuantile) {
  const auto s = fixtures::synthetic_series(5, 2, 2);
  const auto d = diurnal_profile_from_samples(s);
  std::map<std::string, std::vector<double>> per_site;
  for (const auto& x : s) per_site[x.site].push_back(x.bytes);
  std::map<std::string, double> med;
  for (auto& [k, v] : per_site) med[k] = oracle::quantile7(v, 0.5);
  std::vector<double> bin7;
  for (const auto& x : s) {
    const double h = std::fmod(x.timestamp_s / 3600.0, 24.0);
    if (h >= 3.5 && h < 4.0) bin7.push_back(x.bytes / med[x.site]);
  }
  EXPECT_NEAR(d.p95[7], oracle::quantile7(bin7, 0.95), 1e-12);
  EXPECT_NEAR(d.median[7], oracle::quantile7(bin7, 0.5), 1e-12);
}

TEST(Diurnal, ZeroMedianSiteSkippedWithWarning) {
  auto s = fixtures::synthetic_series(1, 1, 1);
  for (int k = 0; k < 10; ++k) s.push_back({"dead", 300.0 * k, 0.0});
  const auto d = diurnal_profile_from_samples(s);
  EXPECT_EQ(d.sites_used, 1u);
  EXPECT_FALSE(d.warnings.empty());
}

TEST(Diurnal, Errors) {
  EXPECT_EQ(kind_of([] { diurnal_profile_from_samples({}); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([] { diurnal_profile_from_samples({{"a", 0, 0}, {"a", 60, 0}}); }), ErrorKind::validation);
  std::istringstream bad("site_id,timestamp_s,bytes\na,0,-5\n");
  EXPECT_EQ(kind_of([&] { read_throughput_series(bad, "x"); }), ErrorKind::validation);
}

TEST(Diurnal, EmptyBinsWarnAndAreZero) {
  std::vector<ThroughputSample> s;
  for (int k = 0; k < 24; ++k) s.push_back({"a", 3600.0 * k + 60, 1.0 + k});
  const auto d = diurnal_profile_from_samples(s);
  EXPECT_EQ(d.median[1], 0.0);
  EXPECT_EQ(d.samples[1], 0u);
  EXPECT_FALSE(d.warnings.empty());
}

TEST(DemandGrid, ConstantProfilesGiveM) {
  auto pop = PopulationGrid::zeros();
  std::fill(pop.density.begin(), pop.density.end(), 2.0);
  const auto g = build_demand_grid(latitude_max_profile(pop), constant_diurnal(), 7.0);
  for (double v : g.values) EXPECT_EQ(v, 7.0);
}

TEST(DemandGrid, PlantedPeakIsUniqueUnitCell) {
  auto pop = read_pop("40.25,0.25,9\n-20.25,50.25,3\n");
  std::vector<ThroughputSample> s;
  for (int k = 0; k < 48; ++k) s.push_back({"a", 1800.0 * k + 60, k == 31 ? 4.0 : 1.0});
  const auto g = build_demand_grid(latitude_max_profile(pop), diurnal_profile_from_samples(s), 1.0);
  int ones = 0;
  for (int i = 0; i < g.n_lat; ++i)
    for (int k = 0; k < g.n_lst; ++k)
      if (g.at(i, k) == 1.0) {
        ++ones;
        EXPECT_DOUBLE_EQ(g.lat_center(i), 40.25);
        EXPECT_DOUBLE_EQ(g.lst_center(k), 15.75);
      }
  EXPECT_EQ(ones, 1);
  EXPECT_EQ(kind_of([&] { build_demand_grid(latitude_max_profile(pop), diurnal_profile_from_samples(s), 0.0); }),
            ErrorKind::invalid_input);
}

TEST(DemandGrid, SeparableProductCellByCell) {
  LatitudeProfile lp;
  lp.lat_step_deg = 0.5;
  for (int i = 0; i < 360; ++i) lp.values.push_back(std::exp(-0.5 * std::pow((lp.lat_center(i) - 20) / 15, 2)));
  const auto d = diurnal_profile_from_samples(fixtures::sinusoid_series());
  const auto g = build_demand_grid(lp, d, 3.0);
  const double pmax = *std::max_element(lp.values.begin(), lp.values.end());
  const double smax = *std::max_element(d.median.begin(), d.median.end());
  for (int i = 0; i < g.n_lat; ++i)
    for (int k = 0; k < g.n_lst; ++k)
      ASSERT_NEAR(g.at(i, k), 3.0 * lp.values[i] / pmax * d.median[k] / smax, 1e-12);
}

TEST(DemandGrid, CoarserStepsTakeMaxOverOverlap) {
  const auto pop = fixtures::synthetic_population(7);
  const auto lp = latitude_max_profile(pop);
  const auto d = diurnal_profile_from_samples(fixtures::synthetic_series(7, 3, 2));
  const auto fine = build_demand_grid(lp, d, 1.0);
  const auto coarse = build_demand_grid(lp, d, 1.0, 2.0, 1.5);
  for (int i = 0; i < coarse.n_lat; ++i)
    for (int k = 0; k < coarse.n_lst; ++k) {
      double m = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 3; ++b) m = std::max(m, fine.at(4 * i + a, 3 * k + b));
      ASSERT_NEAR(coarse.at(i, k), m, 1e-12);
    }
}

TEST(DemandGrid, LongitudePermutationInvariant) {
  const auto pop = fixtures::synthetic_population(11);
  auto shuffled = pop;
  fixtures::Rng rng(99);
  std::vector<int> perm(pop.n_lon);
  std::iota(perm.begin(), perm.end(), 0);
  for (int j = pop.n_lon - 1; j > 0; --j) std::swap(perm[j], perm[static_cast<int>(rng.uniform() * (j + 1))]);
  for (int i = 0; i < pop.n_lat; ++i)
    for (int j = 0; j < pop.n_lon; ++j) shuffled.at(i, j) = pop.at(i, perm[j]);
  const auto d = diurnal_profile_from_samples(fixtures::synthetic_series(11, 2, 2));
  EXPECT_EQ(build_demand_grid(latitude_max_profile(pop), d, 4.0).values,
            build_demand_grid(latitude_max_profile(shuffled), d, 4.0).values);
}

TEST(DemandGrid, LinearInM) {
  const auto lp = latitude_max_profile(fixtures::synthetic_population(2));
  const auto d = diurnal_profile_from_samples(fixtures::synthetic_series(2, 2, 2));
  const auto g1 = build_demand_grid(lp, d, 1.0);
  for (double m : {0.5, 3.0, 16.0}) {
    const auto gm = build_demand_grid(lp, d, m);
    for (std::size_t x = 0; x < g1.values.size(); ++x) ASSERT_NEAR(gm.values[x], m * g1.values[x], 1e-12 * m);
    EXPECT_NEAR(gm.peak(), m, 1e-12);
  }
}

TEST(DemandGrid, ZeroProfileRejected) {
  EXPECT_EQ(kind_of([] { build_demand_grid(latitude_max_profile(PopulationGrid::zeros()), constant_diurnal(), 1.0); }),
            ErrorKind::validation);
}

TEST(DemandGrid, CsvRoundTripAndValidation) {
  const auto g = build_demand_grid(latitude_max_profile(fixtures::two_cluster_population()), constant_diurnal(), 2.0, 1.0, 1.0);
  std::stringstream ss;
  write_demand_grid_csv(ss, g);
  const auto back = read_demand_grid(ss, "rt");
  EXPECT_EQ(back.n_lat, g.n_lat);
  EXPECT_EQ(back.n_lst, g.n_lst);
  for (std::size_t x = 0; x < g.values.size(); ++x) ASSERT_NEAR(back.values[x], g.values[x], 1e-12);
  std::istringstream missing("lat_deg,lst_h,demand\n-89.5,0.5,1\n");
  EXPECT_EQ(kind_of([&] { read_demand_grid(missing, "m"); }), ErrorKind::validation);
}

TEST(Snapshot, ConstantDiurnalScalesDensity) {
  const auto pop = fixtures::two_cluster_population();
  const auto f = demand_snapshot_earth_frame(pop, constant_diurnal(), 5.0);
  for (std::size_t x = 0; x < pop.density.size(); ++x) ASSERT_EQ(f.field.density[x], pop.density[x]);
}

TEST(Snapshot, PeriodicIn24Hours) {
  const auto pop = fixtures::synthetic_population(4);
  const auto d = diurnal_profile_from_samples(fixtures::synthetic_series(4, 2, 2));
  EXPECT_EQ(demand_snapshot_earth_frame(pop, d, 3.25).field.density,
            demand_snapshot_earth_frame(pop, d, 27.25).field.density);
}

TEST(Snapshot, PeakLongitudeShiftsHalfTurnIn12Hours) {
  auto pop = PopulationGrid::zeros();
  for (int i = pop.lat_index(-10); i <= pop.lat_index(10); ++i)
    for (int j = 0; j < pop.n_lon; ++j) pop.at(i, j) = 1.0;
  std::vector<ThroughputSample> s;
  for (int k = 0; k < 48; ++k) s.push_back({"a", 1800.0 * k + 60, 1.0 + (k == 40 ? 5.0 : 0.0)});
  const auto d = diurnal_profile_from_samples(s);
  auto peak_lon = [&](double hour) {
    const auto f = demand_snapshot_earth_frame(pop, d, hour).field;
    const int i = pop.lat_index(0.25);
    int best = 0;
    for (int j = 0; j < f.n_lon; ++j)
      if (f.at(i, j) > f.at(i, best)) best = j;
    return f.lon_center(best);
  };
  const double a = peak_lon(0.0), b = peak_lon(12.0);
  EXPECT_NEAR(std::abs(wrap180(a - b)), 180.0, 1e-9);
}
