#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "constel/fixtures.hpp"
#include "constel/radiation.hpp"
#include "support.hpp"

using namespace constel;

namespace {

std::vector<double> five_degree_sweep() {
  std::vector<double> v;
  for (int i = 0; i <= 180; i += 5) v.push_back(i);
  return v;
}

const std::vector<InclinationExposure>& synthetic_sweep() {
  static const auto rows = exposure_vs_inclination(560, five_degree_sweep(), SyntheticMap());
  return rows;
}

double at_incl(const std::vector<InclinationExposure>& rows, double incl, Species s) {
  for (const auto& r : rows)
    if (r.inclination_deg == incl) return r.exposure[s];
  throw std::runtime_error("inclination not in sweep");
}

}  // namespace

TEST(SyntheticMap, SaaCenterProtonIsSaaAmplitude) {
  const SyntheticMap m;
  const auto& p = m.params();
  EXPECT_NEAR(m.flux(p.saa_lat_deg, p.saa_lon_deg, 560, Species::proton), p.saa_proton, 1e-6 * p.saa_proton);
}

TEST(SyntheticMap, BeltCenterElectronAtLeastBeltAmplitude) {
  const SyntheticMap m;
  const auto& p = m.params();
  // Along the pole's meridian, geographic distance from the pole equals magnetic colatitude.
  const double lat = p.pole_lat_deg - (90.0 - p.belt_maglat_deg);
  EXPECT_NEAR(m.magnetic_latitude(lat, p.pole_lon_deg), p.belt_maglat_deg, 1e-9);
  EXPECT_GE(m.flux(lat, p.pole_lon_deg, 560, Species::electron), p.belt_electron);
}

TEST(SyntheticMap, AltitudeScalingIsOptIn) {
  SyntheticMapParams p;
  const SyntheticMap flat(p);
  EXPECT_EQ(flat.flux(10, 10, 400, Species::electron), flat.flux(10, 10, 800, Species::electron));
  p.alt_scale_km = 200;
  const SyntheticMap scaled(p);
  EXPECT_NEAR(scaled.flux(10, 10, 760, Species::electron) / scaled.flux(10, 10, 560, Species::electron), std::exp(1.0), 1e-12);
}

TEST(SyntheticMap, RejectsBadParameters) {
  SyntheticMapParams p;
  p.saa_sigma_deg = 0;
  EXPECT_THROW(SyntheticMap{p}, Error);
}

TEST(GriddedMap, UniformValueEverywhere) {
  GriddedMap g({-90, 0, 90}, {-180, -60, 60}, {400, 700});
  g.fill_from(UniformMap(7.5, 0.25));
  for (double lat : {-89.0, -12.3, 0.0, 45.6, 89.9})
    for (double lon : {-180.0, -179.9, 0.0, 100.0, 179.99})
      for (double alt : {400.0, 555.0, 700.0}) {
        EXPECT_NEAR(g.flux(lat, lon, alt, Species::electron), 7.5, 1e-12);
        EXPECT_NEAR(g.flux(lat, lon, alt, Species::proton), 0.25, 1e-12);
      }
}

TEST(GriddedMap, TrilinearWithPeriodicLongitude) {
  GriddedMap g({-10, 10}, {-180, 0, 120}, {500, 600});
  auto f = [](double lat, double lon, double alt) { return 1 + 0.1 * lat + 0.01 * lon + 0.001 * alt; };
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        g.node(Species::electron, i, j, k) = f(g.lat_axis()[i], g.lon_axis()[j], g.alt_axis()[k]);
  // Inside a cell the interpolant of a trilinear function is exact.
  EXPECT_NEAR(g.flux(3, 60, 530, Species::electron), f(3, 60, 530), 1e-12);
  // Across the seam: lon 150 lies between node 120 and node -180 (= 180).
  const double w = 30.0 / 60.0;
  const double expect = (1 - w) * f(-10, 120, 500) + w * f(-10, -180, 500);
  EXPECT_NEAR(g.flux(-10, 150, 500, Species::electron), expect, 1e-12);
  EXPECT_NEAR(g.flux(-10, -210, 500, Species::electron), expect, 1e-12);
}

TEST(GriddedMap, OutsideAxesIsOutOfRange) {
  GriddedMap g({-60, 60}, {-180, 0}, {500, 600});
  try {
    g.flux(70, 0, 550, Species::electron);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_range);
  }
  EXPECT_THROW(g.flux(0, 0, 650, Species::electron), Error);
  EXPECT_THROW(GriddedMap({0, 0}, {0}, {1}), Error);
}

TEST(GriddedMap, SaveLoadRoundTripMatchesSource) {
  const auto dir = oracle::scratch_dir("radiation_roundtrip");
  const auto g = fixtures::gridded_synthetic_map();
  save_gridded_map(dir / "map.csv", g);
  const auto back = load_gridded_map(dir / "map.csv");
  const SyntheticMap src;
  for (double lat : {-88.0, -30.0, 0.0, 52.0})
    for (double lon : {-178.0, -50.0, 0.0, 178.0}) {
      EXPECT_NEAR(back.flux(lat, lon, 560, Species::electron), src.flux(lat, lon, 560, Species::electron),
                  1e-9 * src.flux(lat, lon, 560, Species::electron) + 1e-12);
    }
}

TEST(GriddedMap, LoadRejectsMissingNodes) {
  const auto dir = oracle::scratch_dir("radiation_missing");
  GriddedMap g({-10, 10}, {0, 90}, {500});
  g.fill_from(UniformMap(1, 1));
  save_gridded_map(dir / "m.csv", g);
  std::ifstream in(dir / "m.csv");
  std::string all((std::istreambuf_iterator<char>(in)), {});
  in.close();
  all = all.substr(0, all.rfind('\n', all.size() - 2) + 1);  // drop the last node
  std::ofstream(dir / "m.csv") << all;
  EXPECT_THROW(load_gridded_map(dir / "m.csv"), Error);
}

TEST(Exposure, UniformMapGivesRateTimesDuration) {
  const UniformMap m(3.0, 0.5);
  for (double dur : {86400.0, 5000.0, 12345.6}) {
    const auto r = accumulate_exposure({560, 65, 10, 20, 0}, m, dur, 60);
    EXPECT_NEAR(r[Species::electron], 3.0 * dur, 1e-9 * 3.0 * dur);
    EXPECT_NEAR(r[Species::proton], 0.5 * dur, 1e-9 * 0.5 * dur);
  }
}

TEST(Exposure, ZeroMapGivesZero) {
  const auto r = accumulate_exposure({560, 65, 0, 0, 0}, UniformMap(0, 0), 86400);
  EXPECT_EQ(r[Species::electron], 0.0);
  EXPECT_EQ(r[Species::proton], 0.0);
}

TEST(Exposure, AdditiveOverSplitWindows) {
  const SyntheticMap m;
  const OrbitSpec o{560, 53, 30, 0, 0};
  const auto whole = accumulate_exposure(o, m, 86400, 60);
  const auto a = accumulate_exposure(o, m, 30000, 60);
  const auto b = accumulate_exposure(o, m, 56400, 60, 30000);
  for (auto s : kAllSpecies) EXPECT_NEAR(a[s] + b[s], whole[s], 1e-6 * whole[s]);
}

TEST(Exposure, StepHalvingConvergesAtDefaultStep) {
  const SyntheticMap m;
  for (double incl : {30.0, 65.0, 97.6}) {
    const OrbitSpec o{560, incl, 0, 0, 0};
    const auto h = accumulate_exposure(o, m, 86400, 60);
    const auto h2 = accumulate_exposure(o, m, 86400, 30);
    for (auto s : kAllSpecies) EXPECT_LT(std::abs(h[s] - h2[s]) / h2[s], 1e-3) << incl;
  }
}

TEST(Exposure, MatchesDirectTrapezoidOracle) {
  const SyntheticMap m;
  const OrbitSpec o{560, 40, 15, 5, 0};
  const CircularPropagator prop(o);
  double sum = 0;
  for (int k = 0; k < 100; ++k) {
    const auto a = prop.sample(60.0 * k), b = prop.sample(60.0 * (k + 1));
    sum += 30.0 * (m.flux(a.lat_deg, a.lon_deg, 560, Species::electron) + m.flux(b.lat_deg, b.lon_deg, 560, Species::electron));
  }
  EXPECT_NEAR(accumulate_exposure(o, m, 6000, 60)[Species::electron], sum, 1e-9 * sum);
}

TEST(Exposure, UniformMapGivesFlatInclinationCurve) {
  const auto rows = exposure_vs_inclination(560, {0, 45, 90, 135, 180}, UniformMap(2, 1), {86400, 120, 4});
  for (const auto& r : rows) EXPECT_NEAR(r.exposure[Species::electron], 2 * 86400, 1e-6);
}

TEST(Exposure, SyntheticElectronPeakAtModerateInclination) {
  const auto& rows = synthetic_sweep();
  const double arg = argmax_inclination(rows, Species::electron);
  std::cout << "[info] electron argmax inclination " << arg << " deg\n";
  EXPECT_GE(arg, 55.0);
  EXPECT_LE(arg, 75.0);
  EXPECT_LT(raan_averaged_exposure({560, sun_synchronous_inclination(560), 0, 0, 0}, SyntheticMap())[Species::electron],
            at_incl(rows, 65, Species::electron));
}

TEST(Exposure, RaanAveragedCurveIsMirrorSymmetric) {
  // Exact in the continuum limit; 8 RAAN samples leave a few 1e-3 of noise.
  const auto& rows = synthetic_sweep();
  for (double i = 0; i <= 90; i += 5)
    for (auto s : kAllSpecies) {
      const double a = at_incl(rows, i, s), b = at_incl(rows, 180 - i, s);
      EXPECT_NEAR(a, b, 5e-3 * std::max(a, b)) << i;
    }
}

TEST(Exposure, ArgmaxTieRulePicksSmallestWithinTolerance) {
  std::vector<InclinationExposure> rows(3);
  rows[0] = {10, {{1.0, 0}, 1}};
  rows[1] = {70, {{9.995, 0}, 1}};
  rows[2] = {110, {{10.0, 0}, 1}};
  EXPECT_EQ(argmax_inclination(rows, Species::electron), 70.0);
  EXPECT_EQ(argmax_inclination(rows, Species::electron, 0.0), 110.0);
}

TEST(Exposure, CacheDoesNotChangeResults) {
  const SyntheticMap m;
  const ExposureSettings cfg{20000, 60, 4};
  std::vector<OrbitSpec> sats{{560, 53, 0, 0, 0}, {560, 53, 90, 0, 0}, {560, 53, 45, 10, 0}, {560, 70, 200, 30, 0}};
  ExposureCache cache;
  const auto cached = satellite_exposures(sats, m, cfg, &cache);
  for (std::size_t k = 0; k < sats.size(); ++k) {
    const auto direct = raan_averaged_exposure(sats[k], m, cfg);
    for (auto s : kAllSpecies) EXPECT_NEAR(cached[k][s], direct[s], 1e-9 * direct[s]);
  }
  EXPECT_EQ(cache.values.size(), 3u);  // RAAN 0 and 90 share one evaluation with 4 samples
  EXPECT_THROW(satellite_exposures(sats, m, {20000, 30, 4}, &cache), Error);
}

TEST(Median, SingleSatelliteAndOrderStatistics) {
  const SyntheticMap m;
  const ExposureSettings cfg{20000, 60, 4};
  const OrbitSpec one{560, 53, 0, 0, 0};
  const auto e = raan_averaged_exposure(one, m, cfg);
  EXPECT_EQ(median_fluence(satellite_exposures({one}, m, cfg))[0], e[Species::electron]);

  std::vector<OrbitSpec> mixed;
  for (int k = 0; k < 4; ++k) mixed.push_back({560, 30, 90.0 * k, 0, 0});
  for (int k = 0; k < 4; ++k) mixed.push_back({560, 65, 90.0 * k, 0, 0});
  const auto per = satellite_exposures(mixed, m, cfg);
  std::vector<double> lo, hi;
  for (int k = 0; k < 4; ++k) lo.push_back(per[k][Species::electron]);
  for (int k = 4; k < 8; ++k) hi.push_back(per[k][Species::electron]);
  const double med = median_fluence(per)[0];
  const double a = oracle::quantile7(lo, 0.5), b = oracle::quantile7(hi, 0.5);
  EXPECT_GE(med, std::min(a, b));
  EXPECT_LE(med, std::max(a, b));
}

TEST(Csv, InclinationSchema) {
  std::ostringstream os;
  write_inclination_exposure_csv(os, exposure_vs_inclination(560, {0, 90}, UniformMap(1, 1), {600, 60, 1}));
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "inclination_deg,species,fluence");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 5);
}
