#include <doctest.h>

#include <sstream>

#include "mtt/monte_carlo.hpp"

using namespace mtt;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.steps = 40;
  cfg.runs = 4;
  cfg.bp_particles = 300;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("scenario geometry obeys the stated constraints") {
  for (int id = 1; id <= 3; ++id) {
    const ScenarioDefinition sc = generate_scenario(id);
    CHECK(sc.steps == 300);
    for (int k = 0; k <= sc.steps; ++k) {
      // y-symmetry about the x axis at every step.
      CHECK(sc.truth[0][k](1) == doctest::Approx(-sc.truth[1][k](1)));
      for (int t = 0; t < 2; ++t)
        CHECK(sc.roi.contains(sc.truth[t][k].head<2>()));
    }
    // Implied per-step acceleration stays within the near-CV assumption.
    for (int t = 0; t < 2; ++t) {
      for (int k = 0; k + 2 <= sc.steps; ++k) {
        const double vx0 = sc.truth[t][k + 1](0) - sc.truth[t][k](0);
        const double vx1 = sc.truth[t][k + 2](0) - sc.truth[t][k + 1](0);
        const double vy0 = sc.truth[t][k + 1](1) - sc.truth[t][k](1);
        const double vy1 = sc.truth[t][k + 2](1) - sc.truth[t][k + 1](1);
        CHECK(std::hypot(vx1 - vx0, vy1 - vy0) <= 1.5 + 1e-12);
      }
    }
  }

  SUBCASE("scenario 1: taper to 10 m separation, hold, split") {
    const ScenarioDefinition sc = generate_scenario(1);
    const auto p150 = sc.positions(150);
    CHECK((p150[0] - p150[1]).norm() == doctest::Approx(10.0));
    CHECK(sc.truth[0][0](1) == doctest::Approx(105.0));
    CHECK(sc.truth[0][300](1) == doctest::Approx(105.0));
    CHECK(sc.truth[0][0](0) == doctest::Approx(-600.0));
    CHECK(sc.truth[0][300](0) == doctest::Approx(600.0));
  }

  SUBCASE("scenario 2: parallel then diverging") {
    const ScenarioDefinition sc = generate_scenario(2);
    CHECK((sc.positions(100)[0] - sc.positions(100)[1]).norm() ==
          doctest::Approx(10.0));
    CHECK(sc.truth[0][300](1) > 300.0);
    CHECK(sc.truth[0][0](0) == doctest::Approx(50.0));
    CHECK(sc.roi.x_min == 0.0);
  }

  SUBCASE("scenario 3: crossing at the midpoint") {
    const ScenarioDefinition sc = generate_scenario(3);
    CHECK((sc.positions(150)[0] - sc.positions(150)[1]).norm() ==
          doctest::Approx(0.0));
    CHECK(sc.truth[0][0](1) == doctest::Approx(-300.0));
    CHECK(sc.truth[0][300](1) == doctest::Approx(300.0));
  }

  CHECK_THROWS_AS(generate_scenario(4), std::invalid_argument);
}

TEST_CASE("measurement simulation") {
  const ScenarioDefinition sc = generate_scenario(1);

  SUBCASE("perfect detection, no clutter") {
    SensorModel sm;
    sm.p_d = 1.0;
    sm.mu_c = 0.0;
    sm.roi = sc.roi;
    const auto scans = simulate_measurements(sc, sm, 5);
    REQUIRE(scans.size() == 300);
    for (const Scan& s : scans) CHECK(s.size() == 2);
  }

  SUBCASE("mean scan size is 2 p_d + mu_c") {
    SensorModel sm;
    sm.p_d = 0.9;
    sm.mu_c = 10.0;
    sm.roi = sc.roi;
    double total = 0.0;
    const int reps = 4;
    for (int rep = 0; rep < reps; ++rep) {
      const auto scans = simulate_measurements(sc, sm, 100 + rep);
      for (const Scan& s : scans) total += s.size();
    }
    const double mean = total / (300.0 * reps);
    // Var per scan ~= mu_c + 2 p_d (1-p_d); 3 standard errors.
    const double se = std::sqrt((10.0 + 2 * 0.9 * 0.1) / (300.0 * reps));
    CHECK(std::abs(mean - (2 * 0.9 + 10.0)) < 3.0 * se);
  }

  SUBCASE("same seed reproduces identical scans") {
    SensorModel sm;
    sm.roi = sc.roi;
    const auto a = simulate_measurements(sc, sm, 77);
    const auto b = simulate_measurements(sc, sm, 77);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      REQUIRE(a[k].size() == b[k].size());
      for (int m = 0; m < a[k].size(); ++m)
        CHECK(a[k].measurements[m] == b[k].measurements[m]);
    }
  }
}

TEST_CASE("config defaults match the reference parameter set") {
  const RunConfig cfg;
  CHECK(cfg.T == 1.0);
  CHECK(cfg.sigma_u2 == 0.1);
  CHECK(cfg.sigma_v == 10.0);
  CHECK(cfg.mu_c == 10.0);
  CHECK(cfg.mu_b == 0.01);
  CHECK(cfg.p_s == 0.995);
  CHECK(cfg.gate_gamma == 13.82);
  CHECK(cfg.bp_particles == 5000);
  CHECK(cfg.bp_p_th == 0.5);
  CHECK(cfg.bp_p_pr == 1e-5);
  CHECK(cfg.jpda_confirm_m == 10);
  CHECK(cfg.jpda_confirm_n == 16);
  CHECK(cfg.mht_confirm_m == 12);
  CHECK(cfg.mht_confirm_n == 24);
  CHECK(cfg.jpda_max_missed == 13);
  CHECK(cfg.mht_max_missed == 13);
  CHECK(cfg.mht_window == 5);
  CHECK(cfg.runs == 1000);
  CHECK(cfg.steps == 300);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config parsing rejects bad input") {
  RunConfig cfg;
  std::istringstream bad_key("not_a_key = 3\n");
  CHECK_THROWS_AS(parse_config_stream(bad_key, cfg), ConfigError);

  std::istringstream bad_value("p_s = 1.2\n");
  CHECK_THROWS_AS(parse_config_stream(bad_value, cfg), ConfigError);

  std::istringstream malformed("p_s 0.9\n");
  CHECK_THROWS_AS(parse_config_stream(malformed, cfg), ConfigError);

  std::istringstream bad_tracker("trackers = jpda,phd\n");
  CHECK_THROWS_AS(parse_config_stream(bad_tracker, cfg), ConfigError);

  std::istringstream good("# comment\np_d = 0.95\nseed = 42\n");
  RunConfig ok;
  CHECK_NOTHROW(parse_config_stream(good, ok));
  CHECK(ok.p_d == 0.95);
  CHECK(ok.seed == 42);
}

TEST_CASE("config write / parse round-trip") {
  RunConfig cfg = small_config();
  cfg.p_d = 0.87;
  cfg.trackers = "bp,jpda";
  cfg.bp_tol = 3.5e-7;
  std::ostringstream out;
  write_config(cfg, out);

  RunConfig back;
  std::istringstream in(out.str());
  parse_config_stream(in, back);
  std::ostringstream out2;
  write_config(back, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("monte carlo series shape and failure accounting") {
  RunConfig cfg = small_config();
  cfg.runs = 1;
  cfg.trackers = "jpda";
  const BenchmarkResult r = run_monte_carlo(cfg);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].per_k.size() == 40);
  CHECK(r.series[0].failed_runs == 0);
  // Every step contributes a GOSPA sample once runs succeed.
  for (const PerKStats& s : r.series[0].per_k) CHECK(s.count == 1);
}

TEST_CASE("each tracker consumes the same realizations") {
  RunConfig solo = small_config();
  solo.trackers = "jpda";
  RunConfig both = small_config();
  both.trackers = "jpda,bp";

  const BenchmarkResult a = run_monte_carlo(solo);
  const BenchmarkResult b = run_monte_carlo(both);
  const MetricSeries& ja = a.series[0];
  const MetricSeries& jb = b.for_tracker(TrackerKind::kJpda);
  for (std::size_t i = 0; i < ja.per_k.size(); ++i) {
    CHECK(ja.per_k[i].gospa_total == jb.per_k[i].gospa_total);
    CHECK(ja.per_k[i].d_tracks_sum == jb.per_k[i].d_tracks_sum);
  }
}

TEST_CASE("worker count does not change the output bytes") {
  RunConfig one = small_config();
  one.trackers = "jpda,mht,bp";
  one.workers = 1;
  RunConfig many = one;
  many.workers = 4;

  const BenchmarkResult a = run_monte_carlo(one);
  const BenchmarkResult b = run_monte_carlo(many);
  for (std::size_t s = 0; s < a.series.size(); ++s) {
    std::ostringstream csv_a, csv_b;
    write_series_csv(a.series[s], csv_a);
    write_series_csv(b.series[s], csv_b);
    CHECK(csv_a.str() == csv_b.str());
  }
}

TEST_CASE("series CSV format") {
  RunConfig cfg = small_config();
  cfg.runs = 2;
  cfg.trackers = "jpda";
  const BenchmarkResult r = run_monte_carlo(cfg);
  std::ostringstream out;
  write_series_csv(r.series[0], out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "k,gospa_total,gospa_loc,gospa_missed,gospa_false,d_center,d_tracks,"
        "n_est_mean");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == cfg.steps);

  std::ostringstream summary;
  write_summary_csv(r, summary);
  CHECK(summary.str().find("jpda,1,2,0,9,") != std::string::npos);
}
