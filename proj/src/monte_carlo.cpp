#include "mtt/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "mtt/bp.hpp"
#include "mtt/jpda.hpp"
#include "mtt/mht.hpp"
#include "mtt/rng.hpp"
#include "mtt/version.hpp"

namespace mtt {

namespace {

constexpr std::uint64_t kRunScanStream = 0x72756e7363616e;
constexpr std::uint64_t kRunBpStream = 0x72756e6270;

struct KSample {
  GospaResult gospa;
  std::optional<double> d_center;
  std::optional<double> d_tracks;
  int n_est = 0;
};

struct TrackerRun {
  bool failed = false;
  std::vector<KSample> per_k;
};

KSample score_scan(const ScenarioDefinition& sc, int k,
                   const std::vector<Estimate>& estimates,
                   const RunConfig& cfg) {
  KSample s;
  const std::array<MeasVec, 2> truth = sc.positions(k);
  std::vector<MeasVec> est;
  est.reserve(estimates.size());
  for (const Estimate& e : estimates) est.push_back(e.state.head<2>());
  s.gospa = gospa({truth[0], truth[1]}, est, cfg.gospa_p, cfg.gospa_c);
  s.n_est = static_cast<int>(est.size());
  const std::vector<MeasVec> two = gnn_select_two(est, truth);
  if (two.size() == 2) {
    s.d_center = d_center(two[0].y(), two[1].y());
    s.d_tracks = d_tracks(two[0].y(), two[1].y());
  }
  return s;
}

TrackerRun run_tracker(TrackerKind kind, const ScenarioDefinition& sc,
                       const std::vector<Scan>& scans, const RunConfig& cfg,
                       std::uint64_t run_index) {
  const MotionModel mm = cfg.motion_model();
  const SensorModel sm = cfg.sensor_model(sc.roi);
  TrackerRun out;
  out.per_k.reserve(scans.size());
  try {
    switch (kind) {
      case TrackerKind::kJpda: {
        JpdaState state;
        const JpdaConfig jc = cfg.jpda_config();
        for (const Scan& scan : scans) {
          jpda_step(state, scan, mm, sm, jc);
          out.per_k.push_back(
              score_scan(sc, scan.k, jpda_estimates(state), cfg));
        }
        break;
      }
      case TrackerKind::kMht: {
        HypothesisForest forest;
        const MhtConfig mc = cfg.mht_config();
        for (const Scan& scan : scans) {
          const MhtStepResult r = mht_step(forest, scan, mm, sm, mc);
          out.per_k.push_back(score_scan(sc, scan.k, r.estimates, cfg));
        }
        break;
      }
      case TrackerKind::kBp: {
        BpState state;
        state.seed = derive_seed(cfg.seed, kRunBpStream, run_index);
        const BpConfig bc = cfg.bp_config();
        for (const Scan& scan : scans) {
          const BpStepResult r = bp_step(state, scan, mm, sm, bc);
          out.per_k.push_back(score_scan(sc, scan.k, r.estimates, cfg));
        }
        break;
      }
    }
  } catch (const std::exception&) {
    out.failed = true;
    out.per_k.clear();
  }
  return out;
}

void format_cell(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

}  // namespace

BenchmarkResult run_monte_carlo(const RunConfig& cfg) {
  validate(cfg);
  const std::vector<TrackerKind> trackers = cfg.tracker_list();
  const ScenarioDefinition sc = generate_scenario(cfg.scenario, cfg.geometry());
  const SensorModel sm = cfg.sensor_model(sc.roi);

  // results[run][tracker]; workers only race on the run counter, so the
  // aggregation below is independent of scheduling.
  std::vector<std::vector<TrackerRun>> results(cfg.runs);
  std::atomic<int> next_run{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next_run.fetch_add(1);
      if (r >= cfg.runs) return;
      const std::vector<Scan> scans = simulate_measurements(
          sc, sm, derive_seed(cfg.seed, kRunScanStream, std::uint64_t(r)));
      std::vector<TrackerRun>& slot = results[r];
      slot.reserve(trackers.size());
      for (const TrackerKind kind : trackers)
        slot.push_back(run_tracker(kind, sc, scans, cfg, std::uint64_t(r)));
    }
  };
  const int n_workers = std::max(
      1, cfg.workers > 0 ? cfg.workers
                         : static_cast<int>(std::thread::hardware_concurrency()));
  if (n_workers == 1 || cfg.runs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  BenchmarkResult result;
  result.cfg = cfg;
  for (std::size_t t = 0; t < trackers.size(); ++t) {
    MetricSeries series;
    series.tracker = trackers[t];
    series.scenario = cfg.scenario;
    series.runs = cfg.runs;
    series.per_k.resize(sc.steps);
    for (int r = 0; r < cfg.runs; ++r) {
      const TrackerRun& run = results[r][t];
      if (run.failed) {
        ++series.failed_runs;
        continue;
      }
      for (int i = 0; i < sc.steps; ++i) {
        PerKStats& agg = series.per_k[i];
        const KSample& s = run.per_k[i];
        agg.gospa_total += s.gospa.total;
        agg.gospa_loc += s.gospa.localization;
        agg.gospa_missed += s.gospa.missed;
        agg.gospa_false += s.gospa.false_;
        agg.n_est_sum += s.n_est;
        agg.count += 1;
        if (s.d_center) {
          agg.d_center_sum += *s.d_center;
          agg.d_center_count += 1;
        }
        if (s.d_tracks) {
          agg.d_tracks_sum += *s.d_tracks;
          agg.d_tracks_count += 1;
        }
      }
    }
    result.series.push_back(std::move(series));
  }
  return result;
}

namespace {

double window_mean(const MetricSeries& s, int k_lo, int k_hi,
                   double PerKStats::*field) {
  double sum = 0;
  int n = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const PerKStats& agg = s.per_k[k - 1];
    if (agg.count == 0) continue;
    sum += (agg.*field) / agg.count;
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

}  // namespace

double MetricSeries::mean_gospa_total(int k_lo, int k_hi) const {
  return window_mean(*this, k_lo, k_hi, &PerKStats::gospa_total);
}
double MetricSeries::mean_gospa_loc(int k_lo, int k_hi) const {
  return window_mean(*this, k_lo, k_hi, &PerKStats::gospa_loc);
}
double MetricSeries::mean_gospa_missed(int k_lo, int k_hi) const {
  return window_mean(*this, k_lo, k_hi, &PerKStats::gospa_missed);
}
double MetricSeries::mean_gospa_false(int k_lo, int k_hi) const {
  return window_mean(*this, k_lo, k_hi, &PerKStats::gospa_false);
}

std::optional<double> MetricSeries::mean_d_center(int k_lo, int k_hi) const {
  double sum = 0;
  int n = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const PerKStats& agg = per_k[k - 1];
    if (agg.d_center_count == 0) continue;
    sum += agg.d_center_sum / agg.d_center_count;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::optional<double> MetricSeries::mean_d_tracks(int k_lo, int k_hi) const {
  double sum = 0;
  int n = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const PerKStats& agg = per_k[k - 1];
    if (agg.d_tracks_count == 0) continue;
    sum += agg.d_tracks_sum / agg.d_tracks_count;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

int BenchmarkResult::total_failures() const {
  int n = 0;
  for (const MetricSeries& s : series) n += s.failed_runs;
  return n;
}

const MetricSeries& BenchmarkResult::for_tracker(TrackerKind kind) const {
  for (const MetricSeries& s : series)
    if (s.tracker == kind) return s;
  throw std::runtime_error("tracker not present in result");
}

void write_series_csv(const MetricSeries& series, std::ostream& out) {
  out << "k,gospa_total,gospa_loc,gospa_missed,gospa_false,d_center,d_tracks,"
         "n_est_mean\n";
  for (std::size_t i = 0; i < series.per_k.size(); ++i) {
    const PerKStats& agg = series.per_k[i];
    out << (i + 1) << ',';
    if (agg.count > 0) {
      format_cell(out, agg.gospa_total / agg.count);
      out << ',';
      format_cell(out, agg.gospa_loc / agg.count);
      out << ',';
      format_cell(out, agg.gospa_missed / agg.count);
      out << ',';
      format_cell(out, agg.gospa_false / agg.count);
    } else {
      out << ",,,";
    }
    out << ',';
    if (agg.d_center_count > 0)
      format_cell(out, agg.d_center_sum / agg.d_center_count);
    out << ',';
    if (agg.d_tracks_count > 0)
      format_cell(out, agg.d_tracks_sum / agg.d_tracks_count);
    out << ',';
    if (agg.count > 0) format_cell(out, agg.n_est_sum / agg.count);
    out << '\n';
  }
}

void write_summary_csv(const BenchmarkResult& result, std::ostream& out) {
  out << "tracker,scenario,runs,failed_runs,seed,git,gospa_total,gospa_loc,"
         "gospa_missed,gospa_false,d_center,d_tracks\n";
  for (const MetricSeries& s : result.series) {
    const int n = static_cast<int>(s.per_k.size());
    out << tracker_name(s.tracker) << ',' << s.scenario << ',' << s.runs << ','
        << s.failed_runs << ',' << result.cfg.seed << ',' << kGitDescribe
        << ',';
    format_cell(out, s.mean_gospa_total(1, n));
    out << ',';
    format_cell(out, s.mean_gospa_loc(1, n));
    out << ',';
    format_cell(out, s.mean_gospa_missed(1, n));
    out << ',';
    format_cell(out, s.mean_gospa_false(1, n));
    out << ',';
    if (const auto v = s.mean_d_center(1, n)) format_cell(out, *v);
    out << ',';
    if (const auto v = s.mean_d_tracks(1, n)) format_cell(out, *v);
    out << '\n';
  }
}

}  // namespace mtt
