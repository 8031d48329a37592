#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mtt/config.hpp"
#include "mtt/metrics.hpp"
#include "mtt/scenario.hpp"

namespace mtt {

/// Across-run accumulators for one time step.
struct PerKStats {
  double gospa_total = 0, gospa_loc = 0, gospa_missed = 0, gospa_false = 0;
  double n_est_sum = 0;
  int count = 0;  // runs contributing (excludes failed runs)
  double d_center_sum = 0;
  int d_center_count = 0;
  double d_tracks_sum = 0;
  int d_tracks_count = 0;
};

/// Aggregated metric time series for one tracker on one scenario.
struct MetricSeries {
  TrackerKind tracker = TrackerKind::kJpda;
  int scenario = 0;
  int runs = 0;
  int failed_runs = 0;
  std::vector<PerKStats> per_k;  // index i holds k = i + 1

  /// Mean over k in [k_lo, k_hi] (1-based, inclusive) of the per-k means.
  double mean_gospa_total(int k_lo, int k_hi) const;
  double mean_gospa_loc(int k_lo, int k_hi) const;
  double mean_gospa_missed(int k_lo, int k_hi) const;
  double mean_gospa_false(int k_lo, int k_hi) const;
  std::optional<double> mean_d_center(int k_lo, int k_hi) const;
  std::optional<double> mean_d_tracks(int k_lo, int k_hi) const;
};

struct BenchmarkResult {
  RunConfig cfg;
  std::vector<MetricSeries> series;  // one per tracker, cfg order

  int total_failures() const;
  const MetricSeries& for_tracker(TrackerKind kind) const;
};

/// Runs every enabled tracker over `runs` shared measurement realizations
/// and aggregates per-k means. Bitwise deterministic for a fixed seed
/// regardless of worker count. Individual run failures are recorded and
/// excluded from the means.
BenchmarkResult run_monte_carlo(const RunConfig& cfg);

/// One CSV row per k:
/// k,gospa_total,gospa_loc,gospa_missed,gospa_false,d_center,d_tracks,n_est_mean
/// with across-run means and empty fields where no sample is defined.
void write_series_csv(const MetricSeries& series, std::ostream& out);

/// Grand means per tracker plus run metadata (seed, runs, git revision).
void write_summary_csv(const BenchmarkResult& result, std::ostream& out);

}  // namespace mtt
