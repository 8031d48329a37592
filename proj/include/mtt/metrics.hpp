#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mtt/types.hpp"

namespace mtt {

/// GOSPA value with its alpha = 2 decomposition. For p = 1 the fields are in
/// meters and total = localization + missed + false_ exactly; for general p
/// the three components hold p-th power contributions and
/// total = (localization + missed + false_)^(1/p).
struct GospaResult {
  double total = 0;
  double localization = 0;
  double missed = 0;
  double false_ = 0;
};

/// GOSPA between two point sets with 2-norm base distance. Pairs at distance
/// >= c are left unassigned (each then costs c^p / alpha on its side). The
/// optimal partial assignment is found with best_assignment on the truncated
/// cost matrix. Requires alpha = 2, p >= 1, c > 0.
GospaResult gospa(const std::vector<MeasVec>& truth,
                  const std::vector<MeasVec>& est, double p = 1.0,
                  double c = 50.0, double alpha = 2.0);

/// Picks the two distinct estimates closest (summed distance, global nearest
/// neighbor) to the two truths; with fewer than two estimates, returns what
/// exists. Output order follows the truth order; ties break to the lowest
/// estimate index.
std::vector<MeasVec> gnn_select_two(const std::vector<MeasVec>& est,
                                    const std::array<MeasVec, 2>& truth);

/// Mean absolute y-coordinate of the two selected estimates: (|y1| + |y2|)/2.
double d_center(double y1, double y2);

/// Absolute y-separation of the two selected estimates: |y1 - y2|.
double d_tracks(double y1, double y2);

/// Per-scan diagnostic sample; fields are absent when fewer than two
/// estimates exist at that scan.
struct TrackDistanceSample {
  int k = 0;
  std::optional<double> d_center;
  std::optional<double> d_tracks;
};

}  // namespace mtt
