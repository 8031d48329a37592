#pragma once

#include <deque>
#include <vector>

#include "mtt/models.hpp"
#include "mtt/types.hpp"

namespace mtt {

struct MhtConfig {
  double gate_gamma = 13.82;
  int window = 5;  // hypothesis depth N in scans
  int confirm_m = 12;
  int confirm_n = 24;
  int max_missed = 13;
  int leaf_cap = 300;                  // per tree
  std::size_t search_cap = 1'000'000;  // branch-and-bound node budget
  double birth_vel_std = 10.0;         // velocity std of birth hypotheses, m/s
};

/// One association-history hypothesis for a single track; a node of the
/// track's hypothesis tree. Scores are accumulated log-likelihood ratios
/// against the all-clutter hypothesis.
struct TrackHypothesis {
  int parent = -1;
  int scan_k = 0;
  int meas = 0;  // 1-based measurement claimed at scan_k, 0 = missed
  double score = 0.0;
  GaussianBelief belief;  // filtered at scan_k
};

struct HypothesisTree {
  int track_id = 0;
  int birth_scan = 0;
  bool established = false;  // birth decision committed by N-scan pruning
  bool confirmed = false;
  std::vector<TrackHypothesis> nodes;  // nodes[0] is the current root
  std::vector<int> leaves;
  std::deque<bool> committed_hits;  // decisions at scans <= root, newest last
};

struct HypothesisForest {
  std::vector<HypothesisTree> trees;
  int next_track_id = 1;
  int last_scan = 0;
};

/// A compatible choice of one leaf per retained tree; -1 drops an
/// unestablished tree (its root measurement treated as clutter).
struct GlobalHypothesis {
  std::vector<int> leaf_of_tree;
  double score = 0.0;
  bool exact = true;  // false when the search fell back to greedy
};

struct MhtStepResult {
  std::vector<Estimate> estimates;  // newest-scan filtered, confirmed tracks
  std::vector<Estimate> finalized;  // smoothed estimates at the scan being
                                    // committed by the N-scan decision
  GlobalHypothesis selected;
};

/// Grows every leaf with one child per gated measurement plus a miss child,
/// and roots a new single-node tree on every measurement (birth hypothesis).
/// Trees exceeding the leaf cap drop their lowest-scoring leaves.
void extend_hypotheses(HypothesisForest& forest, const Scan& scan,
                       const MotionModel& mm, const SensorModel& sm,
                       const MhtConfig& cfg);

/// Exact max-score compatible leaf selection by branch and bound (greedy,
/// flagged, beyond cfg.search_cap). Established trees must contribute a
/// leaf; unestablished trees may be dropped at score 0. Ties resolve to the
/// lowest track id, then the lowest leaf index.
GlobalHypothesis select_global_hypothesis(const HypothesisForest& forest,
                                          const MhtConfig& cfg);

/// Commits association decisions older than the window: reroots each
/// selected tree at the selected leaf's ancestor at scan (current - N) and
/// discards unestablished trees that were not selected by then.
void n_scan_prune(HypothesisForest& forest, const GlobalHypothesis& gh,
                  int window);

/// Full MHT recursion: extend, select, confirm / terminate on the selected
/// branch history, emit estimates, then N-scan prune.
MhtStepResult mht_step(HypothesisForest& forest, const Scan& scan,
                       const MotionModel& mm, const SensorModel& sm,
                       const MhtConfig& cfg);

}  // namespace mtt
