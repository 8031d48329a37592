#pragma once

#include <deque>
#include <vector>

#include "mtt/association.hpp"
#include "mtt/models.hpp"
#include "mtt/types.hpp"

namespace mtt {

enum class TrackStatus { kTentative, kConfirmed, kDead };

struct JpdaTrack {
  int id = 0;
  GaussianBelief belief;
  TrackStatus status = TrackStatus::kTentative;
  std::deque<bool> assoc_history;  // one flag per scan since birth, newest last
  int missed_streak = 0;
};

struct JpdaConfig {
  double gate_gamma = 13.82;
  int confirm_m = 10;
  int confirm_n = 16;
  int max_missed = 13;
  double v_max = 50.0;  // speed gate for two-point initiation, m/s
  std::size_t event_cap = kDefaultEventCap;
};

struct JpdaState {
  std::vector<JpdaTrack> tracks;
  std::vector<MeasVec> prev_unassociated;  // carried over for initiation
  int next_id = 1;
};

struct JpdaStepResult {
  std::vector<int> track_ids;  // rows of beta, pre-management order
  Eigen::MatrixXd beta;        // per-track association marginals (col 0 = miss)
};

/// Unnormalized joint-event weight prod_j psi(j, a_j).
double event_posterior(const DaVectorTarget& a, const AssociationWeights& w);

/// Moment-matched PDA update: mixture of the predicted belief (miss) and the
/// Kalman updates with each gated measurement, weighted by beta_row
/// (index 0 = miss). The covariance picks up the spread-of-means term.
GaussianBelief pda_update(const GaussianBelief& predicted,
                          const Eigen::VectorXd& beta_row,
                          const std::vector<MeasVec>& gated_meas,
                          const SensorModel& sm);

/// Confirmation (m-of-n), termination (missed streak) and two-point
/// initiation from measurements left unassociated in consecutive scans.
void manage_tracks(JpdaState& state, const std::vector<bool>& hit,
                   const std::vector<MeasVec>& unassociated,
                   const MotionModel& mm, const SensorModel& sm,
                   const JpdaConfig& cfg);

/// One JPDA recursion: predict, gate, enumerate joint events per cluster,
/// marginalize, PDA-update every track, then run track management.
JpdaStepResult jpda_step(JpdaState& state, const Scan& scan,
                         const MotionModel& mm, const SensorModel& sm,
                         const JpdaConfig& cfg);

/// State estimates of the confirmed tracks.
std::vector<Estimate> jpda_estimates(const JpdaState& state);

}  // namespace mtt
