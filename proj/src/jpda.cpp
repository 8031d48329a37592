#include "mtt/jpda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mtt {

double event_posterior(const DaVectorTarget& a, const AssociationWeights& w) {
  double weight = 1.0;
  for (int j = 0; j < static_cast<int>(a.a.size()); ++j)
    weight *= w.psi(j, a.a[j]);
  return weight;
}

GaussianBelief pda_update(const GaussianBelief& predicted,
                          const Eigen::VectorXd& beta_row,
                          const std::vector<MeasVec>& gated_meas,
                          const SensorModel& sm) {
  const int n = static_cast<int>(gated_meas.size());

  std::vector<GaussianBelief> components;
  components.reserve(n + 1);
  components.push_back(predicted);
  for (int m = 0; m < n; ++m)
    components.push_back(kalman_update(predicted, gated_meas[m], sm));

  GaussianBelief out;
  for (int c = 0; c <= n; ++c) out.mean += beta_row(c) * components[c].mean;
  for (int c = 0; c <= n; ++c) {
    const StateVec d = components[c].mean - out.mean;
    out.cov += beta_row(c) * (components[c].cov + d * d.transpose());
  }
  out.cov = symmetrized(out.cov);
  return out;
}

namespace {

// Connected components of the track/measurement gating graph.
struct Cluster {
  std::vector<int> tracks;
  std::vector<int> meas;
};

std::vector<Cluster> build_clusters(const GateMatrix& gm) {
  const int J = gm.rows;
  const int M = gm.cols;
  std::vector<int> track_comp(J, -1), meas_comp(M, -1);
  std::vector<Cluster> clusters;
  for (int seed = 0; seed < J; ++seed) {
    if (track_comp[seed] >= 0) continue;
    const int c = static_cast<int>(clusters.size());
    clusters.emplace_back();
    std::vector<int> stack{seed};
    track_comp[seed] = c;
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      clusters[c].tracks.push_back(j);
      for (int m = 0; m < M; ++m) {
        if (!gm.at(j, m) || meas_comp[m] >= 0) continue;
        meas_comp[m] = c;
        clusters[c].meas.push_back(m);
        for (int j2 = 0; j2 < J; ++j2) {
          if (track_comp[j2] < 0 && gm.at(j2, m)) {
            track_comp[j2] = c;
            stack.push_back(j2);
          }
        }
      }
    }
    std::sort(clusters[c].tracks.begin(), clusters[c].tracks.end());
    std::sort(clusters[c].meas.begin(), clusters[c].meas.end());
  }
  return clusters;
}

}  // namespace

JpdaStepResult jpda_step(JpdaState& state, const Scan& scan,
                         const MotionModel& mm, const SensorModel& sm,
                         const JpdaConfig& cfg) {
  const int J = static_cast<int>(state.tracks.size());
  const int M = scan.size();

  std::vector<GaussianBelief> predicted(J);
  std::vector<MeasPrediction> pred_meas(J);
  GateMatrix gm(J, M);
  for (int j = 0; j < J; ++j) {
    predicted[j] = predict_moments(state.tracks[j].belief, mm);
    pred_meas[j] = predict_measurement(predicted[j], sm);
    for (int m = 0; m < M; ++m)
      gm.at(j, m) = gate(pred_meas[j].mean, pred_meas[j].S,
                         scan.measurements[m], cfg.gate_gamma);
  }

  JpdaStepResult result;
  result.beta = Eigen::MatrixXd::Zero(J, M + 1);
  result.beta.col(0).setOnes();
  result.track_ids.resize(J);
  for (int j = 0; j < J; ++j) result.track_ids[j] = state.tracks[j].id;

  // Joint events factor over gating-connected clusters; the event sum of
  // Eq.-style JPDA has no new-target hypothesis, so xi = 0.
  for (const Cluster& cl : build_clusters(gm)) {
    const int nj = static_cast<int>(cl.tracks.size());
    const int nm = static_cast<int>(cl.meas.size());
    AssociationWeights w;
    w.psi = Eigen::MatrixXd::Zero(nj, nm + 1);
    w.xi = Eigen::VectorXd::Zero(nm);
    GateMatrix local(nj, nm);
    for (int tj = 0; tj < nj; ++tj) {
      const int j = cl.tracks[tj];
      w.psi(tj, 0) = 1.0 - sm.p_d;
      for (int tm = 0; tm < nm; ++tm) {
        const int m = cl.meas[tm];
        if (!gm.at(j, m)) continue;
        local.at(tj, tm) = 1;
        w.psi(tj, tm + 1) =
            sm.p_d *
            gaussian2_pdf(scan.measurements[m], pred_meas[j].mean,
                          pred_meas[j].S) /
            sm.clutter_intensity();
      }
    }
    const AssociationMarginals marg =
        exact_association_marginals(w, local, cfg.event_cap);
    for (int tj = 0; tj < nj; ++tj) {
      const int j = cl.tracks[tj];
      result.beta(j, 0) = marg.beta(tj, 0);
      for (int tm = 0; tm < nm; ++tm)
        result.beta(j, cl.meas[tm] + 1) = marg.beta(tj, tm + 1);
    }
  }

  std::vector<bool> hit(J, false);
  for (int j = 0; j < J; ++j) {
    std::vector<MeasVec> gated;
    std::vector<int> gated_idx;
    for (int m = 0; m < M; ++m) {
      if (gm.at(j, m)) {
        gated.push_back(scan.measurements[m]);
        gated_idx.push_back(m);
      }
    }
    Eigen::VectorXd beta_row(gated.size() + 1);
    beta_row(0) = result.beta(j, 0);
    for (std::size_t t = 0; t < gated_idx.size(); ++t)
      beta_row(t + 1) = result.beta(j, gated_idx[t] + 1);
    state.tracks[j].belief = pda_update(predicted[j], beta_row, gated, sm);
    hit[j] = 1.0 - result.beta(j, 0) >= 0.5;
  }

  // Measurements whose association mass is mostly clutter feed initiation.
  std::vector<MeasVec> unassociated;
  for (int m = 0; m < M; ++m) {
    double mass = 0.0;
    for (int j = 0; j < J; ++j) mass += result.beta(j, m + 1);
    if (mass < 0.5) unassociated.push_back(scan.measurements[m]);
  }

  manage_tracks(state, hit, unassociated, mm, sm, cfg);
  return result;
}

void manage_tracks(JpdaState& state, const std::vector<bool>& hit,
                   const std::vector<MeasVec>& unassociated,
                   const MotionModel& mm, const SensorModel& sm,
                   const JpdaConfig& cfg) {
  for (std::size_t j = 0; j < state.tracks.size(); ++j) {
    JpdaTrack& tr = state.tracks[j];
    tr.assoc_history.push_back(hit[j]);
    while (static_cast<int>(tr.assoc_history.size()) > cfg.confirm_n)
      tr.assoc_history.pop_front();
    tr.missed_streak = hit[j] ? 0 : tr.missed_streak + 1;

    if (tr.status == TrackStatus::kTentative) {
      const int hits = static_cast<int>(
          std::count(tr.assoc_history.begin(), tr.assoc_history.end(), true));
      if (hits >= cfg.confirm_m) tr.status = TrackStatus::kConfirmed;
    }
    if (tr.missed_streak > cfg.max_missed) tr.status = TrackStatus::kDead;
  }
  std::erase_if(state.tracks, [](const JpdaTrack& tr) {
    return tr.status == TrackStatus::kDead;
  });

  // Two-point initiation. A fresh track's own gate suppresses duplicate
  // births from the co-located measurement of a nearby target.
  const double suppress_r2 =
      cfg.gate_gamma * 2.0 * sm.sigma_v * sm.sigma_v;
  std::vector<MeasVec> born_at;
  std::vector<char> prev_used(state.prev_unassociated.size(), 0);
  for (const MeasVec& z : unassociated) {
    bool suppressed = false;
    for (const MeasVec& b : born_at)
      if ((z - b).squaredNorm() <= suppress_r2) {
        suppressed = true;
        break;
      }
    if (suppressed) continue;

    int best = -1;
    double best_d2 = cfg.v_max * mm.T * cfg.v_max * mm.T;
    for (std::size_t p = 0; p < state.prev_unassociated.size(); ++p) {
      if (prev_used[p]) continue;
      const double d2 = (z - state.prev_unassociated[p]).squaredNorm();
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = static_cast<int>(p);
      }
    }
    if (best < 0) continue;
    prev_used[best] = 1;
    born_at.push_back(z);

    const MeasVec vel = (z - state.prev_unassociated[best]) / mm.T;
    const double s2 = sm.sigma_v * sm.sigma_v;
    JpdaTrack tr;
    tr.id = state.next_id++;
    tr.belief.mean << z.x(), z.y(), vel.x(), vel.y();
    StateCov P = StateCov::Zero();
    P(0, 0) = P(1, 1) = s2;
    P(2, 2) = P(3, 3) = 2.0 * s2 / (mm.T * mm.T);
    P(0, 2) = P(2, 0) = s2 / mm.T;
    P(1, 3) = P(3, 1) = s2 / mm.T;
    tr.belief.cov = P;
    tr.status = TrackStatus::kTentative;
    tr.assoc_history.push_back(true);
    state.tracks.push_back(std::move(tr));
  }
  state.prev_unassociated = unassociated;
}

std::vector<Estimate> jpda_estimates(const JpdaState& state) {
  std::vector<Estimate> out;
  for (const JpdaTrack& tr : state.tracks)
    if (tr.status == TrackStatus::kConfirmed)
      out.push_back({tr.id, tr.belief.mean});
  return out;
}

}  // namespace mtt
