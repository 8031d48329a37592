#pragma once

#include <cstdint>
#include <vector>

#include "mtt/association.hpp"
#include "mtt/models.hpp"
#include "mtt/types.hpp"

namespace mtt {

struct BpConfig {
  int particle_count = 5000;
  double p_th = 0.5;    // existence threshold for declaring a target
  double p_pr = 1e-5;   // existence threshold below which PTs are pruned
  int bp_max_iter = 100;
  double bp_tol = 1e-6;
  double bp_damping = 0.0;
  double birth_vel_std = 10.0;  // velocity std of the new-PT proposal, m/s
  double gate_gamma = 13.82;
};

/// One potential target: particle belief plus existence probability.
struct PtBelief {
  int id = 0;
  ParticleBelief particles;
  double existence = 0.0;
};

struct BpState {
  std::vector<PtBelief> pts;
  int next_id = 1;
  std::uint64_t seed = 0;  // run-level seed; per-PT substreams derive from it
};

/// compute_weights output: association weights plus the per-particle
/// likelihood caches that bp_update reuses.
struct BpWeights {
  AssociationWeights w;
  GateMatrix gm;
  std::vector<std::vector<int>> gated;        // per PT, gated measurement idx
  std::vector<Eigen::MatrixXd> particle_lik;  // per PT, J x |gated|
  std::vector<Eigen::VectorXd> mixture_lik;   // per PT, weights-averaged lik
};

struct BpStepResult {
  std::vector<Estimate> estimates;
  bool bp_converged = true;
  int degenerate_updates = 0;  // PTs whose update weights summed to zero
};

/// Propagates every particle through the transition model and scales
/// existence by the survival probability.
void bp_predict(std::vector<PtBelief>& pts, const MotionModel& mm, int scan_k,
                std::uint64_t seed);

/// Builds psi / xi association weights from the predicted particle beliefs:
/// psi(j,0) = e(1-p_d) + (1-e), psi(j,m) = e p_d <f(z_m|x)> / (mu_c f_c),
/// xi_m = p_d mu_b / mu_c (uniform birth and clutter densities cancel).
BpWeights compute_weights(const std::vector<PtBelief>& pts, const Scan& scan,
                          const SensorModel& sm, const BpConfig& cfg);

/// Reweights each PT's particles with its association marginals, updates the
/// existence probability, and resamples systematically back to J particles.
/// Returns the number of degenerate (zero-weight) updates.
int bp_update(std::vector<PtBelief>& pts, const BpWeights& bw,
              const AssociationMarginals& marg, const Scan& scan,
              const SensorModel& sm, std::uint64_t seed);

/// One new PT per measurement, positions drawn around the measurement and
/// velocities from the birth prior; existence comes from the
/// measurement-side BP belief kappa and the new-target weight xi.
std::vector<PtBelief> init_new_pts(const Scan& scan,
                                   const AssociationMarginals& marg,
                                   const BpWeights& bw, const SensorModel& sm,
                                   const BpConfig& cfg, int& next_id,
                                   std::uint64_t seed);

/// Prunes PTs with existence below p_pr and emits the weighted particle mean
/// of every PT with existence above p_th.
std::vector<Estimate> extract_estimates(BpState& state, const BpConfig& cfg);

/// Full particle-BP recursion for one scan.
BpStepResult bp_step(BpState& state, const Scan& scan, const MotionModel& mm,
                     const SensorModel& sm, const BpConfig& cfg);

}  // namespace mtt
