#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mtt/types.hpp"

namespace mtt {

inline constexpr std::size_t kDefaultEventCap = 1'000'000;

/// Thrown when joint-event enumeration would exceed its cap; usually a sign
/// that the gate is too loose for the scene density.
struct EventCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Boolean gating table: rows = legacy PTs, cols = measurements.
struct GateMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> inside;  // row-major rows x cols

  GateMatrix() = default;
  GateMatrix(int r, int c) : rows(r), cols(c), inside(std::size_t(r) * c, 0) {}
  std::uint8_t& at(int j, int m) { return inside[std::size_t(j) * cols + m]; }
  std::uint8_t at(int j, int m) const {
    return inside[std::size_t(j) * cols + m];
  }
};

/// Per-PT single-target likelihood weights. psi(j, m) for m in 1..m_k is the
/// marginalized detection factor for measurement m, psi(j, 0) the missed /
/// nonexistent mass. xi(m) is the new-target weight of measurement m; the
/// implicit clutter weight is 1.
struct AssociationWeights {
  Eigen::MatrixXd psi;  // rows = PTs, cols = m_k + 1 (col 0 = miss)
  Eigen::VectorXd xi;   // size m_k

  int num_targets() const { return static_cast<int>(psi.rows()); }
  int num_measurements() const { return static_cast<int>(xi.size()); }
};

/// Marginal association probabilities. Each beta row is a distribution over
/// {miss, measurements}; kappa(m) is the probability that measurement m was
/// not originated by any legacy PT.
struct AssociationMarginals {
  Eigen::MatrixXd beta;   // rows = PTs, cols = m_k + 1
  Eigen::VectorXd kappa;  // size m_k
  bool converged = true;
  int iterations = 0;
  std::vector<double> delta_history;  // L-inf message change per iteration
};

/// Chi-square gate: true iff (z - pred)^T S^-1 (z - pred) <= gamma.
/// Throws std::runtime_error for a singular innovation covariance.
bool gate(const MeasVec& pred_meas_mean, const Eigen::Matrix2d& innov_cov,
          const MeasVec& z, double gamma);

/// Inverse CDF of the chi-square distribution with 2 degrees of freedom:
/// -2 ln(1 - prob).
double chi2_gate_threshold(double prob);

/// All valid target-oriented DA vectors compatible with the gate, including
/// the all-miss vector. Throws EventCapExceeded beyond `cap` events.
std::vector<DaVectorTarget> enumerate_joint_events(
    const GateMatrix& gm, std::size_t cap = kDefaultEventCap);

/// Exact association marginals by joint-event enumeration. Event weight is
/// prod_j psi(j, a_j) * prod_{unclaimed m} (1 + xi(m)). Serves as the oracle
/// for the iterative BP marginals.
AssociationMarginals exact_association_marginals(
    const AssociationWeights& w, const GateMatrix& gm,
    std::size_t cap = kDefaultEventCap);

/// Iterative BP marginals on the bipartite association graph:
///   mu_{j->m} = psi(j,m) / (psi(j,0) + sum_{m'!=m} psi(j,m') nu_{m'->j})
///   nu_{m->j} = 1 / (1 + xi(m) + sum_{j'!=j} mu_{j'->m})
/// iterated until the L-inf message change drops below tol or max_iter is
/// reached (result flagged non-converged). `damping` in [0,1) blends each
/// new nu with the previous iterate.
AssociationMarginals bp_association_marginals(const AssociationWeights& w,
                                              const GateMatrix& gm,
                                              int max_iter = 100,
                                              double tol = 1e-6,
                                              double damping = 0.0);

}  // namespace mtt
