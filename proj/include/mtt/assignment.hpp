#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace mtt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Result of a 2-D assignment. row_to_col[i] is the column matched to row i
/// or -1 when the row is left unassigned. `cost` includes the per-row
/// unassignment costs of unmatched rows.
struct AssignmentResult {
  std::vector<int> row_to_col;
  double cost = kInf;
  bool feasible = false;
};

/// Minimum-cost one-to-one assignment of rows to columns-or-unassigned.
/// +inf entries are forbidden pairs; unassigned_cost[i] (also allowed +inf)
/// prices leaving row i out. Infeasible problems return an explicit
/// all-unassigned result with feasible = false.
AssignmentResult best_assignment(const Eigen::MatrixXd& cost,
                                 const Eigen::VectorXd& unassigned_cost);

/// Convenience overload: unassignment forbidden for every row.
AssignmentResult best_assignment(const Eigen::MatrixXd& cost);

/// The m lowest-cost distinct assignments in nondecreasing cost order
/// (Murty partitioning). Returns fewer than m when the feasible set is
/// smaller. Ties are broken deterministically.
std::vector<AssignmentResult> m_best_assignments(
    const Eigen::MatrixXd& cost, const Eigen::VectorXd& unassigned_cost,
    int m);

}  // namespace mtt
