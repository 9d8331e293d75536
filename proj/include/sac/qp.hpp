#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sac {

/// Raised when the constraint system of a least-squares or QP problem cannot
/// be satisfied; `row` identifies the offending constraint row.
struct ConstraintError : std::runtime_error {
    int row;
    ConstraintError(const std::string& msg, int row_) : std::runtime_error(msg), row(row_) {}
};

/// Minimizer of ||P^{1/2}(a - center)||^2 subject to G a = c, with diagonal
/// positive P, via a = center + P^{-1} G^T (G P^{-1} G^T)^{-1} (c - G center).
/// Throws ConstraintError naming a redundant row when G is rank deficient.
Eigen::VectorXd solve_equality_min_norm(const Eigen::VectorXd& p_diag, const Eigen::MatrixXd& g,
                                        const Eigen::VectorXd& c, const Eigen::VectorXd& center);

struct QpResult {
    Eigen::VectorXd x;
    std::vector<int> active;  // indices of binding inequality rows
    int iterations = 0;
};

/// Dual active-set solver for the strictly convex QP
///   min  (x - center)^T P (x - center)
///   s.t. g_eq x = c_eq,   a_ineq x >= b_ineq,
/// with diagonal positive P. Starts from the equality-constrained optimum and
/// adds violated inequalities one at a time, keeping multipliers nonnegative.
/// Throws ConstraintError with the certificate row on infeasibility.
QpResult solve_qp_active_set(const Eigen::VectorXd& p_diag, const Eigen::MatrixXd& g_eq,
                             const Eigen::VectorXd& c_eq, const Eigen::MatrixXd& a_ineq,
                             const Eigen::VectorXd& b_ineq, const Eigen::VectorXd& center,
                             int max_iterations = 2000);

} // namespace sac
