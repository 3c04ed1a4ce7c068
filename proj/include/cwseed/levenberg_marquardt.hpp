#pragma once

// Damped least squares with central finite-difference Jacobians.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace cwseed {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
/// Optional Jacobian provider; receives the point and its residual.
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

struct LmSettings {
    double tol = 1e-6;             // stop when |r| <= tol
    int max_iterations = 200;      // Jacobian evaluations
    double fd_relative_step = 1e-7;
    double fd_min_step = 1e-7;     // absolute floor on the difference step
    double initial_damping = 1e-3; // relative to the largest diagonal of J^T J
    int threads = 0;               // 0: hardware concurrency capped by CW_SEED_THREADS
};

struct LmResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residual;
    double residual_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Residual norm at the start and after every accepted step.
    std::vector<double> trace;
};

/// Residual functions may throw cwseed::Error for infeasible points; such
/// trial steps are rejected. Columns of the Jacobian are evaluated on
/// independent threads, so `fn` must be safe to call concurrently. Results
/// do not depend on the thread count.
LmResult levenberg_marquardt(const ResidualFn& fn, const Eigen::VectorXd& x0,
                             const LmSettings& settings, const JacobianFn& jacobian = {});

/// Difference step used for variable value `x`.
double finite_difference_step(double x, const LmSettings& settings);

/// Central-difference Jacobian of fn at x.
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                           const LmSettings& settings);

/// Assembles a matrix column by column, spreading columns over worker
/// threads. A column function returning nullopt leaves a zero column.
Eigen::MatrixXd assemble_columns(
    Eigen::Index cols, const std::function<std::optional<Eigen::VectorXd>(Eigen::Index)>& column,
    int threads);

/// Worker count after applying the CW_SEED_THREADS cap.
int resolve_thread_count(int requested);

}  // namespace cwseed
