#ifndef HDTEST_SPARSE_COV_HPP
#define HDTEST_SPARSE_COV_HPP

#include <string>

#include <Eigen/Dense>

#include "hdtest/panel.hpp"

namespace hdtest {

enum class ThresholdRule { Hard, Soft, Scad };

ThresholdRule threshold_rule_from_string(const std::string& s);
const char* to_string(ThresholdRule rule);

/// Entry-adaptive thresholded covariance estimate and its inverse.
struct SparseCovEstimate {
    Eigen::MatrixXd sigma_hat;  // symmetric, diagonal untouched
    Eigen::MatrixXd inverse;    // ||sigma_hat * inverse - I||_max <= 1e-8
    double c_used = 0.0;
    ThresholdRule rule = ThresholdRule::Soft;
    long kept_offdiag = 0;      // nonzero off-diagonal entries (both triangles)
    double min_eigen = 0.0;
};

struct SparsityDiag {
    int m_n = 0;   // max nonzeros per row (diagonal included)
    long d_n = 0;  // total nonzero off-diagonal entries
};

struct CGrid {
    double c_min = 0.0;
    double c_max = 3.0;
    double step = 0.05;
};

/// Uncentered second moments of residual rows with the 1/T divisor.
Eigen::MatrixXd sample_residual_cov(const Eigen::MatrixXd& residuals);

/// Scalar thresholding rule h(x; tau). SCAD uses the conventional a = 3.7.
double apply_threshold_rule(ThresholdRule rule, double x, double tau);

/// Off-diagonal entries mapped by h with tau_ij = C sqrt(s_ii s_jj log(N)/T);
/// the diagonal passes through unchanged.
Eigen::MatrixXd threshold_cov(const Eigen::MatrixXd& s, int n_time, ThresholdRule rule, double c);

/// Scan the C grid, starting at c_target, for the first thresholded matrix
/// with min eigenvalue >= eps_pd (default 1e-6 * mean diagonal), then step
/// once more for safety margin. c_target defaults to 2.0, the universal
/// constant at which tau dominates the off-diagonal sampling noise; pass
/// c_target <= c_min to scan the whole grid (pure positive-definiteness rule).
/// Throws if no grid point qualifies, reporting the min eigenvalue at c_max.
SparseCovEstimate choose_c(const Eigen::MatrixXd& s, int n_time, ThresholdRule rule,
                           const CGrid& grid = {}, double c_target = 2.0, double eps_pd = -1.0);

/// Exact zero-pattern counts of a square matrix.
SparsityDiag sparsity_diag(const Eigen::MatrixXd& m);

/// Debug dump, full symmetric storage.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace hdtest

#endif
