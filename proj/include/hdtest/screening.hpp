#ifndef HDTEST_SCREENING_HPP
#define HDTEST_SCREENING_HPP

#include <vector>

#include <Eigen/Dense>

namespace hdtest {

/// Result of thresholding standardized estimates at delta.
///
/// Invariants: j0 = sqrt(N) * sum_{j in selected} theta[j]^2 / v[j];
/// j is selected iff standardized[j] > delta (strictly); selected empty <=> j0 == 0.
struct ScreeningResult {
    double delta = 0.0;
    std::vector<int> selected;    // sorted, 0-based
    double j0 = 0.0;
    Eigen::VectorXd standardized; // |theta_j| / sqrt(v_j)
};

/// Index sets computable only when the true parameters are known (simulation).
struct OracleSets {
    std::vector<int> s_theta;  // strong signals: |theta_j| > 2 sqrt(v_j) delta
    std::vector<int> grey;     // boundary band: lo*delta < |theta_j|/sqrt(v_j) <= hi*delta
};

/// log(log t) * sqrt(log n) on the real domain; no argument validation.
double high_criticism_delta_real(double n, double t);

/// Threshold sequence for screening: requires N >= 2 and T >= 3 so that both
/// factors are positive.
double high_criticism_delta(long n_dim, long n_time);

/// Select components with |theta_j| > sqrt(v_j)*delta (strict) and accumulate
/// the screening statistic. v_hat must be positive; with allow_zero_vhat a
/// zero v_hat[j] with nonzero theta_hat[j] is force-selected (standardized and
/// j0 become +inf) -- used by the pair-correlation test where |rho|=1 pairs
/// have zero estimated variance.
ScreeningResult screen(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& v_hat,
                       double delta, bool allow_zero_vhat = false);

/// Oracle strong-signal and grey-area sets for a known theta.
OracleSets oracle_sets(const Eigen::VectorXd& theta_true, const Eigen::VectorXd& v_true,
                       double delta, double grey_lo = 1.0 / 3.0, double grey_hi = 2.0);

}  // namespace hdtest

#endif
