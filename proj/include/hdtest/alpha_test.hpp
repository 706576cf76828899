#ifndef HDTEST_ALPHA_TEST_HPP
#define HDTEST_ALPHA_TEST_HPP

#include <optional>

#include <Eigen/Dense>

#include "hdtest/factor_model.hpp"
#include "hdtest/panel.hpp"
#include "hdtest/sparse_cov.hpp"
#include "hdtest/test_report.hpp"

namespace hdtest {

/// Knobs for the factor-pricing pipeline.
struct FpTestConfig {
    ThresholdRule rule = ThresholdRule::Soft;
    CGrid grid{};
    double c_target = 2.0;
    std::optional<double> delta_override;  // expert use; replaces the high-criticism threshold
    double condition_cap = 1e12;
};

/// Standardized quadratic form (T theta' V theta - N(1+mu)) / (xi sqrt(N)).
double generic_jq(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& v_weight,
                  int n_time, double mu, double xi);

/// (T a_f_t theta' Sigma^{-1} theta - N) / sqrt(2N) with the thresholded inverse.
double feasible_wald(const FactorFit& fit, const SparseCovEstimate& cov);

/// Full pipeline: per-unit OLS, alpha screening, covariance thresholding,
/// feasible Wald and the combined statistic. Deterministic given inputs.
TestReport power_enhanced_fp(const Panel& returns, const FactorPanel& factors,
                             const FpTestConfig& config = {});

}  // namespace hdtest

#endif
