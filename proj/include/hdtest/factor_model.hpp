#ifndef HDTEST_FACTOR_MODEL_HPP
#define HDTEST_FACTOR_MODEL_HPP

#include <Eigen/Dense>

#include "hdtest/panel.hpp"

namespace hdtest {

/// Per-unit OLS of returns on (1, factors).
///
/// a_f_t = 1 - fbar' w with w = ((1/T) sum f f')^{-1} fbar; the intercepts
/// have the closed form theta_j = (1/(T a_f_t)) sum_t y_jt (1 - f_t' w),
/// which equals the regression intercept exactly. Residual variances use the
/// 1/T divisor.
struct FactorFit {
    Eigen::VectorXd theta_hat;   // N intercepts
    Eigen::MatrixXd b_hat;       // N x K loadings
    Eigen::MatrixXd residuals;   // N x T
    Eigen::VectorXd v_hat;       // N; (mean residual square)/(T a_f_t), all > 0
    double a_f_t = 0.0;          // in (0, 1]
    Eigen::VectorXd w;           // K
    Eigen::VectorXd f_bar;       // K
};

struct ClosedFormAlphas {
    Eigen::VectorXd theta_hat;
    Eigen::VectorXd w;
    Eigen::VectorXd f_bar;
    double a_f_t = 0.0;
};

/// Intercept stage alone; valid whenever the factor second-moment matrix is
/// invertible (does not require T > K+1, unlike the full fit).
ClosedFormAlphas closed_form_alphas(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& factors,
                                    double condition_cap = 1e12);

FactorFit fit_factor_model(const Panel& returns, const FactorPanel& factors,
                           double condition_cap = 1e12);

/// theta_hat_j / sqrt(v_hat_j); errors on any zero v_hat (with the unit label).
Eigen::VectorXd alpha_tstats(const FactorFit& fit, const std::vector<std::string>& unit_labels = {});

}  // namespace hdtest

#endif
