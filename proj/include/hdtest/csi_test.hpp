#ifndef HDTEST_CSI_TEST_HPP
#define HDTEST_CSI_TEST_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdtest/panel.hpp"
#include "hdtest/test_report.hpp"

namespace hdtest {

/// Pooled OLS on time-demeaned data; individual effects are absorbed by the
/// demeaning and never estimated.
struct WithinFit {
    Eigen::VectorXd beta_hat;   // p coefficients
    Eigen::MatrixXd residuals;  // n x T
};

/// All n(n-1)/2 residual correlations in pair order (1,2),(1,3),...,(n-1,n),
/// with v_ij = (1 - rho_ij^2)^2 / T.
struct PairCorrelations {
    Eigen::VectorXd rho_hat;
    Eigen::VectorXd v_hat;
    Eigen::VectorXd sigma_hat_diag;  // n residual second moments
};

/// Pair index <-> (i,j) with i < j, 0-based, in the stacking order above.
long pair_count(int n_units);
long pair_index(int i, int j, int n_units);
std::pair<int, int> pair_units(long index, int n_units);

struct CsiTestConfig {
    std::optional<double> delta_override;
    double condition_cap = 1e12;
};

WithinFit within_ols(const Panel& y, const std::vector<Panel>& x, double condition_cap = 1e12);

PairCorrelations pair_correlations(const Eigen::MatrixXd& residuals);

/// Bias-corrected quadratic statistic over all pairs.
double bfk_j1(const Eigen::VectorXd& rho_hat, int n_units, int n_time);

struct SelectedPair {
    std::string unit_i, unit_j;
    double rho_hat = 0.0;
    double tstat = 0.0;
};

TestReport power_enhanced_csi(const Panel& y, const std::vector<Panel>& x,
                              const CsiTestConfig& config = {},
                              std::vector<SelectedPair>* pairs_out = nullptr);

void write_selected_pairs_csv(const std::vector<SelectedPair>& pairs, const std::string& path);

}  // namespace hdtest

#endif
