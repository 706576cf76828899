#ifndef HDTEST_REFERENCE_HPP
#define HDTEST_REFERENCE_HPP

#include <Eigen/Dense>

#include "hdtest/csi_test.hpp"
#include "hdtest/sparse_cov.hpp"

namespace hdtest::reference {

/// Plain serial double-loop twins of the OpenMP kernels. They are kept as the
/// comparison baseline for the benchmark target and as independent oracles in
/// the test suite; nothing on the production path calls them.

Eigen::MatrixXd sample_residual_cov(const Eigen::MatrixXd& residuals);

Eigen::MatrixXd threshold_cov(const Eigen::MatrixXd& s, int n_time, ThresholdRule rule, double c);

PairCorrelations pair_correlations(const Eigen::MatrixXd& residuals);

}  // namespace hdtest::reference

#endif
