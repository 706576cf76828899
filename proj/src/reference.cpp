#include "hdtest/reference.hpp"

#include <cmath>

namespace hdtest::reference {

Eigen::MatrixXd sample_residual_cov(const Eigen::MatrixXd& residuals) {
    const Eigen::Index n = residuals.rows();
    const Eigen::Index t_len = residuals.cols();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = 0.0;
            for (Eigen::Index t = 0; t < t_len; ++t) acc += residuals(i, t) * residuals(j, t);
            s(i, j) = acc / static_cast<double>(t_len);
        }
    }
    return s;
}

Eigen::MatrixXd threshold_cov(const Eigen::MatrixXd& s, int n_time, ThresholdRule rule, double c) {
    const Eigen::Index n = s.rows();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                out(i, j) = s(i, j);
                continue;
            }
            const double tau =
                c * std::sqrt(s(i, i) * s(j, j) * std::log(static_cast<double>(n)) /
                              static_cast<double>(n_time));
            out(i, j) = apply_threshold_rule(rule, s(i, j), tau);
        }
    }
    return out;
}

PairCorrelations pair_correlations(const Eigen::MatrixXd& residuals) {
    const Eigen::Index n = residuals.rows();
    const Eigen::Index t_len = residuals.cols();
    PairCorrelations pc;
    pc.sigma_hat_diag.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index t = 0; t < t_len; ++t) acc += residuals(i, t) * residuals(i, t);
        pc.sigma_hat_diag[i] = acc / static_cast<double>(t_len);
    }
    const long npairs = pair_count(static_cast<int>(n));
    pc.rho_hat.resize(npairs);
    pc.v_hat.resize(npairs);
    long idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j, ++idx) {
            double acc = 0.0;
            for (Eigen::Index t = 0; t < t_len; ++t) acc += residuals(i, t) * residuals(j, t);
            const double sij = acc / static_cast<double>(t_len);
            double rho = sij / std::sqrt(pc.sigma_hat_diag[i] * pc.sigma_hat_diag[j]);
            if (rho > 1.0) rho = 1.0;
            if (rho < -1.0) rho = -1.0;
            pc.rho_hat[idx] = rho;
            pc.v_hat[idx] = (1.0 - rho * rho) * (1.0 - rho * rho) / static_cast<double>(t_len);
        }
    }
    return pc;
}

}  // namespace hdtest::reference
