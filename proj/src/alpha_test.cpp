#include "hdtest/alpha_test.hpp"

#include <cmath>
#include <iostream>

#include "hdtest/screening.hpp"

namespace hdtest {

double generic_jq(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& v_weight,
                  int n_time, double mu, double xi) {
    const Eigen::Index N = theta_hat.size();
    if (v_weight.rows() != N || v_weight.cols() != N)
        throw Error("generic_jq: weight matrix does not match theta dimension");
    if (!(xi > 0)) throw Error("generic_jq: xi must be positive");
    const double scale = v_weight.cwiseAbs().maxCoeff();
    if ((v_weight - v_weight.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
        throw Error("generic_jq: weight matrix is not symmetric");

    const double quad = theta_hat.dot(v_weight * theta_hat);
    const double n = static_cast<double>(N);
    return (static_cast<double>(n_time) * quad - n * (1.0 + mu)) / (xi * std::sqrt(n));
}

double feasible_wald(const FactorFit& fit, const SparseCovEstimate& cov) {
    const Eigen::Index N = fit.theta_hat.size();
    if (cov.inverse.rows() != N || cov.inverse.cols() != N)
        throw Error("feasible_wald: covariance dimension does not match the fit");
    const double T = static_cast<double>(fit.residuals.cols());
    const double quad = fit.theta_hat.dot(cov.inverse * fit.theta_hat);
    const double n = static_cast<double>(N);
    return (T * fit.a_f_t * quad - n) / std::sqrt(2.0 * n);
}

TestReport power_enhanced_fp(const Panel& returns, const FactorPanel& factors,
                             const FpTestConfig& config) {
    const auto [rp, fp] = align(returns, factors);
    const FactorFit fit = fit_factor_model(rp, fp, config.condition_cap);

    const int N = static_cast<int>(rp.n_units());
    const int T = static_cast<int>(rp.n_time());
    const double delta = config.delta_override ? *config.delta_override
                                               : high_criticism_delta(N, T);
    const ScreeningResult scr = screen(fit.theta_hat, fit.v_hat, delta);

    const Eigen::MatrixXd s = sample_residual_cov(fit.residuals);

    TestReport report;
    report.method = "fp-wald-pe";
    report.rule = to_string(config.rule);
    report.n_units = N;
    report.n_time = T;
    report.delta = delta;
    report.j0 = scr.j0;

    SparseCovEstimate cov;
    try {
        cov = choose_c(s, T, config.rule, config.grid, config.c_target);
    } catch (const Error& e) {
        // Working-independence fallback: diagonal weights, flagged so that
        // downstream consumers can exclude the run.
        std::cerr << "power_enhanced_fp: " << e.what() << "; falling back to diagonal weights\n";
        cov.rule = config.rule;
        cov.c_used = config.grid.c_max;
        cov.sigma_hat = Eigen::MatrixXd(s.diagonal().asDiagonal());
        cov.inverse = Eigen::MatrixXd(s.diagonal().cwiseInverse().asDiagonal());
        cov.min_eigen = s.diagonal().minCoeff();
        cov.kept_offdiag = 0;
        report.diagonal_fallback = true;
    }
    report.c_used = cov.c_used;

    report.pivotal = feasible_wald(fit, cov);
    report.combined = report.j0 + report.pivotal;
    report.p_value = normal_p(report.combined);
    report.p_pivotal = normal_p(report.pivotal);
    report.selected_indices = scr.selected;
    for (int idx : scr.selected) report.selected.push_back(rp.unit_labels[static_cast<size_t>(idx)]);
    return report;
}

}  // namespace hdtest
