#include "hdtest/factor_model.hpp"

#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hdtest {

ClosedFormAlphas closed_form_alphas(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& factors,
                                    double condition_cap) {
    const Eigen::Index T = factors.cols();
    if (returns.cols() != T) throw Error("closed_form_alphas: time dimensions differ");

    const Eigen::MatrixXd second_moment = factors * factors.transpose() / static_cast<double>(T);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(second_moment, Eigen::EigenvaluesOnly);
    const double ev_min = es.eigenvalues().minCoeff();
    const double ev_max = es.eigenvalues().maxCoeff();
    if (!(ev_min > 0) || ev_max / ev_min > condition_cap)
        throw Error("singular or ill-conditioned factor second-moment matrix (condition "
                    "number above cap); check for constant or collinear factors");

    ClosedFormAlphas out;
    out.f_bar = factors.rowwise().mean();
    out.w = second_moment.ldlt().solve(out.f_bar);
    out.a_f_t = 1.0 - out.f_bar.dot(out.w);
    if (!(out.a_f_t > 0))
        throw Error("degenerate factors: a_f_t = " + std::to_string(out.a_f_t) + " is not positive");

    // theta_j = (1/(T a)) sum_t y_jt (1 - f_t' w)
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(T) - factors.transpose() * out.w;
    out.theta_hat = returns * weights / (static_cast<double>(T) * out.a_f_t);
    return out;
}

FactorFit fit_factor_model(const Panel& returns, const FactorPanel& factors, double condition_cap) {
    if (returns.n_time() != factors.n_time())
        throw Error("fit_factor_model: returns and factors have different time dimensions");
    const Eigen::Index N = returns.n_units();
    const Eigen::Index T = returns.n_time();
    const Eigen::Index K = factors.n_factors();
    if (T <= K + 1)
        throw Error("fit_factor_model: need T > K+1 (T=" + std::to_string(T) +
                    ", K=" + std::to_string(K) + ")");

    ClosedFormAlphas cf = closed_form_alphas(returns.values, factors.values, condition_cap);

    FactorFit fit;
    fit.theta_hat = std::move(cf.theta_hat);
    fit.w = std::move(cf.w);
    fit.f_bar = std::move(cf.f_bar);
    fit.a_f_t = cf.a_f_t;

    // One QR of the shared T x (K+1) design serves all N units.
    Eigen::MatrixXd design(T, K + 1);
    design.col(0).setOnes();
    design.rightCols(K) = factors.values.transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::MatrixXd coef = qr.solve(returns.values.transpose());  // (K+1) x N

    fit.b_hat = coef.bottomRows(K).transpose();  // N x K

    // Residuals from (closed-form theta, regression slopes); the two intercept
    // routes agree to machine precision, which fit tests assert.
    fit.residuals.resize(N, T);
    fit.v_hat.resize(N);
    const Eigen::MatrixXd& f = factors.values;
    const double ta = static_cast<double>(T) * fit.a_f_t;
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < N; ++j) {
        Eigen::RowVectorXd fitted = fit.b_hat.row(j) * f;
        fit.residuals.row(j) = returns.values.row(j) - fitted;
        fit.residuals.row(j).array() -= fit.theta_hat[j];
        fit.v_hat[j] = fit.residuals.row(j).squaredNorm() / static_cast<double>(T) / ta;
    }
    return fit;
}

Eigen::VectorXd alpha_tstats(const FactorFit& fit, const std::vector<std::string>& unit_labels) {
    const Eigen::Index N = fit.theta_hat.size();
    Eigen::VectorXd t(N);
    for (Eigen::Index j = 0; j < N; ++j) {
        if (!(fit.v_hat[j] > 0)) {
            std::string who = j < static_cast<Eigen::Index>(unit_labels.size())
                                  ? unit_labels[j]
                                  : ("#" + std::to_string(j + 1));
            throw Error("alpha_tstats: zero residual variance for unit " + who);
        }
        t[j] = fit.theta_hat[j] / std::sqrt(fit.v_hat[j]);
    }
    return t;
}

}  // namespace hdtest
