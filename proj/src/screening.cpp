#include "hdtest/screening.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hdtest/panel.hpp"

namespace hdtest {

double high_criticism_delta_real(double n, double t) {
    return std::log(std::log(t)) * std::sqrt(std::log(n));
}

double high_criticism_delta(long n_dim, long n_time) {
    if (n_dim < 2) throw Error("high_criticism_delta: dimension must be >= 2, got " + std::to_string(n_dim));
    if (n_time < 3) throw Error("high_criticism_delta: sample size must be >= 3, got " + std::to_string(n_time));
    return high_criticism_delta_real(static_cast<double>(n_dim), static_cast<double>(n_time));
}

ScreeningResult screen(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& v_hat,
                       double delta, bool allow_zero_vhat) {
    const Eigen::Index n = theta_hat.size();
    if (v_hat.size() != n) throw Error("screen: theta_hat and v_hat lengths differ");
    if (n < 1) throw Error("screen: empty input");
    if (!(delta > 0)) throw Error("screen: delta must be positive");

    ScreeningResult r;
    r.delta = delta;
    r.standardized.resize(n);

    for (Eigen::Index j = 0; j < n; ++j) {
        const double v = v_hat[j];
        if (v < 0 || (!allow_zero_vhat && v == 0))
            throw Error("screen: nonpositive v_hat at index " + std::to_string(j));
        if (v == 0) {
            if (theta_hat[j] == 0) throw Error("screen: zero v_hat with zero theta_hat at index " + std::to_string(j));
            r.standardized[j] = std::numeric_limits<double>::infinity();
        } else {
            r.standardized[j] = std::abs(theta_hat[j]) / std::sqrt(v);
        }
    }

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r.standardized[j] > delta) {  // strict: the boundary is excluded
            r.selected.push_back(static_cast<int>(j));
            sum += v_hat[j] == 0 ? std::numeric_limits<double>::infinity()
                                 : theta_hat[j] * theta_hat[j] / v_hat[j];
        }
    }
    r.j0 = r.selected.empty() ? 0.0 : sqrt_n * sum;
    return r;
}

OracleSets oracle_sets(const Eigen::VectorXd& theta_true, const Eigen::VectorXd& v_true,
                       double delta, double grey_lo, double grey_hi) {
    const Eigen::Index n = theta_true.size();
    if (v_true.size() != n) throw Error("oracle_sets: length mismatch");
    if (!(grey_lo < grey_hi)) throw Error("oracle_sets: grey band lo must be < hi");

    OracleSets o;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(v_true[j] > 0)) throw Error("oracle_sets: nonpositive v_true at index " + std::to_string(j));
        const double mag = std::abs(theta_true[j]) / std::sqrt(v_true[j]);
        if (mag > 2.0 * delta) o.s_theta.push_back(static_cast<int>(j));
        if (mag > grey_lo * delta && mag <= grey_hi * delta) o.grey.push_back(static_cast<int>(j));
    }
    return o;
}

}  // namespace hdtest
