#include "hdtest/sparse_cov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hdtest {

namespace {
constexpr double kScadA = 3.7;

// Largest eigenvalue of sigma^{-1} by power iteration on the factor solve;
// the matrix is already certified positive definite at this point.
double min_eigenvalue(const Eigen::LLT<Eigen::MatrixXd>& llt, Eigen::Index n) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd y = llt.solve(x);
        const double norm = y.norm();
        if (!(norm > 0)) break;
        y /= norm;
        const double next = y.dot(llt.solve(y));
        if (it > 0 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
        x = std::move(y);
    }
    return lambda > 0 ? 1.0 / lambda : 0.0;
}
}  // namespace

ThresholdRule threshold_rule_from_string(const std::string& s) {
    if (s == "hard") return ThresholdRule::Hard;
    if (s == "soft") return ThresholdRule::Soft;
    if (s == "scad") return ThresholdRule::Scad;
    throw Error("unknown threshold rule '" + s + "' (expected hard, soft or scad)");
}

const char* to_string(ThresholdRule rule) {
    switch (rule) {
        case ThresholdRule::Hard: return "hard";
        case ThresholdRule::Soft: return "soft";
        case ThresholdRule::Scad: return "scad";
    }
    return "?";
}

Eigen::MatrixXd sample_residual_cov(const Eigen::MatrixXd& residuals) {
    const Eigen::Index N = residuals.rows();
    const Eigen::Index T = residuals.cols();
    if (T < 2) throw Error("sample_residual_cov: need at least 2 time points");

    // Column-contiguous copy so each unit's series is a contiguous slice.
    const Eigen::MatrixXd ut = residuals.transpose();
    Eigen::MatrixXd s(N, N);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = i; j < N; ++j) {
            const double v = ut.col(i).dot(ut.col(j)) / static_cast<double>(T);
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

double apply_threshold_rule(ThresholdRule rule, double x, double tau) {
    const double ax = std::abs(x);
    switch (rule) {
        case ThresholdRule::Hard:
            return ax > tau ? x : 0.0;
        case ThresholdRule::Soft:
            return ax > tau ? std::copysign(ax - tau, x) : 0.0;
        case ThresholdRule::Scad: {
            if (ax <= 2.0 * tau) return ax > tau ? std::copysign(ax - tau, x) : 0.0;
            if (ax <= kScadA * tau) return ((kScadA - 1.0) * x - std::copysign(kScadA * tau, x)) / (kScadA - 2.0);
            return x;
        }
    }
    return 0.0;
}

Eigen::MatrixXd threshold_cov(const Eigen::MatrixXd& s, int n_time, ThresholdRule rule, double c) {
    const Eigen::Index N = s.rows();
    if (s.cols() != N) throw Error("threshold_cov: matrix must be square");
    if (c < 0) throw Error("threshold_cov: C must be nonnegative");
    for (Eigen::Index i = 0; i < N; ++i)
        if (!(s(i, i) > 0))
            throw Error("threshold_cov: nonpositive diagonal at index " + std::to_string(i));

    const double log_n_over_t = std::log(static_cast<double>(N)) / static_cast<double>(n_time);
    Eigen::MatrixXd out(N, N);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < N; ++i) {
        out(i, i) = s(i, i);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double tau = c * std::sqrt(s(i, i) * s(j, j) * log_n_over_t);
            const double h = apply_threshold_rule(rule, s(i, j), tau);
            out(i, j) = h;
            out(j, i) = h;
        }
    }
    return out;
}

SparseCovEstimate choose_c(const Eigen::MatrixXd& s, int n_time, ThresholdRule rule,
                           const CGrid& grid, double c_target, double eps_pd) {
    const Eigen::Index N = s.rows();
    if (!(grid.step > 0) || grid.c_max < grid.c_min || grid.c_min < 0)
        throw Error("choose_c: invalid C grid");
    if (eps_pd < 0) eps_pd = 1e-6 * s.diagonal().mean();

    const double start = std::clamp(c_target, grid.c_min, grid.c_max);
    const Eigen::MatrixXd eps_shift = eps_pd * Eigen::MatrixXd::Identity(N, N);

    auto is_pd = [&](double c, Eigen::MatrixXd* keep = nullptr) {
        Eigen::MatrixXd m = threshold_cov(s, n_time, rule, c);
        Eigen::LLT<Eigen::MatrixXd> llt(m - eps_shift);
        const bool ok = llt.info() == Eigen::Success;
        if (ok && keep) *keep = std::move(m);
        return ok;
    };

    // Scan lattice points c_min + k*step to avoid accumulating rounding drift.
    const long k0 = static_cast<long>(std::ceil((start - grid.c_min) / grid.step - 1e-9));
    const long k_max = static_cast<long>(std::floor((grid.c_max - grid.c_min) / grid.step + 1e-9));
    double first_ok = -1.0;
    for (long k = std::max(0L, k0); k <= k_max; ++k) {
        const double c = grid.c_min + static_cast<double>(k) * grid.step;
        if (is_pd(c)) {
            first_ok = c;
            break;
        }
    }
    if (first_ok < 0) {
        Eigen::MatrixXd at_max = threshold_cov(s, n_time, rule, grid.c_max);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at_max, Eigen::EigenvaluesOnly);
        throw Error("choose_c: no C on the grid gives a positive definite estimate; "
                    "min eigenvalue at c_max=" + std::to_string(grid.c_max) + " is " +
                    std::to_string(es.eigenvalues().minCoeff()));
    }

    // One extra step of margin past the first admissible point.
    double c_used = first_ok + grid.step;
    Eigen::MatrixXd sigma;
    if (!is_pd(c_used, &sigma)) {
        c_used = first_ok;
        sigma = threshold_cov(s, n_time, rule, c_used);
    }

    SparseCovEstimate est;
    est.rule = rule;
    est.c_used = c_used;
    est.sigma_hat = std::move(sigma);

    Eigen::LLT<Eigen::MatrixXd> llt(est.sigma_hat);
    if (llt.info() != Eigen::Success)
        throw Error("choose_c: factorization failed at selected C");  // not reachable after the PD scan
    est.inverse = llt.solve(Eigen::MatrixXd::Identity(N, N));
    est.min_eigen = min_eigenvalue(llt, N);

    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            if (i != j && est.sigma_hat(i, j) != 0.0) ++est.kept_offdiag;
    return est;
}

SparsityDiag sparsity_diag(const Eigen::MatrixXd& m) {
    const Eigen::Index N = m.rows();
    if (m.cols() != N) throw Error("sparsity_diag: matrix must be square");
    SparsityDiag d;
    for (Eigen::Index i = 0; i < N; ++i) {
        int row_nz = 0;
        for (Eigen::Index j = 0; j < N; ++j) {
            if (m(i, j) != 0.0) {
                ++row_nz;
                if (i != j) ++d.d_n;
            }
        }
        d.m_n = std::max(d.m_n, row_nz);
    }
    return d;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write matrix CSV: " + path);
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace hdtest
