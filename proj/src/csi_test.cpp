#include "hdtest/csi_test.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hdtest/screening.hpp"

namespace hdtest {

long pair_count(int n_units) {
    return static_cast<long>(n_units) * (n_units - 1) / 2;
}

long pair_index(int i, int j, int n_units) {
    // Row i starts after the pairs of all rows before it.
    const long n = n_units;
    return static_cast<long>(i) * n - static_cast<long>(i) * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_units(long index, int n_units) {
    long remaining = index;
    for (int i = 0; i < n_units - 1; ++i) {
        const long row = n_units - 1 - i;
        if (remaining < row) return {i, static_cast<int>(i + 1 + remaining)};
        remaining -= row;
    }
    throw Error("pair_units: index out of range");
}

WithinFit within_ols(const Panel& y, const std::vector<Panel>& x, double condition_cap) {
    const Eigen::Index n = y.n_units();
    const Eigen::Index T = y.n_time();
    const Eigen::Index p = static_cast<Eigen::Index>(x.size());
    if (p < 1) throw Error("within_ols: need at least one regressor panel");
    for (const auto& xp : x)
        if (xp.n_units() != n || xp.n_time() != T)
            throw Error("within_ols: regressor panel shape does not match y");
    if (T < p + 2) throw Error("within_ols: need T >= p+2");

    // Demean each series over time, then pool all (i,t) cells.
    Eigen::MatrixXd yd = y.values;
    yd.colwise() -= yd.rowwise().mean();

    std::vector<Eigen::MatrixXd> xd(static_cast<size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) {
        xd[static_cast<size_t>(k)] = x[static_cast<size_t>(k)].values;
        xd[static_cast<size_t>(k)].colwise() -= xd[static_cast<size_t>(k)].rowwise().mean();
    }

    Eigen::MatrixXd gram(p, p);
    Eigen::VectorXd moment(p);
    for (Eigen::Index a = 0; a < p; ++a) {
        moment[a] = xd[static_cast<size_t>(a)].cwiseProduct(yd).sum();
        for (Eigen::Index b = a; b < p; ++b) {
            gram(a, b) = xd[static_cast<size_t>(a)].cwiseProduct(xd[static_cast<size_t>(b)]).sum();
            gram(b, a) = gram(a, b);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double ev_min = es.eigenvalues().minCoeff();
    const double ev_max = es.eigenvalues().maxCoeff();
    if (!(ev_min > 0) || ev_max / ev_min > condition_cap)
        throw Error("within_ols: singular pooled design after demeaning (a regressor may be "
                    "constant within every unit)");

    WithinFit fit;
    fit.beta_hat = gram.ldlt().solve(moment);
    fit.residuals = yd;
    for (Eigen::Index k = 0; k < p; ++k)
        fit.residuals -= fit.beta_hat[k] * xd[static_cast<size_t>(k)];
    return fit;
}

PairCorrelations pair_correlations(const Eigen::MatrixXd& residuals) {
    const Eigen::Index n = residuals.rows();
    const Eigen::Index T = residuals.cols();
    const long npairs = pair_count(static_cast<int>(n));

    PairCorrelations pc;
    pc.sigma_hat_diag.resize(n);
    const Eigen::MatrixXd ut = residuals.transpose();  // unit series contiguous
    for (Eigen::Index i = 0; i < n; ++i) {
        pc.sigma_hat_diag[i] = ut.col(i).squaredNorm() / static_cast<double>(T);
        if (!(pc.sigma_hat_diag[i] > 0))
            throw Error("pair_correlations: zero residual variance for unit index " + std::to_string(i));
    }

    pc.rho_hat.resize(npairs);
    pc.v_hat.resize(npairs);
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index i = 0; i < n - 1; ++i) {
        long idx = pair_index(static_cast<int>(i), static_cast<int>(i) + 1, static_cast<int>(n));
        const double si = pc.sigma_hat_diag[i];
        for (Eigen::Index j = i + 1; j < n; ++j, ++idx) {
            const double sij = ut.col(i).dot(ut.col(j)) / static_cast<double>(T);
            double rho = sij / std::sqrt(si * pc.sigma_hat_diag[j]);
            if (rho > 1.0) rho = 1.0;
            if (rho < -1.0) rho = -1.0;
            pc.rho_hat[idx] = rho;
            const double one_minus = 1.0 - rho * rho;
            pc.v_hat[idx] = one_minus * one_minus / static_cast<double>(T);
        }
    }
    return pc;
}

double bfk_j1(const Eigen::VectorXd& rho_hat, int n_units, int n_time) {
    const long npairs = pair_count(n_units);
    if (rho_hat.size() != npairs)
        throw Error("bfk_j1: expected " + std::to_string(npairs) + " pair correlations, got " +
                    std::to_string(rho_hat.size()));
    if (n_time < 2) throw Error("bfk_j1: need T >= 2");

    const double T = static_cast<double>(n_time);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < rho_hat.size(); ++k)
        sum += T * rho_hat[k] * rho_hat[k] - 1.0;
    const double n = static_cast<double>(n_units);
    return std::sqrt(1.0 / (n * (n - 1.0))) * sum - n / (2.0 * (T - 1.0));
}

TestReport power_enhanced_csi(const Panel& y, const std::vector<Panel>& x,
                              const CsiTestConfig& config, std::vector<SelectedPair>* pairs_out) {
    const int n = static_cast<int>(y.n_units());
    const int T = static_cast<int>(y.n_time());
    const WithinFit fit = within_ols(y, x, config.condition_cap);
    const PairCorrelations pc = pair_correlations(fit.residuals);

    const long N = pair_count(n);
    const double delta = config.delta_override
                             ? *config.delta_override
                             : high_criticism_delta(N, T);

    // |rho|=1 pairs carry v_hat = 0 and are force-selected (infinite tstat).
    const ScreeningResult scr = screen(pc.rho_hat, pc.v_hat, delta, /*allow_zero_vhat=*/true);

    TestReport report;
    report.method = "csi-bfk-pe";
    report.n_units = N;
    report.n_time = T;
    report.delta = delta;
    report.j0 = scr.j0;
    report.pivotal = bfk_j1(pc.rho_hat, n, T);
    report.combined = report.j0 + report.pivotal;
    report.p_value = normal_p(report.combined);
    report.p_pivotal = normal_p(report.pivotal);

    report.selected_indices = scr.selected;
    for (int k : scr.selected) {
        const auto [i, j] = pair_units(k, n);
        report.selected.push_back("(" + y.unit_labels[static_cast<size_t>(i)] + "," +
                                  y.unit_labels[static_cast<size_t>(j)] + ")");
        if (pairs_out)
            pairs_out->push_back({y.unit_labels[static_cast<size_t>(i)],
                                  y.unit_labels[static_cast<size_t>(j)],
                                  pc.rho_hat[k], scr.standardized[k]});
    }
    return report;
}

void write_selected_pairs_csv(const std::vector<SelectedPair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write pairs CSV: " + path);
    out << "unit_i,unit_j,rho_hat,tstat\n";
    char buf[80];
    for (const auto& p : pairs) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g", p.rho_hat, p.tstat);
        out << p.unit_i << ',' << p.unit_j << ',' << buf << '\n';
    }
}

}  // namespace hdtest
