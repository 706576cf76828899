#include "hdtest/monte_carlo.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hdtest/rng.hpp"
#include "hdtest/screening.hpp"

namespace hdtest {

namespace {

std::vector<std::string> make_labels(const char* prefix, int count) {
    std::vector<std::string> labels(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) labels[static_cast<size_t>(i)] = prefix + std::to_string(i + 1);
    return labels;
}

Eigen::MatrixXd chol_lower(const Eigen::MatrixXd& sigma, const char* what) {
    const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success)
        throw Error(std::string("covariance is not positive definite: ") + what);
    return llt.matrixL();
}

Eigen::MatrixXd equicorr_block(int m, double rho) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(m, m, rho);
    r.diagonal().setOnes();
    return r;
}

}  // namespace

void FpDgpSpec::validate() const {
    if (n_units < 2 || n_time < 3) throw Error("fp dgp: need N >= 2 and T >= 3");
    if (block_size < 1) throw Error("fp dgp: block size must be positive");
    if (rho_hi < rho_lo || rho_lo < 0 || rho_hi >= 1) throw Error("fp dgp: invalid rho range");
    if (diag_noise_sd < 0) throw Error("fp dgp: negative diagonal noise sd");
}

void CsiDgpSpec::validate() const {
    if (n_units < 2 || n_time < 3) throw Error("csi dgp: need n >= 2 and T >= 3");
    if (block_size < 1) throw Error("csi dgp: block size must be positive");
    if (n_units % block_size != 0)
        throw Error("csi dgp: n must be divisible by the block size");
    if (spatial_rho <= -1 || spatial_rho >= 1) throw Error("csi dgp: |spatial rho| must be < 1");
    if (std::abs(ar_coef) >= 1) throw Error("csi dgp: |ar coefficient| must be < 1");
}

FpDataset gen_fp_dataset(const FpDgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int N = spec.n_units;
    const int T = spec.n_time;
    Rng rng(seed);

    const Eigen::MatrixXd lb = chol_lower(spec.sigma_b, "loadings");
    const Eigen::MatrixXd lf = chol_lower(spec.sigma_f, "factors");

    // Draw order is fixed: loadings, factors, block correlations, diagonal
    // noise, then errors block by block. Tests pin this stream layout.
    Eigen::MatrixXd b(N, 3);
    for (int i = 0; i < N; ++i) b.row(i) = rng.mvn(spec.mu_b, lb).transpose();

    Eigen::MatrixXd f(3, T);
    for (int t = 0; t < T; ++t) f.col(t) = rng.mvn(spec.mu_f, lf);

    const int n_blocks = (N + spec.block_size - 1) / spec.block_size;
    Eigen::VectorXd block_rho(n_blocks);
    for (int bi = 0; bi < n_blocks; ++bi) block_rho[bi] = rng.uniform(spec.rho_lo, spec.rho_hi);

    Eigen::VectorXd diag(N);
    for (int i = 0; i < N; ++i) {
        const Eigen::VectorXd v = spec.diag_noise_sd * rng.normal_vector(3);
        diag[i] = 1.0 + v.squaredNorm();
    }

    FpDataset ds;
    ds.sigma_u = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd u(N, T);
    for (int bi = 0; bi < n_blocks; ++bi) {
        const int lo = bi * spec.block_size;
        const int m = std::min(spec.block_size, N - lo);
        const Eigen::VectorXd dh = diag.segment(lo, m).cwiseSqrt();
        const Eigen::MatrixXd block =
            dh.asDiagonal() * equicorr_block(m, block_rho[bi]) * dh.asDiagonal();
        ds.sigma_u.block(lo, lo, m, m) = block;
        const Eigen::MatrixXd lblk = chol_lower(block, "error block");
        Eigen::MatrixXd z(m, T);
        for (int r = 0; r < m; ++r)
            for (int t = 0; t < T; ++t) z(r, t) = rng.normal();
        u.middleRows(lo, m) = lblk * z;
    }

    ds.theta_true = Eigen::VectorXd::Zero(N);
    if (spec.alternative == FpAlternative::SparseHa1) {
        const int k = N / T;  // floor; zero nonzeros degenerates to the null
        for (int i = 0; i < k; ++i) ds.theta_true[i] = 0.3;
    } else if (spec.alternative == FpAlternative::WeakHa2) {
        const int k = static_cast<int>(std::floor(std::pow(static_cast<double>(N), 0.4)));
        const double mag = std::sqrt(std::log(static_cast<double>(N)) / static_cast<double>(T));
        for (int i = 0; i < k && i < N; ++i) ds.theta_true[i] = mag;
    }

    ds.returns.values = (ds.theta_true.rowwise().replicate(T) + b * f + u).eval();
    ds.returns.unit_labels = make_labels("u", N);
    ds.returns.time_labels = make_labels("t", T);
    ds.factors.values = std::move(f);
    ds.factors.factor_labels = make_labels("f", 3);
    ds.factors.time_labels = ds.returns.time_labels;
    return ds;
}

CsiDataset gen_csi_dataset(const CsiDgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int n = spec.n_units;
    const int T = spec.n_time;
    Rng rng(seed);

    Eigen::VectorXd mu(n);
    for (int i = 0; i < n; ++i) mu[i] = spec.mu_sd * rng.normal();

    Eigen::MatrixXd x(n, T);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = spec.x_init;
        for (int t = 1; t < T; ++t) x(i, t) = spec.ar_coef * x(i, t - 1) + mu[i] + rng.normal();
    }

    // Heteroskedastic scale from this draw's unit means, normalized so the
    // average error variance is exactly one.
    Eigen::VectorXd s2(n);
    for (int i = 0; i < n; ++i) {
        const double m = x.row(i).mean();
        const double c = 1.0 + spec.kappa * m;
        s2[i] = c * c;
    }
    s2 *= static_cast<double>(n) / s2.sum();
    const Eigen::VectorXd sd = s2.cwiseSqrt();

    const int n_blocks = n / spec.block_size;
    std::vector<int> active;
    if (spec.alternative == CsiAlternative::Spatial) {
        const int k = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 0.3)));
        active = rng.sample_without_replacement(n_blocks, std::min(k, n_blocks));
    }

    Eigen::MatrixXd z(n, T);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t) z(i, t) = rng.normal();

    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
    if (!active.empty()) {
        const int m = spec.block_size;
        Eigen::MatrixXd blk(m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) blk(r, c) = std::pow(spec.spatial_rho, std::abs(r - c));
        const Eigen::MatrixXd lblk = chol_lower(blk, "spatial block");
        for (int bi : active) {
            const int lo = bi * m;
            corr.block(lo, lo, m, m) = blk;
            z.middleRows(lo, m) = (lblk * z.middleRows(lo, m)).eval();
        }
    }

    CsiDataset ds;
    ds.sigma_u = sd.asDiagonal() * corr * sd.asDiagonal();
    Eigen::MatrixXd u = sd.asDiagonal() * z;

    ds.y.values = (spec.intercept + (spec.slope * x).array()).matrix();
    ds.y.values += mu.rowwise().replicate(T) + u;
    ds.y.unit_labels = make_labels("u", n);
    ds.y.time_labels = make_labels("t", T);
    ds.x.values = std::move(x);
    ds.x.unit_labels = ds.y.unit_labels;
    ds.x.time_labels = ds.y.time_labels;
    return ds;
}

Method method_from_string(const std::string& s) {
    if (s == "wald" || s == "jwald") return Method::Wald;
    if (s == "pe") return Method::PE;
    if (s == "j1") return Method::J1;
    throw Error("unknown method '" + s + "' (expected wald, pe or j1)");
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Wald: return "jwald";
        case Method::PE: return "pe";
        case Method::J1: return "j1";
    }
    return "?";
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.reps < 1) throw Error("run_experiment: need at least one replication");
    if (spec.methods.empty()) throw Error("run_experiment: no methods given");
    const bool is_fp = std::holds_alternative<FpDgpSpec>(spec.dgp);
    for (Method m : spec.methods) {
        if (is_fp && m == Method::J1) throw Error("method j1 applies to the independence test only");
        if (!is_fp && m == Method::Wald) throw Error("method wald applies to the alpha test only");
    }

    struct RepOutcome {
        bool ok = false;
        TestReport report;
        std::vector<int> selected;
    };
    std::vector<RepOutcome> outcomes(static_cast<size_t>(spec.reps));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < spec.reps; ++r) {
        auto& out = outcomes[static_cast<size_t>(r)];
        try {
            const std::uint64_t seed =
                Rng::for_replication(spec.master_seed, static_cast<std::uint64_t>(r)).next_u64();
            if (is_fp) {
                const FpDataset ds = gen_fp_dataset(std::get<FpDgpSpec>(spec.dgp), seed);
                out.report = power_enhanced_fp(ds.returns, ds.factors, spec.fp_config);
            } else {
                const CsiDataset ds = gen_csi_dataset(std::get<CsiDgpSpec>(spec.dgp), seed);
                out.report = power_enhanced_csi(ds.y, {ds.x}, spec.csi_config);
            }
            out.ok = true;
        } catch (const std::exception& e) {
#pragma omp critical
            std::cerr << "replication " << r << " failed: " << e.what() << "\n";
            out.ok = false;
        }
    }

    ExperimentResult result;
    long n_ok = 0;
    std::vector<long> rejects(spec.methods.size(), 0);
    long empties = 0;
    for (auto& out : outcomes) {
        if (!out.ok) {
            ++result.failed_reps;
            continue;
        }
        ++n_ok;
        if (out.report.selected.empty()) ++empties;
        for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
            const double p = spec.methods[mi] == Method::PE ? out.report.p_value : out.report.p_pivotal;
            if (p < spec.level) ++rejects[mi];
        }
        result.reports.push_back(std::move(out.report));
    }
    if (n_ok == 0) throw Error("run_experiment: every replication failed");

    int panel_dim = is_fp ? std::get<FpDgpSpec>(spec.dgp).n_units : std::get<CsiDgpSpec>(spec.dgp).n_units;
    int n_time = is_fp ? std::get<FpDgpSpec>(spec.dgp).n_time : std::get<CsiDgpSpec>(spec.dgp).n_time;
    for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
        SizePowerRow row;
        row.method = to_string(spec.methods[mi]);
        row.scenario = spec.scenario;
        row.n_time = n_time;
        row.n_units = panel_dim;
        row.reject_freq = static_cast<double>(rejects[mi]) / static_cast<double>(n_ok);
        row.empty_s_freq = static_cast<double>(empties) / static_cast<double>(n_ok);
        row.reps = static_cast<int>(n_ok);
        row.seed = spec.master_seed;
        result.rows.push_back(std::move(row));
    }

    // Null-scenario sanity check on the rejection frequency; warn only.
    const bool is_null = is_fp
                             ? std::get<FpDgpSpec>(spec.dgp).alternative == FpAlternative::Null
                             : std::get<CsiDgpSpec>(spec.dgp).alternative == CsiAlternative::Null;
    if (is_null) {
        const double se = std::sqrt(spec.level * (1.0 - spec.level) / static_cast<double>(n_ok));
        for (const auto& row : result.rows)
            if (std::abs(row.reject_freq - spec.level) > 3.0 * se)
                std::cerr << "warning: null rejection frequency of " << row.method << " is "
                          << row.reject_freq << ", more than 3 standard errors from " << spec.level
                          << "\n";
    }

    result.selected_sets.reserve(result.reports.size());
    for (const auto& rep : result.reports) result.selected_sets.push_back(rep.selected_indices);
    return result;
}

ScreeningRates screening_diagnostics(const Eigen::VectorXd& theta_true,
                                     const Eigen::VectorXd& v_true, double delta,
                                     const std::vector<std::vector<int>>& selected_sets,
                                     double grey_lo, double grey_hi) {
    const OracleSets oracle = oracle_sets(theta_true, v_true, delta, grey_lo, grey_hi);
    const std::vector<bool> in_s = [&] {
        std::vector<bool> v(static_cast<size_t>(theta_true.size()), false);
        for (int j : oracle.s_theta) v[static_cast<size_t>(j)] = true;
        return v;
    }();
    const std::vector<bool> in_g = [&] {
        std::vector<bool> v(static_cast<size_t>(theta_true.size()), false);
        for (int j : oracle.grey) v[static_cast<size_t>(j)] = true;
        return v;
    }();

    ScreeningRates rates;
    if (selected_sets.empty()) return rates;
    long sure = 0, exact = 0, grey_ok = 0;
    for (const auto& sel : selected_sets) {
        std::vector<bool> picked(static_cast<size_t>(theta_true.size()), false);
        for (int j : sel) picked[static_cast<size_t>(j)] = true;
        bool covers = true;
        for (int j : oracle.s_theta)
            if (!picked[static_cast<size_t>(j)]) covers = false;
        const bool same = covers && sel.size() == oracle.s_theta.size();
        bool extras_in_grey = true;
        for (int j : sel)
            if (!in_s[static_cast<size_t>(j)] && !in_g[static_cast<size_t>(j)]) extras_in_grey = false;
        sure += covers;
        exact += same;
        grey_ok += extras_in_grey;
    }
    const double denom = static_cast<double>(selected_sets.size());
    rates.sure_screening = static_cast<double>(sure) / denom;
    rates.exact_recovery = static_cast<double>(exact) / denom;
    rates.grey_containment = static_cast<double>(grey_ok) / denom;
    return rates;
}

double fp_population_a_f(const FpDgpSpec& spec) {
    const Eigen::Matrix3d second_moment =
        0.5 * (spec.sigma_f + spec.sigma_f.transpose()) + spec.mu_f * spec.mu_f.transpose();
    return 1.0 - spec.mu_f.dot(second_moment.ldlt().solve(spec.mu_f));
}

Eigen::VectorXd fp_oracle_v_true(const FpDgpSpec& spec, const Eigen::VectorXd& sigma_u_diag) {
    const double a_f = fp_population_a_f(spec);
    return sigma_u_diag / (static_cast<double>(spec.n_time) * a_f);
}

std::string format_size_power_csv(const std::vector<SizePowerRow>& rows,
                                  const std::vector<std::pair<std::string, std::string>>& provenance) {
    std::ostringstream os;
    for (const auto& [k, v] : provenance) os << "# " << k << ": " << v << "\n";
    os << "method,scenario,T,N,reject_freq,empty_s_freq,reps,seed\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g", r.reject_freq, r.empty_s_freq);
        os << r.method << ',' << r.scenario << ',' << r.n_time << ',' << r.n_units << ',' << buf
           << ',' << r.reps << ',' << r.seed << "\n";
    }
    return os.str();
}

}  // namespace hdtest
