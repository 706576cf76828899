#ifndef HDTEST_MONTE_CARLO_HPP
#define HDTEST_MONTE_CARLO_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hdtest/alpha_test.hpp"
#include "hdtest/csi_test.hpp"
#include "hdtest/panel.hpp"

namespace hdtest {

enum class FpAlternative { Null, SparseHa1, WeakHa2 };
enum class CsiAlternative { Null, Spatial };

/// Calibrated three-factor design. Defaults are the moment calibration from
/// daily returns of large-index constituents; the error covariance is block
/// diagonal with equicorrelated blocks.
struct FpDgpSpec {
    int n_units = 500;
    int n_time = 300;
    Eigen::Vector3d mu_b{0.9833, -0.1233, 0.0839};
    Eigen::Matrix3d sigma_b{{0.0921, -0.0178, 0.0436},
                            {-0.0178, 0.0862, -0.0211},
                            {0.0436, -0.0211, 0.7624}};
    Eigen::Vector3d mu_f{0.0260, 0.0211, -0.0043};
    Eigen::Matrix3d sigma_f{{3.2351, 0.1783, 0.7783},
                            {0.1783, 0.5069, 0.0102},
                            {0.7783, 0.0102, 0.6586}};
    int block_size = 4;
    double rho_lo = 0.0, rho_hi = 0.5;  // block equicorrelation ~ U(rho_lo, rho_hi)
    double diag_noise_sd = 0.1;         // diagonal = 1 + ||v_i||^2, v_i ~ N3(0, sd^2 I)
    FpAlternative alternative = FpAlternative::Null;

    void validate() const;
};

struct FpDataset {
    Panel returns;
    FactorPanel factors;
    Eigen::VectorXd theta_true;
    Eigen::MatrixXd sigma_u;
};

/// AR(1)-regressor mixed-effect panel with heteroskedastic errors scaled to
/// unit mean variance; the spatial alternative activates floor(n^0.3) blocks.
struct CsiDgpSpec {
    int n_units = 200;
    int n_time = 100;
    double intercept = -1.0;
    double slope = 2.0;
    double ar_coef = 0.7;
    double x_init = 0.5;
    double mu_sd = 0.5;      // random effect sd (variance 0.25)
    double kappa = 0.5;      // heteroskedasticity strength
    double spatial_rho = 0.2;
    int block_size = 4;
    CsiAlternative alternative = CsiAlternative::Null;

    void validate() const;
};

struct CsiDataset {
    Panel y;
    Panel x;
    Eigen::MatrixXd sigma_u;
};

FpDataset gen_fp_dataset(const FpDgpSpec& spec, std::uint64_t seed);
CsiDataset gen_csi_dataset(const CsiDgpSpec& spec, std::uint64_t seed);

enum class Method { Wald, PE, J1 };
Method method_from_string(const std::string& s);
const char* to_string(Method m);

struct SizePowerRow {
    std::string method;
    std::string scenario;
    int n_time = 0;
    int n_units = 0;  // N for the alpha test, n for the independence test
    double reject_freq = 0.0;
    double empty_s_freq = 0.0;
    int reps = 0;
    std::uint64_t seed = 0;
};

struct ExperimentSpec {
    std::variant<FpDgpSpec, CsiDgpSpec> dgp;
    std::vector<Method> methods;
    int reps = 500;
    double level = 0.05;
    std::uint64_t master_seed = 42;
    std::string scenario = "unnamed";
    FpTestConfig fp_config{};
    CsiTestConfig csi_config{};
};

struct ExperimentResult {
    std::vector<SizePowerRow> rows;
    std::vector<TestReport> reports;            // one per successful replication
    std::vector<std::vector<int>> selected_sets;  // 0-based screened indices per successful rep
    int failed_reps = 0;
};

/// Replications run concurrently; replication r draws from a stream derived
/// from (master_seed, r), so the output is identical for any thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct ScreeningRates {
    double sure_screening = 0.0;   // freq of S(theta) subset of S_hat
    double exact_recovery = 0.0;   // freq of S_hat == S(theta)
    double grey_containment = 0.0; // freq of S_hat \ S(theta) subset of G(theta)
};

ScreeningRates screening_diagnostics(const Eigen::VectorXd& theta_true,
                                     const Eigen::VectorXd& v_true, double delta,
                                     const std::vector<std::vector<int>>& selected_sets,
                                     double grey_lo = 1.0 / 3.0, double grey_hi = 2.0);

/// Population a_f = 1 - E[f]'(E[f f'])^{-1} E[f] for the spec's factor moments.
double fp_population_a_f(const FpDgpSpec& spec);

/// Oracle normalizers v_j = (Sigma_u)_jj / (T a_f).
Eigen::VectorXd fp_oracle_v_true(const FpDgpSpec& spec, const Eigen::VectorXd& sigma_u_diag);

/// CSV with a provenance header; column layout is fixed:
/// method,scenario,T,N,reject_freq,empty_s_freq,reps,seed
std::string format_size_power_csv(const std::vector<SizePowerRow>& rows,
                                  const std::vector<std::pair<std::string, std::string>>& provenance);

}  // namespace hdtest

#endif
