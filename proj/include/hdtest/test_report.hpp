#ifndef HDTEST_TEST_REPORT_HPP
#define HDTEST_TEST_REPORT_HPP

#include <string>
#include <vector>

namespace hdtest {

/// Right tail of the standard normal, 1 - Phi(z), to better than 1e-12.
double normal_p(double z);

/// Outcome of one power-enhanced test run. combined = j0 + pivotal exactly;
/// p_value = 1 - Phi(combined); selected nonempty iff j0 > 0.
struct TestReport {
    std::string method;      // "fp-wald-pe" or "csi-bfk-pe"
    double j0 = 0.0;
    double pivotal = 0.0;    // J_wald or J1
    double combined = 0.0;   // j0 + pivotal
    double p_value = 0.0;    // right-tail p of combined
    double p_pivotal = 0.0;  // right-tail p of pivotal alone
    std::vector<std::string> selected;  // labels of screened-in components
    std::vector<int> selected_indices;  // the same components, 0-based
    long n_units = 0;        // N (or the pair count for the independence test)
    long n_time = 0;
    double delta = 0.0;
    // factor-pricing extras
    std::string rule;        // thresholding rule, empty for the independence test
    double c_used = 0.0;
    bool diagonal_fallback = false;  // covariance grid failed; diagonal weight used
};

std::string format_report_text(const TestReport& r);
std::string format_report_json(const TestReport& r);

}  // namespace hdtest

#endif
