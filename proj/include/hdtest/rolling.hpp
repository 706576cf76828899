#ifndef HDTEST_ROLLING_HPP
#define HDTEST_ROLLING_HPP

#include <string>
#include <vector>

#include "hdtest/alpha_test.hpp"
#include "hdtest/panel.hpp"

namespace hdtest {

/// One record per window end; windows advance one period at a time.
struct RollingRecord {
    std::string window_end;
    int n_units = 0;
    double p_wald = 0.0;
    double p_pe = 0.0;
    double j0 = 0.0;
    std::vector<std::string> selected;
    double mean_abs_theta_all = 0.0;
    double mean_abs_theta_selected = 0.0;  // NaN when nothing selected
};

struct RollingSummary {
    double mean_n = 0.0, median_n = 0.0;
    double mean_selected = 0.0, median_selected = 0.0;
    double mean_p_wald = 0.0, median_p_wald = 0.0;
    double mean_p_pe = 0.0, median_p_pe = 0.0;
    double reject_frac_wald = 0.0, reject_frac_pe = 0.0;  // at the given level
};

struct RollingResult {
    std::vector<RollingRecord> records;
    RollingSummary summary;
};

/// Re-run the alpha test on each length-`window` span of the panel, keeping
/// only units observed at every time point of that span. Factor series must
/// cover the panel's time axis.
RollingResult rolling_fp(const MaskedPanel& returns, const FactorPanel& factors, int window,
                         const FpTestConfig& config = {}, double level = 0.05);

std::string format_rolling_csv(const RollingResult& result);
std::string format_rolling_summary(const RollingResult& result);

}  // namespace hdtest

#endif
