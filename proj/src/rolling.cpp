#include "hdtest/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hdtest {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

}  // namespace

RollingResult rolling_fp(const MaskedPanel& returns, const FactorPanel& factors, int window,
                         const FpTestConfig& config, double level) {
    const int total_t = static_cast<int>(returns.values.cols());
    if (window < 2) throw Error("rolling_fp: window must be at least 2");
    if (window > total_t)
        throw Error("rolling_fp: window of " + std::to_string(window) +
                    " exceeds the " + std::to_string(total_t) + " available time points");

    // Map factor columns onto the panel's time axis once, by exact label.
    std::unordered_map<std::string, Eigen::Index> factor_col;
    for (size_t j = 0; j < factors.time_labels.size(); ++j)
        factor_col.emplace(factors.time_labels[j], static_cast<Eigen::Index>(j));
    std::vector<Eigen::Index> fcol(static_cast<size_t>(total_t));
    for (int t = 0; t < total_t; ++t) {
        auto it = factor_col.find(returns.time_labels[static_cast<size_t>(t)]);
        if (it == factor_col.end())
            throw Error("rolling_fp: factor series missing time point " +
                        returns.time_labels[static_cast<size_t>(t)]);
        fcol[static_cast<size_t>(t)] = it->second;
    }

    const int n_windows = total_t - window + 1;
    RollingResult result;
    result.records.resize(static_cast<size_t>(n_windows));

#pragma omp parallel for schedule(dynamic)
    for (int wi = 0; wi < n_windows; ++wi) {
        const int lo = wi;
        auto& rec = result.records[static_cast<size_t>(wi)];
        rec.window_end = returns.time_labels[static_cast<size_t>(lo + window - 1)];

        // Complete-case units for this span.
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < returns.values.rows(); ++i) {
            bool complete = true;
            for (int t = lo; t < lo + window; ++t)
                if (std::isnan(returns.values(i, t))) {
                    complete = false;
                    break;
                }
            if (complete) keep.push_back(i);
        }
        rec.n_units = static_cast<int>(keep.size());
        if (keep.empty()) {
            rec.p_wald = rec.p_pe = std::numeric_limits<double>::quiet_NaN();
            continue;
        }

        Panel sub;
        sub.values.resize(static_cast<Eigen::Index>(keep.size()), window);
        for (size_t i = 0; i < keep.size(); ++i) {
            sub.values.row(static_cast<Eigen::Index>(i)) = returns.values.row(keep[i]).segment(lo, window);
            sub.unit_labels.push_back(returns.unit_labels[static_cast<size_t>(keep[i])]);
        }
        FactorPanel fsub;
        fsub.factor_labels = factors.factor_labels;
        fsub.values.resize(factors.n_factors(), window);
        for (int t = 0; t < window; ++t) {
            sub.time_labels.push_back(returns.time_labels[static_cast<size_t>(lo + t)]);
            fsub.values.col(t) = factors.values.col(fcol[static_cast<size_t>(lo + t)]);
        }
        fsub.time_labels = sub.time_labels;

        if (static_cast<int>(keep.size()) <= window)
#pragma omp critical
            std::cerr << "warning: window ending " << rec.window_end << " has N=" << keep.size()
                      << " <= T=" << window << "\n";

        const TestReport rep = power_enhanced_fp(sub, fsub, config);
        rec.p_wald = rep.p_pivotal;
        rec.p_pe = rep.p_value;
        rec.j0 = rep.j0;
        rec.selected = rep.selected;

        // Mean |theta| over all units and over the screened-in units.
        const auto [ar, af] = align(sub, fsub);
        const FactorFit fit = fit_factor_model(ar, af, config.condition_cap);
        rec.mean_abs_theta_all = fit.theta_hat.cwiseAbs().mean();
        if (rep.selected_indices.empty()) {
            rec.mean_abs_theta_selected = std::numeric_limits<double>::quiet_NaN();
        } else {
            double acc = 0.0;
            for (int j : rep.selected_indices) acc += std::abs(fit.theta_hat[j]);
            rec.mean_abs_theta_selected = acc / static_cast<double>(rep.selected_indices.size());
        }
    }

    std::vector<double> ns, sel, pw, pe;
    long rw = 0, rp = 0;
    for (const auto& r : result.records) {
        ns.push_back(r.n_units);
        sel.push_back(static_cast<double>(r.selected.size()));
        if (!std::isnan(r.p_wald)) {
            pw.push_back(r.p_wald);
            pe.push_back(r.p_pe);
            rw += r.p_wald < level;
            rp += r.p_pe < level;
        }
    }
    auto& s = result.summary;
    s.mean_n = mean_of(ns);
    s.median_n = median(ns);
    s.mean_selected = mean_of(sel);
    s.median_selected = median(sel);
    s.mean_p_wald = mean_of(pw);
    s.median_p_wald = median(pw);
    s.mean_p_pe = mean_of(pe);
    s.median_p_pe = median(pe);
    if (!pw.empty()) {
        s.reject_frac_wald = static_cast<double>(rw) / static_cast<double>(pw.size());
        s.reject_frac_pe = static_cast<double>(rp) / static_cast<double>(pe.size());
    }
    return result;
}

std::string format_rolling_csv(const RollingResult& result) {
    std::ostringstream os;
    os << "window_end,n_units,p_wald,p_pe,j0,n_selected,selected,mean_abs_theta_all,"
          "mean_abs_theta_selected\n";
    char buf[160];
    for (const auto& r : result.records) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g", r.p_wald, r.p_pe, r.j0);
        os << r.window_end << ',' << r.n_units << ',' << buf << ',' << r.selected.size() << ',';
        for (size_t i = 0; i < r.selected.size(); ++i) {
            if (i) os << ';';
            os << r.selected[i];
        }
        std::snprintf(buf, sizeof buf, "%.10g,%.10g", r.mean_abs_theta_all, r.mean_abs_theta_selected);
        os << ',' << buf << "\n";
    }
    return os.str();
}

std::string format_rolling_summary(const RollingResult& result) {
    const auto& s = result.summary;
    std::ostringstream os;
    char buf[256];
    os << "windows: " << result.records.size() << "\n";
    std::snprintf(buf, sizeof buf, "panel size N:    mean %.4g  median %.4g\n", s.mean_n, s.median_n);
    os << buf;
    std::snprintf(buf, sizeof buf, "selected |S|:    mean %.4g  median %.4g\n", s.mean_selected, s.median_selected);
    os << buf;
    std::snprintf(buf, sizeof buf, "p-value (wald):  mean %.4g  median %.4g\n", s.mean_p_wald, s.median_p_wald);
    os << buf;
    std::snprintf(buf, sizeof buf, "p-value (pe):    mean %.4g  median %.4g\n", s.mean_p_pe, s.median_p_pe);
    os << buf;
    std::snprintf(buf, sizeof buf, "reject fraction: wald %.4g  pe %.4g\n", s.reject_frac_wald, s.reject_frac_pe);
    os << buf;
    return os.str();
}

}  // namespace hdtest
