#include "hdtest/test_report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace hdtest {

double normal_p(double z) {
    return 0.5 * std::erfc(z * M_SQRT1_2);
}

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
}  // namespace

std::string format_report_text(const TestReport& r) {
    std::ostringstream os;
    const bool fp = !r.rule.empty();
    os << "test method:        " << r.method << "\n";
    os << (fp ? "units (N):          " : "pairs (N):          ") << r.n_units << "\n";
    os << "time points (T):    " << r.n_time << "\n";
    os << "delta:              " << num(r.delta) << "\n";
    os << "J0 (screening):     " << num(r.j0) << "\n";
    os << "pivotal statistic:  " << num(r.pivotal) << "\n";
    os << "combined statistic: " << num(r.combined) << "\n";
    os << "p-value (pivotal):  " << num(r.p_pivotal) << "\n";
    os << "p-value (combined): " << num(r.p_value) << "\n";
    if (fp) {
        os << "threshold rule:     " << r.rule << "\n";
        os << "C used:             " << num(r.c_used) << "\n";
        if (r.diagonal_fallback)
            os << "note:               covariance grid failed, diagonal weights used\n";
    }
    os << "selected (" << r.selected.size() << "):";
    if (r.selected.empty()) {
        os << " (none)";
    } else {
        for (const auto& s : r.selected) os << ' ' << s;
    }
    os << "\n";
    return os.str();
}

std::string format_report_json(const TestReport& r) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["n_units"] = r.n_units;
    j["n_time"] = r.n_time;
    j["delta"] = r.delta;
    j["j0"] = r.j0;
    j["pivotal"] = r.pivotal;
    j["combined"] = r.combined;
    j["p_pivotal"] = r.p_pivotal;
    j["p_value"] = r.p_value;
    if (!r.rule.empty()) {
        j["rule"] = r.rule;
        j["c_used"] = r.c_used;
        j["diagonal_fallback"] = r.diagonal_fallback;
    }
    j["selected"] = r.selected;
    return j.dump(2) + "\n";
}

}  // namespace hdtest
