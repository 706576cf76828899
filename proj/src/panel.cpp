#include "hdtest/panel.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hdtest {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void check_unique(const std::vector<std::string>& labels, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second)
            throw Error(std::string("duplicate ") + what + " label: " + l);
}

struct RawTable {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::MatrixXd values;  // NaN where blank
    std::vector<std::pair<int, int>> missing;  // (row, col) of blank cells
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV file: " + path);
    auto header = split_csv_line(line);
    if (header.size() < 2) throw Error("CSV header needs at least one data column: " + path);

    RawTable t;
    for (size_t j = 1; j < header.size(); ++j) t.col_labels.push_back(trim(header[j]));

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw Error(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        t.row_labels.push_back(trim(cells[0]));
        std::vector<double> row(t.col_labels.size());
        for (size_t j = 1; j < cells.size(); ++j) {
            const std::string c = trim(cells[j]);
            if (c.empty()) {
                row[j - 1] = std::numeric_limits<double>::quiet_NaN();
                t.missing.emplace_back(static_cast<int>(rows.size()), static_cast<int>(j - 1));
                continue;
            }
            errno = 0;
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end == c.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
                throw Error(path + ":" + std::to_string(lineno) + ": cell '" + c +
                            "' (row " + t.row_labels.back() + ", column " + t.col_labels[j - 1] +
                            ") is not a finite number");
            row[j - 1] = v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("CSV has no data rows: " + path);

    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.col_labels.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return t;
}

RawTable oriented(RawTable t, CsvLayout layout) {
    if (layout == CsvLayout::UnitsAsRows) return t;
    RawTable o;
    o.row_labels = std::move(t.col_labels);
    o.col_labels = std::move(t.row_labels);
    o.values = t.values.transpose();
    for (auto [r, c] : t.missing) o.missing.emplace_back(c, r);
    return o;
}

}  // namespace

void Panel::validate() const {
    if (values.rows() < 1 || values.cols() < 2)
        throw Error("panel needs at least 1 unit and 2 time points");
    if (static_cast<Eigen::Index>(unit_labels.size()) != values.rows() ||
        static_cast<Eigen::Index>(time_labels.size()) != values.cols())
        throw Error("panel label lengths do not match the value matrix");
    check_unique(unit_labels, "unit");
    check_unique(time_labels, "time");
    if (!values.allFinite()) throw Error("panel contains non-finite values");
}

void FactorPanel::validate() const {
    if (values.rows() < 1) throw Error("factor panel needs at least one factor");
    if (static_cast<Eigen::Index>(factor_labels.size()) != values.rows() ||
        static_cast<Eigen::Index>(time_labels.size()) != values.cols())
        throw Error("factor panel label lengths do not match the value matrix");
    check_unique(factor_labels, "factor");
    check_unique(time_labels, "time");
    if (!values.allFinite()) throw Error("factor panel contains non-finite values");
}

Panel load_panel_csv(const std::string& path, CsvLayout layout, MissingPolicy policy) {
    RawTable t = oriented(read_table(path), layout);

    Panel p;
    p.time_labels = t.col_labels;

    if (t.missing.empty()) {
        p.values = std::move(t.values);
        p.unit_labels = std::move(t.row_labels);
    } else if (policy == MissingPolicy::Reject) {
        const auto [r, c] = t.missing.front();
        throw Error(path + ": missing cell at unit " + t.row_labels[r] + ", time " +
                    t.col_labels[c] + " (policy: reject)");
    } else {
        std::vector<bool> bad(t.row_labels.size(), false);
        for (auto [r, c] : t.missing) bad[r] = true;
        std::vector<Eigen::Index> keep;
        for (size_t i = 0; i < bad.size(); ++i)
            if (!bad[i]) keep.push_back(static_cast<Eigen::Index>(i));
        if (keep.empty()) throw Error(path + ": no complete units left after dropping");
        p.values.resize(static_cast<Eigen::Index>(keep.size()), t.values.cols());
        for (size_t i = 0; i < keep.size(); ++i) {
            p.values.row(static_cast<Eigen::Index>(i)) = t.values.row(keep[i]);
            p.unit_labels.push_back(t.row_labels[keep[i]]);
        }
        p.dropped_units = static_cast<int>(bad.size() - keep.size());
    }

    p.validate();
    return p;
}

FactorPanel load_factor_csv(const std::string& path, CsvLayout layout) {
    RawTable t = oriented(read_table(path), layout);
    if (!t.missing.empty()) {
        const auto [r, c] = t.missing.front();
        throw Error(path + ": missing cell at factor " + t.row_labels[r] + ", time " + t.col_labels[c]);
    }
    FactorPanel f;
    f.values = std::move(t.values);
    f.factor_labels = std::move(t.row_labels);
    f.time_labels = std::move(t.col_labels);
    f.validate();
    return f;
}

MaskedPanel load_panel_csv_masked(const std::string& path, CsvLayout layout) {
    RawTable t = oriented(read_table(path), layout);
    MaskedPanel m;
    m.values = std::move(t.values);
    m.unit_labels = std::move(t.row_labels);
    m.time_labels = std::move(t.col_labels);
    check_unique(m.unit_labels, "unit");
    check_unique(m.time_labels, "time");
    return m;
}

void save_panel_csv(const Panel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write CSV file: " + path);
    out << "unit";
    for (const auto& t : panel.time_labels) out << ',' << t;
    out << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < panel.values.rows(); ++i) {
        out << panel.unit_labels[i];
        for (Eigen::Index j = 0; j < panel.values.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", panel.values(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::pair<Panel, FactorPanel> align(const Panel& returns, const FactorPanel& factors) {
    std::unordered_map<std::string, Eigen::Index> factor_time;
    for (size_t j = 0; j < factors.time_labels.size(); ++j)
        factor_time.emplace(factors.time_labels[j], static_cast<Eigen::Index>(j));

    std::vector<Eigen::Index> rj, fj;
    std::vector<std::string> common;
    for (size_t j = 0; j < returns.time_labels.size(); ++j) {
        auto it = factor_time.find(returns.time_labels[j]);
        if (it == factor_time.end()) continue;
        rj.push_back(static_cast<Eigen::Index>(j));
        fj.push_back(it->second);
        common.push_back(returns.time_labels[j]);
    }

    const Eigen::Index K = factors.n_factors();
    if (static_cast<Eigen::Index>(common.size()) < K + 2)
        throw Error("insufficient time overlap between returns and factors: " +
                    std::to_string(common.size()) + " common points, need at least " +
                    std::to_string(K + 2));

    Panel pr;
    pr.unit_labels = returns.unit_labels;
    pr.time_labels = common;
    pr.values.resize(returns.n_units(), static_cast<Eigen::Index>(common.size()));
    for (size_t j = 0; j < rj.size(); ++j) pr.values.col(static_cast<Eigen::Index>(j)) = returns.values.col(rj[j]);

    FactorPanel pf;
    pf.factor_labels = factors.factor_labels;
    pf.time_labels = common;
    pf.values.resize(K, static_cast<Eigen::Index>(common.size()));
    for (size_t j = 0; j < fj.size(); ++j) pf.values.col(static_cast<Eigen::Index>(j)) = factors.values.col(fj[j]);

    pr.dropped_units = returns.dropped_units;
    return {std::move(pr), std::move(pf)};
}

}  // namespace hdtest
