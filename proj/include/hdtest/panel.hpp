#ifndef HDTEST_PANEL_HPP
#define HDTEST_PANEL_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hdtest {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CsvLayout { UnitsAsRows, UnitsAsColumns };
enum class MissingPolicy { Reject, DropUnit };

/// Balanced panel: rows are cross-sectional units, columns are time points.
/// Immutable after construction; safe to share across threads.
struct Panel {
    Eigen::MatrixXd values;                // units x time
    std::vector<std::string> unit_labels;  // size = rows
    std::vector<std::string> time_labels;  // size = cols
    int dropped_units = 0;                 // units removed by the drop-unit policy

    Eigen::Index n_units() const { return values.rows(); }
    Eigen::Index n_time() const { return values.cols(); }

    void validate() const;
};

/// K observed factor series over the same time axis as a companion Panel.
struct FactorPanel {
    Eigen::MatrixXd values;  // K x time
    std::vector<std::string> factor_labels;
    std::vector<std::string> time_labels;

    Eigen::Index n_factors() const { return values.rows(); }
    Eigen::Index n_time() const { return values.cols(); }

    void validate() const;
};

/// Panel that tolerates missing cells (stored as NaN). Only the rolling-window
/// pipeline uses this; everything else requires complete panels.
struct MaskedPanel {
    Eigen::MatrixXd values;  // units x time, NaN = missing
    std::vector<std::string> unit_labels;
    std::vector<std::string> time_labels;
};

Panel load_panel_csv(const std::string& path, CsvLayout layout, MissingPolicy policy);
FactorPanel load_factor_csv(const std::string& path, CsvLayout layout);
MaskedPanel load_panel_csv_masked(const std::string& path, CsvLayout layout);

void save_panel_csv(const Panel& panel, const std::string& path);

/// Restrict both inputs to the intersection of their time labels, ordered as
/// in the returns panel. Errors if fewer than K+2 common time points remain.
std::pair<Panel, FactorPanel> align(const Panel& returns, const FactorPanel& factors);

}  // namespace hdtest

#endif
