#ifndef HDTEST_EXPERIMENT_CONFIG_HPP
#define HDTEST_EXPERIMENT_CONFIG_HPP

#include <string>

#include "hdtest/monte_carlo.hpp"

namespace hdtest {

/// Flat `key = value` text, `#` starts a comment. Recognized keys:
///   family       fp | csi
///   scenario     free-form row tag (default family-alternative)
///   alternative  null | sparse_ha1 | weak_ha2 (fp);  null | spatial (csi)
///   N            cross-sectional dimension (alias: n)
///   T            time dimension
///   reps, seed, level
///   methods      comma list: wald,pe (fp) or j1,pe (csi)
///   rule         hard | soft | scad
///   c_min, c_max, c_step, c_target
ExperimentSpec parse_experiment_config(const std::string& path);

}  // namespace hdtest

#endif
