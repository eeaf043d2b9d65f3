#pragma once

#include "heatwave/verify.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace heatwave::detail {

ExperimentReport start_report(const std::string& name, const RunConfig& cfg);

/// Partition of level i of the ladder: M = cfg.m[i] when given, else n.
TimePartition level_partition(const RunConfig& cfg, std::size_t level, int n);

SpacePtr level_space(int n, int r);

inline double ln_h(double h) { return std::abs(std::log(h)); }

/// Records growth(v) <= window as a check and the two-sided spread as a note.
Check& growth_check(ExperimentReport& rep, const std::string& name, const std::vector<double>& v, double window);

/// Least-squares slope of log v against log x.
double slope(const std::vector<double>& x, const std::vector<double>& v);

} // namespace heatwave::detail
