#pragma once

#include <vector>

namespace chdp {

/// Biased (n-denominator) sample autocorrelation; constant series -> 0.
double acf(const std::vector<double>& series, int lag);

/// Potential scale reduction factor sqrt((n-1)/n + B/(nW)) over >= 2 chains.
double psrf(const std::vector<std::vector<double>>& chains);

}  // namespace chdp
