#pragma once

#include <vector>

namespace xylocc {

/// n points spaced evenly on [lo, hi]; endpoints exact, n >= 2.
std::vector<double> linspace(double lo, double hi, int n);

/// n points spaced evenly in log on [lo, hi]; requires 0 < lo < hi, n >= 2.
std::vector<double> logspace(double lo, double hi, int n);

/// Renyi-order grid used by the sweep drivers: n log-spaced points on
/// [lo, hi], optionally bracketed by the sentinels 1e-6 and 1e6 that stand in
/// for the alpha -> 0 and alpha -> infinity limits.
std::vector<double> default_alpha_grid(double lo = 0.01, double hi = 100.0,
                                       int n = 60, bool sentinels = true);

}  // namespace xylocc
