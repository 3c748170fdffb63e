#include "xylocc/grids.hpp"

#include <cmath>
#include <stdexcept>

namespace xylocc {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace needs at least 2 points");
  std::vector<double> out(n);
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = lo + i * step;
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("logspace needs 0 < lo < hi");
  if (n < 2) throw std::invalid_argument("logspace needs at least 2 points");
  std::vector<double> out(n);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = std::exp(llo + i * step);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_alpha_grid(double lo, double hi, int n,
                                       bool sentinels) {
  std::vector<double> grid = logspace(lo, hi, n);
  if (sentinels) {
    grid.insert(grid.begin(), 1e-6);
    grid.push_back(1e6);
  }
  return grid;
}

}  // namespace xylocc
