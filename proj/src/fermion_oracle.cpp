#include "xylocc/fermion_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace xylocc {

namespace {

constexpr double kPruneThreshold = 1e-16;  // relative to lambda_1
constexpr std::size_t kMaxProducts = std::size_t{1} << 22;

bool ring_contiguous(std::uint64_t mask, int n, int l) {
  const std::uint64_t full =
      (n >= 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::uint64_t rotated = (std::uint64_t{1} << l) - 1;
  for (int shift = 0; shift < n; ++shift) {
    if (rotated == mask) return true;
    rotated = ((rotated << 1) | (rotated >> (n - 1))) & full;
  }
  return false;
}

}  // namespace

double CorrelationMatrix::g_r(int r) const {
  if (r <= -n_sites || r >= n_sites)
    throw std::out_of_range("correlation offset outside the chain");
  return g_corr[static_cast<std::size_t>(r + n_sites - 1)];
}

CorrelationMatrix correlation_matrix(const ChainParams& params) {
  // validated locally: the correlation route works in O(N^2), so the
  // state-vector site cap does not apply (masks still bound N at 64)
  if (params.n_sites < 2)
    throw std::invalid_argument("n_sites must be at least 2");
  if (params.n_sites > 64)
    throw std::invalid_argument("n_sites beyond 64 exceeds the mask width");
  if (!std::isfinite(params.gamma) || params.gamma < 0.0)
    throw std::invalid_argument("gamma must be finite and nonnegative");
  if (!std::isfinite(params.g) || params.g < 0.0)
    throw std::invalid_argument("g must be finite and nonnegative");
  if (params.boundary != Boundary::periodic)
    throw std::invalid_argument(
        "the free-fermion construction covers periodic chains only");

  const int n = params.n_sites;
  CorrelationMatrix c;
  c.n_sites = n;
  c.gamma = params.gamma;
  c.g = params.g;
  c.g_corr.assign(2 * static_cast<std::size_t>(n) - 1, 0.0);

  for (int r = -(n - 1); r <= n - 1; ++r) {
    double sum = 0.0;
    for (int m = 0; m < n; ++m) {
      const double k = (2 * m + 1) * std::numbers::pi / n;
      const double eg = params.g - std::cos(k);
      const double sn = std::sin(k);
      const double w = std::hypot(eg, params.gamma * sn);
      if (w < 1e-12)
        throw std::runtime_error(
            "gapless momentum at these parameters; correlations undefined");
      sum += (std::cos(k * r) * eg - params.gamma * std::sin(k * r) * sn) / w;
    }
    c.g_corr[static_cast<std::size_t>(r + n - 1)] = sum / n;
  }

  c.majorana = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double val = c.g_r(a - b);
      c.majorana(2 * a, 2 * b + 1) = val;
      c.majorana(2 * b + 1, 2 * a) = -val;
    }
  }
  return c;
}

EntanglementSpectrum block_spectrum(const CorrelationMatrix& corr,
                                    const Bipartition& part) {
  part.validate();
  if (part.n_sites != corr.n_sites)
    throw std::invalid_argument("bipartition length does not match the chain");
  const int l = part.a_size;
  if (!ring_contiguous(part.a_mask, part.n_sites, l))
    throw std::invalid_argument(
        "free-fermion block spectra need a block contiguous on the ring");

  // correlations depend only on site separation, so any contiguous run of l
  // sites reduces to the same l x l Toeplitz slice
  Eigen::MatrixXd t(l, l);
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < l; ++b) t(a, b) = corr.g_r(a - b);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(t);
  std::vector<double> nu(static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j) {
    double v = svd.singularValues()[j];
    if (v > 1.0 + 1e-10)
      throw std::runtime_error("pair amplitude " + std::to_string(v) +
                               " above 1; correlations inconsistent");
    nu[static_cast<std::size_t>(j)] = std::min(v, 1.0);
  }

  // every mode contributes a factor (1 + nu)/2 or (1 - nu)/2; expand the
  // products, discarding branches that can no longer reach the cutoff
  std::vector<double> grow_bound(static_cast<std::size_t>(l) + 1, 1.0);
  for (int j = l - 1; j >= 0; --j)
    grow_bound[j] = grow_bound[j + 1] * (1.0 + nu[j]) / 2.0;
  const double lambda1 = grow_bound[0];
  const double cutoff = kPruneThreshold * lambda1;

  std::vector<double> partial{1.0};
  std::vector<double> next;
  for (int j = 0; j < l; ++j) {
    const double p_hi = (1.0 + nu[j]) / 2.0;
    const double p_lo = (1.0 - nu[j]) / 2.0;
    next.clear();
    next.reserve(2 * partial.size());
    for (double p : partial) {
      if (p * p_hi * grow_bound[j + 1] >= cutoff) next.push_back(p * p_hi);
      if (p * p_lo * grow_bound[j + 1] >= cutoff) next.push_back(p * p_lo);
    }
    if (next.size() > kMaxProducts)
      throw std::runtime_error(
          "block spectrum still above the product cap after pruning");
    partial.swap(next);
  }

  std::sort(partial.begin(), partial.end(), std::greater<>{});
  EntanglementSpectrum spec;
  spec.eigenvalues = std::move(partial);
  return spec;
}

}  // namespace xylocc
