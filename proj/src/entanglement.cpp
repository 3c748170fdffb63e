#include "xylocc/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace xylocc {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kNegativeTol = 1e-12;
constexpr double kRankThreshold = 1e-12;  // relative to lambda_1, alpha <= 1

/// Compacts the bits of s selected by mask, preserving order.
std::uint64_t gather_bits(std::uint64_t s, std::uint64_t mask) {
  std::uint64_t out = 0;
  int pos = 0;
  while (mask) {
    const std::uint64_t low = mask & (~mask + 1);
    if (s & low) out |= std::uint64_t{1} << pos;
    ++pos;
    mask &= mask - 1;
  }
  return out;
}

/// Amplitudes reshaped to 2^L x 2^(N-L) under the mask-induced split.
Eigen::MatrixXd amplitude_matrix(const Eigen::VectorXd& state,
                                 const Bipartition& part) {
  const auto rows = Eigen::Index{1} << part.a_size;
  const auto cols = Eigen::Index{1} << (part.n_sites - part.a_size);
  const std::uint64_t bm = part.b_mask();
  const auto dim = static_cast<std::uint64_t>(state.size());
  Eigen::MatrixXd a(rows, cols);
  for (std::uint64_t s = 0; s < dim; ++s) {
    a(static_cast<Eigen::Index>(gather_bits(s, part.a_mask)),
      static_cast<Eigen::Index>(gather_bits(s, bm))) =
        state[static_cast<Eigen::Index>(s)];
  }
  return a;
}

void sort_descending_clamped(std::vector<double>& vals) {
  for (double& v : vals) {
    if (v < -kNegativeTol)
      throw std::invalid_argument(
          "density matrix is not positive semidefinite: eigenvalue " +
          std::to_string(v));
    if (v < 0.0) v = 0.0;
  }
  std::sort(vals.begin(), vals.end(), std::greater<>{});
}

}  // namespace

Bipartition Bipartition::contiguous(int n_sites, int l) {
  Bipartition p;
  p.n_sites = n_sites;
  p.a_size = l;
  p.a_mask = (l >= 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << l) - 1;
  p.validate();
  return p;
}

Bipartition Bipartition::from_mask(int n_sites, std::uint64_t mask) {
  Bipartition p;
  p.n_sites = n_sites;
  p.a_mask = mask;
  p.a_size = std::popcount(mask);
  p.validate();
  return p;
}

std::uint64_t Bipartition::b_mask() const {
  const std::uint64_t full = (n_sites >= 64)
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << n_sites) - 1;
  return full & ~a_mask;
}

Bipartition Bipartition::complement() const {
  return from_mask(n_sites, b_mask());
}

void Bipartition::validate() const {
  if (n_sites < 2) throw std::invalid_argument("bipartition needs n_sites >= 2");
  const std::uint64_t full = (n_sites >= 64)
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << n_sites) - 1;
  if (a_mask == 0 || (a_mask & ~full) != 0)
    throw std::invalid_argument("bipartition mask outside the chain");
  if (std::popcount(a_mask) != a_size)
    throw std::invalid_argument("bipartition size disagrees with its mask");
  if (a_size < 1 || a_size > n_sites - 1)
    throw std::invalid_argument("each party needs at least one site");
}

double EntanglementSpectrum::sum() const {
  double s = 0.0;
  for (double v : eigenvalues) s += v;
  return s;
}

Eigen::MatrixXd reduced_density_matrix(const Eigen::VectorXd& state,
                                       const Bipartition& part) {
  part.validate();
  if (state.size() != Eigen::Index{1} << part.n_sites)
    throw std::invalid_argument("state length does not match the bipartition");
  const Eigen::MatrixXd a = amplitude_matrix(state, part);
  return a * a.transpose();
}

EntanglementSpectrum entanglement_spectrum(const Eigen::MatrixXd& rho) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("density matrix must be square");
  const double asym = (rho - rho.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol)
    throw std::invalid_argument("density matrix asymmetry " +
                                std::to_string(asym) + " exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho,
                                                    Eigen::EigenvaluesOnly);
  EntanglementSpectrum spec;
  spec.eigenvalues.assign(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  sort_descending_clamped(spec.eigenvalues);
  return spec;
}

EntanglementSpectrum entanglement_spectrum(const Eigen::VectorXd& state,
                                           const Bipartition& part) {
  part.validate();
  if (state.size() != Eigen::Index{1} << part.n_sites)
    throw std::invalid_argument("state length does not match the bipartition");

  const int l = part.a_size;
  const int rest = part.n_sites - l;
  if (l <= rest) {
    return entanglement_spectrum(reduced_density_matrix(state, part));
  }

  // Alice holds the larger half: her nonzero eigenvalues are the squared
  // singular values of the reshape, padded with zeros up to 2^L.
  const Eigen::MatrixXd a = amplitude_matrix(state, part);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  EntanglementSpectrum spec;
  spec.eigenvalues.assign(static_cast<std::size_t>(Eigen::Index{1} << l), 0.0);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    spec.eigenvalues[static_cast<std::size_t>(i)] =
        svd.singularValues()[i] * svd.singularValues()[i];
  sort_descending_clamped(spec.eigenvalues);
  return spec;
}

double renyi_entropy(const EntanglementSpectrum& spec, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("Renyi order alpha must be positive");
  if (spec.eigenvalues.empty())
    throw std::invalid_argument("empty spectrum");
  const double lambda1 = spec.eigenvalues[0];
  if (!(lambda1 > 0.0))
    throw std::invalid_argument("spectrum has no positive eigenvalue");

  if (std::abs(alpha - 1.0) < 1e-6) {
    double s = 0.0;
    for (double v : spec.eigenvalues)
      if (v > 0.0) s -= v * std::log2(v);
    return s;
  }

  if (alpha > 1.0) {
    // factor out lambda_1 so the sum stays in [1, 2^L] with no underflow bias
    double sum = 0.0;
    for (double v : spec.eigenvalues) sum += std::pow(v / lambda1, alpha);
    return alpha / (1.0 - alpha) * std::log2(lambda1) +
           std::log2(sum) / (1.0 - alpha);
  }

  const double cutoff = kRankThreshold * lambda1;
  double sum = 0.0;
  for (double v : spec.eigenvalues)
    if (v >= cutoff) sum += std::pow(v, alpha);
  return std::log2(sum) / (1.0 - alpha);
}

RenyiCurve renyi_curve(const Eigen::VectorXd& state, const Bipartition& part,
                       const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty())
    throw std::invalid_argument("alpha grid must not be empty");
  const EntanglementSpectrum spec = entanglement_spectrum(state, part);
  RenyiCurve curve;
  curve.alphas = alpha_grid;
  curve.values.reserve(alpha_grid.size());
  for (double alpha : alpha_grid)
    curve.values.push_back(renyi_entropy(spec, alpha));
  return curve;
}

}  // namespace xylocc
