#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace xylocc {

/// Split of the chain into Alice's sites (set bits of a_mask) and the rest.
struct Bipartition {
  int n_sites = 2;
  std::uint64_t a_mask = 1;
  int a_size = 1;  // popcount of a_mask

  /// Alice takes sites 0..l-1.
  static Bipartition contiguous(int n_sites, int l);
  static Bipartition from_mask(int n_sites, std::uint64_t mask);

  std::uint64_t b_mask() const;
  Bipartition complement() const;
  void validate() const;  // 1 <= a_size <= n_sites - 1, mask within range
};

/// Eigenvalues of a reduced density matrix, descending, clamped to >= 0,
/// summing to 1 for a unit input state.
struct EntanglementSpectrum {
  std::vector<double> eigenvalues;

  double largest() const { return eigenvalues.empty() ? 0.0 : eigenvalues[0]; }
  double sum() const;
};

struct RenyiCurve {
  std::vector<double> alphas;
  std::vector<double> values;  // bits
};

/// rho_A = Tr_B |psi><psi| via the mask-induced amplitude reshape and its
/// Gram matrix. 2^L x 2^L, symmetric PSD, unit trace for unit psi.
Eigen::MatrixXd reduced_density_matrix(const Eigen::VectorXd& state,
                                       const Bipartition& part);

/// Descending eigenvalues of a symmetric PSD matrix. Asymmetry beyond 1e-10
/// or eigenvalues below -1e-12 throw; negatives above that clamp to 0.
EntanglementSpectrum entanglement_spectrum(const Eigen::MatrixXd& rho);

/// Spectrum straight from the state: eigendecomposition of rho_A when Alice's
/// side is the smaller one, singular values of the amplitude reshape (squared,
/// zero-padded to 2^L) otherwise.
EntanglementSpectrum entanglement_spectrum(const Eigen::VectorXd& state,
                                           const Bipartition& part);

/// Renyi entropy in bits:
///   S_alpha = 1/(1-alpha) log2 sum_i lambda_i^alpha.
/// alpha within 1e-6 of 1 returns the von Neumann entropy; alpha > 1 factors
/// out lambda_1 before summing; alpha <= 1 drops eigenvalues below
/// 1e-12 * lambda_1 (the effective-rank cutoff).
double renyi_entropy(const EntanglementSpectrum& spec, double alpha);

/// renyi_entropy over a grid, one spectrum computation shared.
RenyiCurve renyi_curve(const Eigen::VectorXd& state, const Bipartition& part,
                       const std::vector<double>& alpha_grid);

}  // namespace xylocc
