#pragma once

#include <vector>

#include <Eigen/Dense>

#include "xylocc/entanglement.hpp"
#include "xylocc/model.hpp"

namespace xylocc {

/// Ground-state two-point functions of the periodic XY chain after the
/// Jordan-Wigner map, restricted to the even-parity (antiperiodic fermion)
/// sector. G_r is the Toeplitz coefficient of the Majorana cross block;
/// G_0 equals <sigma^z>.
struct CorrelationMatrix {
  int n_sites = 0;
  double gamma = 1.0;
  double g = 0.0;
  std::vector<double> g_corr;  // G_r for r in [-(N-1), N-1], index r + N - 1
  Eigen::MatrixXd majorana;    // 2N x 2N real antisymmetric

  double g_r(int r) const;
  double sigma_z_expectation() const { return g_r(0); }
};

/// Builds the correlation data from the antiperiodic momenta
/// k = (2m+1) pi / N:
///   G_r = (1/N) sum_k [cos(kr)(g - cos k) - gamma sin(kr) sin k] / w_k,
///   w_k = sqrt((g - cos k)^2 + gamma^2 sin^2 k).
/// Periodic chains only.
CorrelationMatrix correlation_matrix(const ChainParams& params);

/// Reduced spectrum of a block of sites that is contiguous on the ring:
/// singular values nu_j of the L x L Toeplitz slice [G_(a-b)] give the
/// independent-mode occupancies, and the spectrum is every product of
/// (1 +- nu_j)/2, descending. Products bounded below 1e-16 * lambda_1 are
/// pruned, so for large L the returned list is shorter than 2^L.
/// Non-contiguous blocks throw.
EntanglementSpectrum block_spectrum(const CorrelationMatrix& corr,
                                    const Bipartition& part);

}  // namespace xylocc
