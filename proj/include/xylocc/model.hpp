#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace xylocc {

enum class Boundary { periodic, open };

/// Maximum chain length accepted by build_hamiltonian (2^24 amplitudes).
inline constexpr int kMaxSites = 24;

/// Chain lengths up to this bound may be materialized as a dense matrix.
inline constexpr int kMaxDenseSites = 14;

struct ChainParams {
  int n_sites = 2;
  double gamma = 1.0;  // anisotropy, >= 0; gamma = 1 is the transverse Ising chain
  double g = 0.0;      // transverse field, >= 0
  Boundary boundary = Boundary::periodic;

  /// Throws std::invalid_argument on non-finite or out-of-range fields,
  /// std::length_error when n_sites exceeds kMaxSites.
  void validate() const;
};

/// Matrix-free action of the XY chain
///   H = -sum_i [ (1+gamma)/2 sx_i sx_{i+1} + (1-gamma)/2 sy_i sy_{i+1} + g sz_i ].
///
/// Basis states are integers with bit i = spin i (site 0 = lowest bit,
/// set bit = spin up), so H is real symmetric. For a periodic chain the
/// site sum runs over i = 1..N literally; at N = 2 this traverses the single
/// bond twice and doubles its coupling.
class HamiltonianOperator {
 public:
  explicit HamiltonianOperator(ChainParams params);

  const ChainParams& params() const { return params_; }
  std::size_t dimension() const { return dim_; }

  /// y = H x. Reentrant; x and y must not alias.
  void apply(std::span<const double> x, std::span<double> y) const;

  /// <s|H|s>: the sz part, -g * (n_up - n_down).
  double diagonal_entry(std::uint64_t basis_state) const;

  /// Dense materialization; requires n_sites <= kMaxDenseSites.
  Eigen::MatrixXd dense() const;

  /// Global phase-flip parity of a basis state under prod_i sz_i:
  /// +1 when the number of down spins is even.
  static int parity_sign(std::uint64_t basis_state, int n_sites);

 private:
  ChainParams params_;
  std::size_t dim_;
};

HamiltonianOperator build_hamiltonian(const ChainParams& params);

/// Field of the Ising chain equivalent to the ring-2SAT annealing Hamiltonian
/// at schedule parameter s in (0, 1]: g = 2(1-s)/s. The interpolating
/// Hamiltonian equals the Ising chain at this g up to an additive constant,
/// an x<->z basis relabeling and an overall factor s/2; s = 2/3 lands on the
/// critical point g = 1.
double aqc_schedule_to_g(double s);

/// Exact-rational overload: s = s_num/s_den. Keeps g free of rounding when the
/// schedule parameter is a ratio of small integers (2/3 -> exactly 1).
double aqc_schedule_to_g(long s_num, long s_den);

}  // namespace xylocc
