#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xylocc/model.hpp"

namespace xylocc {

enum class SectorPolicy { automatic, even, odd, full };
enum class SolverKind { automatic, dense, krylov };
enum class Parity { even, odd };

struct SolveOptions {
  SectorPolicy sector = SectorPolicy::automatic;
  SolverKind solver = SolverKind::automatic;
  int max_iterations = 500;
  double residual_tol = 1e-11;
  double degeneracy_tol = 1e-10;
  std::uint64_t seed = 20240813;  // Krylov start vector; fixed for reproducible runs
  std::string cache_dir;          // empty: fall back to XYLOCC_CACHE_DIR, else no cache
};

struct GroundStateResult {
  double energy = 0.0;
  double gap = 0.0;        // E1 - E0 of the solved spectrum (full spectrum under
                           // automatic/full policy, in-sector otherwise)
  bool degenerate = false; // gap below degeneracy_tol
  Parity parity = Parity::even;
  Eigen::VectorXd vector;  // unit-norm amplitudes, length 2^N
  Eigen::VectorXd partner; // second-lowest state, same convention
  SolverKind solver_used = SolverKind::dense;
  int iterations = 0;      // Krylov steps (0 for dense)
  bool from_cache = false;
};

/// Lowest eigenpair of H under the requested parity policy.
///
/// automatic solves both parity sectors and keeps the lower one; ties within
/// degeneracy_tol resolve to the even sector, whose state is the g -> 0+ limit
/// of the unique finite-chain ground state. Solver choice under
/// SolverKind::automatic: dense sector diagonalization for N <= 12, Krylov
/// (Lanczos, full reorthogonalization) on the parity-projected matrix-free
/// action for larger N.
///
/// Throws std::runtime_error when Krylov fails to reach residual_tol within
/// max_iterations (message carries the best residual).
GroundStateResult ground_state(const HamiltonianOperator& h,
                               const SolveOptions& opts = {});

/// k lowest eigenvalues of H over the full spectrum, ascending. k <= 8.
std::vector<double> low_spectrum(const HamiltonianOperator& h, int k,
                                 const SolveOptions& opts = {});

namespace detail {

/// Compressed basis of one parity sector: states lists the basis integers,
/// index_of maps a basis integer to its slot (-1 outside the sector).
struct SectorBasis {
  std::vector<std::uint32_t> states;
  std::vector<std::int32_t> index_of;
};

SectorBasis build_sector_basis(int n_sites, int parity);

}  // namespace detail

}  // namespace xylocc
