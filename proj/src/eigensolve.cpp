#include "xylocc/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include <lapacke.h>

#include "cache.hpp"

namespace xylocc {

namespace detail {

SectorBasis build_sector_basis(int n_sites, int parity) {
  SectorBasis b;
  const std::size_t dim = std::size_t{1} << n_sites;
  b.index_of.assign(dim, -1);
  b.states.reserve(dim / 2);
  for (std::size_t s = 0; s < dim; ++s) {
    if (HamiltonianOperator::parity_sign(s, n_sites) == parity) {
      b.index_of[s] = static_cast<std::int32_t>(b.states.size());
      b.states.push_back(static_cast<std::uint32_t>(s));
    }
  }
  return b;
}

}  // namespace detail

namespace {

constexpr int kDenseAutoMax = 12;

using ApplyFn = std::function<void(const double*, double*)>;

struct LowestPairs {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // dim x values.size()
  int iterations = 0;
};

LowestPairs lapack_lowest(Eigen::MatrixXd& a, int k) {
  const auto n = static_cast<lapack_int>(a.rows());
  k = std::min<int>(k, static_cast<int>(n));
  LowestPairs out;
  out.values.assign(n, 0.0);
  out.vectors.resize(n, k);
  std::vector<lapack_int> isuppz(2 * std::max(1, k));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, k,
      LAPACKE_dlamch('S'), &m, out.values.data(), out.vectors.data(), n,
      isuppz.data());
  if (info != 0)
    throw std::runtime_error("dense eigensolver failed, info=" +
                             std::to_string(info));
  out.values.resize(m);
  return out;
}

Eigen::MatrixXd sector_matrix(const HamiltonianOperator& h,
                              const detail::SectorBasis& basis) {
  const auto& p = h.params();
  const int n = p.n_sites;
  const int n_bonds = (p.boundary == Boundary::periodic) ? n : n - 1;
  const auto dim = static_cast<Eigen::Index>(basis.states.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const std::uint64_t s = basis.states[a];
    m(a, a) += h.diagonal_entry(s);
    for (int bond = 0; bond < n_bonds; ++bond) {
      const int i = bond;
      const int j = (bond + 1) % n;
      const std::uint64_t mask =
          (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
      const std::uint64_t t = s ^ mask;
      const bool aligned = ((s >> i) & 1) == ((s >> j) & 1);
      m(basis.index_of[t], a) += aligned ? -p.gamma : -1.0;
    }
  }
  return m;
}

ApplyFn sector_apply(const HamiltonianOperator& h,
                     const detail::SectorBasis& basis) {
  const auto& p = h.params();
  const int n = p.n_sites;
  const int n_bonds = (p.boundary == Boundary::periodic) ? n : n - 1;
  const double gamma = p.gamma;
  return [&h, &basis, n, n_bonds, gamma](const double* x, double* y) {
    const std::size_t dim = basis.states.size();
    for (std::size_t a = 0; a < dim; ++a)
      y[a] = h.diagonal_entry(basis.states[a]) * x[a];
    for (int bond = 0; bond < n_bonds; ++bond) {
      const int i = bond;
      const int j = (bond + 1) % n;
      const std::uint64_t mask =
          (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
      for (std::size_t a = 0; a < dim; ++a) {
        const std::uint64_t s = basis.states[a];
        const bool aligned = ((s >> i) & 1) == ((s >> j) & 1);
        y[basis.index_of[s ^ mask]] += (aligned ? -gamma : -1.0) * x[a];
      }
    }
  };
}

/// Lanczos with full reorthogonalization. Converges when the k lowest Ritz
/// pairs reach residual_tol * max(1, |theta|); throws after max_iterations
/// with the best residual seen.
LowestPairs lanczos_lowest(const ApplyFn& apply, std::size_t dim, int k,
                           const SolveOptions& opts) {
  k = std::min<int>(k, static_cast<int>(dim));
  const int max_iter =
      std::min<int>(opts.max_iterations, static_cast<int>(dim));

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;

  std::vector<Eigen::VectorXd> basis;
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  v.normalize();
  basis.push_back(v);

  std::vector<double> alpha, beta;
  Eigen::VectorXd w(dim);
  double best_residual = std::numeric_limits<double>::infinity();

  auto reorthogonalize = [&](Eigen::VectorXd& u) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) u -= q.dot(u) * q;
  };

  for (int j = 0; j < max_iter; ++j) {
    apply(basis[j].data(), w.data());
    const double a_j = basis[j].dot(w);
    alpha.push_back(a_j);
    w -= a_j * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    reorthogonalize(w);
    const double b_j = w.norm();

    if (j + 1 >= k) {
      Eigen::Map<const Eigen::VectorXd> diag(alpha.data(), j + 1);
      Eigen::VectorXd sub(j);
      for (int m = 0; m < j; ++m) sub[m] = beta[m];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto& theta = es.eigenvalues();
      const auto& s = es.eigenvectors();

      double worst = 0.0;
      for (int i = 0; i < k; ++i) {
        const double resid = b_j * std::abs(s(j, i));
        const double scale = std::max(1.0, std::abs(theta[i]));
        worst = std::max(worst, resid / scale);
      }
      best_residual = std::min(best_residual, worst);

      if (worst <= opts.residual_tol || b_j < 1e-13) {
        LowestPairs out;
        out.values.assign(theta.data(), theta.data() + k);
        out.vectors = Eigen::MatrixXd::Zero(dim, k);
        for (int i = 0; i < k; ++i) {
          for (int m = 0; m <= j; ++m)
            out.vectors.col(i) += s(m, i) * basis[m];
          out.vectors.col(i).normalize();
        }
        out.iterations = j + 1;
        return out;
      }
    }

    if (b_j < 1e-13) {
      // exhausted an invariant subspace; continue from a fresh direction
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = gauss(rng);
      reorthogonalize(w);
      const double fresh = w.norm();
      if (fresh < 1e-13) break;
      beta.push_back(0.0);
      basis.push_back(w / fresh);
    } else {
      beta.push_back(b_j);
      basis.push_back(w / b_j);
    }
  }

  throw std::runtime_error(
      "Krylov solver did not converge within " +
      std::to_string(opts.max_iterations) +
      " iterations; best relative residual " + std::to_string(best_residual));
}

SolverKind resolve_solver(const SolveOptions& opts, int n_sites) {
  if (opts.solver != SolverKind::automatic) return opts.solver;
  return n_sites <= kDenseAutoMax ? SolverKind::dense : SolverKind::krylov;
}

LowestPairs solve_sector(const HamiltonianOperator& h,
                         const detail::SectorBasis& basis, int k,
                         SolverKind solver, const SolveOptions& opts) {
  if (solver == SolverKind::dense) {
    if (h.params().n_sites > kMaxDenseSites)
      throw std::length_error("dense solver supports n_sites up to " +
                              std::to_string(kMaxDenseSites));
    Eigen::MatrixXd m = sector_matrix(h, basis);
    return lapack_lowest(m, k);
  }
  return lanczos_lowest(sector_apply(h, basis), basis.states.size(), k, opts);
}

Eigen::VectorXd scatter(const Eigen::VectorXd& compressed,
                        const detail::SectorBasis& basis, std::size_t dim) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (Eigen::Index a = 0; a < compressed.size(); ++a)
    full[basis.states[a]] = compressed[a];
  return full;
}

struct Candidate {
  double energy;
  Parity parity;
  Eigen::VectorXd vector;  // full-space
};

/// Two lowest levels of each parity sector, merged ascending. The global two
/// lowest always appear: every eigenstate lives in one sector.
std::vector<Candidate> merged_candidates(const HamiltonianOperator& h,
                                         SolverKind solver,
                                         const SolveOptions& opts,
                                         int per_sector, int* iterations) {
  const std::size_t dim = h.dimension();
  std::vector<Candidate> cand;
  for (const int parity : {+1, -1}) {
    const auto basis = detail::build_sector_basis(h.params().n_sites, parity);
    const auto pairs = solve_sector(h, basis, per_sector, solver, opts);
    if (iterations) *iterations += pairs.iterations;
    for (std::size_t i = 0; i < pairs.values.size(); ++i) {
      cand.push_back({pairs.values[i],
                      parity > 0 ? Parity::even : Parity::odd,
                      scatter(pairs.vectors.col(static_cast<Eigen::Index>(i)),
                              basis, dim)});
    }
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.energy < b.energy;
                   });
  return cand;
}

GroundStateResult solve_uncached(const HamiltonianOperator& h,
                                 const SolveOptions& opts,
                                 SolverKind solver) {
  GroundStateResult res;
  res.solver_used = solver;

  if (opts.sector == SectorPolicy::even || opts.sector == SectorPolicy::odd) {
    const int parity = (opts.sector == SectorPolicy::even) ? +1 : -1;
    const auto basis = detail::build_sector_basis(h.params().n_sites, parity);
    const auto pairs = solve_sector(h, basis, 2, solver, opts);
    res.energy = pairs.values[0];
    res.parity = parity > 0 ? Parity::even : Parity::odd;
    res.vector = scatter(pairs.vectors.col(0), basis, h.dimension());
    if (pairs.values.size() > 1) {
      res.gap = pairs.values[1] - pairs.values[0];
      res.partner = scatter(pairs.vectors.col(1), basis, h.dimension());
    }
    res.iterations = pairs.iterations;
  } else if (opts.sector == SectorPolicy::full) {
    if (solver == SolverKind::dense) {
      if (h.params().n_sites > kDenseAutoMax)
        throw std::length_error(
            "unprojected dense solve supports n_sites up to " +
            std::to_string(kDenseAutoMax));
      Eigen::MatrixXd m = h.dense();
      const auto pairs = lapack_lowest(m, 2);
      res.energy = pairs.values[0];
      res.vector = pairs.vectors.col(0);
      res.gap = pairs.values[1] - pairs.values[0];
      res.partner = pairs.vectors.col(1);
    } else {
      const ApplyFn apply = [&h](const double* x, double* y) {
        const std::size_t dim = h.dimension();
        h.apply(std::span<const double>(x, dim), std::span<double>(y, dim));
      };
      const auto pairs = lanczos_lowest(apply, h.dimension(), 2, opts);
      res.energy = pairs.values[0];
      res.vector = pairs.vectors.col(0);
      res.gap = pairs.values[1] - pairs.values[0];
      res.partner = pairs.vectors.col(1);
      res.iterations = pairs.iterations;
    }
    double parity_expectation = 0.0;
    for (Eigen::Index s = 0; s < res.vector.size(); ++s)
      parity_expectation += HamiltonianOperator::parity_sign(s,
                                h.params().n_sites) *
                            res.vector[s] * res.vector[s];
    res.parity = parity_expectation >= 0 ? Parity::even : Parity::odd;
  } else {
    auto cand = merged_candidates(h, solver, opts, 2, &res.iterations);
    // a cross-sector tie resolves to the even state (the g -> 0+ limit)
    if (cand.size() >= 2 &&
        cand[1].energy - cand[0].energy < opts.degeneracy_tol &&
        cand[0].parity == Parity::odd && cand[1].parity == Parity::even) {
      std::swap(cand[0], cand[1]);
    }
    res.energy = cand[0].energy;
    res.parity = cand[0].parity;
    res.vector = std::move(cand[0].vector);
    if (cand.size() >= 2) {
      res.gap = cand[1].energy - cand[0].energy;
      res.partner = std::move(cand[1].vector);
    }
  }

  res.degenerate = res.gap < opts.degeneracy_tol;
  return res;
}

}  // namespace

GroundStateResult ground_state(const HamiltonianOperator& h,
                               const SolveOptions& opts) {
  const SolverKind solver = resolve_solver(opts, h.params().n_sites);
  const std::string dir = cache::resolve_dir(opts.cache_dir);
  std::string key;
  if (!dir.empty()) {
    key = cache::key_for(h.params(), opts.sector, solver, opts);
    GroundStateResult cached;
    if (cache::load(dir, key, h.params(), cached)) return cached;
  }
  GroundStateResult res = solve_uncached(h, opts, solver);
  if (!dir.empty()) cache::store(dir, key, h.params(), res);
  return res;
}

std::vector<double> low_spectrum(const HamiltonianOperator& h, int k,
                                 const SolveOptions& opts) {
  if (k < 1 || k > 8)
    throw std::invalid_argument("low_spectrum supports 1 <= k <= 8");
  const SolverKind solver = resolve_solver(opts, h.params().n_sites);
  const auto cand = merged_candidates(h, solver, opts, k, nullptr);
  std::vector<double> out;
  out.reserve(std::min<std::size_t>(k, cand.size()));
  for (std::size_t i = 0; i < cand.size() && i < static_cast<std::size_t>(k);
       ++i)
    out.push_back(cand[i].energy);
  return out;
}

}  // namespace xylocc
