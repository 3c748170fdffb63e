#include "xylocc/model.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace xylocc {

void ChainParams::validate() const {
  if (n_sites < 2)
    throw std::invalid_argument("n_sites must be at least 2, got " +
                                std::to_string(n_sites));
  if (n_sites > kMaxSites)
    throw std::length_error("n_sites " + std::to_string(n_sites) +
                            " exceeds the supported maximum " +
                            std::to_string(kMaxSites));
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw std::invalid_argument("gamma must be finite and non-negative");
  if (!std::isfinite(g) || g < 0.0)
    throw std::invalid_argument("g must be finite and non-negative");
}

HamiltonianOperator::HamiltonianOperator(ChainParams params)
    : params_(params), dim_(std::size_t{1} << params.n_sites) {
  params_.validate();
}

double HamiltonianOperator::diagonal_entry(std::uint64_t s) const {
  const int n_up = std::popcount(s);
  return -params_.g * (2 * n_up - params_.n_sites);
}

int HamiltonianOperator::parity_sign(std::uint64_t s, int n_sites) {
  const int n_down = n_sites - std::popcount(s);
  return (n_down % 2 == 0) ? 1 : -1;
}

void HamiltonianOperator::apply(std::span<const double> x,
                                std::span<double> y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw std::invalid_argument("apply: vector length does not match 2^n_sites");

  const int n = params_.n_sites;
  const double g = params_.g;
  const double gamma = params_.gamma;
  const int n_bonds =
      (params_.boundary == Boundary::periodic) ? n : n - 1;

  for (std::uint64_t s = 0; s < dim_; ++s) {
    y[s] = -g * (2 * std::popcount(s) - n) * x[s];
  }

  // sx sx + sy sy parts: flipping bits (i, j) of s maps it to t, with
  // coefficient -1 when the two spins disagree and -gamma when they agree.
  for (int bond = 0; bond < n_bonds; ++bond) {
    const int i = bond;
    const int j = (bond + 1) % n;
    const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
    for (std::uint64_t s = 0; s < dim_; ++s) {
      const std::uint64_t t = s ^ mask;
      const bool aligned =
          ((s >> i) & 1) == ((s >> j) & 1);
      const double coeff = aligned ? -gamma : -1.0;
      y[t] += coeff * x[s];
    }
  }
}

Eigen::MatrixXd HamiltonianOperator::dense() const {
  if (params_.n_sites > kMaxDenseSites)
    throw std::length_error("dense() supports n_sites up to " +
                            std::to_string(kMaxDenseSites));
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd column(d);
  for (Eigen::Index s = 0; s < d; ++s) {
    basis[s] = 1.0;
    apply(std::span<const double>(basis.data(), dim_),
          std::span<double>(column.data(), dim_));
    h.col(s) = column;
    basis[s] = 0.0;
  }
  return h;
}

HamiltonianOperator build_hamiltonian(const ChainParams& params) {
  return HamiltonianOperator(params);
}

double aqc_schedule_to_g(double s) {
  if (!(s > 0.0) || s > 1.0)
    throw std::invalid_argument("schedule parameter s must lie in (0, 1]");
  return 2.0 * (1.0 - s) / s;
}

double aqc_schedule_to_g(long s_num, long s_den) {
  if (s_den <= 0 || s_num <= 0 || s_num > s_den)
    throw std::invalid_argument("schedule ratio must satisfy 0 < num <= den");
  return 2.0 * static_cast<double>(s_den - s_num) / static_cast<double>(s_num);
}

}  // namespace xylocc
