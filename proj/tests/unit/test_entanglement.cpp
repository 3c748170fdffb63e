#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "oracle_dense.hpp"
#include "xylocc/entanglement.hpp"
#include "xylocc/grids.hpp"
#include "xylocc/model.hpp"

using xylocc::Bipartition;
using xylocc::EntanglementSpectrum;
using xylocc::entanglement_spectrum;
using xylocc::reduced_density_matrix;
using xylocc::renyi_curve;
using xylocc::renyi_entropy;

namespace {

Eigen::VectorXd random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  v.normalize();
  return v;
}

Eigen::VectorXd ground_vector(int n, double gamma, double g) {
  auto h = xylocc::build_hamiltonian({n, gamma, g});
  return test_oracle::dense_ground_vector(h.dense());
}

}  // namespace

TEST_CASE("product state reduces to rank one") {
  const int n = 6;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  psi[0] = 1.0;  // all spins down
  for (int l : {1, 3, 5}) {
    auto spec = entanglement_spectrum(psi, Bipartition::contiguous(n, l));
    CHECK(spec.largest() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i)
      CHECK(spec.eigenvalues[i] < 1e-14);
  }
}

TEST_CASE("cat state has a flat two-level spectrum") {
  const int n = 6;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  const double r = 1.0 / std::sqrt(2.0);
  psi[0] = r;
  psi[(Eigen::Index{1} << n) - 1] = r;
  for (int l : {1, 2, 4}) {
    auto spec = entanglement_spectrum(psi, Bipartition::contiguous(n, l));
    REQUIRE(spec.eigenvalues.size() >= 2);
    CHECK(spec.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(spec.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-14));
    for (std::size_t i = 2; i < spec.eigenvalues.size(); ++i)
      CHECK(spec.eigenvalues[i] < 1e-14);
  }
}

TEST_CASE("random four-site state matches a direct SVD") {
  auto psi = random_state(4, 99);
  auto part = Bipartition::contiguous(4, 2);
  auto spec = entanglement_spectrum(psi, part);

  // reshape by hand: row = sites {0,1}, col = sites {2,3}
  Eigen::MatrixXd amp(4, 4);
  for (std::uint64_t s = 0; s < 16; ++s)
    amp(static_cast<Eigen::Index>(s & 3), static_cast<Eigen::Index>(s >> 2)) =
        psi[static_cast<Eigen::Index>(s)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(amp);
  REQUIRE(spec.eigenvalues.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const double sv = svd.singularValues()[i];
    CHECK(spec.eigenvalues[static_cast<std::size_t>(i)] ==
          doctest::Approx(sv * sv).epsilon(1e-12));
  }
}

TEST_CASE("spectrum agrees with a brute-force partial trace") {
  auto psi = random_state(7, 1234);
  for (std::uint64_t mask : {std::uint64_t{0b0000111}, std::uint64_t{0b1010100},
                             std::uint64_t{0b1110111}}) {
    auto part = Bipartition::from_mask(7, mask);
    auto spec = entanglement_spectrum(psi, part);
    auto rho = test_oracle::brute_force_rdm(psi, 7, mask);
    auto ref = test_oracle::descending_eigenvalues(rho);
    REQUIRE(spec.eigenvalues.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(spec.eigenvalues[i] ==
            doctest::Approx(std::max(ref[i], 0.0)).epsilon(1e-10));
  }
}

TEST_CASE("both evaluation paths coincide across the cut position") {
  auto psi = random_state(8, 4321);
  for (int l = 1; l <= 7; ++l) {
    auto part = Bipartition::contiguous(8, l);
    auto from_state = entanglement_spectrum(psi, part);
    auto from_rho = entanglement_spectrum(reduced_density_matrix(psi, part));
    REQUIRE(from_state.eigenvalues.size() == from_rho.eigenvalues.size());
    for (std::size_t i = 0; i < from_rho.eigenvalues.size(); ++i)
      CHECK(from_state.eigenvalues[i] ==
            doctest::Approx(from_rho.eigenvalues[i]).epsilon(1e-11));
  }
}

TEST_CASE("complementary cuts share their nonzero spectrum") {
  auto psi = random_state(8, 777);
  for (int l : {2, 3}) {
    auto part = Bipartition::contiguous(8, l);
    auto a = entanglement_spectrum(psi, part);
    auto b = entanglement_spectrum(psi, part.complement());
    const std::size_t keep = a.eigenvalues.size();
    for (std::size_t i = 0; i < keep; ++i)
      CHECK(a.eigenvalues[i] ==
            doctest::Approx(b.eigenvalues[i]).epsilon(1e-10));
    for (std::size_t i = keep; i < b.eigenvalues.size(); ++i)
      CHECK(b.eigenvalues[i] < 1e-10);
  }
}

TEST_CASE("spectrum sums to one and descends") {
  auto psi = ground_vector(10, 1.0, 0.8);
  auto spec = entanglement_spectrum(psi, Bipartition::contiguous(10, 5));
  CHECK(spec.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i) {
    CHECK(spec.eigenvalues[i] <= spec.eigenvalues[i - 1]);
    CHECK(spec.eigenvalues[i] >= 0.0);
  }
}

TEST_CASE("half-chain extremes move monotonically with the field") {
  // coarse version of the eigenvalue-trajectory statement
  std::vector<double> l1, l2;
  for (double g : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    auto spec = entanglement_spectrum(ground_vector(10, 1.0, g),
                                      Bipartition::contiguous(10, 5));
    l1.push_back(spec.eigenvalues[0]);
    l2.push_back(spec.eigenvalues[1]);
  }
  for (std::size_t i = 1; i < l1.size(); ++i) {
    CHECK(l1[i] > l1[i - 1]);
    CHECK(l2[i] < l2[i - 1]);
  }
}

TEST_CASE("maximally mixed two-level input") {
  Eigen::MatrixXd rho = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  auto spec = entanglement_spectrum(rho);
  REQUIRE(spec.eigenvalues.size() == 2);
  CHECK(spec.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(spec.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("asymmetric or non-PSD matrices are rejected") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.3, 0.1, 0.5;
  CHECK_THROWS_AS(entanglement_spectrum(bad), std::invalid_argument);
  Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(2, 2);
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(entanglement_spectrum(neg), std::invalid_argument);
}

TEST_CASE("Renyi entropy closed-form points") {
  EntanglementSpectrum flat{{0.5, 0.5}};
  CHECK(renyi_entropy(flat, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(renyi_entropy(flat, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(renyi_entropy(flat, 0.5) == doctest::Approx(1.0).epsilon(1e-14));

  EntanglementSpectrum skew{{0.75, 0.25}};
  // direct evaluation of the defining formula at alpha = 2
  const double expect2 = -std::log2(0.75 * 0.75 + 0.25 * 0.25);
  CHECK(renyi_entropy(skew, 2.0) == doctest::Approx(expect2).epsilon(1e-14));
  const double expect_vn =
      -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(renyi_entropy(skew, 1.0) == doctest::Approx(expect_vn).epsilon(1e-13));
  CHECK(renyi_entropy(skew, 1.0 + 1e-9) ==
        doctest::Approx(expect_vn).epsilon(1e-7));
}

TEST_CASE("Renyi limits: min-entropy and log-rank") {
  EntanglementSpectrum spec{{0.6, 0.3, 0.1}};
  CHECK(renyi_entropy(spec, 1e6) ==
        doctest::Approx(-std::log2(0.6)).epsilon(1e-5));
  CHECK(renyi_entropy(spec, 1e-6) ==
        doctest::Approx(std::log2(3.0)).epsilon(1e-4));
}

TEST_CASE("Renyi entropy decreases with alpha") {
  auto psi = ground_vector(10, 1.0, 0.9);
  auto spec = entanglement_spectrum(psi, Bipartition::contiguous(10, 5));
  auto alphas = xylocc::default_alpha_grid();
  double prev = renyi_entropy(spec, alphas.front());
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    const double cur = renyi_entropy(spec, alphas[i]);
    CHECK(cur <= prev + 1e-10);
    prev = cur;
  }
}

TEST_CASE("renyi_curve matches pointwise evaluation") {
  auto psi = ground_vector(8, 0.6, 0.7);
  auto part = Bipartition::contiguous(8, 4);
  std::vector<double> alphas{0.1, 0.5, 1.0, 2.0, 10.0};
  auto curve = renyi_curve(psi, part, alphas);
  auto spec = entanglement_spectrum(psi, part);
  REQUIRE(curve.values.size() == alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i)
    CHECK(curve.values[i] ==
          doctest::Approx(renyi_entropy(spec, alphas[i])).epsilon(1e-13));
}

TEST_CASE("near-polarized chain carries almost no entropy for alpha >= 1") {
  // below alpha = 1 the entropy climbs toward log2 of the effective rank
  // (2.58 bits here), so the near-zero statement holds on [1, inf) only
  auto psi = ground_vector(10, 1.0, 10.0);
  auto part = Bipartition::contiguous(10, 5);
  auto curve = renyi_curve(psi, part, xylocc::default_alpha_grid());
  auto spec = entanglement_spectrum(psi, part);
  for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
    CHECK(curve.values[i] >= 0.0);
    if (curve.alphas[i] >= 1.0) CHECK(curve.values[i] < 0.05);
  }
  CHECK(renyi_entropy(spec, 0.5) > 0.05);
}

TEST_CASE("cat state gives the constant unit curve") {
  const int n = 8;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  const double r = 1.0 / std::sqrt(2.0);
  psi[0] = r;
  psi[(Eigen::Index{1} << n) - 1] = r;
  auto curve =
      renyi_curve(psi, Bipartition::contiguous(n, 4), {0.01, 0.5, 1, 2, 100});
  for (double v : curve.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("alpha=2 entropy equals the log purity") {
  auto psi = ground_vector(9, 0.8, 0.6);
  for (int l : {2, 4}) {
    auto part = Bipartition::contiguous(9, l);
    auto rho = reduced_density_matrix(psi, part);
    auto spec = entanglement_spectrum(rho);
    const double purity = (rho * rho).trace();
    CHECK(renyi_entropy(spec, 2.0) ==
          doctest::Approx(-std::log2(purity)).epsilon(1e-10));
  }
}

TEST_CASE("bipartition validation") {
  CHECK_THROWS_AS(Bipartition::contiguous(6, 0), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition::contiguous(6, 6), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition::from_mask(4, 0b10000), std::invalid_argument);
  CHECK_THROWS_AS(Bipartition::from_mask(4, 0), std::invalid_argument);
  auto part = Bipartition::contiguous(6, 2);
  CHECK(part.a_mask == 0b11);
  CHECK(part.b_mask() == 0b111100);
  CHECK(part.complement().a_mask == 0b111100);
  auto psi = random_state(5, 1);
  CHECK_THROWS_AS(entanglement_spectrum(psi, Bipartition::contiguous(6, 2)),
                  std::invalid_argument);
}
