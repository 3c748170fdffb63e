#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "test_cache.hpp"
#include "xylocc/grids.hpp"
#include "xylocc/scaling.hpp"

using xylocc::Bipartition;
using xylocc::BoundaryMaxError;
using xylocc::FitPoint;
using xylocc::TrajectoryContext;
using xylocc::eigenvalue_at;
using xylocc::eigenvalue_trajectory;
using xylocc::find_trajectory_max;
using xylocc::fit_exponential;
using xylocc::fit_model;
using xylocc::fit_model_jacobian;

namespace {

TrajectoryContext half_chain_ctx(int k) {
  TrajectoryContext ctx;
  ctx.k = k;
  ctx.gamma = 1.0;
  ctx.n_sites = 10;
  ctx.part = Bipartition::contiguous(10, 5);
  ctx.solve.cache_dir = shared_cache_dir();
  return ctx;
}

}  // namespace

TEST_CASE("first two eigenvalue trajectories are monotonic") {
  auto grid = xylocc::linspace(0.1, 2.0, 20);
  auto up = eigenvalue_trajectory(half_chain_ctx(1), grid);
  auto down = eigenvalue_trajectory(half_chain_ctx(2), grid);
  REQUIRE(up.size() == grid.size());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(up[i].lambda > up[i - 1].lambda);
    CHECK(down[i].lambda < down[i - 1].lambda);
    CHECK(up[i].g == grid[i]);
  }
}

TEST_CASE("third eigenvalue peaks inside the window") {
  auto ctx = half_chain_ctx(3);
  auto grid = xylocc::linspace(0.5, 1.65, 24);
  auto traj = eigenvalue_trajectory(ctx, grid);
  auto max = find_trajectory_max(ctx, traj);
  CHECK(max.k == 3);
  CHECK(max.n_sites == 10);
  CHECK(max.g_at_max > 0.5);
  CHECK(max.g_at_max < 1.6);
  // peak location from the printed asymptotic formula at N=10
  CHECK(std::abs(max.g_at_max - 1.27) < 0.05);
  // local maximum up to refinement tolerance
  CHECK(eigenvalue_at(ctx, max.g_at_max - 1e-3) <=
        max.lambda_at_max + 1e-12);
  CHECK(eigenvalue_at(ctx, max.g_at_max + 1e-3) <=
        max.lambda_at_max + 1e-12);
}

TEST_CASE("fourth eigenvalue peaks just below the critical point") {
  auto ctx = half_chain_ctx(4);
  auto grid = xylocc::linspace(0.8, 1.2, 21);
  auto traj = eigenvalue_trajectory(ctx, grid);
  auto max = find_trajectory_max(ctx, traj);
  CHECK(std::abs(max.g_at_max - 0.986) < 0.05);
}

TEST_CASE("synthetic unimodal search lands on the known maximum") {
  const auto f = [](double g) { return -(g - 1.3) * (g - 1.3); };
  const double g = xylocc::detail::golden_section_max(f, 0.5, 2.0, 1e-4);
  CHECK(g == doctest::Approx(1.3).epsilon(1e-4));
}

TEST_CASE("monotone trajectories refuse a refined maximum") {
  auto ctx = half_chain_ctx(1);
  auto grid = xylocc::linspace(0.1, 2.0, 10);
  auto traj = eigenvalue_trajectory(ctx, grid);
  try {
    find_trajectory_max(ctx, traj);
    FAIL("expected BoundaryMaxError");
  } catch (const BoundaryMaxError& e) {
    CHECK(e.n_sites() == 10);
  }
}

TEST_CASE("trajectory input validation") {
  auto ctx = half_chain_ctx(1);
  CHECK_THROWS_AS(eigenvalue_trajectory(ctx, {}), std::invalid_argument);
  TrajectoryContext bad = ctx;
  bad.k = 0;
  CHECK_THROWS_AS(eigenvalue_at(bad, 1.0), std::invalid_argument);
  bad.k = 33;  // beyond 2^5
  CHECK_THROWS_AS(eigenvalue_at(bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      find_trajectory_max(ctx, {{0.5, 0.1}, {0.6, 0.2}}),
      std::invalid_argument);
}

TEST_CASE("exponential fit recovers exact model parameters") {
  struct Truth {
    double a, b, c;
  };
  for (auto truth : {Truth{0.495, 10.044, 1.09177},
                     Truth{-0.082, 5.527, 0.9996}}) {
    std::vector<FitPoint> points;
    for (int n = 6; n <= 16; n += 2)
      points.push_back({static_cast<double>(n),
                        fit_model(n, truth.a, truth.b, truth.c)});
    auto fit = fit_exponential(points);
    CHECK(fit.a == doctest::Approx(truth.a).epsilon(1e-6));
    CHECK(fit.b == doctest::Approx(truth.b).epsilon(1e-6));
    CHECK(fit.c == doctest::Approx(truth.c).epsilon(1e-6));
    CHECK(fit.rms_residual < 1e-8);
    CHECK(fit.b > 0.0);
  }
}

TEST_CASE("fit on noisy data satisfies first-order optimality") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 1e-3);
  std::vector<FitPoint> points;
  for (int n = 6; n <= 18; n += 2)
    points.push_back({static_cast<double>(n),
                      fit_model(n, 0.5, 9.0, 1.1) + noise(rng)});
  auto fit = fit_exponential(points);
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  for (const auto& p : points) {
    const double r = fit_model(p.n, fit.a, fit.b, fit.c) - p.g_k;
    grad += r * fit_model_jacobian(p.n, fit.a, fit.b, fit.c);
  }
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(fit.rms_residual < 5e-3);
}

TEST_CASE("model jacobian matches central differences") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> adist(-0.6, 0.6);
  std::uniform_real_distribution<double> bdist(3.0, 15.0);
  std::uniform_real_distribution<double> cdist(0.8, 1.2);
  std::uniform_real_distribution<double> ndist(4.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = adist(rng);
    const double b = bdist(rng);
    const double c = cdist(rng);
    const double n = ndist(rng);
    const auto jac = fit_model_jacobian(n, a, b, c);
    const double h = 1e-6;
    const Eigen::Vector3d fd{
        (fit_model(n, a + h, b, c) - fit_model(n, a - h, b, c)) / (2 * h),
        (fit_model(n, a, b + h, c) - fit_model(n, a, b - h, c)) / (2 * h),
        (fit_model(n, a, b, c + h) - fit_model(n, a, b, c - h)) / (2 * h)};
    for (int i = 0; i < 3; ++i)
      CHECK(jac[i] ==
            doctest::Approx(fd[i]).epsilon(1e-6).scale(std::abs(fd[i]) + 1));
  }
}

TEST_CASE("fit input validation") {
  std::vector<FitPoint> few{{6, 1.2}, {8, 1.15}, {10, 1.12}};
  CHECK_THROWS_AS(fit_exponential(few), std::invalid_argument);
  std::vector<FitPoint> repeated{{6, 1.2}, {6, 1.2}, {6, 1.2}, {6, 1.2}};
  CHECK_THROWS_AS(fit_exponential(repeated), std::invalid_argument);
}
