#include "xylocc/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xylocc/parallel.hpp"

namespace xylocc {

double eigenvalue_at(const TrajectoryContext& ctx, double g) {
  ctx.part.validate();
  if (ctx.k < 1 || ctx.k > (1 << ctx.part.a_size))
    throw std::invalid_argument("eigenvalue index k out of range");

  ChainParams params;
  params.n_sites = ctx.n_sites;
  params.gamma = ctx.gamma;
  params.g = g;
  const GroundStateResult gs = ground_state(build_hamiltonian(params), ctx.solve);
  const EntanglementSpectrum spec = entanglement_spectrum(gs.vector, ctx.part);
  return spec.eigenvalues[static_cast<std::size_t>(ctx.k - 1)];
}

std::vector<TrajectoryPoint> eigenvalue_trajectory(
    const TrajectoryContext& ctx, const std::vector<double>& g_grid) {
  if (g_grid.empty()) throw std::invalid_argument("empty g grid");
  std::vector<TrajectoryPoint> traj(g_grid.size());
  global_pool().parallel_for(g_grid.size(), [&](std::size_t i) {
    traj[i] = {g_grid[i], eigenvalue_at(ctx, g_grid[i])};
  });
  return traj;
}

namespace detail {

double golden_section_max(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

TrajectoryMax find_trajectory_max(const TrajectoryContext& ctx,
                                  const std::vector<TrajectoryPoint>& trajectory,
                                  double tol) {
  if (trajectory.size() < 3)
    throw std::invalid_argument("trajectory needs at least 3 points");

  std::size_t best = 0;
  for (std::size_t i = 1; i < trajectory.size(); ++i)
    if (trajectory[i].lambda > trajectory[best].lambda) best = i;
  if (best == 0 || best + 1 == trajectory.size())
    throw BoundaryMaxError(
        "trajectory maximum sits on the grid boundary at g = " +
            std::to_string(trajectory[best].g) + " (N = " +
            std::to_string(ctx.n_sites) + "); widen the g window",
        ctx.n_sites);

  TrajectoryMax out;
  out.k = ctx.k;
  out.n_sites = ctx.n_sites;
  out.g_at_max = detail::golden_section_max(
      [&](double g) { return eigenvalue_at(ctx, g); }, trajectory[best - 1].g,
      trajectory[best + 1].g, tol);
  out.lambda_at_max = eigenvalue_at(ctx, out.g_at_max);
  return out;
}

double fit_model(double n, double a, double b, double c) {
  return a * std::exp(-n / b) + c;
}

Eigen::Vector3d fit_model_jacobian(double n, double a, double b, double c) {
  (void)c;
  const double e = std::exp(-n / b);
  return {e, a * e * n / (b * b), 1.0};
}

ScalingFit fit_exponential(const std::vector<FitPoint>& points) {
  if (points.size() < 4)
    throw std::invalid_argument("fit needs at least 4 points");
  {
    std::vector<double> ns;
    for (const auto& p : points) ns.push_back(p.n);
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end())
      throw std::invalid_argument("fit needs distinct N values");
  }

  const auto [min_it, max_it] =
      std::minmax_element(points.begin(), points.end(),
                          [](const FitPoint& x, const FitPoint& y) {
                            return x.n < y.n;
                          });
  double c = max_it->g_k;
  double a = min_it->g_k - c;
  double b = std::max((max_it->n - min_it->n) / 2.0, 1e-3);

  const auto n_pts = static_cast<Eigen::Index>(points.size());
  auto residuals = [&](double pa, double pb, double pc) {
    Eigen::VectorXd r(n_pts);
    for (Eigen::Index i = 0; i < n_pts; ++i)
      r[i] = fit_model(points[i].n, pa, pb, pc) - points[i].g_k;
    return r;
  };

  Eigen::VectorXd r = residuals(a, b, c);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  int iter = 0;

  for (; iter < 200; ++iter) {
    Eigen::MatrixXd jac(n_pts, 3);
    for (Eigen::Index i = 0; i < n_pts; ++i)
      jac.row(i) = fit_model_jacobian(points[i].n, a, b, c).transpose();

    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r;

    Eigen::Matrix3d damped = jtj;
    for (int d = 0; d < 3; ++d)
      damped(d, d) += mu * std::max(jtj(d, d), 1e-12);

    const Eigen::LDLT<Eigen::Matrix3d> ldlt(damped);
    if (ldlt.info() != Eigen::Success) {
      const Eigen::JacobiSVD<Eigen::Matrix3d> svd(jtj);
      const double cond = svd.singularValues()[0] /
                          std::max(svd.singularValues()[2], 1e-300);
      throw std::runtime_error(
          "fit normal equations are singular (condition estimate " +
          std::to_string(cond) + ")");
    }
    const Eigen::Vector3d step = ldlt.solve(-jtr);

    const double na = a + step[0];
    const double nb = b + step[1];
    const double nc = c + step[2];
    const double step_scale =
        step.norm() / std::max(1.0, Eigen::Vector3d(a, b, c).norm());

    if (nb <= 0.0) {
      mu *= 3.0;
      if (mu > 1e12)
        throw std::runtime_error("fit diverged: decay scale pushed negative");
      continue;
    }

    const Eigen::VectorXd nr = residuals(na, nb, nc);
    const double ncost = nr.squaredNorm();
    if (ncost <= cost) {
      a = na;
      b = nb;
      c = nc;
      r = nr;
      cost = ncost;
      mu = std::max(mu * 0.3, 1e-12);
      if (step_scale < 1e-10) break;
    } else {
      mu *= 3.0;
      if (mu > 1e12) break;  // stuck in a flat valley; report where we are
    }
  }

  ScalingFit fit;
  fit.a = a;
  fit.b = b;
  fit.c = c;
  fit.iterations = iter;
  fit.rms_residual = std::sqrt(cost / static_cast<double>(n_pts));

  Eigen::MatrixXd jac(n_pts, 3);
  for (Eigen::Index i = 0; i < n_pts; ++i)
    jac.row(i) = fit_model_jacobian(points[i].n, a, b, c).transpose();
  const Eigen::Matrix3d jtj = jac.transpose() * jac;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  if (lu.isInvertible()) {
    const double dof = std::max<double>(1.0, static_cast<double>(n_pts) - 3.0);
    fit.covariance = lu.inverse() * (cost / dof);
  }
  return fit;
}

}  // namespace xylocc
