#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xylocc/eigensolve.hpp"
#include "xylocc/entanglement.hpp"

namespace xylocc {

struct TrajectoryPoint {
  double g;
  double lambda;
};

/// Which eigenvalue trajectory is being scanned and how to evaluate it.
struct TrajectoryContext {
  int k = 1;        // 1-based index into the descending spectrum
  double gamma = 1.0;
  int n_sites = 10;
  Bipartition part;
  SolveOptions solve;
};

struct TrajectoryMax {
  int k = 0;
  int n_sites = 0;
  double g_at_max = 0.0;
  double lambda_at_max = 0.0;
};

/// The interior grid maximum sat on the first or last grid point, so the true
/// peak may lie outside the scanned window.
class BoundaryMaxError : public std::runtime_error {
 public:
  BoundaryMaxError(const std::string& what, int n_sites)
      : std::runtime_error(what), n_sites_(n_sites) {}
  int n_sites() const { return n_sites_; }

 private:
  int n_sites_;
};

/// k-th largest entanglement eigenvalue of the ground state at field g.
double eigenvalue_at(const TrajectoryContext& ctx, double g);

namespace detail {
/// Location of the maximum of a unimodal function on [a, b], golden-section,
/// final bracket narrower than tol.
double golden_section_max(const std::function<double(double)>& f, double a,
                          double b, double tol);
}  // namespace detail

/// (g, lambda_k) along a g grid. Ties in the spectrum resolve by sorted
/// position.
std::vector<TrajectoryPoint> eigenvalue_trajectory(
    const TrajectoryContext& ctx, const std::vector<double>& g_grid);

/// Grid maximum refined by golden-section search on freshly evaluated
/// lambda_k(g) until the bracket is narrower than tol. Throws
/// BoundaryMaxError when the grid maximum is an endpoint.
TrajectoryMax find_trajectory_max(const TrajectoryContext& ctx,
                                  const std::vector<TrajectoryPoint>& trajectory,
                                  double tol = 1e-4);

struct ScalingFit {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double rms_residual = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  int iterations = 0;
};

struct FitPoint {
  double n;    // chain length
  double g_k;  // measured peak location
};

double fit_model(double n, double a, double b, double c);       // a e^(-n/b) + c
Eigen::Vector3d fit_model_jacobian(double n, double a, double b, double c);

/// Least squares for g_k(N) = a exp(-N/b) + c via Levenberg-style damped
/// Gauss-Newton. Needs >= 4 points with distinct N. Initial guess: c from the
/// largest N, a from the smallest, b = N range / 2. Converges on relative
/// step < 1e-10, capped at 200 iterations; a singular normal system throws
/// with a condition estimate.
ScalingFit fit_exponential(const std::vector<FitPoint>& points);

}  // namespace xylocc
