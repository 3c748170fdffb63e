#pragma once

#include <vector>

#include "xylocc/signs.hpp"

namespace xylocc {

/// Thermodynamic-limit caricature of the reduced spectrum on the g < 1 side:
/// {0.5 + delta, 0.5 - epsilon} plus 2^n - 2 equal tail eigenvalues
/// (epsilon - delta)/(2^n - 2), with both gap parameters growing in g and
/// epsilon growing faster.
struct FerroSpectrumModel {
  double delta = 0.1;
  double epsilon = 0.2;
  double d_delta_dg = 0.1;
  double d_epsilon_dg = 0.5;
  int n = 6;

  /// Spectrum shape: 0 < delta <= epsilon < 0.5, tail below 0.5 - epsilon,
  /// n >= 2.
  void validate() const;
  /// Additionally 0 < d_delta_dg < d_epsilon_dg and delta < epsilon strictly,
  /// as the sign derivation requires.
  void validate_for_sign() const;
  /// Materialized eigenvalue list, descending (n <= 20).
  std::vector<double> eigenvalues() const;
};

/// g > 1 counterpart: {1 - delta' - epsilon', epsilon'} plus 2^n - 2 equal
/// tail eigenvalues delta'/(2^n - 2), all parameters shrinking in g.
struct ParaSpectrumModel {
  double delta_p = 0.1;
  double epsilon_p = 0.2;
  double d_delta_p_dg = -0.05;
  double d_epsilon_p_dg = -0.1;
  int n = 6;

  /// 0 < delta' < epsilon' < 0.5 with the eigenvalue ordering
  /// 1 - delta' - epsilon' > epsilon' > delta'/(2^n - 2).
  void validate() const;
  void validate_for_sign() const;  // + both derivatives strictly negative
  std::vector<double> eigenvalues() const;
};

/// Renyi entropy (bits) of the modeled spectrum, closed form. alpha > 0,
/// |alpha - 1| >= 1e-9.
double model_renyi(const FerroSpectrumModel& model, double alpha);
double model_renyi(const ParaSpectrumModel& model, double alpha);

/// Sign of dS_alpha/dg in the thermodynamic limit (tail -> 0): positive for
/// alpha < 1; for alpha > 1 the sign of
///   1/(1-alpha) [d_delta R^(alpha-1) - d_epsilon],  R = 1 + (eps+delta)/(0.5-eps),
/// which flips negative once alpha passes the root of the bracket.
DerivativeSign model_sign_ferro(const FerroSpectrumModel& model, double alpha);

/// alpha where the model_sign_ferro bracket crosses zero:
/// 1 + log(d_epsilon/d_delta) / log R. Always > 1 for a valid model.
double ferro_sign_change_alpha(const FerroSpectrumModel& model);

/// Sign of dS_alpha/dg for the g > 1 model: the factored form
///   alpha/(1-alpha) * { dd' [(r1)^(alpha-1) - 1] + de' [(r2)^(alpha-1) - 1] }
/// with r1 = delta'/((2^n-2)(1-delta'-epsilon')), r2 = epsilon'/(1-delta'-epsilon')
/// both inside (0,1), evaluated and classified (it works out negative for
/// every valid model and alpha > 0).
DerivativeSign model_sign_para(const ParaSpectrumModel& model, double alpha);

}  // namespace xylocc
