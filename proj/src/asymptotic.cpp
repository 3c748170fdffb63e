#include "xylocc/asymptotic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace xylocc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("alpha must be positive");
  if (std::abs(alpha - 1.0) < 1e-9)
    throw std::invalid_argument("alpha = 1 is excluded from the model forms");
}

double tail_count(int n) { return std::pow(2.0, n) - 2.0; }

}  // namespace

void FerroSpectrumModel::validate() const {
  require(n >= 2, "model needs n >= 2");
  require(std::isfinite(delta) && std::isfinite(epsilon),
          "model parameters must be finite");
  require(delta > 0.0 && delta <= epsilon && epsilon < 0.5,
          "need 0 < delta <= epsilon < 0.5");
  require(0.5 - epsilon > (epsilon - delta) / tail_count(n),
          "tail eigenvalue must stay below the second one");
}

void FerroSpectrumModel::validate_for_sign() const {
  validate();
  require(delta < epsilon, "sign analysis needs delta < epsilon strictly");
  require(d_delta_dg > 0.0 && d_delta_dg < d_epsilon_dg,
          "need 0 < d delta/dg < d epsilon/dg");
}

std::vector<double> FerroSpectrumModel::eigenvalues() const {
  validate();
  require(n <= 20, "eigenvalue list capped at n = 20");
  std::vector<double> vals;
  const auto count = static_cast<std::size_t>(1) << n;
  vals.reserve(count);
  vals.push_back(0.5 + delta);
  vals.push_back(0.5 - epsilon);
  const double tail = (epsilon - delta) / tail_count(n);
  for (std::size_t i = 2; i < count; ++i) vals.push_back(tail);
  return vals;
}

void ParaSpectrumModel::validate() const {
  require(n >= 2, "model needs n >= 2");
  require(std::isfinite(delta_p) && std::isfinite(epsilon_p),
          "model parameters must be finite");
  require(delta_p > 0.0 && delta_p < epsilon_p && epsilon_p < 0.5,
          "need 0 < delta' < epsilon' < 0.5");
  require(1.0 - delta_p - epsilon_p > epsilon_p,
          "largest model eigenvalue must exceed epsilon'");
}

void ParaSpectrumModel::validate_for_sign() const {
  validate();
  require(d_delta_p_dg < 0.0 && d_epsilon_p_dg < 0.0,
          "both derivatives must be negative");
}

std::vector<double> ParaSpectrumModel::eigenvalues() const {
  validate();
  require(n <= 20, "eigenvalue list capped at n = 20");
  std::vector<double> vals;
  const auto count = static_cast<std::size_t>(1) << n;
  vals.reserve(count);
  vals.push_back(1.0 - delta_p - epsilon_p);
  vals.push_back(epsilon_p);
  const double tail = delta_p / tail_count(n);
  for (std::size_t i = 2; i < count; ++i) vals.push_back(tail);
  return vals;
}

double model_renyi(const FerroSpectrumModel& model, double alpha) {
  model.validate();
  check_alpha(alpha);
  const double m = tail_count(model.n);
  const double tail = (model.epsilon - model.delta) / m;
  const double total = std::pow(0.5 + model.delta, alpha) +
                       std::pow(0.5 - model.epsilon, alpha) +
                       m * std::pow(tail, alpha);
  return std::log2(total) / (1.0 - alpha);
}

double model_renyi(const ParaSpectrumModel& model, double alpha) {
  model.validate();
  check_alpha(alpha);
  const double m = tail_count(model.n);
  const double total = std::pow(1.0 - model.delta_p - model.epsilon_p, alpha) +
                       std::pow(model.epsilon_p, alpha) +
                       m * std::pow(model.delta_p / m, alpha);
  return std::log2(total) / (1.0 - alpha);
}

DerivativeSign model_sign_ferro(const FerroSpectrumModel& model, double alpha) {
  model.validate_for_sign();
  check_alpha(alpha);

  if (alpha < 1.0) {
    // the tail term (eps - delta)/(2^n - 2) -> 0 dominates with exponent
    // alpha - 1 < 0, leaving alpha/((1-alpha)(eps-delta)) (de/dg - dd/dg)
    const double value = alpha / (1.0 - alpha) /
                         (model.epsilon - model.delta) *
                         (model.d_epsilon_dg - model.d_delta_dg);
    return classify_sign(value);
  }

  // the tail vanishes instead, leaving
  //   1/(1-alpha) [dd/dg R^(alpha-1) - de/dg],  R = 1 + (eps+delta)/(0.5-eps);
  // compared in logs so huge alpha cannot overflow
  const double r = 1.0 + (model.epsilon + model.delta) / (0.5 - model.epsilon);
  const double bracket_log =
      (alpha - 1.0) * std::log(r) -
      std::log(model.d_epsilon_dg / model.d_delta_dg);
  if (bracket_log == 0.0) return DerivativeSign::zero;
  // prefactor 1/(1-alpha) < 0 flips the bracket's sign
  return bracket_log > 0.0 ? DerivativeSign::negative
                           : DerivativeSign::positive;
}

double ferro_sign_change_alpha(const FerroSpectrumModel& model) {
  model.validate_for_sign();
  const double r = 1.0 + (model.epsilon + model.delta) / (0.5 - model.epsilon);
  return 1.0 + std::log(model.d_epsilon_dg / model.d_delta_dg) / std::log(r);
}

DerivativeSign model_sign_para(const ParaSpectrumModel& model, double alpha) {
  model.validate_for_sign();
  check_alpha(alpha);

  const double m = tail_count(model.n);
  const double lambda1 = 1.0 - model.delta_p - model.epsilon_p;
  const double r1 = model.delta_p / (m * lambda1);
  const double r2 = model.epsilon_p / lambda1;
  const double braces =
      model.d_delta_p_dg * (std::pow(r1, alpha - 1.0) - 1.0) +
      model.d_epsilon_p_dg * (std::pow(r2, alpha - 1.0) - 1.0);
  const double prefactor = alpha / (1.0 - alpha);
  // the remaining factor lambda1^(alpha-1)/normalization is positive
  return classify_sign(prefactor * braces);
}

}  // namespace xylocc
