#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xylocc/eigensolve.hpp"
#include "xylocc/entanglement.hpp"
#include "xylocc/model.hpp"
#include "xylocc/signs.hpp"

namespace xylocc {

/// Per-field-value outcome of scanning signs of dS_alpha/dg over all alpha:
/// a uniform sign means the move along g is locally simulable by LOCC in one
/// direction; mixed signs mean it is not.
enum class Verdict {
  convertible_increasing,  // all signs negative: raising g is the easy direction
  convertible_decreasing,  // all signs positive
  non_convertible,         // both signs present
  degenerate               // an endpoint solve hit a ground degeneracy
};

const char* to_string(Verdict verdict);

struct DerivativeOptions {
  double delta = 1e-4;           // central-difference half step
  double zero_threshold = 1e-8;  // |estimate| below this reports zero
  SolveOptions solve;
};

struct DerivativeResult {
  double value = 0.0;
  DerivativeSign sign = DerivativeSign::zero;
  bool degenerate = false;
};

/// [S_alpha(g+delta) - S_alpha(g-delta)] / (2 delta) from ground states at
/// both endpoint fields. params.g must allow g - delta >= 0.
DerivativeResult dS_dg(const ChainParams& params, const Bipartition& part,
                       double alpha, const DerivativeOptions& opts = {});

struct SignMap {
  double gamma = 1.0;
  Bipartition part;
  std::vector<double> g_grid;
  std::vector<double> alpha_grid;
  double delta = 1e-4;
  // row index = alpha, column index = g
  std::vector<DerivativeSign> signs;
  std::vector<double> derivatives;
  std::vector<Verdict> verdicts;            // one per g
  std::vector<double> alpha_pos_witness;    // NaN when the column has no positive
  std::vector<double> alpha_neg_witness;    // NaN when no negative
  std::vector<std::string> column_errors;   // empty string when the column is fine

  std::size_t index(std::size_t alpha_i, std::size_t g_i) const {
    return alpha_i * g_grid.size() + g_i;
  }
  DerivativeSign sign_at(std::size_t alpha_i, std::size_t g_i) const {
    return signs[index(alpha_i, g_i)];
  }
};

/// Sign grid over (alpha, g) for fixed gamma, plus per-g verdicts. The two
/// endpoint spectra of a column are computed once and reused across alpha.
/// Columns are independent and run on the worker pool; a solver failure marks
/// its column in column_errors instead of aborting the sweep.
SignMap sign_map(double gamma, const Bipartition& part,
                 const std::vector<double>& g_grid,
                 const std::vector<double>& alpha_grid,
                 const DerivativeOptions& opts = {});

struct Alpha0Result {
  double g = 0.0;
  std::optional<double> alpha0;
  std::pair<double, double> bracket{1.0, 100.0};
};

/// Bisection for the alpha where dS_dg changes sign, to relative width 1e-3.
/// No sign change across the bracket returns an empty alpha0.
Alpha0Result find_alpha0(const ChainParams& params, const Bipartition& part,
                         const DerivativeOptions& opts = {},
                         std::pair<double, double> alpha_bracket = {1.0,
                                                                    100.0});

struct PhaseDiagram {
  std::vector<double> gamma_grid;
  std::vector<double> g_grid;
  int n_sites = 0;
  int l = 0;
  // row index = gamma, column index = g
  std::vector<Verdict> verdicts;

  Verdict verdict_at(std::size_t gamma_i, std::size_t g_i) const {
    return verdicts[gamma_i * g_grid.size() + g_i];
  }
};

/// Verdict table over (gamma, g) with Alice = contiguous block of l sites.
PhaseDiagram phase_diagram(const std::vector<double>& gamma_grid,
                           const std::vector<double>& g_grid, int n_sites,
                           int l, const std::vector<double>& alpha_grid,
                           const DerivativeOptions& opts = {});

}  // namespace xylocc
