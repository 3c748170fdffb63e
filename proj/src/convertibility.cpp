#include "xylocc/convertibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "xylocc/parallel.hpp"

namespace xylocc {

DerivativeSign classify_sign(double value, double zero_threshold) {
  if (std::abs(value) <= zero_threshold) return DerivativeSign::zero;
  return value > 0.0 ? DerivativeSign::positive : DerivativeSign::negative;
}

const char* to_string(DerivativeSign sign) {
  switch (sign) {
    case DerivativeSign::positive: return "positive";
    case DerivativeSign::negative: return "negative";
    case DerivativeSign::zero: return "zero";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::convertible_increasing: return "convertible_increasing";
    case Verdict::convertible_decreasing: return "convertible_decreasing";
    case Verdict::non_convertible: return "non_convertible";
    case Verdict::degenerate: return "degenerate";
  }
  return "?";
}

namespace {

struct ColumnSpectra {
  EntanglementSpectrum lo, hi;
  bool degenerate = false;
};

/// The two endpoint spectra behind every derivative at this g; computed once
/// per column, then shared by all alpha evaluations.
ColumnSpectra column_spectra(const ChainParams& params, const Bipartition& part,
                             const DerivativeOptions& opts) {
  if (params.g - opts.delta < 0.0)
    throw std::invalid_argument(
        "central difference needs g - delta >= 0, got g = " +
        std::to_string(params.g));
  ChainParams lo = params;
  lo.g = params.g - opts.delta;
  ChainParams hi = params;
  hi.g = params.g + opts.delta;

  const GroundStateResult gs_lo = ground_state(build_hamiltonian(lo), opts.solve);
  const GroundStateResult gs_hi = ground_state(build_hamiltonian(hi), opts.solve);

  ColumnSpectra out;
  out.degenerate = gs_lo.degenerate || gs_hi.degenerate;
  out.lo = entanglement_spectrum(gs_lo.vector, part);
  out.hi = entanglement_spectrum(gs_hi.vector, part);
  return out;
}

double column_derivative(const ColumnSpectra& col, double alpha, double delta) {
  return (renyi_entropy(col.hi, alpha) - renyi_entropy(col.lo, alpha)) /
         (2.0 * delta);
}

}  // namespace

DerivativeResult dS_dg(const ChainParams& params, const Bipartition& part,
                       double alpha, const DerivativeOptions& opts) {
  const ColumnSpectra col = column_spectra(params, part, opts);
  DerivativeResult res;
  res.value = column_derivative(col, alpha, opts.delta);
  res.sign = classify_sign(res.value, opts.zero_threshold);
  res.degenerate = col.degenerate;
  return res;
}

SignMap sign_map(double gamma, const Bipartition& part,
                 const std::vector<double>& g_grid,
                 const std::vector<double>& alpha_grid,
                 const DerivativeOptions& opts) {
  part.validate();
  if (g_grid.empty() || alpha_grid.empty())
    throw std::invalid_argument("sign_map needs nonempty grids");
  for (double alpha : alpha_grid)
    if (!(alpha > 0.0))
      throw std::invalid_argument("alpha grid entries must be positive");
  for (double g : g_grid)
    if (g - opts.delta < 0.0)
      throw std::invalid_argument("every g must be at least delta");

  const std::size_t n_g = g_grid.size();
  const std::size_t n_a = alpha_grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SignMap map;
  map.gamma = gamma;
  map.part = part;
  map.g_grid = g_grid;
  map.alpha_grid = alpha_grid;
  map.delta = opts.delta;
  map.signs.assign(n_a * n_g, DerivativeSign::zero);
  map.derivatives.assign(n_a * n_g, 0.0);
  map.verdicts.assign(n_g, Verdict::degenerate);
  map.alpha_pos_witness.assign(n_g, nan);
  map.alpha_neg_witness.assign(n_g, nan);
  map.column_errors.assign(n_g, std::string{});

  global_pool().parallel_for(n_g, [&](std::size_t gi) {
    ChainParams params;
    params.n_sites = part.n_sites;
    params.gamma = gamma;
    params.g = g_grid[gi];

    ColumnSpectra col;
    try {
      col = column_spectra(params, part, opts);
    } catch (const std::exception& e) {
      map.column_errors[gi] = e.what();
      return;
    }

    bool has_pos = false, has_neg = false;
    double derivative_sum = 0.0;
    for (std::size_t ai = 0; ai < n_a; ++ai) {
      const double d = column_derivative(col, alpha_grid[ai], opts.delta);
      const DerivativeSign s = classify_sign(d, opts.zero_threshold);
      map.derivatives[map.index(ai, gi)] = d;
      map.signs[map.index(ai, gi)] = s;
      derivative_sum += d;
      if (s == DerivativeSign::positive && !has_pos) {
        has_pos = true;
        map.alpha_pos_witness[gi] = alpha_grid[ai];
      }
      if (s == DerivativeSign::negative && !has_neg) {
        has_neg = true;
        map.alpha_neg_witness[gi] = alpha_grid[ai];
      }
    }

    if (col.degenerate) {
      map.verdicts[gi] = Verdict::degenerate;
    } else if (has_pos && has_neg) {
      map.verdicts[gi] = Verdict::non_convertible;
    } else if (has_neg) {
      map.verdicts[gi] = Verdict::convertible_increasing;
    } else if (has_pos) {
      map.verdicts[gi] = Verdict::convertible_decreasing;
    } else {
      // every derivative inside the zero band: fall back to the summed drift
      map.verdicts[gi] = derivative_sum <= 0.0
                             ? Verdict::convertible_increasing
                             : Verdict::convertible_decreasing;
    }
  });

  return map;
}

Alpha0Result find_alpha0(const ChainParams& params, const Bipartition& part,
                         const DerivativeOptions& opts,
                         std::pair<double, double> alpha_bracket) {
  auto [lo, hi] = alpha_bracket;
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("alpha bracket must satisfy 0 < lo < hi");

  const ColumnSpectra col = column_spectra(params, part, opts);
  const auto value_at = [&](double alpha) {
    return column_derivative(col, alpha, opts.delta);
  };

  Alpha0Result res;
  res.g = params.g;
  res.bracket = alpha_bracket;

  const double f_lo = value_at(lo);
  const double f_hi = value_at(hi);
  if (f_lo == 0.0) {
    res.alpha0 = lo;
    return res;
  }
  if (f_hi == 0.0) {
    res.alpha0 = hi;
    return res;
  }
  if ((f_lo > 0.0) == (f_hi > 0.0)) return res;  // no crossing in bracket

  const bool lo_positive = f_lo > 0.0;
  while (hi - lo > 1e-3 * 0.5 * (hi + lo)) {
    const double mid = std::sqrt(lo * hi);
    const double f_mid = value_at(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0.0) == lo_positive)
      lo = mid;
    else
      hi = mid;
  }
  res.alpha0 = std::sqrt(lo * hi);
  res.bracket = {lo, hi};
  return res;
}

PhaseDiagram phase_diagram(const std::vector<double>& gamma_grid,
                           const std::vector<double>& g_grid, int n_sites,
                           int l, const std::vector<double>& alpha_grid,
                           const DerivativeOptions& opts) {
  if (gamma_grid.empty()) throw std::invalid_argument("gamma grid is empty");
  const Bipartition part = Bipartition::contiguous(n_sites, l);

  PhaseDiagram diagram;
  diagram.gamma_grid = gamma_grid;
  diagram.g_grid = g_grid;
  diagram.n_sites = n_sites;
  diagram.l = l;
  diagram.verdicts.reserve(gamma_grid.size() * g_grid.size());

  for (double gamma : gamma_grid) {
    const SignMap map = sign_map(gamma, part, g_grid, alpha_grid, opts);
    diagram.verdicts.insert(diagram.verdicts.end(), map.verdicts.begin(),
                            map.verdicts.end());
  }
  return diagram;
}

}  // namespace xylocc
