// Time evolution on the level ladder: phase rotation of assembled states,
// autocorrelation series, spectral-gap period estimates and revival peaks.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bgmcs/fock.hpp"
#include "bgmcs/states.hpp"
#include "bgmcs/observables.hpp"

namespace bgmcs {

inline std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> ts(static_cast<std::size_t>(points));
  const double step = (hi - lo) / (points - 1.0);
  for (int i = 0; i < points; ++i) ts[static_cast<std::size_t>(i)] = lo + step * i;
  return ts;
}

// Phase-rotates a state by e^{-i E_n t}; unitary, so norms survive.
inline SpinorState evolve(const SpinorState& state, double omega_c, double t) {
  SpinorState out = state;
  for (auto& term : out.terms) {
    const double e = energy_level(term.level, omega_c);
    term.amplitude *= std::exp(std::complex<double>(0.0, -e * t));
  }
  return out;
}

inline SpinorState evolve(const CoefficientTable& table, double t) {
  return evolve(assemble_state(table), table.params.omega_c, t);
}

struct AutocorrSeries {
  std::vector<double> t;
  std::vector<std::complex<double>> c;  // <psi(0)|psi(t)>
};

// C(t) = sum_n |c_n|^2 e^{-i E_n t}; |C|^2 is the fidelity to the initial state.
inline AutocorrSeries autocorrelation(const CoefficientTable& table,
                                      const std::vector<double>& ts) {
  if (!table.normalized)
    throw std::invalid_argument("autocorrelation: table must be normalized");
  AutocorrSeries series;
  series.t = ts;
  series.c.reserve(ts.size());
  std::vector<double> weight(table.entries.size());
  std::vector<double> energy(table.entries.size());
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    weight[i] = std::norm(table.entries[i].coeff);
    energy[i] = energy_level(table.entries[i].level, table.params.omega_c);
  }
  for (const double t : ts) {
    std::complex<double> c{};
    for (std::size_t i = 0; i < weight.size(); ++i)
      c += weight[i] * std::exp(std::complex<double>(0.0, -energy[i] * t));
    series.c.push_back(c);
  }
  return series;
}

struct SpectralPeriod {
  double tau = 0.0;        // 2 pi / (E_high - E_low)
  int level_low = 0;
  int level_high = 0;
  double mean_energy = 0.0;
};

// Finds the sector gap straddling <H>: the unique n with
// E_{mn+j} < <H> < E_{m(n+1)+j}. A mean energy landing on a ladder level
// (alpha = 0 does this) leaves no strict bracket and is reported as such.
inline SpectralPeriod spectral_period(const CoefficientTable& table) {
  if (!table.normalized)
    throw std::invalid_argument("spectral_period: table must be normalized");
  const ModelParams& p = table.params;
  const double h = mean_energy(table, CrossCheck::off);
  for (int n = 0;; ++n) {
    const int lo_level = p.m_order * n + p.j_index;
    const int hi_level = lo_level + p.m_order;
    const double lo = energy_level(lo_level, p.omega_c);
    const double hi = energy_level(hi_level, p.omega_c);
    if (lo < h && h < hi) {
      SpectralPeriod out;
      out.tau = 2.0 * kPi / (hi - lo);
      out.level_low = lo_level;
      out.level_high = hi_level;
      out.mean_energy = h;
      return out;
    }
    if (lo >= h)
      throw degenerate_bracket_error(
          "spectral_period: mean energy sits on the level ladder, no strict bracket");
    if (lo_level > p.n_cap)
      throw degenerate_bracket_error(
          "spectral_period: mean energy above every capped ladder gap");
  }
}

// Exact long-time recurrence of the phase pattern: tau = 2 pi / (m omega_c).
inline double revival_period(const ModelParams& params) {
  return 2.0 * kPi / (params.m_order * params.omega_c);
}

namespace detail {

// Vertex of the parabola through three samples; falls back to the middle
// point when the triple is degenerate.
inline double parabola_vertex(double t0, double v0, double t1, double v1, double t2,
                              double v2) {
  const double d01 = t1 - t0;
  const double d12 = t2 - t1;
  const double num = (v0 - v1) * d12 * d12 - (v2 - v1) * d01 * d01;
  const double den = (v0 - v1) * d12 + (v2 - v1) * d01;
  if (den == 0.0) return t1;
  return t1 + 0.5 * num / den;
}

}  // namespace detail

// Interior local maxima of |C(t)|^2 above `threshold`, refined by a
// three-point parabola fit. Times come back sorted and strictly inside
// the sampled window.
inline std::vector<double> revival_times(const AutocorrSeries& series,
                                         double threshold = 0.9) {
  if (series.t.size() != series.c.size())
    throw std::invalid_argument("revival_times: ragged series");
  std::vector<double> peaks;
  if (series.t.size() < 3) return peaks;
  std::vector<double> fidelity(series.t.size());
  for (std::size_t i = 0; i < series.c.size(); ++i) fidelity[i] = std::norm(series.c[i]);
  for (std::size_t i = 1; i + 1 < fidelity.size(); ++i) {
    if (fidelity[i] <= threshold) continue;
    if (fidelity[i] > fidelity[i - 1] && fidelity[i] > fidelity[i + 1])
      peaks.push_back(detail::parabola_vertex(series.t[i - 1], fidelity[i - 1], series.t[i],
                                              fidelity[i], series.t[i + 1], fidelity[i + 1]));
  }
  return peaks;
}

}  // namespace bgmcs
