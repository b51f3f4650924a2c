// Coefficient tables of multiphoton coherent states: eigenvectors of the
// m-th power annihilation operator restricted to one j sector, built from
// the closed-form recurrence solution with log-space magnitudes.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bgmcs/fock.hpp"

namespace bgmcs {

struct CoefficientEntry {
  int n = 0;      // superposition index
  int level = 0;  // Fock/spinor level m*n + j
  std::complex<double> coeff{};
};

struct CoefficientTable {
  ModelParams params;
  std::vector<CoefficientEntry> entries;  // contiguous n = 0..truncation_n
  double norm_const = 1.0;                // C_j, 1 until normalize() runs
  double tail_bound = 0.0;                // geometric bound on dropped |C|^2 mass
  int truncation_n = 0;
  bool normalized = false;
};

namespace detail {

// log |C_{m n + j} / C_j| for n >= 1.
//   m = 1 : sqrt(2^{1-d_{1n}} / n!) r^n / [f(n)]!
//   m >= 2: B_j [f(j)]! r^n / (sqrt((mn+j)!) [f(mn+j)]!)
// where B_j = sqrt(2) for j <= 1 and sqrt(j!) for j >= 2 (the j = 0 and
// j = 1 branches coincide because sqrt(2!) = sqrt(2)).
inline long double log_coeff_mag(const ModelParams& p, int n) {
  const long double log2l = std::log(2.0L);
  const long double log_r = std::log(static_cast<long double>(p.r()));
  if (p.m_order == 1) {
    const int level = n;
    const long double two_pow = (level == 1) ? 0.0L : 0.5L * log2l;
    return two_pow + static_cast<long double>(n) * log_r -
           0.5L * log_factorial_l(level) - p.weight.log_fact_l(level);
  }
  const int j = p.j_index;
  const int level = p.m_order * n + j;
  const long double log_b = (j <= 1) ? 0.5L * log2l : 0.5L * log_factorial_l(j);
  return log_b + p.weight.log_fact_l(j) + static_cast<long double>(n) * log_r -
         0.5L * log_factorial_l(level) - p.weight.log_fact_l(level);
}

}  // namespace detail

// Unnormalized coefficient table, C_j = 1. The tail stops at the first
// n >= 3 whose squared amplitude drops below tol^2 times the running total,
// i.e. at relative amplitude tol; the last retained amplitude is what the
// eigen residual of the truncated state ends up being.
inline CoefficientTable build_coefficients(const ModelParams& params) {
  params.validate();
  CoefficientTable table;
  table.params = params;
  const int m = params.m_order;
  const int j = params.j_index;
  table.entries.push_back({0, j, {1.0, 0.0}});
  if (params.r() == 0.0) return table;

  const double theta = params.theta();
  const double tol_sq = params.tol * params.tol;
  double running = 1.0;
  double prev_sq = 1.0;
  for (int n = 1;; ++n) {
    const int level = m * n + j;
    if (level > params.n_cap)
      throw truncation_error("build_coefficients: tail still above tolerance at n_cap");
    const double mag = static_cast<double>(std::exp(detail::log_coeff_mag(params, n)));
    table.entries.push_back({n, level, std::polar(mag, theta * static_cast<double>(n))});
    const double sq = mag * mag;
    if (n >= 3 && sq < tol_sq * running) {
      table.truncation_n = n;
      if (sq == 0.0 || prev_sq == 0.0) {
        table.tail_bound = 0.0;  // amplitudes underflowed, tail is identically zero
      } else {
        const double ratio = sq / prev_sq;
        if (!(ratio < 1.0))
          throw consistency_error("build_coefficients: tail not contracting at cutoff");
        table.tail_bound = sq * ratio / (1.0 - ratio);
      }
      break;
    }
    running += sq;
    prev_sq = sq;
  }
  return table;
}

// Scales all coefficients so their squared magnitudes sum to one and records
// the scale as norm_const (= C_j). Already-normalized tables pass through
// untouched, which keeps repeated normalization bitwise idempotent.
inline CoefficientTable normalize(CoefficientTable table) {
  if (table.normalized) return table;
  double sum = 0.0;
  for (const auto& e : table.entries) sum += std::norm(e.coeff);
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw consistency_error("normalize: coefficient norm is not positive finite");
  const double c_j = 1.0 / std::sqrt(sum);
  for (auto& e : table.entries) e.coeff *= c_j;
  table.norm_const *= c_j;
  table.tail_bound *= c_j * c_j;
  table.normalized = true;
  return table;
}

inline SpinorState assemble_state(const CoefficientTable& table) {
  if (!table.normalized)
    throw std::invalid_argument("assemble_state: table must be normalized");
  SpinorState state;
  state.terms.reserve(table.entries.size());
  for (const auto& e : table.entries) state.terms.push_back({e.level, e.coeff});
  state.normalized = true;
  return state;
}

// || A_g^- psi - alpha psi || / (|alpha| ||psi||) over the coefficient vector;
// for alpha = 0 the absolute residual || A_g^- psi || is returned instead.
inline double eigen_residual(const SpinorState& state, const ModelParams& params) {
  const SpinorState applied = annihilate_power(state, params.m_order, params.weight);
  const std::complex<double> alpha = params.alpha;
  double diff_sq = 0.0;
  std::size_t i = 0, k = 0;
  while (i < applied.terms.size() || k < state.terms.size()) {
    std::complex<double> got{}, want{};
    const int sentinel = std::numeric_limits<int>::max();
    const int level_a = (i < applied.terms.size()) ? applied.terms[i].level : sentinel;
    const int level_s = (k < state.terms.size()) ? state.terms[k].level : sentinel;
    if (level_a <= level_s) got = applied.terms[i++].amplitude;
    if (level_s <= level_a) want = alpha * state.terms[k++].amplitude;
    diff_sq += std::norm(got - want);
  }
  const double denom = std::abs(alpha) * std::sqrt(state.norm_sq());
  if (denom == 0.0) return std::sqrt(diff_sq);
  return std::sqrt(diff_sq) / denom;
}

}  // namespace bgmcs
