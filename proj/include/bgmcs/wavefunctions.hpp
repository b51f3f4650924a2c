// Position-space layer: harmonic oscillator eigenfunctions evaluated by the
// normalized three-term recurrence, and probability densities of assembled
// states on x grids. Densities come from squared amplitude sums, so every
// interference term is present by construction.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bgmcs/fock.hpp"
#include "bgmcs/states.hpp"

namespace bgmcs {

// Oscillator family psi_n(x) = (scale/pi)^{1/4} h_n(xi), xi = sqrt(scale)(x - center),
// with h_n the unit-norm Hermite functions. The guiding-center shift is
// center = -2k/omega_c and the length convention ties scale to omega_c.
struct OscillatorBasis {
  double center = 0.0;
  double scale = 1.0;
  int n_max = 0;
};

inline OscillatorBasis make_basis(const ModelParams& params, int n_max) {
  if (n_max < 0) throw std::invalid_argument("make_basis: n_max must be >= 0");
  OscillatorBasis b;
  b.center = -2.0 * params.wavenumber / params.omega_c;
  b.scale = params.omega_c;
  b.n_max = n_max;
  return b;
}

namespace detail {

// Fills out[0..n_top] with psi_n(x). Stable upward recurrence
//   psi_{n+1} = sqrt(2/(n+1)) xi psi_n - sqrt(n/(n+1)) psi_{n-1},
// Gaussian factor folded into psi_0 so no separate polynomial ever overflows.
inline void hermite_all(const OscillatorBasis& basis, int n_top, double x,
                        std::vector<double>& out) {
  const double xi = std::sqrt(basis.scale) * (x - basis.center);
  if (!std::isfinite(xi))
    throw std::domain_error("hermite_all: x outside representable range");
  out.assign(static_cast<std::size_t>(n_top) + 1, 0.0);
  out[0] = std::pow(basis.scale / kPi, 0.25) * std::exp(-0.5 * xi * xi);
  if (n_top >= 1) out[1] = std::sqrt(2.0) * xi * out[0];
  for (int n = 1; n < n_top; ++n)
    out[static_cast<std::size_t>(n) + 1] =
        std::sqrt(2.0 / (n + 1.0)) * xi * out[static_cast<std::size_t>(n)] -
        std::sqrt(n / (n + 1.0)) * out[static_cast<std::size_t>(n) - 1];
}

}  // namespace detail

inline double hermite_psi(const OscillatorBasis& basis, int n, double x) {
  if (n < 0) throw std::domain_error("hermite_psi: negative index");
  if (n > basis.n_max) throw std::domain_error("hermite_psi: index exceeds basis n_max");
  std::vector<double> vals;
  detail::hermite_all(basis, n, x, vals);
  return vals[static_cast<std::size_t>(n)];
}

// Uniform grid spanning center +- 8 sigma of the highest retained level.
inline std::vector<double> default_grid(const OscillatorBasis& basis, int points = 2001) {
  if (points < 2) throw std::invalid_argument("default_grid: need at least 2 points");
  const double half_width = 8.0 * std::sqrt((2.0 * basis.n_max + 1.0) / basis.scale);
  std::vector<double> xs(static_cast<std::size_t>(points));
  const double lo = basis.center - half_width;
  const double step = 2.0 * half_width / (points - 1.0);
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = lo + step * i;
  return xs;
}

struct DensityGrid {
  std::vector<double> x;
  std::vector<double> rho;
  double time = 0.0;
};

namespace detail {

// Shared accumulation over (level, amplitude) pairs; both the static and the
// evolved density funnel through here so the t = 0 evolved path reproduces
// the static one bit for bit.
inline DensityGrid density_impl(const std::vector<std::pair<int, std::complex<double>>>& amps,
                                const OscillatorBasis& basis, const std::vector<double>& xs,
                                double t) {
  int n_top = 0;
  for (const auto& [level, a] : amps) {
    if (level < 0) throw std::domain_error("density: negative level");
    if (level > n_top) n_top = level;
  }
  if (n_top > basis.n_max)
    throw std::invalid_argument("density: basis n_max below highest state level");
  DensityGrid grid;
  grid.x = xs;
  grid.rho.assign(xs.size(), 0.0);
  grid.time = t;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<double> psi;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    hermite_all(basis, n_top, xs[p], psi);
    std::complex<double> up{}, low{};
    for (const auto& [level, a] : amps) {
      if (level < 2) {
        low += a * psi[static_cast<std::size_t>(level)];
      } else {
        up += a * (inv_sqrt2 * psi[static_cast<std::size_t>(level) - 2]);
        low += a * (inv_sqrt2 * psi[static_cast<std::size_t>(level)]);
      }
    }
    grid.rho[p] = std::norm(up) + std::norm(low);
  }
  return grid;
}

inline std::vector<std::pair<int, std::complex<double>>> table_amplitudes(
    const CoefficientTable& table) {
  if (!table.normalized)
    throw std::invalid_argument("density: table must be normalized");
  std::vector<std::pair<int, std::complex<double>>> amps;
  amps.reserve(table.entries.size());
  for (const auto& e : table.entries) amps.emplace_back(e.level, e.coeff);
  return amps;
}

}  // namespace detail

// Stationary density |Psi(x)|^2 (both spinor components).
inline DensityGrid density(const CoefficientTable& table, const OscillatorBasis& basis,
                           const std::vector<double>& xs) {
  return detail::density_impl(detail::table_amplitudes(table), basis, xs, 0.0);
}

// Density of the time-evolved state; each level acquires e^{-i E_n t}.
inline DensityGrid density(const CoefficientTable& table, const OscillatorBasis& basis,
                           const std::vector<double>& xs, double t) {
  auto amps = detail::table_amplitudes(table);
  for (auto& [level, a] : amps) {
    const double e = energy_level(level, table.params.omega_c);
    a *= std::exp(std::complex<double>(0.0, -e * t));
  }
  return detail::density_impl(amps, basis, xs, t);
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("trapezoid: need matching arrays with >= 2 points");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

}  // namespace bgmcs
