// Fock-space building blocks for bilayer graphene Landau levels:
// number weights f(n), generalized factorials, eigenspinor energies,
// the m-th power annihilation action, and brute-force matrix elements.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgmcs {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr int kDefaultNCap = 256;
inline constexpr double kDefaultTol = 1e-14;

// Thrown when the coefficient tail fails to pass the tolerance test in time.
struct truncation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when two evaluation routes that must agree do not.
struct consistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when the mean energy sits on (or outside) the sector level ladder,
// so no strict spectral bracket exists.
struct degenerate_bracket_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// log(n!), exact integer factorial through 20!, lgamma beyond.
inline double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  static const std::array<double, 21> exact = [] {
    std::array<double, 21> t{};
    unsigned long long f = 1;
    for (int i = 1; i <= 20; ++i) {
      f *= static_cast<unsigned long long>(i);
      t[static_cast<std::size_t>(i)] = std::log(static_cast<double>(f));
    }
    return t;
  }();
  if (n <= 20) return exact[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

namespace detail {

// Extended-precision variant used inside coefficient construction, where a
// chain of log-space sums would otherwise eat into the last two digits.
inline long double log_factorial_l(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  static const std::array<long double, 21> exact = [] {
    std::array<long double, 21> t{};
    unsigned long long f = 1;
    for (int i = 1; i <= 20; ++i) {
      f *= static_cast<unsigned long long>(i);
      t[static_cast<std::size_t>(i)] = std::log(static_cast<long double>(f));
    }
    return t;
  }();
  if (n <= 20) return exact[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

}  // namespace detail

// E_n = omega_c * sqrt(n(n-1)); the two lowest levels are degenerate at zero.
inline double energy_level(int n, double omega_c) {
  if (n < 0) throw std::domain_error("energy_level: negative level");
  if (n < 2) return 0.0;
  return omega_c * std::sqrt(static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

// Number weight f(n) defining the deformed ladder, with the running
// generalized factorial [f(n)]! = f(1) f(2) ... f(n) kept in log space.
// A user table lists f(1)..f(K); beyond the table f(n) = 1, so the
// generalized factorial stays constant there.
class WeightFunction {
 public:
  static WeightFunction ones() { return WeightFunction{}; }

  static WeightFunction from_table(std::vector<double> values) {
    if (values.empty())
      throw std::invalid_argument("WeightFunction: empty weight table");
    WeightFunction w;
    w.ones_ = false;
    w.values_ = std::move(values);
    w.log_fact_.resize(w.values_.size() + 1, 0.0L);
    for (std::size_t i = 0; i < w.values_.size(); ++i) {
      const double v = w.values_[i];
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("WeightFunction: weights must be positive finite");
      w.log_fact_[i + 1] = w.log_fact_[i] + std::log(static_cast<long double>(v));
    }
    return w;
  }

  // f(n) for n >= 1
  double value(int n) const {
    if (n < 1) throw std::domain_error("WeightFunction::value: n must be >= 1");
    if (ones_ || static_cast<std::size_t>(n) > values_.size()) return 1.0;
    return values_[static_cast<std::size_t>(n - 1)];
  }

  // log [f(n)]! for n >= 0
  double log_fact(int n) const { return static_cast<double>(log_fact_l(n)); }

  long double log_fact_l(int n) const {
    if (n < 0) throw std::domain_error("WeightFunction::log_fact: negative n");
    if (ones_) return 0.0L;
    const std::size_t idx = std::min(static_cast<std::size_t>(n), values_.size());
    return log_fact_[idx];
  }

  bool is_ones() const { return ones_; }
  const std::vector<double>& table_values() const { return values_; }

  friend bool operator==(const WeightFunction& a, const WeightFunction& b) {
    return a.ones_ == b.ones_ && a.values_ == b.values_;
  }

 private:
  WeightFunction() = default;
  bool ones_ = true;
  std::vector<double> values_;          // f(1)..f(K)
  std::vector<long double> log_fact_;   // log [f(n)]!, n = 0..K
};

// Physical and numerical parameters of one multiphoton coherent state.
struct ModelParams {
  double omega_c = 1.0;        // effective cyclotron frequency omega_c*
  double wavenumber = 0.0;     // plane-wave number k along y
  int m_order = 1;             // annihilation power m
  int j_index = 0;             // sector offset j, 0 <= j < m
  std::complex<double> alpha{0.0, 0.0};  // eigenvalue of the m-th power operator
  WeightFunction weight = WeightFunction::ones();
  double tol = kDefaultTol;    // relative amplitude cutoff for the tail
  int n_cap = kDefaultNCap;    // highest Fock level ever retained

  double r() const { return std::abs(alpha); }
  double theta() const { return std::arg(alpha); }

  void validate() const {
    if (!(omega_c > 0.0) || !std::isfinite(omega_c))
      throw std::invalid_argument("ModelParams: omega_c must be positive");
    if (!std::isfinite(wavenumber))
      throw std::invalid_argument("ModelParams: wavenumber must be finite");
    if (m_order < 1) throw std::invalid_argument("ModelParams: m_order must be >= 1");
    if (j_index < 0 || j_index >= m_order)
      throw std::invalid_argument("ModelParams: j_index must satisfy 0 <= j < m");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
      throw std::invalid_argument("ModelParams: alpha must be finite");
    if (!(tol > 0.0) || !(tol < 1.0))
      throw std::invalid_argument("ModelParams: tol must lie in (0, 1)");
    if (n_cap < m_order + 2)
      throw std::invalid_argument("ModelParams: n_cap must be >= m_order + 2");
  }
};

// Sparse superposition of eigenspinors, terms sorted by level.
struct SpinorState {
  struct Term {
    int level = 0;
    std::complex<double> amplitude{};
  };
  std::vector<Term> terms;
  bool normalized = false;

  double norm_sq() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::norm(t.amplitude);
    return s;
  }
};

// Action of the generalized annihilation operator taken to the m-th power.
// Case split on the source level n:
//   n < m      : killed
//   n = m      : sqrt((1+d_{1m}) n!/2) [f(n)]!             -> level 0
//   n = m+1    : sqrt(n!/2) [f(n)]!/f(1)                   -> level 1
//   n >= m+2   : sqrt(n!/(n-m)!) [f(n)]!/[f(n-m)]!         -> level n-m
// All weight products are accumulated in log space.
inline SpinorState annihilate_power(const SpinorState& state, int m,
                                    const WeightFunction& weight) {
  if (m < 1) throw std::invalid_argument("annihilate_power: m must be >= 1");
  SpinorState out;
  out.normalized = false;
  out.terms.reserve(state.terms.size());
  const long double log2l = std::log(2.0L);
  for (const auto& term : state.terms) {
    const int n = term.level;
    if (n < 0) throw std::domain_error("annihilate_power: negative level");
    if (n < m) continue;
    int target = 0;
    long double log_coeff = 0.0L;
    if (n == m) {
      target = 0;
      log_coeff = (m == 1 ? 0.5L * log2l : 0.0L) +
                  0.5L * (detail::log_factorial_l(n) - log2l) + weight.log_fact_l(n);
    } else if (n == m + 1) {
      target = 1;
      log_coeff = 0.5L * (detail::log_factorial_l(n) - log2l) + weight.log_fact_l(n) -
                  std::log(static_cast<long double>(weight.value(1)));
    } else {
      target = n - m;
      log_coeff = 0.5L * (detail::log_factorial_l(n) - detail::log_factorial_l(n - m)) +
                  (weight.log_fact_l(n) - weight.log_fact_l(n - m));
    }
    const double coeff = static_cast<double>(std::exp(log_coeff));
    out.terms.push_back({target, term.amplitude * coeff});
  }
  return out;
}

enum class SpinorOp {
  quadrature,      // S_k, position-like for k = 0, momentum-like for k = 1
  quadrature_sq,   // S_k^2
  hamiltonian      // off-diagonal squared-ladder Hamiltonian
};

namespace detail {

using FockVec = std::map<int, std::complex<double>>;

inline FockVec apply_lower(const FockVec& v) {
  FockVec out;
  for (const auto& [n, a] : v)
    if (n >= 1) out[n - 1] += a * std::sqrt(static_cast<double>(n));
  return out;
}

inline FockVec apply_raise(const FockVec& v) {
  FockVec out;
  for (const auto& [n, a] : v) out[n + 1] += a * std::sqrt(static_cast<double>(n) + 1.0);
  return out;
}

// s_k = (a^- + (-1)^k a^+) / (sqrt(2) i^k)
inline FockVec apply_quadrature(const FockVec& v, int k) {
  const std::complex<double> scale =
      (k == 0) ? std::complex<double>(1.0 / std::sqrt(2.0), 0.0)
               : std::complex<double>(0.0, -1.0 / std::sqrt(2.0));
  const double sign = (k == 0) ? 1.0 : -1.0;
  FockVec out;
  for (const auto& [n, a] : apply_lower(v)) out[n] += scale * a;
  for (const auto& [n, a] : apply_raise(v)) out[n] += scale * sign * a;
  return out;
}

inline std::complex<double> overlap(const FockVec& bra, const FockVec& ket) {
  std::complex<double> s{};
  for (const auto& [n, a] : bra) {
    auto it = ket.find(n);
    if (it != ket.end()) s += std::conj(a) * it->second;
  }
  return s;
}

// Two-component position eigenspinor of level n: the upper entry |n-2> only
// exists from n = 2 on, and the shared normalization is 1/sqrt(2^{1-d0-d1}).
struct SpinorVec {
  FockVec up, low;
};

inline SpinorVec eigenspinor(int n) {
  if (n < 0) throw std::domain_error("eigenspinor: negative level");
  SpinorVec s;
  if (n < 2) {
    s.low[n] = 1.0;
  } else {
    const double norm = 1.0 / std::sqrt(2.0);
    s.up[n - 2] = norm;
    s.low[n] = norm;
  }
  return s;
}

}  // namespace detail

// <Psi_n | op | Psi_n'> evaluated by literally applying ladder rules to both
// spinor components; serves as the independent check for every closed form.
inline std::complex<double> spinor_matrix_element(int n, int n_prime, SpinorOp op,
                                                  int k, double omega_c) {
  if (op != SpinorOp::hamiltonian && k != 0 && k != 1)
    throw std::invalid_argument("spinor_matrix_element: k must be 0 or 1");
  const auto bra = detail::eigenspinor(n);
  const auto ket = detail::eigenspinor(n_prime);
  detail::SpinorVec result;
  switch (op) {
    case SpinorOp::quadrature:
      result.up = detail::apply_quadrature(ket.up, k);
      result.low = detail::apply_quadrature(ket.low, k);
      break;
    case SpinorOp::quadrature_sq:
      result.up = detail::apply_quadrature(detail::apply_quadrature(ket.up, k), k);
      result.low = detail::apply_quadrature(detail::apply_quadrature(ket.low, k), k);
      break;
    case SpinorOp::hamiltonian: {
      result.up = detail::apply_lower(detail::apply_lower(ket.low));
      result.low = detail::apply_raise(detail::apply_raise(ket.up));
      for (auto& [lvl, a] : result.up) a *= omega_c;
      for (auto& [lvl, a] : result.low) a *= omega_c;
      break;
    }
  }
  return detail::overlap(bra.up, result.up) + detail::overlap(bra.low, result.low);
}

}  // namespace bgmcs
