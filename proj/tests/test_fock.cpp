#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "bgmcs/fock.hpp"

using namespace bgmcs;

namespace {

// f(n) = (n+1)/n, so the running product [f(n)]! telescopes to n+1 and
// every oracle below stays exact in double arithmetic.
WeightFunction telescoping_weight(int up_to) {
  std::vector<double> vals;
  for (int n = 1; n <= up_to; ++n)
    vals.push_back((static_cast<double>(n) + 1.0) / static_cast<double>(n));
  return WeightFunction::from_table(vals);
}

double exact_factorial_ratio(int n, int m) {
  // n! / (n-m)! as a product of m integers
  double p = 1.0;
  for (int i = n - m + 1; i <= n; ++i) p *= static_cast<double>(i);
  return p;
}

SpinorState single_level(int n) {
  SpinorState s;
  s.terms.push_back({n, {1.0, 0.0}});
  return s;
}

}  // namespace

TEST_CASE("log_factorial_matches_direct_log_sum") {
  double acc = 0.0;
  for (int n = 1; n <= 300; ++n) {
    acc += std::log(static_cast<double>(n));
    CHECK(std::abs(log_factorial(n) - acc) <= 1e-12 * std::max(1.0, acc));
    CHECK(std::isfinite(log_factorial(n)));
  }
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK_THROWS_AS(log_factorial(-1), std::domain_error);
}

TEST_CASE("log_factorial_exact_below_21") {
  unsigned long long f = 1;
  for (int n = 1; n <= 20; ++n) {
    f *= static_cast<unsigned long long>(n);
    CHECK(log_factorial(n) == std::log(static_cast<double>(f)));
  }
}

TEST_CASE("energy_levels_zero_then_sqrt_law") {
  CHECK(energy_level(0, 1.0) == 0.0);
  CHECK(energy_level(1, 1.0) == 0.0);
  CHECK(energy_level(2, 1.0) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(energy_level(5, 2.0) == Catch::Approx(2.0 * std::sqrt(20.0)).epsilon(1e-15));
  CHECK_THROWS_AS(energy_level(-1, 1.0), std::domain_error);
}

TEST_CASE("energy_spacing_becomes_linear") {
  const double w = 1.7;
  double prev = energy_level(0, w);
  for (int n = 1; n <= 1000; ++n) {
    const double e = energy_level(n, w);
    CHECK(e >= prev);
    if (n >= 4) {
      // |E_n - E_{n-1} - w| < w/(n-1), the essentially-linear tail
      CHECK(std::abs(e - prev - w) < w / (n - 1));
    }
    prev = e;
  }
}

TEST_CASE("weight_function_table_and_padding") {
  const auto w = WeightFunction::from_table({2.0, 1.5, 1.25});
  CHECK_FALSE(w.is_ones());
  CHECK(w.value(1) == 2.0);
  CHECK(w.value(3) == 1.25);
  CHECK(w.value(4) == 1.0);
  CHECK(w.value(1000) == 1.0);
  CHECK_THROWS_AS(w.value(0), std::domain_error);

  // log [f(n)]! accumulates the table and freezes past it
  CHECK(w.log_fact(0) == 0.0);
  CHECK(w.log_fact(1) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(w.log_fact(2) == Catch::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(w.log_fact(3) == Catch::Approx(std::log(3.75)).epsilon(1e-15));
  CHECK(w.log_fact(17) == w.log_fact(3));

  const auto ones = WeightFunction::ones();
  CHECK(ones.is_ones());
  CHECK(ones.value(7) == 1.0);
  CHECK(ones.log_fact(500) == 0.0);

  CHECK_THROWS_AS(WeightFunction::from_table({}), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunction::from_table({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightFunction::from_table({-2.0}), std::invalid_argument);
}

TEST_CASE("model_params_validation") {
  ModelParams p;
  p.m_order = 3;
  p.j_index = 2;
  p.alpha = {1.0, 0.5};
  CHECK_NOTHROW(p.validate());

  auto bad = p;
  bad.omega_c = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.m_order = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.j_index = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.j_index = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.tol = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.n_cap = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.alpha = {std::nan(""), 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("annihilate_power_generic_case_factorial_ratio") {
  const auto ones = WeightFunction::ones();
  for (int m = 1; m <= 5; ++m) {
    for (int n = m + 2; n <= 30; ++n) {
      const auto out = annihilate_power(single_level(n), m, ones);
      REQUIRE(out.terms.size() == 1);
      CHECK(out.terms[0].level == n - m);
      const double want = std::sqrt(exact_factorial_ratio(n, m));
      CHECK(std::abs(out.terms[0].amplitude.real() - want) <= 1e-13 * want);
      CHECK(out.terms[0].amplitude.imag() == 0.0);
    }
  }
}

TEST_CASE("annihilate_power_generic_case_with_weight") {
  const auto w = telescoping_weight(40);
  for (int m = 1; m <= 5; ++m) {
    for (int n = m + 2; n <= 30; ++n) {
      const auto out = annihilate_power(single_level(n), m, w);
      REQUIRE(out.terms.size() == 1);
      // [f(n)]!/[f(n-m)]! = (n+1)/(n-m+1)
      const double want = std::sqrt(exact_factorial_ratio(n, m)) *
                          (static_cast<double>(n) + 1.0) / (static_cast<double>(n - m) + 1.0);
      CHECK(std::abs(out.terms[0].amplitude.real() - want) <= 1e-13 * want);
    }
  }
}

TEST_CASE("annihilate_power_boundary_cases") {
  const auto ones = WeightFunction::ones();
  const auto w = telescoping_weight(40);

  // n < m is killed outright
  for (int m = 1; m <= 5; ++m)
    for (int n = 0; n < m; ++n)
      CHECK(annihilate_power(single_level(n), m, ones).terms.empty());

  // n = m lands on level 0 with sqrt((1+d_{1m}) n!/2) [f(n)]!
  for (int m = 1; m <= 6; ++m) {
    const auto out = annihilate_power(single_level(m), m, ones);
    REQUIRE(out.terms.size() == 1);
    CHECK(out.terms[0].level == 0);
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    const double want = std::sqrt((m == 1 ? 2.0 : 1.0) * fact / 2.0);
    CHECK(std::abs(out.terms[0].amplitude.real() - want) <= 1e-13 * want);

    const auto outw = annihilate_power(single_level(m), m, w);
    const double wantw = want * (static_cast<double>(m) + 1.0);
    CHECK(std::abs(outw.terms[0].amplitude.real() - wantw) <= 1e-13 * wantw);
  }

  // n = m+1 lands on level 1 with sqrt(n!/2) [f(n)]!/f(1)
  for (int m = 1; m <= 6; ++m) {
    const int n = m + 1;
    const auto out = annihilate_power(single_level(n), m, ones);
    REQUIRE(out.terms.size() == 1);
    CHECK(out.terms[0].level == 1);
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    const double want = std::sqrt(fact / 2.0);
    CHECK(std::abs(out.terms[0].amplitude.real() - want) <= 1e-13 * want);

    const auto outw = annihilate_power(single_level(n), m, w);
    const double wantw = want * (static_cast<double>(n) + 1.0) / 2.0;
    CHECK(std::abs(outw.terms[0].amplitude.real() - wantw) <= 1e-13 * wantw);
  }

  CHECK_THROWS_AS(annihilate_power(single_level(3), 0, ones), std::invalid_argument);
}

TEST_CASE("annihilate_power_stays_finite_at_high_levels") {
  const auto ones = WeightFunction::ones();
  const auto out = annihilate_power(single_level(300), 5, ones);
  REQUIRE(out.terms.size() == 1);
  CHECK(std::isfinite(out.terms[0].amplitude.real()));
  // sqrt(300!/295!) = sqrt(296*297*298*299*300)
  const double want = std::sqrt(296.0 * 297.0 * 298.0 * 299.0 * 300.0);
  CHECK(std::abs(out.terms[0].amplitude.real() - want) <= 1e-12 * want);
}

TEST_CASE("annihilate_power_is_linear_over_terms") {
  const auto ones = WeightFunction::ones();
  SpinorState s;
  s.terms.push_back({2, {0.5, 0.25}});
  s.terms.push_back({4, {0.0, -1.0}});
  s.terms.push_back({7, {1.0, 0.0}});
  const auto out = annihilate_power(s, 2, ones);
  REQUIRE(out.terms.size() == 3);
  CHECK(out.terms[0].level == 0);
  CHECK(out.terms[1].level == 2);
  CHECK(out.terms[2].level == 5);
  const auto a4 = annihilate_power(single_level(4), 2, ones).terms[0].amplitude;
  CHECK(out.terms[1].amplitude == std::complex<double>(0.0, -1.0) * a4);
}

TEST_CASE("hamiltonian_matrix_elements_diagonal") {
  const double w = 1.3;
  for (int n = 0; n <= 40; ++n) {
    for (int np = 0; np <= 40; ++np) {
      const auto e = spinor_matrix_element(n, np, SpinorOp::hamiltonian, 0, w);
      if (n == np) {
        const double want = energy_level(n, w);
        CHECK(std::abs(e.real() - want) <= 1e-12 * std::max(1.0, want));
        CHECK(std::abs(e.imag()) <= 1e-14);
      } else {
        CHECK(std::abs(e) <= 1e-14);
      }
    }
  }
}

TEST_CASE("quadrature_selection_rules") {
  for (int k = 0; k <= 1; ++k) {
    for (int n = 0; n <= 40; ++n) {
      for (int np = 0; np <= 40; ++np) {
        const auto s1 = spinor_matrix_element(n, np, SpinorOp::quadrature, k, 1.0);
        if (std::abs(n - np) != 1) CHECK(std::abs(s1) <= 1e-14);
        const auto s2 = spinor_matrix_element(n, np, SpinorOp::quadrature_sq, k, 1.0);
        if (n != np && std::abs(n - np) != 2) CHECK(std::abs(s2) <= 1e-14);
      }
    }
  }
}

TEST_CASE("quadrature_square_known_diagonals") {
  // <Psi_0|S_k^2|Psi_0> = 1/2 (bare Fock level 0);
  // <Psi_2|S_k^2|Psi_2> = 3/2 (levels 0 and 2 at weight 1/2 each)
  for (int k = 0; k <= 1; ++k) {
    CHECK(spinor_matrix_element(0, 0, SpinorOp::quadrature_sq, k, 1.0).real() ==
          Catch::Approx(0.5).epsilon(1e-14));
    CHECK(spinor_matrix_element(1, 1, SpinorOp::quadrature_sq, k, 1.0).real() ==
          Catch::Approx(1.5).epsilon(1e-14));
    CHECK(spinor_matrix_element(2, 2, SpinorOp::quadrature_sq, k, 1.0).real() ==
          Catch::Approx(1.5).epsilon(1e-14));
  }
}

TEST_CASE("matrix_elements_are_hermitian") {
  for (int k = 0; k <= 1; ++k)
    for (int n = 0; n <= 12; ++n)
      for (int np = 0; np <= 12; ++np) {
        for (auto op : {SpinorOp::quadrature, SpinorOp::quadrature_sq}) {
          const auto a = spinor_matrix_element(n, np, op, k, 1.0);
          const auto b = spinor_matrix_element(np, n, op, k, 1.0);
          CHECK(std::abs(a - std::conj(b)) <= 1e-13);
        }
      }
  CHECK_THROWS_AS(spinor_matrix_element(1, 1, SpinorOp::quadrature, 2, 1.0),
                  std::invalid_argument);
}
