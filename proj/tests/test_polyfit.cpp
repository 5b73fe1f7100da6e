#include <doctest.h>

#include <cmath>
#include <vector>

#include "binx/indices.hpp"
#include "binx/mobius.hpp"
#include "binx/models.hpp"
#include "binx/polyfit.hpp"
#include "test_util.hpp"

using namespace binx;

namespace {

// Independent least-squares oracle: normal equations assembled by hand and
// solved with partial-pivot Gaussian elimination. Deliberately shares nothing
// with the production QR path.
std::vector<double> normal_equations_fit(const TableGame& v, int degree, double offset) {
  const int n = v.feature_count();
  std::vector<Mask> basis{0};
  for (Mask m : subsets_up_to_order(n, degree)) basis.push_back(m);
  const std::size_t cols = basis.size();
  const std::size_t rows = std::size_t{1} << n;

  std::vector<std::vector<double>> ata(cols, std::vector<double>(cols, 0.0));
  std::vector<double> atb(cols, 0.0);
  for (Mask x = 0; x < rows; ++x) {
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = (basis[c] & ~x) == 0 ? 1.0 : 0.0;
    }
    const double y = v.values()[x] + offset;
    for (std::size_t a = 0; a < cols; ++a) {
      if (row[a] == 0.0) continue;
      atb[a] += y;
      for (std::size_t b = 0; b < cols; ++b) ata[a][b] += row[b];
    }
  }

  for (std::size_t p = 0; p < cols; ++p) {
    std::size_t pivot = p;
    for (std::size_t r = p + 1; r < cols; ++r) {
      if (std::abs(ata[r][p]) > std::abs(ata[pivot][p])) pivot = r;
    }
    std::swap(ata[p], ata[pivot]);
    std::swap(atb[p], atb[pivot]);
    for (std::size_t r = 0; r < cols; ++r) {
      if (r == p || ata[r][p] == 0.0) continue;
      const double f = ata[r][p] / ata[p][p];
      for (std::size_t c = p; c < cols; ++c) ata[r][c] -= f * ata[p][c];
      atb[r] -= f * atb[p];
    }
  }
  std::vector<double> out(cols);
  for (std::size_t c = 0; c < cols; ++c) out[c] = atb[c] / ata[c][c];
  return out;
}

double quadratic_loss(const TableGame& v, const PolynomialFit& fit, double offset,
                      std::size_t bump_index = SIZE_MAX, double bump = 0.0) {
  double loss = 0.0;
  for (Mask x = 0; x < v.values().size(); ++x) {
    double g = 0.0;
    for (std::size_t c = 0; c < fit.monomials.size(); ++c) {
      if ((fit.monomials[c] & ~x) != 0) continue;
      g += fit.coefficients[c] + (c == bump_index ? bump : 0.0);
    }
    const double err = v.values()[x] + offset - g;
    loss += err * err;
  }
  return loss;
}

}  // namespace

TEST_CASE("fit matches the normal-equations oracle") {
  SplitMix64 rng{801};
  for (int n = 3; n <= 6; ++n) {
    const auto v = random_table_game(n, rng);
    for (int k = 1; k <= 3 && k <= n; ++k) {
      const auto fit = fit_polynomial(*v, k);
      const auto oracle = normal_equations_fit(*v, k, 0.0);
      REQUIRE(fit.coefficients.size() == oracle.size());
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        CHECK(fit.coefficients[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("full-degree fit interpolates and recovers the basis expansion") {
  SplitMix64 rng{802};
  for (int n = 3; n <= 8; n += 5) {
    const auto v = random_table_game(n, rng);
    const auto fit = fit_polynomial(*v, n);
    CHECK(fit.residual <= 1e-18);
    const auto coeffs = mobius_transform(*v);
    for (std::size_t i = 0; i < fit.monomials.size(); ++i) {
      CHECK(fit.coefficients[i] ==
            doctest::Approx(coeffs.coeffs[fit.monomials[i]]).epsilon(1e-9));
    }
  }
}

TEST_CASE("a constant target needs only the intercept") {
  const TableGame v(3, std::vector<double>(8, 1.75));
  const auto fit = fit_polynomial(v, 2);
  CHECK(fit.coefficients.front() == doctest::Approx(1.75).epsilon(1e-12));
  for (std::size_t i = 1; i < fit.coefficients.size(); ++i) {
    CHECK(fit.coefficients[i] == doctest::Approx(0.0).epsilon(1e-10));
  }
  CHECK(fit.residual <= 1e-18);
}

TEST_CASE("degree-2 fit of the three-way product puts c/2 on the pairs") {
  const auto table = materialize_table(*monomial_game(3, 2.0, FeatureSet::full(3)));
  const auto fit = fit_polynomial(*table, 2);
  CHECK(fit.coefficient_for(0b011) == doctest::Approx(1.0).epsilon(1e-9));
  const auto oracle = normal_equations_fit(*table, 2, 0.0);
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    CHECK(fit.coefficients[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
  }
}

TEST_CASE("top-degree coefficients reproduce the banzhaf interaction") {
  SplitMix64 rng{803};
  for (int n = 3; n <= 6; ++n) {
    for (int k = 1; k <= 3 && k <= n; ++k) {
      const auto v = random_table_game(n, rng);
      const auto fit = fit_polynomial(*v, k);
      const auto check = topdegree_vs_bii(*v, fit);
      CHECK(check.max_discrepancy <= 1e-7);
    }
  }
}

TEST_CASE("degree-1 coefficients are the singleton banzhaf values") {
  SplitMix64 rng{804};
  const auto v = random_table_game(5, rng);
  const auto fit = fit_polynomial(*v, 1);
  for (int i = 0; i < 5; ++i) {
    CHECK(fit.coefficient_for(Mask{1} << i) ==
          doctest::Approx(banzhaf_value(*v, i)).epsilon(1e-9));
  }
}

TEST_CASE("top coefficient at full degree is the grand dividend") {
  SplitMix64 rng{805};
  const auto v = random_table_game(4, rng);
  const auto fit = fit_polynomial(*v, 4);
  CHECK(fit.coefficient_for(low_bits(4)) ==
        doctest::Approx(harsanyi_dividend(*v, FeatureSet::full(4))).epsilon(1e-9));
  CHECK(fit.coefficient_for(low_bits(4)) ==
        doctest::Approx(bii_exact(*v, FeatureSet::full(4))).epsilon(1e-9));
}

TEST_CASE("any coefficient perturbation strictly increases the loss") {
  SplitMix64 rng{806};
  for (int n = 3; n <= 6; n += 3) {
    const auto v = random_table_game(n, rng);
    const auto fit = fit_polynomial(*v, 2);
    const double at_optimum = quadratic_loss(*v, fit, 0.0);
    for (std::size_t c = 0; c < fit.coefficients.size(); ++c) {
      CHECK(quadratic_loss(*v, fit, 0.0, c, +1e-3) > at_optimum);
      CHECK(quadratic_loss(*v, fit, 0.0, c, -1e-3) > at_optimum);
    }
  }
}

TEST_CASE("residual shrinks as the degree grows") {
  SplitMix64 rng{807};
  const auto v = random_table_game(6, rng);
  double previous = fit_polynomial(*v, 1).residual;
  for (int k = 2; k <= 6; ++k) {
    const double current = fit_polynomial(*v, k).residual;
    CHECK(current <= previous + 1e-12);
    previous = current;
  }
}

TEST_CASE("the offset moves only the intercept") {
  SplitMix64 rng{808};
  const auto v = random_table_game(4, rng);
  const auto plain = fit_polynomial(*v, 2, 0.0);
  const auto shifted = fit_polynomial(*v, 2, 5.0);
  CHECK(shifted.coefficients.front() ==
        doctest::Approx(plain.coefficients.front() + 5.0).epsilon(1e-9));
  for (std::size_t i = 1; i < plain.coefficients.size(); ++i) {
    CHECK(shifted.coefficients[i] == doctest::Approx(plain.coefficients[i]).epsilon(1e-8));
  }
}

TEST_CASE("fit validation") {
  const TableGame small(2, {0, 0, 0, 1});
  CHECK_THROWS_AS(fit_polynomial(small, 0), argument_error);
  CHECK_THROWS_AS(fit_polynomial(small, 3), argument_error);
  const TableGame wide(15, std::vector<double>(1 << 15, 0.0));
  CHECK_THROWS_AS(fit_polynomial(wide, 2), capacity_error);
}
