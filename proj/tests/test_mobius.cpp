#include <doctest.h>

#include <cstdlib>

#include "binx/mobius.hpp"
#include "test_util.hpp"

using namespace binx;

TEST_CASE("primitive games are basis vectors of the transform") {
  for (int n = 1; n <= 5; ++n) {
    for (Mask r = 0; r < (Mask{1} << n); ++r) {
      const auto table = materialize_table(PrimitiveGame(FeatureSet(r, n)), Exec::serial);
      const auto coeffs = mobius_transform(*table);
      for (Mask m = 0; m < coeffs.coeffs.size(); ++m) {
        CHECK(coeffs.coeffs[m] == (m == r ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("the null game transforms to all zeros") {
  const TableGame null_game(4, std::vector<double>(16, 0.0));
  for (double c : mobius_transform(null_game).coeffs) {
    CHECK(c == 0.0);
  }
}

TEST_CASE("two-feature OR game coefficients") {
  // Derived by brute force over the 4 subsets: {0, 1, 1, -1}.
  const TableGame or_game(2, {0, 1, 1, 1});
  const auto coeffs = mobius_transform(or_game);
  CHECK(coeffs.coeffs == std::vector<double>{0, 1, 1, -1});
  CHECK(coeffs.coeffs == testutil::brute_force_mobius(or_game));
}

TEST_CASE("transform agrees with the alternating-sum oracle") {
  SplitMix64 rng{501};
  for (int n = 2; n <= 6; ++n) {
    const auto v = random_table_game(n, rng);
    const auto fast = mobius_transform(*v);
    const auto slow = testutil::brute_force_mobius(*v);
    for (std::size_t i = 0; i < slow.size(); ++i) {
      CHECK(fast.coeffs[i] == doctest::Approx(slow[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("reconstruction reproduces every game value") {
  SplitMix64 rng{502};
  for (int n = 2; n <= 10; n += 2) {
    const auto v = random_table_game(n, rng);
    const auto back = reconstruct_game(mobius_transform(*v));
    for (std::size_t i = 0; i < v->values().size(); ++i) {
      CHECK(back->values()[i] == doctest::Approx(v->values()[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("serial and parallel passes are bit-identical") {
  SplitMix64 rng{503};
  const auto v = random_table_game(12, rng);
  CHECK(mobius_transform(*v, Exec::serial).coeffs == mobius_transform(*v, Exec::parallel).coeffs);
}

TEST_CASE("dense transform refuses tables beyond the exact cap") {
  SplitMix64 rng{504};
  const auto v = random_table_game(8, rng);
  setenv("EXPLAIN_EXACT_CAP", "6", 1);
  CHECK_THROWS_AS(mobius_transform(*v), capacity_error);
  unsetenv("EXPLAIN_EXACT_CAP");
  CHECK_NOTHROW(mobius_transform(*v));
}
