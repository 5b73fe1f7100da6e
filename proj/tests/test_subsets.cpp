#include <doctest.h>

#include "binx/subsets.hpp"

using namespace binx;

TEST_CASE("feature sets reject bits outside the universe") {
  CHECK_THROWS_AS(FeatureSet(0b100, 2), argument_error);
  CHECK_THROWS_AS(FeatureSet(1, 0), argument_error);
  CHECK_THROWS_AS(FeatureSet(1, 64), argument_error);
  CHECK_NOTHROW(FeatureSet(0b11, 2));
}

TEST_CASE("feature set accessors") {
  const auto s = FeatureSet::of({0, 2}, 4);
  CHECK(s.size() == 2);
  CHECK(s.contains(0));
  CHECK(!s.contains(1));
  CHECK(s.complement() == 0b1010);
  CHECK(s.members() == std::vector<int>{0, 2});
  CHECK(FeatureSet::full(3).bits == 0b111);
  CHECK(FeatureSet::single(2, 4).bits == 0b100);
  CHECK(s.subset_of(FeatureSet::full(4)));
  CHECK(!FeatureSet::full(4).subset_of(s));
}

TEST_CASE("scatter places index bits at the set positions") {
  // positions 0b1010: index bit 0 -> position 1, index bit 1 -> position 3
  CHECK(scatter_bits(0b00, 0b1010) == 0b0000);
  CHECK(scatter_bits(0b01, 0b1010) == 0b0010);
  CHECK(scatter_bits(0b10, 0b1010) == 0b1000);
  CHECK(scatter_bits(0b11, 0b1010) == 0b1010);

  // Walking the index range enumerates every submask exactly once.
  const Mask positions = 0b110101;
  std::vector<bool> seen(64, false);
  for (Mask idx = 0; idx < 16; ++idx) {
    const Mask sub = scatter_bits(idx, positions);
    CHECK((sub & ~positions) == 0);
    CHECK(!seen[sub]);
    seen[sub] = true;
  }
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(5, -1) == 0);
  CHECK(binomial(24, 12) == 2704156);
}

TEST_CASE("report subset layout is sorted by size then bitmask") {
  const auto masks = subsets_up_to_order(4, 2);
  REQUIRE(masks.size() == 4 + 6);
  for (std::size_t i = 0; i + 1 < masks.size(); ++i) {
    const int sa = std::popcount(masks[i]);
    const int sb = std::popcount(masks[i + 1]);
    CHECK((sa < sb || (sa == sb && masks[i] < masks[i + 1])));
  }

  std::size_t expected = 0;
  for (int s = 1; s <= 3; ++s) expected += binomial(6, s);
  CHECK(subsets_up_to_order(6, 3).size() == expected);
  CHECK(subsets_up_to_order(3, 3).back() == 0b111);
  CHECK(subsets_up_to_order(2, 5).size() == 3);  // order clamped by n
}
