#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "binx/models.hpp"
#include "binx/sampling.hpp"
#include "test_util.hpp"

using namespace binx;

TEST_CASE("hoeffding sizing") {
  // ceil(16 * ln(40) / 0.02) with bound 1, singleton marginals.
  CHECK(plan_samples({0.1, 0.05, 1.0}, 1) == 2952);

  // Doubling epsilon cuts the count by a factor of four (up to the ceil).
  const auto fine = plan_samples({0.1, 0.05, 1.0}, 1);
  const auto coarse = plan_samples({0.2, 0.05, 1.0}, 1);
  CHECK(coarse <= fine);
  CHECK(std::llabs(static_cast<long long>(fine) - 4 * static_cast<long long>(coarse)) <= 4);

  // One more set member quadruples the marginal range, hence the count.
  const auto pair = plan_samples({0.1, 0.05, 1.0}, 2);
  CHECK(std::llabs(static_cast<long long>(pair) - 4 * static_cast<long long>(fine)) <= 4);

  CHECK_THROWS_AS(plan_samples({0.0, 0.05, 1.0}, 1), argument_error);
  CHECK_THROWS_AS(plan_samples({0.1, 1.5, 1.0}, 1), argument_error);
  CHECK_THROWS_AS(plan_samples({0.1, 0.05, 1.0}, 9), argument_error);
}

TEST_CASE("sampling a scaled primitive game at its support is exact") {
  const auto v = std::make_shared<ScaledGame>(
      7.0, std::make_shared<PrimitiveGame>(FeatureSet(0b011, 6)));
  const auto est = bii_sample(*v, FeatureSet(0b011, 6), 1000, 5);
  CHECK(est.value == 7.0);
  CHECK(est.stderr_of_mean == 0.0);
  CHECK(est.samples == 1000);
}

TEST_CASE("sampling the null game is exactly zero") {
  const TableGame v(8, std::vector<double>(256, 0.0));
  const auto est = bii_sample(v, FeatureSet::of({2, 5}, 8), 500, 123);
  CHECK(est.value == 0.0);
  CHECK(est.stderr_of_mean == 0.0);
}

TEST_CASE("sampler argument validation") {
  const TableGame v(10, std::vector<double>(1024, 0.0));
  CHECK_THROWS_AS(bii_sample(v, FeatureSet::of({0}, 10), 1, 0), argument_error);
  CHECK_THROWS_AS(bii_sample(v, FeatureSet(low_bits(9), 10), 100, 0), argument_error);
  CHECK_THROWS_AS(bii_pair_decomposed(v, 3, 3, 100, 0), argument_error);
  CHECK_THROWS_AS(bii_pair_decomposed(v, 3, 11, 100, 0), argument_error);
}

TEST_CASE("estimates are reproducible and independent of the worker count") {
  SplitMix64 rng{61};
  const auto v = random_table_game(11, rng);
  const FeatureSet s = FeatureSet::of({1, 7}, 11);
  const auto first = bii_sample(*v, s, 30000, 42, Exec::parallel);
  const auto second = bii_sample(*v, s, 30000, 42, Exec::parallel);
  const auto serial = bii_sample(*v, s, 30000, 42, Exec::serial);
  CHECK(first.value == second.value);
  CHECK(first.stderr_of_mean == second.stderr_of_mean);
  CHECK(first.value == serial.value);
  CHECK(first.stderr_of_mean == serial.stderr_of_mean);

  const auto other_seed = bii_sample(*v, s, 30000, 43);
  CHECK(first.value != other_seed.value);  // astronomically unlikely to tie
}

TEST_CASE("full enumeration of the draw space reproduces the exact value") {
  SplitMix64 rng{62};
  for (int n = 3; n <= 8; ++n) {
    const auto v = random_table_game(n, rng);
    const Mask s_bits = random_nonempty_mask(n, rng);
    const FeatureSet s(s_bits, n);
    CHECK(testutil::enumerate_sampler_mean(*v, s) == bii_exact(*v, s));
  }
}

TEST_CASE("estimates land inside their own four-sigma band") {
  SplitMix64 rng{63};
  const auto v = random_table_game(12, rng);
  const FeatureSet s = FeatureSet::of({3, 9}, 12);
  const double exact = bii_exact(*v, s);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto est = bii_sample(*v, s, 20000, seed);
    if (std::abs(est.value - exact) <= 4.0 * est.stderr_of_mean) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("pair stencil estimator") {
  const auto v = monomial_game(3, 2.0, FeatureSet::full(3));
  const auto est = bii_pair_decomposed(*v, 0, 1, 10000, 9);
  CHECK(std::abs(est.value - 1.0) <= 4.0 * est.stderr_of_mean + 1e-12);

  const TableGame null_game(6, std::vector<double>(64, 0.0));
  const auto zero = bii_pair_decomposed(null_game, 2, 4, 100, 9);
  CHECK(zero.value == 0.0);
}

TEST_CASE("pair stencil and subset sampler share an expectation") {
  SplitMix64 rng{64};
  for (int n = 4; n <= 8; n += 2) {
    const auto v = random_table_game(n, rng);
    // Enumerate both per-draw estimators over the whole draw space.
    const Mask comp = low_bits(n) & ~Mask{0b11};
    const int m = n - 2;
    double stencil_sum = 0.0;
    for (Mask idx = 0; idx < (Mask{1} << m); ++idx) {
      const Mask t = scatter_bits(idx, comp);
      stencil_sum += v->at(t | 0b11) - v->at(t | 0b01) - v->at(t | 0b10) + v->at(t);
    }
    const double stencil_mean = std::ldexp(stencil_sum, -m);
    const double subset_mean = testutil::enumerate_sampler_mean(*v, FeatureSet(0b11, n));
    CHECK(stencil_mean == doctest::Approx(subset_mean).epsilon(1e-12));
  }
}

TEST_CASE("pair stencil agrees with the subset sampler on a shared seed stream") {
  // A small random forest over 16 features, far beyond what the unit tests
  // enumerate: both estimators see the same coalition draws.
  std::vector<std::shared_ptr<const DecisionTree>> trees;
  SplitMix64 rng{65};
  for (int t = 0; t < 5; ++t) {
    std::vector<TreeNode> nodes(3);
    nodes[0].feature = static_cast<int>(rng.next() % 16);
    nodes[0].threshold = 0.5;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].is_leaf = true;
    nodes[1].value = uniform_pm1(rng);
    nodes[2].is_leaf = true;
    nodes[2].value = uniform_pm1(rng);
    trees.push_back(std::make_shared<DecisionTree>(16, std::move(nodes), 0));
  }
  const auto model = std::make_shared<Forest>(std::move(trees));
  const auto game = feature_effect_game(model, std::vector<double>(16, 1.0),
                                        std::vector<double>(16, 0.0));
  const auto stencil = bii_pair_decomposed(*game, 2, 11, 20000, 1234);
  const auto subset = bii_sample(*game, FeatureSet::of({2, 11}, 16), 20000, 1234);
  const double band =
      4.0 * std::sqrt(stencil.stderr_of_mean * stencil.stderr_of_mean +
                      subset.stderr_of_mean * subset.stderr_of_mean);
  CHECK(std::abs(stencil.value - subset.value) <= band + 1e-12);
}

TEST_CASE("sampled reports derive one stream per entry") {
  const GamePtr v = monomial_game(4, 2.0, FeatureSet::full(4));
  SampleSpec spec;
  spec.samples = 5000;
  const auto report = sample_report(v, IndexKind::bii(), 2, spec, 77);
  REQUIRE(report.entries.size() == 4 + 6);
  CHECK(report.sampled);
  for (const auto& e : report.entries) {
    CHECK(e.samples == 5000);
    CHECK(e.seed == derive_stream_seed(77, e.subset));
  }
  const auto again = sample_report(v, IndexKind::bii(), 2, spec, 77, Exec::serial);
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    CHECK(report.entries[i].value == again.entries[i].value);
  }

  SampleSpec planned;
  planned.plan = SamplePlan{0.25, 0.1, 1.0};
  const auto sized = sample_report(v, IndexKind::bii(), 2, planned, 77);
  for (const auto& e : sized.entries) {
    CHECK(e.samples == plan_samples(*planned.plan, std::popcount(e.subset)));
  }

  CHECK_THROWS_AS(sample_report(v, IndexKind::sii(), 2, spec, 0), argument_error);
  SampleSpec tiny;
  tiny.samples = 1;
  CHECK_THROWS_AS(sample_report(v, IndexKind::bii(), 2, tiny, 0), argument_error);
  CHECK_THROWS_AS(sample_report(v, IndexKind::banzhaf(), 2, spec, 0), argument_error);
  CHECK_THROWS_AS(sample_report(v, IndexKind::bii(), 2, SampleSpec{}, 0), argument_error);
}
