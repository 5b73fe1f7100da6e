#pragma once

#include <cstdint>
#include <optional>

#include "binx/game.hpp"
#include "binx/indices.hpp"
#include "binx/parallel.hpp"

namespace binx {

// Counter-free splittable generator; one instance per sample block.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Stream seed for worker/block/entry `stream` under a user seed.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g{seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1))};
  return g.next();
}

// A Monte-Carlo value with enough context to reproduce it bit-for-bit.
struct Estimate {
  double value = 0.0;
  std::uint64_t samples = 0;
  double stderr_of_mean = 0.0;  // unbiased sample standard error
  std::uint64_t seed = 0;
};

struct SamplePlan {
  double epsilon = 0.0;   // additive error target
  double delta = 0.0;     // failure probability
  double bound_m = 1.0;   // a priori bound on |v(S)| over all subsets
};

// Hoeffding sizing for marginals bounded by 2^s * 2 * bound_m:
// ceil((2^s * 2 * bound_m)^2 * ln(2/delta) / (2 * epsilon^2)), floored at 2.
std::uint64_t plan_samples(const SamplePlan& plan, int set_size);

// Unbiased estimator of the Banzhaf interaction index: draws coalitions
// T disjoint from S by masking independent fair bits and averages the S
// discrete derivative. Work is split into fixed-size blocks, each with its
// own derived RNG stream; block sums merge by pairwise summation, so the
// result is identical for any worker count.
Estimate bii_sample(const Game& v, const FeatureSet& s, std::uint64_t samples,
                    std::uint64_t seed, Exec exec = Exec::parallel);

// Pairwise estimator using the explicit four-point stencil
// v(T u ij) - v(T u i) - v(T u j) + v(T) per draw. Same expectation as
// bii_sample({i, j}).
Estimate bii_pair_decomposed(const Game& v, int i, int j, std::uint64_t samples,
                             std::uint64_t seed, Exec exec = Exec::parallel);

// Sampled interaction report for bii (any order up to 8) or banzhaf
// (order 1). Per-entry streams derive from (seed, subset mask), so the whole
// report is reproducible and entries are independent.
struct SampleSpec {
  std::uint64_t samples = 0;         // explicit per-entry count; 0 = use plan
  std::optional<SamplePlan> plan;    // sizes each entry by its subset size
};

InteractionReport sample_report(const GamePtr& v, const IndexKind& kind, int order,
                                const SampleSpec& spec, std::uint64_t seed,
                                Exec exec = Exec::parallel);

}  // namespace binx
