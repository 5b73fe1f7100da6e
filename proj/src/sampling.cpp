#include "binx/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace binx {

namespace {

constexpr std::uint64_t kBlockSize = 8192;

// Shared accumulation skeleton: per-block serial loops, per-block streams,
// pairwise merge of block sums. `draw` maps a fresh 64-bit word to one
// sampled marginal.
template <class Draw>
Estimate run_sampler(std::uint64_t samples, std::uint64_t seed, Exec exec, Draw&& draw) {
  if (samples < 2) {
    throw argument_error("sampling needs at least 2 draws");
  }
  const std::uint64_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<double> sums(blocks, 0.0);
  std::vector<double> squares(blocks, 0.0);

  parallel_for(exec, static_cast<std::int64_t>(blocks), [&](std::int64_t b) {
    const std::uint64_t block = static_cast<std::uint64_t>(b);
    SplitMix64 rng{derive_stream_seed(seed, block)};
    const std::uint64_t begin = block * kBlockSize;
    const std::uint64_t end = std::min(begin + kBlockSize, samples);
    double sum = 0.0, square = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double x = draw(rng.next());
      sum += x;
      square += x * x;
    }
    sums[block] = sum;
    squares[block] = square;
  });

  Estimate est;
  est.samples = samples;
  est.seed = seed;
  const double total = pairwise_sum(sums);
  const double total_sq = pairwise_sum(squares);
  const double count = static_cast<double>(samples);
  est.value = total / count;
  const double variance = std::max(0.0, (total_sq - count * est.value * est.value) / (count - 1.0));
  est.stderr_of_mean = std::sqrt(variance / count);
  return est;
}

}  // namespace

std::uint64_t plan_samples(const SamplePlan& plan, int set_size) {
  if (!(plan.epsilon > 0.0) || !(plan.delta > 0.0) || !(plan.delta < 1.0) ||
      !(plan.bound_m > 0.0)) {
    throw argument_error("sample plan needs epsilon > 0, 0 < delta < 1, bound_m > 0");
  }
  if (set_size < 0 || set_size > 8) {
    throw argument_error("sample plan set size must be in 0..8");
  }
  const double range = std::ldexp(2.0 * plan.bound_m, set_size);  // 2^s * 2M
  const double count =
      std::ceil(range * range * std::log(2.0 / plan.delta) / (2.0 * plan.epsilon * plan.epsilon));
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(count));
}

Estimate bii_sample(const Game& v, const FeatureSet& s, std::uint64_t samples,
                    std::uint64_t seed, Exec exec) {
  if (s.n != v.feature_count()) {
    throw dimension_error("subset arity does not match the game");
  }
  const int size = s.size();
  if (size > 8) {
    throw argument_error("sampled subsets are limited to 8 features (2^|S| calls per draw)");
  }
  const int n = v.feature_count();
  const Mask comp = s.complement();
  const Mask draw_mask = low_bits(n - size);
  const Mask s_bits = s.bits;

  return run_sampler(samples, seed, exec, [&](std::uint64_t word) {
    const Mask t = scatter_bits(word & draw_mask, comp);
    double acc = 0.0;
    for (Mask idx = 0; idx < (Mask{1} << size); ++idx) {
      const Mask l = scatter_bits(idx, s_bits);
      const double val = v.at(t | l);
      acc += ((size - std::popcount(l)) & 1) ? -val : val;
    }
    return acc;
  });
}

Estimate bii_pair_decomposed(const Game& v, int i, int j, std::uint64_t samples,
                             std::uint64_t seed, Exec exec) {
  const int n = v.feature_count();
  if (i == j) throw argument_error("pair estimator needs two distinct features");
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw argument_error("pair feature index out of range");
  }
  const Mask bit_i = Mask{1} << i;
  const Mask bit_j = Mask{1} << j;
  const Mask comp = low_bits(n) & ~(bit_i | bit_j);
  const Mask draw_mask = low_bits(n - 2);

  return run_sampler(samples, seed, exec, [&](std::uint64_t word) {
    const Mask t = scatter_bits(word & draw_mask, comp);
    return v.at(t | bit_i | bit_j) - v.at(t | bit_i) - v.at(t | bit_j) + v.at(t);
  });
}

InteractionReport sample_report(const GamePtr& v, const IndexKind& kind, int order,
                                const SampleSpec& spec, std::uint64_t seed, Exec exec) {
  const int n = v->feature_count();
  if (order < 1 || order > n) {
    throw argument_error("report order must be in 1..n");
  }
  if (kind.tag == IndexTag::banzhaf) {
    if (order != 1) throw argument_error("banzhaf is a singleton index; use order 1");
  } else if (kind.tag != IndexTag::bii) {
    throw argument_error("sampled reports support bii and banzhaf only");
  }
  if (order > 8) {
    throw argument_error("sampled reports are limited to order 8");
  }
  if (spec.samples == 0 && !spec.plan.has_value()) {
    throw argument_error("sampled report needs a sample count or an (epsilon, delta) plan");
  }
  // Per-entry sampling runs on worker threads; reject bad sizes here.
  if (spec.samples == 0) {
    plan_samples(*spec.plan, 0);
  } else if (spec.samples < 2) {
    throw argument_error("sampling needs at least 2 draws");
  }

  InteractionReport report;
  report.n = n;
  report.order = order;
  report.kind = kind;
  report.sampled = true;
  report.meta.seed = seed;

  const auto masks = subsets_up_to_order(n, order);
  report.entries.resize(masks.size());
  // Entries are sampled independently; the inner sampler stays serial so the
  // block layout (and therefore every value) is the same either way.
  parallel_for(exec, static_cast<std::int64_t>(masks.size()), [&](std::int64_t idx) {
    const Mask m = masks[static_cast<std::size_t>(idx)];
    const FeatureSet s(m, n);
    const std::uint64_t entry_seed = derive_stream_seed(seed, m);
    const std::uint64_t count =
        spec.samples > 0 ? spec.samples : plan_samples(*spec.plan, s.size());
    const Estimate est = bii_sample(*v, s, count, entry_seed, Exec::serial);
    report.entries[static_cast<std::size_t>(idx)] = {m, est.value, est.stderr_of_mean,
                                                     est.samples, est.seed};
  });
  return report;
}

}  // namespace binx
