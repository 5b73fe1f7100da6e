#include "binx/game.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace binx {

TableGame::TableGame(int n, std::vector<double> values)
    : Game(n, GameKind::table), values_(std::move(values)) {
  const std::size_t expected = std::size_t{1} << n;
  if (values_.size() != expected) {
    throw argument_error("table game over " + std::to_string(n) + " features needs " +
                         std::to_string(expected) + " values, got " +
                         std::to_string(values_.size()));
  }
}

LinearCombinationGame::LinearCombinationGame(double a, GamePtr va, double b, GamePtr vb)
    : Game(va->feature_count(), GameKind::linear_combination),
      a_(a),
      b_(b),
      va_(std::move(va)),
      vb_(std::move(vb)) {
  if (va_->feature_count() != vb_->feature_count()) {
    throw dimension_error("linear combination of games with different feature counts");
  }
}

void MergeMap::validate() const {
  if (original_n < 1 || original_n > kMaxFeatures) {
    throw argument_error("merge map original feature count out of range");
  }
  Mask seen = 0;
  for (const auto& group : groups) {
    if (group.empty()) throw argument_error("merge map contains an empty group");
    for (int i : group) {
      if (i < 0 || i >= original_n) {
        throw argument_error("merge map references feature " + std::to_string(i + 1) +
                             " outside 1.." + std::to_string(original_n));
      }
      const Mask bit = Mask{1} << i;
      if (seen & bit) {
        throw argument_error("merge map groups overlap at feature " + std::to_string(i + 1));
      }
      seen |= bit;
    }
  }
  if (seen != low_bits(original_n)) {
    throw argument_error("merge map groups do not cover all features");
  }
}

std::vector<Mask> MergeMap::group_masks() const {
  std::vector<Mask> masks;
  masks.reserve(groups.size());
  for (const auto& group : groups) {
    Mask m = 0;
    for (int i : group) m |= Mask{1} << i;
    masks.push_back(m);
  }
  // Merged feature order: ascending smallest original member.
  std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
    return std::countr_zero(a) < std::countr_zero(b);
  });
  return masks;
}

MergeMap MergeMap::identity(int n) {
  MergeMap map;
  map.original_n = n;
  for (int i = 0; i < n; ++i) map.groups.push_back({i});
  return map;
}

MergeMap MergeMap::merge_pair(int n, int i, int j) {
  if (i == j) throw argument_error("cannot merge a feature with itself");
  MergeMap map;
  map.original_n = n;
  map.groups.push_back({std::min(i, j), std::max(i, j)});
  for (int k = 0; k < n; ++k) {
    if (k != i && k != j) map.groups.push_back({k});
  }
  return map;
}

int MergeMap::merged_index_of(int original_feature) const {
  const auto masks = group_masks();
  for (int g = 0; g < static_cast<int>(masks.size()); ++g) {
    if ((masks[g] >> original_feature) & 1) return g;
  }
  throw argument_error("feature " + std::to_string(original_feature + 1) +
                       " not present in merge map");
}

ReducedGame::ReducedGame(GamePtr inner, MergeMap map)
    : Game(map.merged_n(), GameKind::reduced), inner_(std::move(inner)) {
  map.validate();
  if (map.original_n != inner_->feature_count()) {
    throw dimension_error("merge map arity does not match the game");
  }
  masks_ = map.group_masks();
}

PermutedGame::PermutedGame(GamePtr inner, std::vector<int> pi)
    : Game(inner->feature_count(), GameKind::permuted),
      inner_(std::move(inner)),
      pi_(std::move(pi)) {
  const int n = feature_count();
  if (static_cast<int>(pi_.size()) != n) {
    throw argument_error("permutation length does not match the game");
  }
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  for (int image : pi_) {
    if (image < 0 || image >= n || hit[static_cast<std::size_t>(image)]) {
      throw argument_error("permutation is not a bijection on the features");
    }
    hit[static_cast<std::size_t>(image)] = true;
  }
}

FeatureEffectGame::FeatureEffectGame(ModelPtr model, std::vector<double> poi,
                                     std::vector<double> baseline,
                                     std::vector<std::vector<int>> columns)
    : Game(static_cast<int>(columns.size()), GameKind::feature_effect),
      model_(std::move(model)),
      poi_(std::move(poi)),
      baseline_(std::move(baseline)),
      columns_(std::move(columns)) {
  const int arity = model_->arity();
  if (static_cast<int>(poi_.size()) != arity || static_cast<int>(baseline_.size()) != arity) {
    throw dimension_error("point of interest / baseline arity does not match the model (" +
                          std::to_string(arity) + ")");
  }
  std::vector<bool> used(static_cast<std::size_t>(arity), false);
  for (const auto& cols : columns_) {
    if (cols.empty()) throw argument_error("feature with no model columns");
    for (int c : cols) {
      if (c < 0 || c >= arity || used[static_cast<std::size_t>(c)]) {
        throw argument_error("feature-to-column map is not a partition of the model inputs");
      }
      used[static_cast<std::size_t>(c)] = true;
    }
  }
  baseline_prediction_ = model_->predict(baseline_);
}

double FeatureEffectGame::eval(Mask subset) const {
  if (subset == 0) return 0.0;
  std::vector<double> x = baseline_;
  for (Mask m = subset; m != 0; m &= m - 1) {
    for (int c : columns_[static_cast<std::size_t>(std::countr_zero(m))]) {
      x[static_cast<std::size_t>(c)] = poi_[static_cast<std::size_t>(c)];
    }
  }
  return model_->predict(x) - baseline_prediction_;
}

GamePtr feature_effect_game(ModelPtr model, std::vector<double> poi,
                            std::vector<double> baseline,
                            std::vector<std::vector<int>> columns) {
  return std::make_shared<FeatureEffectGame>(std::move(model), std::move(poi),
                                             std::move(baseline), std::move(columns));
}

GamePtr feature_effect_game(ModelPtr model, std::vector<double> poi,
                            std::vector<double> baseline) {
  const int arity = model->arity();
  if (arity > kMaxFeatures) {
    throw capacity_error("model arity " + std::to_string(arity) + " exceeds the bitmask limit");
  }
  std::vector<std::vector<int>> columns(static_cast<std::size_t>(arity));
  for (int i = 0; i < arity; ++i) columns[static_cast<std::size_t>(i)] = {i};
  return feature_effect_game(std::move(model), std::move(poi), std::move(baseline),
                             std::move(columns));
}

double discrete_derivative(const Game& v, const FeatureSet& s, const FeatureSet& t) {
  if (s.n != v.feature_count() || t.n != v.feature_count()) {
    throw dimension_error("subset arity does not match the game");
  }
  if (s.bits & t.bits) {
    throw argument_error("discrete derivative requires disjoint subsets");
  }
  const int size = s.size();
  double acc = 0.0;
  for (Mask idx = 0; idx < (Mask{1} << size); ++idx) {
    const Mask l = scatter_bits(idx, s.bits);
    const double val = v.at(t.bits | l);
    acc += ((size - std::popcount(l)) & 1) ? -val : val;
  }
  return acc;
}

double harsanyi_dividend(const Game& v, const FeatureSet& s) {
  return discrete_derivative(v, s, FeatureSet::empty(v.feature_count()));
}

GamePtr merge_game(GamePtr v, const MergeMap& map) {
  return std::make_shared<ReducedGame>(std::move(v), map);
}

GamePtr permute_game(GamePtr v, std::vector<int> pi) {
  return std::make_shared<PermutedGame>(std::move(v), std::move(pi));
}

TableGamePtr materialize_table(const Game& v, Exec exec) {
  const int n = v.feature_count();
  require_within_exact_cap(n, "materialize_table");
  std::vector<double> values(std::size_t{1} << n);
  parallel_for(exec, static_cast<std::int64_t>(values.size()),
               [&](std::int64_t i) { values[static_cast<std::size_t>(i)] = v.at(static_cast<Mask>(i)); });
  return std::make_shared<TableGame>(n, std::move(values));
}

int exact_cap() {
  int cap = kDefaultExactCap;
  if (const char* env = std::getenv("EXPLAIN_EXACT_CAP")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1 && parsed < kDefaultExactCap) {
      cap = static_cast<int>(parsed);
    }
  }
  return cap;
}

void require_within_exact_cap(int n, const char* what) {
  const int cap = exact_cap();
  if (n > cap) {
    throw capacity_error(std::string(what) + ": " + std::to_string(n) +
                         " features exceed the exact enumeration cap of " +
                         std::to_string(cap));
  }
}

}  // namespace binx
