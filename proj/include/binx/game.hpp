#pragma once

#include <memory>
#include <string>
#include <vector>

#include "binx/errors.hpp"
#include "binx/model.hpp"
#include "binx/parallel.hpp"
#include "binx/subsets.hpp"

namespace binx {

enum class GameKind {
  table,
  feature_effect,
  primitive,
  reduced,
  permuted,
  linear_combination,
  scaled,
};

// A cooperative game: a total function from feature subsets to reals.
// Evaluation is a pure read; concrete games hold no mutable state after
// construction and are safe to evaluate from multiple threads.
class Game {
 public:
  Game(int n, GameKind kind) : n_(n), kind_(kind) {
    if (n < 1 || n > kMaxFeatures) {
      throw argument_error("game feature count out of range: " + std::to_string(n));
    }
  }
  virtual ~Game() = default;

  int feature_count() const { return n_; }
  GameKind kind() const { return kind_; }

  double value(const FeatureSet& s) const {
    if (s.n != n_) {
      throw dimension_error("subset is over " + std::to_string(s.n) +
                            " features, game expects " + std::to_string(n_));
    }
    return eval(s.bits);
  }

  // Trusted fast path for inner loops; `bits` must already be a valid subset.
  double at(Mask bits) const { return eval(bits); }

 private:
  virtual double eval(Mask subset) const = 0;

  int n_;
  GameKind kind_;
};

using GamePtr = std::shared_ptr<const Game>;

// Dense materialization of a game: 2^n values indexed by subset bitmask.
class TableGame final : public Game {
 public:
  TableGame(int n, std::vector<double> values);

  const std::vector<double>& values() const { return values_; }

 private:
  double eval(Mask subset) const override { return values_[subset]; }
  std::vector<double> values_;
};

using TableGamePtr = std::shared_ptr<const TableGame>;

// Worth 1 on supersets of the support, 0 elsewhere. The games of this family
// form a basis of the game vector space; scaled copies appear throughout the
// conformance suite.
class PrimitiveGame final : public Game {
 public:
  explicit PrimitiveGame(FeatureSet support)
      : Game(support.n, GameKind::primitive), support_(support.bits) {}

  Mask support() const { return support_; }

 private:
  double eval(Mask subset) const override {
    return (support_ & ~subset) == 0 ? 1.0 : 0.0;
  }
  Mask support_;
};

class ScaledGame final : public Game {
 public:
  ScaledGame(double factor, GamePtr inner)
      : Game(inner->feature_count(), GameKind::scaled),
        factor_(factor),
        inner_(std::move(inner)) {}

 private:
  double eval(Mask subset) const override { return factor_ * inner_->at(subset); }
  double factor_;
  GamePtr inner_;
};

class LinearCombinationGame final : public Game {
 public:
  LinearCombinationGame(double a, GamePtr va, double b, GamePtr vb);

 private:
  double eval(Mask subset) const override {
    return a_ * va_->at(subset) + b_ * vb_->at(subset);
  }
  double a_, b_;
  GamePtr va_, vb_;
};

// Partition of the original features into merged super-features. Group order
// (by smallest member) defines the merged feature indices.
struct MergeMap {
  int original_n = 0;
  std::vector<std::vector<int>> groups;

  int merged_n() const { return static_cast<int>(groups.size()); }

  // Throws argument_error unless the groups are disjoint, nonempty and cover
  // {0, ..., original_n - 1}.
  void validate() const;

  // Bitmask of original features per merged feature, in merged index order.
  std::vector<Mask> group_masks() const;

  static MergeMap identity(int n);
  static MergeMap merge_pair(int n, int i, int j);

  // Merged index of the group containing original feature i.
  int merged_index_of(int original_feature) const;
};

// v restricted along a MergeMap: a merged subset expands each selected group
// to all its members before evaluating the inner game.
class ReducedGame final : public Game {
 public:
  ReducedGame(GamePtr inner, MergeMap map);

 private:
  double eval(Mask subset) const override {
    Mask expanded = 0;
    for (Mask m = subset; m != 0; m &= m - 1) {
      expanded |= masks_[std::countr_zero(m)];
    }
    return inner_->at(expanded);
  }
  GamePtr inner_;
  std::vector<Mask> masks_;
};

// (pi v)(T) = v(pi^{-1} T), with pi[i] the new index of original feature i.
class PermutedGame final : public Game {
 public:
  PermutedGame(GamePtr inner, std::vector<int> pi);

 private:
  double eval(Mask subset) const override {
    Mask pre = 0;
    for (int i = 0; i < feature_count(); ++i) {
      if ((subset >> pi_[i]) & 1) pre |= Mask{1} << i;
    }
    return inner_->at(pre);
  }
  GamePtr inner_;
  std::vector<int> pi_;
};

// v(S) = f(poi on S, baseline elsewhere) - f(baseline). Feature i of the game
// toggles the columns in `columns[i]` as a unit, so a one-hot group behaves
// as one logical feature. The default map is one column per feature.
class FeatureEffectGame final : public Game {
 public:
  FeatureEffectGame(ModelPtr model, std::vector<double> poi,
                    std::vector<double> baseline,
                    std::vector<std::vector<int>> columns);

  double baseline_prediction() const { return baseline_prediction_; }

 private:
  double eval(Mask subset) const override;

  ModelPtr model_;
  std::vector<double> poi_, baseline_;
  std::vector<std::vector<int>> columns_;
  double baseline_prediction_;
};

// ---- Operations --------------------------------------------------------

GamePtr feature_effect_game(ModelPtr model, std::vector<double> poi,
                            std::vector<double> baseline);
GamePtr feature_effect_game(ModelPtr model, std::vector<double> poi,
                            std::vector<double> baseline,
                            std::vector<std::vector<int>> columns);

// m_S(T, v) = sum over L subset of S of (-1)^{|S|-|L|} v(T u L).
// Requires S and T disjoint; evaluates v exactly 2^|S| times.
double discrete_derivative(const Game& v, const FeatureSet& s, const FeatureSet& t);

// m_S(empty, v): the synergy attributable to S alone.
double harsanyi_dividend(const Game& v, const FeatureSet& s);

GamePtr merge_game(GamePtr v, const MergeMap& map);
GamePtr permute_game(GamePtr v, std::vector<int> pi);

// Evaluates all 2^n subsets into a dense table. Subject to the exact cap.
TableGamePtr materialize_table(const Game& v, Exec exec = Exec::parallel);

// Dense-enumeration ceiling: kDefaultExactCap, lowered (never raised) by the
// EXPLAIN_EXACT_CAP environment variable.
int exact_cap();

void require_within_exact_cap(int n, const char* what);

}  // namespace binx
