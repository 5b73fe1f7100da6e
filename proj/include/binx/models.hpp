#pragma once

#include <memory>
#include <string>
#include <vector>

#include "binx/game.hpp"
#include "binx/model.hpp"
#include "binx/subsets.hpp"

namespace binx {

// ---- Concrete models -------------------------------------------------------

struct TreeNode {
  bool is_leaf = false;
  int feature = -1;        // 0-based split feature (internal nodes)
  double threshold = 0.0;  // x[feature] <= threshold descends left
  int left = -1, right = -1;
  double value = 0.0;  // leaf payload
};

class DecisionTree final : public Model {
 public:
  // Nodes are indexed by position; the loader resolves file ids to indices
  // and rejects anything that is not a rooted binary tree.
  DecisionTree(int arity, std::vector<TreeNode> nodes, int root);

  int arity() const override { return arity_; }
  double predict(std::span<const double> x) const override;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  int arity_;
  std::vector<TreeNode> nodes_;
  int root_;
};

class Forest final : public Model {
 public:
  explicit Forest(std::vector<std::shared_ptr<const DecisionTree>> trees);

  int arity() const override { return arity_; }
  // Mean over the member trees.
  double predict(std::span<const double> x) const override;

  const std::vector<std::shared_ptr<const DecisionTree>>& trees() const { return trees_; }

 private:
  std::vector<std::shared_ptr<const DecisionTree>> trees_;
  int arity_;
};

// predict(x) = 1 iff at least `k` inputs are >= 0.5.
class ThresholdModel final : public Model {
 public:
  ThresholdModel(int n, int k);
  int arity() const override { return n_; }
  double predict(std::span<const double> x) const override;
  int k() const { return k_; }

 private:
  int n_, k_;
};

// predict(x) = c * prod of x_i over the support.
class MonomialModel final : public Model {
 public:
  MonomialModel(int n, double c, FeatureSet support);
  int arity() const override { return n_; }
  double predict(std::span<const double> x) const override;

 private:
  int n_;
  double c_;
  Mask support_;
};

// Dense function of n binary inputs; x_i >= 0.5 reads as bit i set.
class TruthTableModel final : public Model {
 public:
  TruthTableModel(int n, std::vector<double> values);
  int arity() const override { return n_; }
  double predict(std::span<const double> x) const override;
  const std::vector<double>& values() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;
};

// ---- Loading ---------------------------------------------------------------

enum class ModelFormat { tree_json, forest_json, table_json, builtin_json };

ModelPtr load_model(const std::string& path, ModelFormat format);

// Inline builtin spec, e.g. "builtin:threshold,n=5,k=3" or
// "builtin:monomial,n=3,c=2,support=1+2+3" (support defaults to all features).
ModelPtr parse_builtin(const std::string& spec);

// Loads a truth-table *game* file {"n":..., "values":[...]}.
TableGamePtr load_table_game(const std::string& path);

// ---- Tabular data ------------------------------------------------------

enum class ColumnKind { continuous, onehot };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::string group;  // one-hot group label; empty for continuous columns
};

struct Dataset {
  std::vector<ColumnSpec> columns;
  std::vector<std::vector<double>> rows;
};

// A logical feature of the effect game: one continuous column, or a whole
// one-hot group toggled as a unit.
struct LogicalFeature {
  std::string name;
  std::vector<int> columns;
};

std::vector<LogicalFeature> logical_features(const Dataset& ds);

struct BaselineRule {
  enum class Kind { median, zero, explicit_value };
  Kind kind = Kind::median;
  double value = 0.0;
};

struct BaselineSpec {
  std::vector<BaselineRule> rules;  // one per column

  // Continuous columns take their median, one-hot groups all zeros.
  static BaselineSpec defaults(const Dataset& ds);
};

// Per-column baseline vector. Medians of even-length columns average the two
// middle values.
std::vector<double> build_baseline(const Dataset& ds, const BaselineSpec& spec);

// CSV with a header row and decimal-point reals, plus the sidecar schema
// {"columns":[{"name":..., "kind":"continuous"|"onehot", "group":...}]}.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);

// ---- Convenience games -------------------------------------------------

// Feature-effect game of the threshold model against poi = all ones and
// baseline = all zeros: worth 1 exactly on coalitions of size >= k.
GamePtr threshold_game(int n, int k);

// Feature-effect game of the c * x_{i1} ... x_{im} monomial against all ones
// and all zeros.
GamePtr monomial_game(int n, double c, FeatureSet support);

}  // namespace binx
