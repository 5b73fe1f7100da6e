#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "binx/indices.hpp"
#include "binx/models.hpp"
#include "test_util.hpp"

using namespace binx;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/binx_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("single-leaf and stump trees") {
  std::vector<TreeNode> leaf(1);
  leaf[0].is_leaf = true;
  leaf[0].value = 0.84;
  const DecisionTree constant(3, leaf, 0);
  CHECK(constant.predict(std::vector<double>{9, -1, 0.5}) == 0.84);

  std::vector<TreeNode> stump(3);
  stump[0].feature = 0;
  stump[0].threshold = 0.5;
  stump[0].left = 1;
  stump[0].right = 2;
  stump[1].is_leaf = true;
  stump[1].value = 0.0;
  stump[2].is_leaf = true;
  stump[2].value = 1.0;
  const DecisionTree t(1, stump, 0);
  CHECK(t.predict(std::vector<double>{1.0}) == 1.0);
  CHECK(t.predict(std::vector<double>{0.5}) == 0.0);  // ties descend left
}

TEST_CASE("the adult fixture tree reproduces its pinned predictions") {
  const auto model = load_model(testutil::fixture("adult_tree.json"), ModelFormat::tree_json);
  REQUIRE(model->arity() == 4);
  // Feature order: MS, CG, A, EL. POI and baseline below; coalitions flip
  // features between the two.
  const std::vector<double> poi{1, 6021, 32, 13};
  const std::vector<double> base{0, 0, 37, 10};
  const auto blend = [&](std::initializer_list<int> coalition) {
    std::vector<double> x = base;
    for (int i : coalition) x[static_cast<std::size_t>(i)] = poi[static_cast<std::size_t>(i)];
    return model->predict(x);
  };
  CHECK(blend({}) == 0.03);
  CHECK(blend({2, 3}) == 0.15);           // {A, EL}
  CHECK(blend({0, 2, 3}) == 0.67);        // {A, EL, MS}
  CHECK(blend({1, 2, 3}) == 0.15);        // {A, EL, CG}
  CHECK(blend({0, 1, 2, 3}) == 1.0);      // all
}

TEST_CASE("tree loader rejects malformed structures") {
  const std::string dup = write_temp("dup.json", R"({
    "arity": 1, "root": 0,
    "nodes": [{"id": 0, "value": 1.0}, {"id": 0, "value": 2.0}]})");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_model(dup, ModelFormat::tree_json)),
                       doctest::Contains("duplicate node id"), data_error);

  const std::string missing = write_temp("missing.json", R"({
    "arity": 1, "root": 0,
    "nodes": [{"id": 0, "feature": 1, "threshold": 0.5, "left": 1, "right": 2},
              {"id": 1, "value": 0.0}]})");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_model(missing, ModelFormat::tree_json)),
                       doctest::Contains("unknown child"), data_error);

  const std::string cycle = write_temp("cycle.json", R"({
    "arity": 1, "root": 0,
    "nodes": [{"id": 0, "feature": 1, "threshold": 0.5, "left": 1, "right": 2},
              {"id": 1, "feature": 1, "threshold": 0.2, "left": 0, "right": 2},
              {"id": 2, "value": 1.0}]})");
  CHECK_THROWS_AS(static_cast<void>(load_model(cycle, ModelFormat::tree_json)), data_error);

  const std::string orphan = write_temp("orphan.json", R"({
    "arity": 1, "root": 0,
    "nodes": [{"id": 0, "value": 1.0}, {"id": 5, "value": 2.0}]})");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_model(orphan, ModelFormat::tree_json)),
                       doctest::Contains("unreachable"), data_error);

  const std::string bad_feature = write_temp("feat.json", R"({
    "arity": 1, "root": 0,
    "nodes": [{"id": 0, "feature": 2, "threshold": 0.5, "left": 1, "right": 2},
              {"id": 1, "value": 0.0}, {"id": 2, "value": 1.0}]})");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_model(bad_feature, ModelFormat::tree_json)),
                       doctest::Contains("out of range"), data_error);
}

TEST_CASE("builtin specs load from files and inline strings") {
  const std::string thr = write_temp("thr.json", R"({"kind":"threshold","n":5,"k":3})");
  const auto model = load_model(thr, ModelFormat::builtin_json);
  CHECK(model->predict(std::vector<double>{1, 1, 1, 0, 0}) == 1.0);
  CHECK(model->predict(std::vector<double>{1, 1, 0, 0, 0}) == 0.0);

  const std::string mono = write_temp("mono.json",
                                      R"({"kind":"monomial","n":3,"c":2,"support":[1,2,3]})");
  CHECK(load_model(mono, ModelFormat::builtin_json)->predict(std::vector<double>{1, 1, 1}) == 2.0);

  const auto inline_thr = parse_builtin("builtin:threshold,n=5,k=3");
  CHECK(inline_thr->predict(std::vector<double>{0, 1, 1, 1, 0}) == 1.0);
  const auto inline_mono = parse_builtin("builtin:monomial,n=4,c=1.5,support=1+4");
  CHECK(inline_mono->predict(std::vector<double>{1, 0, 0, 1}) == 1.5);
  CHECK(inline_mono->predict(std::vector<double>{1, 1, 1, 0}) == 0.0);
  CHECK_THROWS_AS(parse_builtin("builtin:frobnicate,n=2"), argument_error);
  CHECK_THROWS_AS(parse_builtin("builtin:threshold,n=5,k"), argument_error);
}

TEST_CASE("truth-table models induce their own table game") {
  SplitMix64 rng{900};
  for (int n = 2; n <= 8; n += 3) {
    std::vector<double> values(std::size_t{1} << n);
    for (auto& v : values) v = uniform_pm1(rng);
    values[0] = 0.0;
    const auto model = std::make_shared<TruthTableModel>(n, values);
    const auto game = feature_effect_game(model, std::vector<double>(n, 1.0),
                                          std::vector<double>(n, 0.0));
    for (Mask m = 0; m < values.size(); ++m) {
      CHECK(game->at(m) == values[m]);
    }
  }
}

TEST_CASE("baseline construction") {
  Dataset ds;
  ds.columns = {{"a", ColumnKind::continuous, ""}};
  ds.rows = {{1}, {2}, {3}};
  CHECK(build_baseline(ds, BaselineSpec::defaults(ds)) == std::vector<double>{2});

  ds.rows = {{1}, {2}, {3}, {10}};
  CHECK(build_baseline(ds, BaselineSpec::defaults(ds)) == std::vector<double>{2.5});

  Dataset hot;
  hot.columns = {{"r", ColumnKind::onehot, "c"},
                 {"g", ColumnKind::onehot, "c"},
                 {"b", ColumnKind::onehot, "c"},
                 {"k", ColumnKind::onehot, "c"}};
  hot.rows = {{1, 0, 0, 0}, {0, 0, 1, 0}};
  CHECK(build_baseline(hot, BaselineSpec::defaults(hot)) ==
        std::vector<double>{0, 0, 0, 0});

  Dataset empty;
  empty.columns = ds.columns;
  CHECK_THROWS_AS(build_baseline(empty, BaselineSpec::defaults(empty)), data_error);

  BaselineSpec overridden = BaselineSpec::defaults(ds);
  overridden.rules[0] = {BaselineRule::Kind::explicit_value, 42.0};
  CHECK(build_baseline(ds, overridden) == std::vector<double>{42.0});
}

TEST_CASE("dataset loading and one-hot groups") {
  const auto ds = load_dataset(testutil::fixture("onehot_mini.csv"),
                               testutil::fixture("onehot_mini.schema.json"));
  REQUIRE(ds.columns.size() == 5);
  REQUIRE(ds.rows.size() == 4);
  const auto features = logical_features(ds);
  REQUIRE(features.size() == 3);
  CHECK(features[0].name == "age");
  CHECK(features[1].name == "color");
  CHECK(features[1].columns == std::vector<int>{1, 2, 3});
  CHECK(features[2].name == "income");

  const auto baseline = build_baseline(ds, BaselineSpec::defaults(ds));
  CHECK(baseline[0] == 34.0);  // median of 25,31,37,44
  CHECK(baseline[1] == 0.0);
  CHECK(baseline[2] == 0.0);
  CHECK(baseline[3] == 0.0);
  CHECK(baseline[4] == 1650.0);
}

TEST_CASE("one-hot groups toggle as a unit in the effect game") {
  struct SumModel final : Model {
    int arity() const override { return 5; }
    double predict(std::span<const double> x) const override {
      double s = 0.0;
      for (double xi : x) s += xi;
      return s;
    }
  };
  const auto ds = load_dataset(testutil::fixture("onehot_mini.csv"),
                               testutil::fixture("onehot_mini.schema.json"));
  std::vector<std::vector<int>> columns;
  for (const auto& f : logical_features(ds)) columns.push_back(f.columns);
  const std::vector<double> poi = ds.rows[1];  // (31, 0, 1, 0, 1500)
  const auto baseline = build_baseline(ds, BaselineSpec::defaults(ds));
  const auto game = feature_effect_game(std::make_shared<SumModel>(), poi, baseline, columns);
  REQUIRE(game->feature_count() == 3);
  // Toggling the color group flips all three indicator columns together.
  CHECK(game->value(FeatureSet::of({1}, 3)) == 1.0);
  CHECK(game->value(FeatureSet::of({0}, 3)) == 31.0 - 34.0);
}

TEST_CASE("dataset errors carry the offending row") {
  const std::string csv = write_temp("bad.csv", "a,b\n1,2\n1,oops\n");
  const std::string schema = write_temp("bad.schema.json", R"({
    "columns": [{"name":"a","kind":"continuous"},{"name":"b","kind":"continuous"}]})");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_dataset(csv, schema)),
                       doctest::Contains("row 3"), data_error);

  const std::string head = write_temp("head.csv", "a,c\n1,2\n");
  CHECK_THROWS_AS(static_cast<void>(load_dataset(head, schema)), data_error);

  const std::string bad_hot = write_temp("hot.csv", "r,g\n1,1\n");
  const std::string hot_schema = write_temp("hot.schema.json", R"({
    "columns": [{"name":"r","kind":"onehot","group":"c"},
                {"name":"g","kind":"onehot","group":"c"}]})");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_dataset(bad_hot, hot_schema)),
                       doctest::Contains("exactly one active"), data_error);
}

TEST_CASE("models are pure functions") {
  const auto model = load_model(testutil::fixture("adult_tree.json"), ModelFormat::tree_json);
  SplitMix64 rng{901};
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{uniform_pm1(rng), uniform_pm1(rng) * 7000,
                                uniform_pm1(rng) * 50 + 30, uniform_pm1(rng) * 5 + 10};
    const double first = model->predict(x);
    CHECK(model->predict(x) == first);
  }
}

TEST_CASE("threshold model induces the size-threshold game") {
  for (int n = 2; n <= 10; n += 2) {
    for (int k = 1; k <= n; k += 2) {
      const auto v = threshold_game(n, k);
      for (Mask m = 0; m < (Mask{1} << n); ++m) {
        CHECK(v->at(m) == (std::popcount(m) >= k ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("a forest game is the mean of its tree games") {
  SplitMix64 rng{902};
  std::vector<std::shared_ptr<const DecisionTree>> trees;
  for (int t = 0; t < 3; ++t) {
    std::vector<TreeNode> nodes(3);
    nodes[0].feature = static_cast<int>(rng.next() % 5);
    nodes[0].threshold = 0.5;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].is_leaf = true;
    nodes[1].value = uniform_pm1(rng);
    nodes[2].is_leaf = true;
    nodes[2].value = uniform_pm1(rng);
    trees.push_back(std::make_shared<DecisionTree>(5, std::move(nodes), 0));
  }
  const std::vector<double> poi(5, 1.0), base(5, 0.0);
  const auto forest_game =
      feature_effect_game(std::make_shared<Forest>(trees), poi, base);
  for (Mask m = 0; m < 32; ++m) {
    double mean = 0.0;
    for (const auto& tree : trees) {
      mean += feature_effect_game(tree, poi, base)->at(m);
    }
    mean /= 3.0;
    CHECK(forest_game->at(m) == doctest::Approx(mean).epsilon(1e-15));
  }
}
