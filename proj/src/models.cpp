#include "binx/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace binx {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw data_error(path + ": " + e.what());
  }
  return doc;
}

double require_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw data_error(where + ": missing numeric field \"" + key + "\"");
  }
  return j[key].get<double>();
}

int require_int(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw data_error(where + ": missing integer field \"" + key + "\"");
  }
  return j[key].get<int>();
}

std::shared_ptr<const DecisionTree> tree_from_json(const json& doc, const std::string& where) {
  const int arity = require_int(doc, "arity", where);
  if (!doc.contains("nodes") || !doc["nodes"].is_array() || doc["nodes"].empty()) {
    throw data_error(where + ": missing node array");
  }

  std::map<int, int> index_of_id;
  std::vector<TreeNode> nodes;
  std::vector<int> ids;
  for (const auto& jn : doc["nodes"]) {
    const int id = require_int(jn, "id", where);
    if (index_of_id.count(id)) {
      throw data_error(where + ": duplicate node id " + std::to_string(id));
    }
    TreeNode node;
    if (jn.contains("value")) {
      node.is_leaf = true;
      node.value = require_number(jn, "value", where + " node " + std::to_string(id));
    } else {
      const std::string at = where + " node " + std::to_string(id);
      node.feature = require_int(jn, "feature", at) - 1;  // file ids are 1-based
      if (node.feature < 0 || node.feature >= arity) {
        throw data_error(at + ": split feature out of range");
      }
      node.threshold = require_number(jn, "threshold", at);
      node.left = require_int(jn, "left", at);
      node.right = require_int(jn, "right", at);
    }
    index_of_id[id] = static_cast<int>(nodes.size());
    nodes.push_back(node);
    ids.push_back(id);
  }

  // Resolve child ids to indices and enforce single parenthood.
  std::vector<int> parents(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf) continue;
    const std::string at = where + " node " + std::to_string(ids[i]);
    for (int* child : {&nodes[i].left, &nodes[i].right}) {
      const auto it = index_of_id.find(*child);
      if (it == index_of_id.end()) {
        throw data_error(at + ": references unknown child " + std::to_string(*child));
      }
      *child = it->second;
      if (++parents[static_cast<std::size_t>(it->second)] > 1) {
        throw data_error(where + ": node " + std::to_string(ids[static_cast<std::size_t>(it->second)]) +
                         " has more than one parent");
      }
    }
  }

  const int root_id = require_int(doc, "root", where);
  const auto root_it = index_of_id.find(root_id);
  if (root_it == index_of_id.end()) {
    throw data_error(where + ": root id " + std::to_string(root_id) + " not found");
  }

  // Walk from the root: single parenthood plus full reachability rules out
  // cycles and orphan nodes.
  std::vector<bool> reached(nodes.size(), false);
  std::vector<int> stack{root_it->second};
  std::size_t count = 0;
  while (!stack.empty()) {
    const int at = stack.back();
    stack.pop_back();
    if (reached[static_cast<std::size_t>(at)]) {
      throw data_error(where + ": node " + std::to_string(ids[static_cast<std::size_t>(at)]) +
                       " reached twice (cycle)");
    }
    reached[static_cast<std::size_t>(at)] = true;
    ++count;
    if (!nodes[static_cast<std::size_t>(at)].is_leaf) {
      stack.push_back(nodes[static_cast<std::size_t>(at)].left);
      stack.push_back(nodes[static_cast<std::size_t>(at)].right);
    }
  }
  if (count != nodes.size()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!reached[i]) {
        throw data_error(where + ": node " + std::to_string(ids[i]) +
                         " is unreachable from the root");
      }
    }
  }

  return std::make_shared<DecisionTree>(arity, std::move(nodes), root_it->second);
}

ModelPtr builtin_from_json(const json& doc, const std::string& where) {
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw data_error(where + ": builtin spec needs a \"kind\"");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "threshold") {
    return std::make_shared<ThresholdModel>(require_int(doc, "n", where),
                                            require_int(doc, "k", where));
  }
  if (kind == "monomial") {
    const int n = require_int(doc, "n", where);
    Mask support = low_bits(n);
    if (doc.contains("support")) {
      support = 0;
      for (const auto& idx : doc["support"]) {
        const int i = idx.get<int>() - 1;
        if (i < 0 || i >= n) throw data_error(where + ": support index out of range");
        support |= Mask{1} << i;
      }
    }
    return std::make_shared<MonomialModel>(n, require_number(doc, "c", where),
                                           FeatureSet(support, n));
  }
  throw data_error(where + ": unknown builtin kind \"" + kind + "\"");
}

std::vector<double> table_values_from_json(const json& doc, const std::string& where, int* n_out) {
  const int n = require_int(doc, "n", where);
  if (n < 1 || n > kDefaultExactCap) {
    throw data_error(where + ": table feature count must be in 1.." +
                     std::to_string(kDefaultExactCap));
  }
  if (!doc.contains("values") || !doc["values"].is_array()) {
    throw data_error(where + ": missing value array");
  }
  const std::size_t expected = std::size_t{1} << n;
  if (doc["values"].size() != expected) {
    throw data_error(where + ": expected " + std::to_string(expected) + " values, got " +
                     std::to_string(doc["values"].size()));
  }
  std::vector<double> values;
  values.reserve(expected);
  for (const auto& v : doc["values"]) {
    if (!v.is_number()) throw data_error(where + ": non-numeric table value");
    values.push_back(v.get<double>());
  }
  *n_out = n;
  return values;
}

}  // namespace

DecisionTree::DecisionTree(int arity, std::vector<TreeNode> nodes, int root)
    : arity_(arity), nodes_(std::move(nodes)), root_(root) {
  if (arity < 1) throw data_error("tree arity must be positive");
  if (root < 0 || root >= static_cast<int>(nodes_.size())) {
    throw data_error("tree root index out of range");
  }
}

double DecisionTree::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != arity_) {
    throw dimension_error("tree expects " + std::to_string(arity_) + " inputs");
  }
  const TreeNode* node = &nodes_[static_cast<std::size_t>(root_)];
  while (!node->is_leaf) {
    const int next = x[static_cast<std::size_t>(node->feature)] <= node->threshold
                         ? node->left
                         : node->right;
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return node->value;
}

Forest::Forest(std::vector<std::shared_ptr<const DecisionTree>> trees)
    : trees_(std::move(trees)) {
  if (trees_.empty()) throw data_error("forest has no trees");
  arity_ = trees_.front()->arity();
  for (const auto& tree : trees_) {
    if (tree->arity() != arity_) {
      throw data_error("forest trees disagree on arity");
    }
  }
}

double Forest::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree->predict(x);
  return sum / static_cast<double>(trees_.size());
}

ThresholdModel::ThresholdModel(int n, int k) : n_(n), k_(k) {
  if (n < 1 || n > kMaxFeatures) throw argument_error("threshold model arity out of range");
  if (k < 1 || k > n) throw argument_error("threshold k must be in 1..n");
}

double ThresholdModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw dimension_error("threshold model expects " + std::to_string(n_) + " inputs");
  }
  int active = 0;
  for (double xi : x) active += xi >= 0.5 ? 1 : 0;
  return active >= k_ ? 1.0 : 0.0;
}

MonomialModel::MonomialModel(int n, double c, FeatureSet support)
    : n_(n), c_(c), support_(support.bits) {
  if (n < 1 || n > kMaxFeatures) throw argument_error("monomial model arity out of range");
  if (support.n != n) throw dimension_error("monomial support arity mismatch");
}

double MonomialModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw dimension_error("monomial model expects " + std::to_string(n_) + " inputs");
  }
  double prod = c_;
  for (Mask m = support_; m != 0; m &= m - 1) {
    prod *= x[static_cast<std::size_t>(std::countr_zero(m))];
  }
  return prod;
}

TruthTableModel::TruthTableModel(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n < 1 || n > kDefaultExactCap) throw argument_error("truth table arity out of range");
  if (values_.size() != (std::size_t{1} << n)) {
    throw argument_error("truth table needs 2^n values");
  }
}

double TruthTableModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw dimension_error("truth table expects " + std::to_string(n_) + " inputs");
  }
  Mask bits = 0;
  for (int i = 0; i < n_; ++i) {
    if (x[static_cast<std::size_t>(i)] >= 0.5) bits |= Mask{1} << i;
  }
  return values_[bits];
}

ModelPtr load_model(const std::string& path, ModelFormat format) {
  const json doc = read_json_file(path);
  switch (format) {
    case ModelFormat::tree_json:
      return tree_from_json(doc, path);
    case ModelFormat::forest_json: {
      if (!doc.contains("trees") || !doc["trees"].is_array()) {
        throw data_error(path + ": missing tree array");
      }
      std::vector<std::shared_ptr<const DecisionTree>> trees;
      int i = 0;
      for (const auto& jt : doc["trees"]) {
        trees.push_back(tree_from_json(jt, path + " tree " + std::to_string(i++)));
      }
      return std::make_shared<Forest>(std::move(trees));
    }
    case ModelFormat::table_json: {
      int n = 0;
      auto values = table_values_from_json(doc, path, &n);
      return std::make_shared<TruthTableModel>(n, std::move(values));
    }
    case ModelFormat::builtin_json:
      return builtin_from_json(doc, path);
  }
  throw argument_error("unknown model format");
}

ModelPtr parse_builtin(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0) {
    throw argument_error("builtin spec must start with \"builtin:\"");
  }
  std::istringstream in(spec.substr(prefix.size()));
  std::string token;
  if (!std::getline(in, token, ',')) {
    throw argument_error("empty builtin spec");
  }
  json doc;
  doc["kind"] = token;
  while (std::getline(in, token, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw argument_error("builtin parameter \"" + token + "\" is not key=value");
    }
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "support") {
      json indices = json::array();
      std::istringstream sup(value);
      std::string idx;
      while (std::getline(sup, idx, '+')) indices.push_back(std::stoi(idx));
      doc[key] = indices;
    } else if (key == "n" || key == "k") {
      doc[key] = std::stoi(value);
    } else {
      doc[key] = std::stod(value);
    }
  }
  try {
    return builtin_from_json(doc, spec);
  } catch (const data_error& e) {
    throw argument_error(e.what());
  }
}

TableGamePtr load_table_game(const std::string& path) {
  const json doc = read_json_file(path);
  int n = 0;
  auto values = table_values_from_json(doc, path, &n);
  return std::make_shared<TableGame>(n, std::move(values));
}

std::vector<LogicalFeature> logical_features(const Dataset& ds) {
  std::vector<LogicalFeature> features;
  std::map<std::string, std::size_t> group_index;
  for (int c = 0; c < static_cast<int>(ds.columns.size()); ++c) {
    const auto& col = ds.columns[static_cast<std::size_t>(c)];
    if (col.kind == ColumnKind::continuous) {
      features.push_back({col.name, {c}});
    } else {
      const auto it = group_index.find(col.group);
      if (it == group_index.end()) {
        group_index[col.group] = features.size();
        features.push_back({col.group, {c}});
      } else {
        features[it->second].columns.push_back(c);
      }
    }
  }
  return features;
}

BaselineSpec BaselineSpec::defaults(const Dataset& ds) {
  BaselineSpec spec;
  spec.rules.reserve(ds.columns.size());
  for (const auto& col : ds.columns) {
    BaselineRule rule;
    rule.kind = col.kind == ColumnKind::continuous ? BaselineRule::Kind::median
                                                   : BaselineRule::Kind::zero;
    spec.rules.push_back(rule);
  }
  return spec;
}

std::vector<double> build_baseline(const Dataset& ds, const BaselineSpec& spec) {
  if (ds.rows.empty()) throw data_error("cannot build a baseline from an empty dataset");
  if (spec.rules.size() != ds.columns.size()) {
    throw dimension_error("baseline spec has " + std::to_string(spec.rules.size()) +
                          " rules for " + std::to_string(ds.columns.size()) + " columns");
  }
  std::vector<double> baseline(ds.columns.size(), 0.0);
  for (std::size_t c = 0; c < ds.columns.size(); ++c) {
    switch (spec.rules[c].kind) {
      case BaselineRule::Kind::zero:
        baseline[c] = 0.0;
        break;
      case BaselineRule::Kind::explicit_value:
        baseline[c] = spec.rules[c].value;
        break;
      case BaselineRule::Kind::median: {
        std::vector<double> column;
        column.reserve(ds.rows.size());
        for (const auto& row : ds.rows) column.push_back(row[c]);
        std::sort(column.begin(), column.end());
        const std::size_t mid = column.size() / 2;
        baseline[c] = column.size() % 2 == 1 ? column[mid]
                                             : 0.5 * (column[mid - 1] + column[mid]);
        break;
      }
    }
  }
  return baseline;
}

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
  Dataset ds;

  const json schema = read_json_file(schema_path);
  if (!schema.contains("columns") || !schema["columns"].is_array()) {
    throw data_error(schema_path + ": missing column array");
  }
  for (const auto& jc : schema["columns"]) {
    ColumnSpec col;
    if (!jc.contains("name") || !jc["name"].is_string()) {
      throw data_error(schema_path + ": column without a name");
    }
    col.name = jc["name"].get<std::string>();
    const std::string kind = jc.value("kind", "continuous");
    if (kind == "continuous") {
      col.kind = ColumnKind::continuous;
    } else if (kind == "onehot") {
      col.kind = ColumnKind::onehot;
      col.group = jc.value("group", col.name);
    } else {
      throw data_error(schema_path + ": column \"" + col.name + "\" has unknown kind \"" +
                       kind + "\"");
    }
    ds.columns.push_back(col);
  }

  std::ifstream in(csv_path);
  if (!in) throw data_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw data_error(csv_path + ": empty file");

  // Header must match the schema column order.
  {
    std::istringstream header(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(header, cell, ',')) {
      if (c >= ds.columns.size() || cell != ds.columns[c].name) {
        throw data_error(csv_path + ": header column " + std::to_string(c + 1) +
                         " does not match the schema");
      }
      ++c;
    }
    if (c != ds.columns.size()) {
      throw data_error(csv_path + ": header has " + std::to_string(c) + " columns, schema has " +
                       std::to_string(ds.columns.size()));
    }
  }

  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) {
      double parsed = 0.0;
      const auto* begin = cell.data();
      const auto* end = begin + cell.size();
      const auto result = std::from_chars(begin, end, parsed);
      if (result.ec != std::errc{} || result.ptr != end) {
        throw data_error(csv_path + " row " + std::to_string(row_number) +
                         ": cannot parse \"" + cell + "\" as a number");
      }
      row.push_back(parsed);
    }
    if (row.size() != ds.columns.size()) {
      throw data_error(csv_path + " row " + std::to_string(row_number) + ": expected " +
                       std::to_string(ds.columns.size()) + " cells, got " +
                       std::to_string(row.size()));
    }
    ds.rows.push_back(std::move(row));
  }

  // Every one-hot group must have exactly one active indicator per row.
  for (const auto& feature : logical_features(ds)) {
    if (feature.columns.size() < 2 &&
        ds.columns[static_cast<std::size_t>(feature.columns.front())].kind !=
            ColumnKind::onehot) {
      continue;
    }
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
      double active = 0.0;
      for (int c : feature.columns) {
        const double v = ds.rows[r][static_cast<std::size_t>(c)];
        if (v != 0.0 && v != 1.0) {
          throw data_error(csv_path + " row " + std::to_string(r + 2) + ": one-hot column \"" +
                           ds.columns[static_cast<std::size_t>(c)].name +
                           "\" holds a non-indicator value");
        }
        active += v;
      }
      if (active != 1.0) {
        throw data_error(csv_path + " row " + std::to_string(r + 2) + ": one-hot group \"" +
                         feature.name + "\" does not have exactly one active indicator");
      }
    }
  }

  return ds;
}

GamePtr threshold_game(int n, int k) {
  auto model = std::make_shared<ThresholdModel>(n, k);
  return feature_effect_game(model, std::vector<double>(static_cast<std::size_t>(n), 1.0),
                             std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

GamePtr monomial_game(int n, double c, FeatureSet support) {
  auto model = std::make_shared<MonomialModel>(n, c, support);
  return feature_effect_game(model, std::vector<double>(static_cast<std::size_t>(n), 1.0),
                             std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

}  // namespace binx
