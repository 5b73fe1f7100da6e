// binx: feature-interaction explanations for black-box models viewed as
// cooperative games. Subcommands: explain, compare, check-axioms, polyfit,
// render.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "binx/axioms.hpp"
#include "binx/game.hpp"
#include "binx/indices.hpp"
#include "binx/models.hpp"
#include "binx/polyfit.hpp"
#include "binx/report.hpp"
#include "binx/sampling.hpp"

namespace {

using binx::IndexKind;
using binx::IndexTag;
using nlohmann::json;

constexpr int kExitBadFlags = 2;
constexpr int kExitLoadFailure = 3;
constexpr int kExitCapacity = 4;
constexpr int kExitAxiomViolation = 5;

struct GameSetup {
  binx::GamePtr game;
  binx::TableGamePtr table;  // set when --game was used
  std::vector<std::string> feature_names;
  binx::ReportMeta meta;
  double offset = 0.0;  // model output at the baseline
};

std::vector<double> parse_inline_row(const std::string& text, bool* ok) {
  std::vector<double> row;
  std::istringstream in(text);
  std::string cell;
  *ok = true;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) {
        *ok = false;
        return {};
      }
    } catch (const std::exception&) {
      *ok = false;
      return {};
    }
  }
  if (row.empty()) *ok = false;
  return row;
}

std::vector<double> parse_vector_arg(const std::string& text, const char* what) {
  bool ok = false;
  auto row = parse_inline_row(text, &ok);
  if (ok) return row;
  std::ifstream in(text);
  if (!in) {
    throw binx::data_error(std::string(what) + ": \"" + text +
                           "\" is neither an inline row nor a readable file");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw binx::data_error(text + ": " + e.what());
  }
  if (!doc.is_array()) throw binx::data_error(text + ": expected a JSON array");
  std::vector<double> out;
  for (const auto& v : doc) out.push_back(v.get<double>());
  return out;
}

binx::ModelFormat parse_format(const std::string& name) {
  if (name == "tree-json") return binx::ModelFormat::tree_json;
  if (name == "forest-json") return binx::ModelFormat::forest_json;
  if (name == "table-json") return binx::ModelFormat::table_json;
  if (name == "builtin-json") return binx::ModelFormat::builtin_json;
  throw binx::argument_error("unknown model format \"" + name + "\"");
}

struct ModelFlags {
  std::string model;
  std::string format;
  std::string poi;
  std::string baseline = "auto";
  std::string dataset;
  std::string schema;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags, bool poi_required) {
  cmd->add_option("--model", flags.model,
                  "model file, or inline builtin spec (builtin:threshold,n=..,k=.. | "
                  "builtin:monomial,n=..,c=..[,support=1+2+..])")
      ->required();
  cmd->add_option("--format", flags.format,
                  "model file format: tree-json, forest-json, table-json, builtin-json");
  auto* poi = cmd->add_option("--poi", flags.poi,
                              "point of interest: inline row v1,v2,... or a JSON array file");
  if (poi_required) poi->required();
  cmd->add_option("--baseline", flags.baseline,
                  "auto (dataset medians/zeros, else all zeros) or a JSON array file");
  cmd->add_option("--dataset", flags.dataset, "CSV with a header row");
  cmd->add_option("--schema", flags.schema,
                  "dataset sidecar {\"columns\":[{name, kind, group}]}");
}

GameSetup build_game(const ModelFlags& flags) {
  GameSetup setup;

  binx::ModelPtr model;
  if (flags.model.rfind("builtin:", 0) == 0) {
    model = binx::parse_builtin(flags.model);
  } else {
    if (flags.format.empty()) {
      throw binx::argument_error("--format is required for file models");
    }
    model = binx::load_model(flags.model, parse_format(flags.format));
  }

  std::optional<binx::Dataset> dataset;
  std::vector<std::vector<int>> columns;
  if (!flags.dataset.empty() || !flags.schema.empty()) {
    if (flags.dataset.empty() || flags.schema.empty()) {
      throw binx::argument_error("--dataset and --schema must be given together");
    }
    dataset = binx::load_dataset(flags.dataset, flags.schema);
    if (static_cast<int>(dataset->columns.size()) != model->arity()) {
      throw binx::data_error("dataset has " + std::to_string(dataset->columns.size()) +
                             " columns, model expects " + std::to_string(model->arity()));
    }
    for (const auto& feature : binx::logical_features(*dataset)) {
      setup.feature_names.push_back(feature.name);
      columns.push_back(feature.columns);
    }
  } else {
    for (int i = 0; i < model->arity(); ++i) columns.push_back({i});
    setup.feature_names = binx::default_feature_names(model->arity());
  }

  const std::vector<double> poi = parse_vector_arg(flags.poi, "--poi");

  std::vector<double> baseline;
  if (flags.baseline == "auto") {
    if (dataset.has_value()) {
      baseline = binx::build_baseline(*dataset, binx::BaselineSpec::defaults(*dataset));
    } else {
      baseline.assign(static_cast<std::size_t>(model->arity()), 0.0);
    }
  } else {
    baseline = parse_vector_arg(flags.baseline, "--baseline");
  }

  setup.meta.model_id = flags.model;
  setup.meta.poi_id = flags.poi;
  setup.meta.baseline_id = flags.baseline;
  setup.offset = model->predict(baseline);
  setup.game = binx::feature_effect_game(model, poi, baseline, columns);
  return setup;
}

void emit(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw binx::data_error("cannot write " + out_path);
    out << text;
  }
}

struct SamplingFlags {
  bool exact = false;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double bound_m = 1.0;
};

void add_sampling_flags(CLI::App* cmd, SamplingFlags& flags) {
  auto* exact = cmd->add_flag("--exact", flags.exact, "exact enumeration (n capped)");
  auto* samples = cmd->add_option("--samples", flags.samples, "Monte-Carlo draws per entry");
  cmd->add_option("--seed", flags.seed, "sampling seed");
  auto* eps = cmd->add_option("--epsilon", flags.epsilon, "additive error target (sizes draws)");
  cmd->add_option("--delta", flags.delta, "failure probability for --epsilon");
  cmd->add_option("--bound-m", flags.bound_m, "a priori bound on |v(S)|");
  exact->excludes(samples);
  exact->excludes(eps);
}

IndexKind parse_index_flag(const std::string& name, int order) {
  auto kind = IndexKind::parse(name);
  if (!kind.has_value()) {
    throw binx::argument_error("unknown index \"" + name + "\"");
  }
  if (kind->tag == IndexTag::shapley_taylor) kind->taylor_order = order;
  return *kind;
}

binx::InteractionReport run_one_report(const GameSetup& setup, const IndexKind& kind,
                                       int order, const SamplingFlags& sampling) {
  if (sampling.exact) {
    auto report = binx::compute_report(setup.game, kind, order);
    report.meta = setup.meta;
    return report;
  }
  binx::SampleSpec spec;
  spec.samples = sampling.samples;
  if (sampling.epsilon > 0.0 || sampling.delta > 0.0) {
    spec.samples = 0;
    spec.plan = binx::SamplePlan{sampling.epsilon, sampling.delta, sampling.bound_m};
  }
  auto report = binx::sample_report(setup.game, kind, order, spec, sampling.seed);
  report.meta = setup.meta;
  report.meta.seed = sampling.seed;
  return report;
}

void attach_plan_metadata(json& doc, const SamplingFlags& sampling, int order) {
  if (!(sampling.epsilon > 0.0)) return;
  json plan;
  plan["epsilon"] = sampling.epsilon;
  plan["delta"] = sampling.delta;
  plan["bound_m"] = sampling.bound_m;
  json by_size = json::object();
  const binx::SamplePlan p{sampling.epsilon, sampling.delta, sampling.bound_m};
  for (int s = 1; s <= order; ++s) {
    by_size[std::to_string(s)] = binx::plan_samples(p, s);
  }
  plan["samples_by_size"] = std::move(by_size);
  doc["metadata"]["plan"] = std::move(plan);
}

void require_mode(const SamplingFlags& sampling) {
  if (!sampling.exact && sampling.samples == 0 && !(sampling.epsilon > 0.0)) {
    throw binx::argument_error("choose --exact, --samples N, or --epsilon/--delta");
  }
  if (sampling.epsilon > 0.0 && !(sampling.delta > 0.0)) {
    throw binx::argument_error("--epsilon needs --delta");
  }
}

// ---- subcommands -----------------------------------------------------------

int cmd_explain(const ModelFlags& model_flags, const SamplingFlags& sampling,
                const std::string& index_name, int order, const std::string& out_path) {
  require_mode(sampling);
  const GameSetup setup = build_game(model_flags);
  const IndexKind kind = parse_index_flag(index_name, order);
  const auto report = run_one_report(setup, kind, order, sampling);
  json doc = binx::report_to_json(report, setup.feature_names);
  if (report.sampled) attach_plan_metadata(doc, sampling, order);
  emit(doc, out_path);
  return 0;
}

int cmd_compare(const ModelFlags& model_flags, const SamplingFlags& sampling,
                const std::vector<std::string>& index_names, int order,
                const std::string& out_path) {
  if (index_names.size() < 2) {
    throw binx::argument_error("compare needs at least two --index flags");
  }
  if (!sampling.exact) {
    throw binx::argument_error("compare runs in --exact mode (rival indices have no sampler)");
  }
  const GameSetup setup = build_game(model_flags);
  std::vector<binx::InteractionReport> reports;
  for (const auto& name : index_names) {
    reports.push_back(run_one_report(setup, parse_index_flag(name, order), order, sampling));
  }
  emit(binx::compare_to_json(reports, setup.feature_names), out_path);
  return 0;
}

int cmd_check_axioms(const std::string& index_name, int n, int trials, std::uint64_t seed,
                     const std::string& out_path) {
  if (trials < 1) throw binx::argument_error("--trials must be positive");
  auto kind = IndexKind::parse(index_name);
  if (!kind.has_value()) throw binx::argument_error("unknown index \"" + index_name + "\"");

  std::vector<binx::AxiomCheckResult> results;
  int total_violations = 0;
  for (binx::Axiom axiom : binx::applicable_axioms(*kind)) {
    binx::GameGenerator gen;
    gen.n = n;
    gen.seed = seed;
    gen.family = axiom == binx::Axiom::monotonicity ? binx::GameFamily::monotone_pair
                                                    : binx::GameFamily::random_table;
    results.push_back(binx::check_axiom(axiom, *kind, gen, trials));
    total_violations += results.back().violations;
  }
  emit(binx::axiom_results_to_json(results, *kind, n, trials, seed), out_path);
  if (kind->tag == IndexTag::bii && total_violations > 0) {
    return kExitAxiomViolation;
  }
  return 0;
}

int cmd_polyfit(const ModelFlags& model_flags, const std::string& game_path, int degree,
                bool have_model, const std::string& out_path) {
  binx::TableGamePtr table;
  double offset = 0.0;
  if (!game_path.empty()) {
    table = binx::load_table_game(game_path);
  } else if (have_model) {
    const GameSetup setup = build_game(model_flags);
    table = binx::materialize_table(*setup.game);
    offset = setup.offset;
  } else {
    throw binx::argument_error("polyfit needs --game or --model");
  }
  const auto fit = binx::fit_polynomial(*table, degree, offset);
  const auto check = binx::topdegree_vs_bii(*table, fit);
  emit(binx::polyfit_to_json(fit, check.max_discrepancy), out_path);
  return 0;
}

int cmd_render(const std::string& in_path, const std::string& format) {
  json doc;
  try {
    if (in_path.empty()) {
      std::cin >> doc;
    } else {
      std::ifstream in(in_path);
      if (!in) throw binx::data_error("cannot open " + in_path);
      in >> doc;
    }
  } catch (const json::exception& e) {
    throw binx::data_error(std::string("report parse: ") + e.what());
  }
  std::vector<std::string> names;
  const auto report = binx::report_from_json(doc, &names);
  const auto fmt = format == "csv" ? binx::HeatmapFormat::csv : binx::HeatmapFormat::ascii;
  std::cout << binx::render_heatmap(report, names, fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-interaction explanations for black-box models"};
  app.require_subcommand(1);

  ModelFlags model_flags;
  SamplingFlags sampling;
  std::string index_name = "bii";
  std::vector<std::string> index_names;
  int order = 2;
  int n = 5;
  int trials = 200;
  std::uint64_t seed = 0;
  int degree = 2;
  std::string out_path;
  std::string game_path;
  std::string in_path;
  std::string render_format = "ascii";

  auto* explain = app.add_subcommand("explain", "interaction report for one index");
  add_model_flags(explain, model_flags, /*poi_required=*/true);
  explain->add_option("--index", index_name, "index to compute")->required();
  explain->add_option("--order", order, "largest subset size")->required();
  add_sampling_flags(explain, sampling);
  explain->add_option("--out", out_path, "write the document here instead of stdout");

  auto* compare = app.add_subcommand("compare", "side-by-side reports for several indices");
  add_model_flags(compare, model_flags, /*poi_required=*/true);
  compare->add_option("--index", index_names, "indices to compare (repeat)")->required();
  compare->add_option("--order", order, "largest subset size")->required();
  add_sampling_flags(compare, sampling);
  compare->add_option("--out", out_path, "write the document here instead of stdout");

  auto* axioms = app.add_subcommand("check-axioms", "seeded conformance trials for one index");
  axioms->add_option("--index", index_name, "index under test")->required();
  axioms->add_option("--n", n, "feature count of the generated games")->required();
  axioms->add_option("--trials", trials, "trials per axiom")->required();
  axioms->add_option("--seed", seed, "trial seed");
  axioms->add_option("--out", out_path, "write the document here instead of stdout");

  auto* polyfit = app.add_subcommand("polyfit", "least-squares polynomial approximation");
  add_model_flags(polyfit, model_flags, /*poi_required=*/false);
  polyfit->get_option("--model")->required(false);
  polyfit->add_option("--game", game_path, "truth-table game file {\"n\":..,\"values\":[..]}");
  polyfit->add_option("--degree", degree, "polynomial degree")->required();
  polyfit->add_option("--out", out_path, "write the document here instead of stdout");

  auto* render = app.add_subcommand("render", "heatmap for a report document");
  render->add_option("--in", in_path, "report JSON (stdin when omitted)");
  render->add_option("--format", render_format, "ascii or csv")
      ->check(CLI::IsMember({"ascii", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadFlags;
  }

  try {
    if (explain->parsed()) {
      return cmd_explain(model_flags, sampling, index_name, order, out_path);
    }
    if (compare->parsed()) {
      return cmd_compare(model_flags, sampling, index_names, order, out_path);
    }
    if (axioms->parsed()) {
      return cmd_check_axioms(index_name, n, trials, seed, out_path);
    }
    if (polyfit->parsed()) {
      return cmd_polyfit(model_flags, game_path, degree,
                         polyfit->get_option("--model")->count() > 0, out_path);
    }
    if (render->parsed()) {
      return cmd_render(in_path, render_format);
    }
  } catch (const binx::capacity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const binx::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadFailure;
  } catch (const binx::argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const binx::dimension_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadFailure;
  }
  return 0;
}
