#include "binx/axioms.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "binx/mobius.hpp"
#include "binx/models.hpp"

namespace binx {

using nlohmann::json;

namespace {

// Shapley-Taylor needs an explicit order; inside the harness an unset or
// oversized order means "top order of this game", which keeps the index
// well-defined on merged games with fewer features.
double eval_for_axiom(const Game& v, const FeatureSet& s, IndexKind kind) {
  if (kind.tag == IndexTag::shapley_taylor &&
      (kind.taylor_order == 0 || kind.taylor_order > v.feature_count())) {
    kind.taylor_order = v.feature_count();
  }
  return evaluate_index(v, s, kind);
}

bool singleton_only(const IndexKind& kind) {
  return kind.tag == IndexTag::banzhaf || kind.tag == IndexTag::shapley;
}

Mask random_subset_for_index(const IndexKind& kind, int n, SplitMix64& rng) {
  if (singleton_only(kind)) {
    return Mask{1} << (rng.next() % static_cast<std::uint64_t>(n));
  }
  return random_nonempty_mask(n, rng);
}

struct TrialOutcome {
  bool violated = false;
  Witness witness;
};

TrialOutcome symmetry_trial(const IndexKind& index, const TableGamePtr& v, SplitMix64& rng) {
  const int n = v->feature_count();
  const auto pi = random_permutation(n, rng);
  const FeatureSet s(random_subset_for_index(index, n, rng), n);
  Mask pi_s = 0;
  for (int i : s.members()) pi_s |= Mask{1} << pi[static_cast<std::size_t>(i)];

  TrialOutcome out;
  out.witness.axiom = Axiom::symmetry;
  out.witness.permutation = pi;
  out.witness.subset = s.bits;
  out.witness.lhs = eval_for_axiom(*v, s, index);
  out.witness.rhs = eval_for_axiom(*permute_game(v, pi), FeatureSet(pi_s, n), index);
  out.violated = std::abs(out.witness.lhs - out.witness.rhs) > kAxiomEqualityTol;
  return out;
}

TrialOutcome ge_trial(const IndexKind& index, const TableGamePtr& v, SplitMix64& rng) {
  const int n = v->feature_count();
  const int i = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
  int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1));
  if (j >= i) ++j;
  // Singleton indices see the classic 2-efficiency split (S empty).
  Mask s_rest = singleton_only(index)
                    ? 0
                    : random_mask(n, rng) & ~((Mask{1} << i) | (Mask{1} << j));

  const MergeMap map = MergeMap::merge_pair(n, i, j);
  const GamePtr merged = merge_game(v, map);
  Mask merged_subset = Mask{1} << map.merged_index_of(i);
  for (Mask m = s_rest; m != 0; m &= m - 1) {
    merged_subset |= Mask{1} << map.merged_index_of(std::countr_zero(m));
  }

  TrialOutcome out;
  out.witness.axiom = Axiom::ge;
  out.witness.merge_i = i;
  out.witness.merge_j = j;
  out.witness.subset = s_rest;
  out.witness.lhs = eval_for_axiom(*merged, FeatureSet(merged_subset, map.merged_n()), index);
  out.witness.rhs = eval_for_axiom(*v, FeatureSet(s_rest | (Mask{1} << i), n), index) +
                    eval_for_axiom(*v, FeatureSet(s_rest | (Mask{1} << j), n), index);
  out.violated = std::abs(out.witness.lhs - out.witness.rhs) > kAxiomEqualityTol;
  return out;
}

TrialOutcome limit_trial(const IndexKind& index, const TableGamePtr& v) {
  const int n = v->feature_count();
  TrialOutcome out;
  out.witness.axiom = Axiom::limit;
  out.witness.subset = low_bits(n);
  out.witness.lhs = eval_for_axiom(*v, FeatureSet::full(n), index);
  out.witness.rhs = harsanyi_dividend(*v, FeatureSet::full(n));
  out.violated = std::abs(out.witness.lhs - out.witness.rhs) > kAxiomEqualityTol;
  return out;
}

TrialOutcome monotonicity_trial(const IndexKind& index, const GameGenerator& gen,
                                std::uint64_t trial, SplitMix64& rng) {
  const int n = gen.n;
  const TableGamePtr base = gen.make(trial);
  const Mask s_bits = gen.monotone_subset.value_or(random_subset_for_index(index, n, rng));
  const Mask t_star = random_mask(n, rng) & ~s_bits;
  const TableGamePtr raised = bump_table(*base, s_bits | t_star, gen.epsilon);

  TrialOutcome out;
  out.witness.axiom = Axiom::monotonicity;
  out.witness.game2 = base->values();
  out.witness.subset = s_bits;
  out.witness.game = raised->values();
  const FeatureSet s(s_bits, n);
  out.witness.lhs = eval_for_axiom(*raised, s, index);
  out.witness.rhs = eval_for_axiom(*base, s, index);
  out.violated = !(out.witness.lhs - out.witness.rhs > kStrictMargin);
  return out;
}

TrialOutcome null_trial(const IndexKind& index, int n, SplitMix64& rng) {
  // A game whose primitive-basis support never contains S has all S
  // derivatives identically zero.
  const Mask s_bits = random_subset_for_index(index, n, rng);
  MobiusCoefficients coeffs;
  coeffs.n = n;
  coeffs.coeffs.assign(std::size_t{1} << n, 0.0);
  for (Mask r = 0; r < (Mask{1} << n); ++r) {
    if ((s_bits & ~r) != 0) coeffs.coeffs[r] = uniform_pm1(rng);
  }
  const TableGamePtr w = reconstruct_game(coeffs, Exec::serial);

  TrialOutcome out;
  out.witness.axiom = Axiom::null_lemma;
  out.witness.game = w->values();
  out.witness.subset = s_bits;
  out.witness.lhs = eval_for_axiom(*w, FeatureSet(s_bits, n), index);
  out.witness.rhs = 0.0;
  out.violated = std::abs(out.witness.lhs) > kAxiomEqualityTol;
  return out;
}

TrialOutcome primitive_law_trial(Axiom axiom, const IndexKind& index, int n, SplitMix64& rng) {
  Mask r_bits = random_nonempty_mask(n, rng);
  if (axiom == Axiom::primitive_off_support) {
    // Needs some S outside the support, so the support must be proper.
    while (r_bits == low_bits(n)) r_bits = random_nonempty_mask(n, rng);
  }
  const double c = uniform_pm1(rng) * 4.0;
  const GamePtr scaled = std::make_shared<ScaledGame>(
      c, std::make_shared<PrimitiveGame>(FeatureSet(r_bits, n)));

  TrialOutcome out;
  out.witness.axiom = axiom;
  out.witness.game = materialize_table(*scaled, Exec::serial)->values();

  if (axiom == Axiom::primitive_off_support) {
    // Any S not inside the support: zero derivative everywhere, zero value.
    Mask s_bits = random_nonempty_mask(n, rng);
    while ((s_bits & ~r_bits) == 0) s_bits = random_nonempty_mask(n, rng);
    const FeatureSet s(s_bits, n);
    const Mask t_bits = random_mask(n, rng) & ~s_bits;
    out.witness.subset = s_bits;
    const double derivative = discrete_derivative(*scaled, s, FeatureSet(t_bits, n));
    out.witness.lhs = eval_for_axiom(*scaled, s, index);
    out.witness.rhs = 0.0;
    out.violated = derivative != 0.0 || out.witness.lhs != 0.0;
    return out;
  }

  Mask s_bits;
  if (axiom == Axiom::primitive_support) {
    s_bits = r_bits;
  } else {
    s_bits = random_nonempty_mask(n, rng) & r_bits;
    if (s_bits == 0) s_bits = r_bits & (~r_bits + 1);  // lowest support bit
  }
  const FeatureSet s(s_bits, n);
  out.witness.subset = s_bits;
  out.witness.lhs = eval_for_axiom(*scaled, s, index);
  out.witness.rhs = std::ldexp(c, -(std::popcount(r_bits) - std::popcount(s_bits)));
  out.violated = std::abs(out.witness.lhs - out.witness.rhs) > kStrictMargin;
  return out;
}

void fold_outcome(AxiomCheckResult& result, TrialOutcome&& out, const IndexKind& index, int n) {
  ++result.trials;
  if (!out.violated) return;
  ++result.violations;
  out.witness.index = index;
  out.witness.n = n;
  if (!result.worst_witness.has_value() ||
      out.witness.magnitude() > result.worst_witness->magnitude()) {
    result.worst_witness = std::move(out.witness);
  }
}

}  // namespace

const char* axiom_name(Axiom axiom) {
  switch (axiom) {
    case Axiom::symmetry: return "symmetry";
    case Axiom::ge: return "ge";
    case Axiom::limit: return "limit";
    case Axiom::monotonicity: return "monotonicity";
    case Axiom::null_lemma: return "null";
    case Axiom::primitive_off_support: return "primitive_off_support";
    case Axiom::primitive_scaling: return "primitive_scaling";
    case Axiom::primitive_support: return "primitive_support";
  }
  return "?";
}

std::optional<Axiom> parse_axiom(const std::string& name) {
  for (Axiom a : {Axiom::symmetry, Axiom::ge, Axiom::limit, Axiom::monotonicity,
                  Axiom::null_lemma, Axiom::primitive_off_support,
                  Axiom::primitive_scaling, Axiom::primitive_support}) {
    if (name == axiom_name(a)) return a;
  }
  return std::nullopt;
}

double Witness::magnitude() const { return std::abs(lhs - rhs); }

double uniform_pm1(SplitMix64& rng) {
  return static_cast<double>(rng.next() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

Mask random_mask(int n, SplitMix64& rng) { return rng.next() & low_bits(n); }

Mask random_nonempty_mask(int n, SplitMix64& rng) {
  Mask m = random_mask(n, rng);
  while (m == 0) m = random_mask(n, rng);
  return m;
}

std::vector<int> random_permutation(int n, SplitMix64& rng) {
  std::vector<int> pi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pi[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % static_cast<std::uint64_t>(i + 1));
    std::swap(pi[static_cast<std::size_t>(i)], pi[j]);
  }
  return pi;
}

TableGamePtr random_table_game(int n, SplitMix64& rng) {
  std::vector<double> values(std::size_t{1} << n);
  for (auto& v : values) v = uniform_pm1(rng);
  values[0] = 0.0;
  return std::make_shared<TableGame>(n, std::move(values));
}

TableGamePtr bump_table(const TableGame& v, Mask support, double bump) {
  std::vector<double> values = v.values();
  for (Mask x = 0; x < values.size(); ++x) {
    if ((support & ~x) == 0) values[x] += bump;
  }
  return std::make_shared<TableGame>(v.feature_count(), std::move(values));
}

TableGamePtr GameGenerator::make(std::uint64_t trial) const {
  SplitMix64 rng{derive_stream_seed(seed, trial)};
  switch (family) {
    case GameFamily::random_table:
    case GameFamily::monotone_pair:  // base game of the pair
      return random_table_game(n, rng);
    case GameFamily::mobius_sparse: {
      MobiusCoefficients coeffs;
      coeffs.n = n;
      coeffs.coeffs.assign(std::size_t{1} << n, 0.0);
      for (auto& c : coeffs.coeffs) {
        const double roll = static_cast<double>(rng.next() >> 11) / 9007199254740992.0;
        if (roll < density) c = uniform_pm1(rng);
      }
      coeffs.coeffs[0] = 0.0;
      return reconstruct_game(coeffs, Exec::serial);
    }
    case GameFamily::primitive: {
      const Mask r = support.value_or(random_nonempty_mask(n, rng));
      return materialize_table(PrimitiveGame(FeatureSet(r, n)), Exec::serial);
    }
    case GameFamily::threshold:
      return materialize_table(*threshold_game(n, threshold_k), Exec::serial);
    case GameFamily::monomial: {
      const Mask r = support.value_or(random_nonempty_mask(n, rng));
      return materialize_table(*monomial_game(n, coefficient, FeatureSet(r, n)), Exec::serial);
    }
  }
  throw argument_error("unknown game family");
}

AxiomCheckResult check_axiom(Axiom axiom, const IndexKind& index, const GameGenerator& gen,
                             int trials) {
  if (trials < 1) throw argument_error("axiom checks need at least one trial");
  if (axiom == Axiom::monotonicity && gen.family != GameFamily::monotone_pair) {
    throw argument_error("monotonicity needs paired games; use the monotone_pair family");
  }
  const bool primitive_law = axiom == Axiom::primitive_off_support ||
                             axiom == Axiom::primitive_scaling ||
                             axiom == Axiom::primitive_support;
  if (primitive_law && index.tag != IndexTag::bii) {
    throw argument_error(std::string(axiom_name(axiom)) +
                         " pins the closed form of bii; not applicable to " + index.name());
  }
  if (axiom == Axiom::primitive_off_support && gen.n < 2) {
    throw argument_error("primitive_off_support needs at least two features");
  }
  if (axiom == Axiom::limit && singleton_only(index)) {
    throw argument_error("the limit condition evaluates the full set; " + index.name() +
                         " is singleton-only");
  }
  require_within_exact_cap(gen.n, "check_axiom");

  AxiomCheckResult result;
  result.axiom = axiom;
  result.index = index;
  for (int trial = 0; trial < trials; ++trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    // Auxiliary draws (permutations, subsets, bumps) live on a stream
    // disjoint from the game streams.
    SplitMix64 rng{derive_stream_seed(gen.seed, t | (std::uint64_t{1} << 32))};
    TrialOutcome out;
    switch (axiom) {
      case Axiom::symmetry:
        out = symmetry_trial(index, gen.make(t), rng);
        break;
      case Axiom::ge:
        out = ge_trial(index, gen.make(t), rng);
        break;
      case Axiom::limit:
        out = limit_trial(index, gen.make(t));
        break;
      case Axiom::monotonicity:
        out = monotonicity_trial(index, gen, t, rng);
        break;
      case Axiom::null_lemma:
        out = null_trial(index, gen.n, rng);
        break;
      case Axiom::primitive_off_support:
      case Axiom::primitive_scaling:
      case Axiom::primitive_support:
        out = primitive_law_trial(axiom, index, gen.n, rng);
        break;
    }
    if (out.violated && out.witness.game.empty()) {
      out.witness.game = gen.make(t)->values();
    }
    fold_outcome(result, std::move(out), index, gen.n);
  }
  return result;
}

AxiomCheckResult check_monotonicity_pair(const IndexKind& index, const Game& raised,
                                         const Game& base, const FeatureSet& s) {
  const int n = base.feature_count();
  if (raised.feature_count() != n) {
    throw dimension_error("monotonicity pair games disagree on the feature count");
  }
  require_within_exact_cap(n, "check_monotonicity_pair");

  // Hypothesis: derivatives of `raised` dominate, strictly somewhere.
  const Mask comp = s.complement();
  const int m = n - s.size();
  bool strict = false;
  for (Mask idx = 0; idx < (Mask{1} << m); ++idx) {
    const FeatureSet t(scatter_bits(idx, comp), n);
    const double d_raised = discrete_derivative(raised, s, t);
    const double d_base = discrete_derivative(base, s, t);
    if (d_raised < d_base - kStrictMargin) {
      throw argument_error("pair does not satisfy the monotonicity hypothesis");
    }
    if (d_raised > d_base + kStrictMargin) strict = true;
  }
  if (!strict) {
    throw argument_error("pair derivatives are identical; strict hypothesis unmet");
  }

  AxiomCheckResult result;
  result.axiom = Axiom::monotonicity;
  result.index = index;
  TrialOutcome out;
  out.witness.axiom = Axiom::monotonicity;
  out.witness.game = materialize_table(raised, Exec::serial)->values();
  out.witness.game2 = materialize_table(base, Exec::serial)->values();
  out.witness.subset = s.bits;
  out.witness.lhs = eval_for_axiom(raised, s, index);
  out.witness.rhs = eval_for_axiom(base, s, index);
  out.violated = !(out.witness.lhs - out.witness.rhs > kStrictMargin);
  fold_outcome(result, std::move(out), index, n);
  return result;
}

const std::vector<Axiom>& applicable_axioms(const IndexKind& index) {
  static const std::vector<Axiom> all = {
      Axiom::symmetry,   Axiom::ge,
      Axiom::limit,      Axiom::monotonicity,
      Axiom::null_lemma, Axiom::primitive_off_support,
      Axiom::primitive_scaling, Axiom::primitive_support};
  static const std::vector<Axiom> interaction = {Axiom::symmetry, Axiom::ge, Axiom::limit,
                                                 Axiom::monotonicity, Axiom::null_lemma};
  static const std::vector<Axiom> singleton = {Axiom::symmetry, Axiom::ge,
                                               Axiom::monotonicity, Axiom::null_lemma};
  if (index.tag == IndexTag::bii) return all;
  if (singleton_only(index)) return singleton;
  return interaction;
}

ThresholdAudit threshold_game_audit(int n, int k) {
  if (n > 16) throw capacity_error("threshold audit is limited to 16 features");
  if (k < 2 || k > n - 1) {
    throw argument_error("threshold audit needs 2 <= k <= n-1");
  }
  const TableGamePtr table = materialize_table(*threshold_game(n, k));
  const FeatureSet pair = FeatureSet::of({0, 1}, n);
  ThresholdAudit audit;
  audit.bii_pair = bii_exact(*table, pair);
  audit.sii_pair = sii_exact(*table, pair);
  audit.shapley_taylor_pair = shapley_taylor(*table, pair, 2);
  return audit;
}

namespace {

json index_to_json(const IndexKind& kind) {
  json j;
  j["name"] = kind.name();
  if (kind.tag == IndexTag::shapley_taylor) j["order"] = kind.taylor_order;
  return j;
}

IndexKind index_from_json(const json& j) {
  auto kind = IndexKind::parse(j.at("name").get<std::string>());
  if (!kind.has_value()) throw data_error("witness references an unknown index");
  if (j.contains("order")) kind->taylor_order = j["order"].get<int>();
  return *kind;
}

std::vector<int> subset_to_indices(Mask subset) {
  std::vector<int> out;
  for (Mask m = subset; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
  return out;
}

Mask indices_to_subset(const json& arr) {
  Mask m = 0;
  for (const auto& i : arr) {
    const int idx = i.get<int>();
    if (idx < 1 || idx > kMaxFeatures) {
      throw data_error("witness subset index out of range: " + std::to_string(idx));
    }
    m |= Mask{1} << (idx - 1);
  }
  return m;
}

}  // namespace

std::string witness_to_json(const Witness& w) {
  json j;
  j["axiom"] = axiom_name(w.axiom);
  j["index"] = index_to_json(w.index);
  j["n"] = w.n;
  j["game"] = w.game;
  if (!w.game2.empty()) j["game2"] = w.game2;
  if (!w.permutation.empty()) j["permutation"] = w.permutation;
  if (w.merge_i >= 0) {
    j["merge"] = {w.merge_i + 1, w.merge_j + 1};
  }
  j["subset"] = subset_to_indices(w.subset);
  j["lhs"] = w.lhs;
  j["rhs"] = w.rhs;
  return j.dump();
}

Witness witness_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw data_error(std::string("witness parse: ") + e.what());
  }
  Witness w;
  const auto axiom = parse_axiom(j.at("axiom").get<std::string>());
  if (!axiom.has_value()) throw data_error("witness references an unknown axiom");
  w.axiom = *axiom;
  w.index = index_from_json(j.at("index"));
  w.n = j.at("n").get<int>();
  w.game = j.at("game").get<std::vector<double>>();
  if (j.contains("game2")) w.game2 = j["game2"].get<std::vector<double>>();
  if (j.contains("permutation")) w.permutation = j["permutation"].get<std::vector<int>>();
  if (j.contains("merge")) {
    w.merge_i = j["merge"][0].get<int>() - 1;
    w.merge_j = j["merge"][1].get<int>() - 1;
  }
  w.subset = indices_to_subset(j.at("subset"));
  w.lhs = j.at("lhs").get<double>();
  w.rhs = j.at("rhs").get<double>();
  return w;
}

double replay_witness(const Witness& w) {
  const auto game = std::make_shared<TableGame>(w.n, w.game);
  const FeatureSet s(w.subset, w.n);
  double lhs = 0.0, rhs = 0.0;
  switch (w.axiom) {
    case Axiom::symmetry: {
      Mask pi_s = 0;
      for (int i : s.members()) pi_s |= Mask{1} << w.permutation[static_cast<std::size_t>(i)];
      lhs = eval_for_axiom(*game, s, w.index);
      rhs = eval_for_axiom(*permute_game(game, w.permutation), FeatureSet(pi_s, w.n), w.index);
      break;
    }
    case Axiom::ge: {
      const MergeMap map = MergeMap::merge_pair(w.n, w.merge_i, w.merge_j);
      Mask merged_subset = Mask{1} << map.merged_index_of(w.merge_i);
      for (Mask m = w.subset; m != 0; m &= m - 1) {
        merged_subset |= Mask{1} << map.merged_index_of(std::countr_zero(m));
      }
      lhs = eval_for_axiom(*merge_game(game, map), FeatureSet(merged_subset, map.merged_n()),
                           w.index);
      rhs = eval_for_axiom(*game, FeatureSet(w.subset | (Mask{1} << w.merge_i), w.n), w.index) +
            eval_for_axiom(*game, FeatureSet(w.subset | (Mask{1} << w.merge_j), w.n), w.index);
      break;
    }
    case Axiom::limit:
      lhs = eval_for_axiom(*game, FeatureSet::full(w.n), w.index);
      rhs = harsanyi_dividend(*game, FeatureSet::full(w.n));
      break;
    case Axiom::monotonicity: {
      const auto base = std::make_shared<TableGame>(w.n, w.game2);
      lhs = eval_for_axiom(*game, s, w.index);
      rhs = eval_for_axiom(*base, s, w.index);
      break;
    }
    case Axiom::null_lemma:
    case Axiom::primitive_off_support:
      lhs = eval_for_axiom(*game, s, w.index);
      rhs = 0.0;
      break;
    case Axiom::primitive_scaling:
    case Axiom::primitive_support:
      lhs = eval_for_axiom(*game, s, w.index);
      rhs = w.rhs;  // the closed-form target is part of the witness
      break;
  }
  return std::abs(lhs - rhs);
}

}  // namespace binx
