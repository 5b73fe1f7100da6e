#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binx/game.hpp"
#include "binx/indices.hpp"
#include "binx/sampling.hpp"

namespace binx {

enum class Axiom {
  symmetry,       // I(v, S) = I(pi v, pi S)
  ge,             // merged-pair value splits into the two originals
  limit,          // I(v, N) equals the grand-coalition dividend
  monotonicity,   // pointwise larger derivatives imply a strictly larger value
  null_lemma,     // all-zero derivatives imply a zero value
  primitive_off_support,  // primitive games: zero derivative and value off the support
  primitive_scaling,      // primitive games: value c / 2^{|R|-|S|} inside the support
  primitive_support,      // primitive games: value c at the support itself
};

const char* axiom_name(Axiom axiom);
std::optional<Axiom> parse_axiom(const std::string& name);

// Equality tolerance of the harness; strict inequalities use the margin.
inline constexpr double kAxiomEqualityTol = 1e-9;
inline constexpr double kStrictMargin = 1e-12;

// Everything needed to replay one violation: dense game tables plus the
// auxiliary draw (permutation / merge pair / subset) of the failing trial.
struct Witness {
  Axiom axiom = Axiom::symmetry;
  IndexKind index;
  int n = 0;
  std::vector<double> game;
  std::vector<double> game2;      // monotonicity pairs
  std::vector<int> permutation;   // symmetry
  int merge_i = -1, merge_j = -1; // ge
  Mask subset = 0;
  double lhs = 0.0, rhs = 0.0;

  double magnitude() const;
};

std::string witness_to_json(const Witness& w);
Witness witness_from_json(const std::string& text);

// Recomputes |lhs - rhs| from the stored games; equals magnitude() exactly.
double replay_witness(const Witness& w);

struct AxiomCheckResult {
  Axiom axiom = Axiom::symmetry;
  IndexKind index;
  int trials = 0;
  int violations = 0;
  std::optional<Witness> worst_witness;  // present iff violations > 0
};

enum class GameFamily {
  random_table,
  mobius_sparse,
  primitive,
  threshold,
  monomial,
  monotone_pair,
};

struct GameGenerator {
  GameFamily family = GameFamily::random_table;
  int n = 4;
  std::uint64_t seed = 0;
  double density = 0.25;               // mobius_sparse
  std::optional<Mask> support;         // primitive / monomial; none = random
  int threshold_k = 2;
  double coefficient = 1.0;            // monomial scale
  std::optional<Mask> monotone_subset; // monotone_pair target; none = random
  double epsilon = 0.1;                // monotone_pair bump

  TableGamePtr make(std::uint64_t trial) const;
};

// Runs `trials` seeded instances of one axiom test. Monotonicity requires the
// monotone_pair family; the three primitive-game laws apply to bii only.
AxiomCheckResult check_axiom(Axiom axiom, const IndexKind& index, const GameGenerator& gen,
                             int trials);

// Monotonicity on a caller-supplied pair: verifies by full enumeration that
// the derivatives of `raised` dominate those of `base` at S (strict
// somewhere), then tests the index. One trial.
AxiomCheckResult check_monotonicity_pair(const IndexKind& index, const Game& raised,
                                         const Game& base, const FeatureSet& s);

const std::vector<Axiom>& applicable_axioms(const IndexKind& index);

// Pairwise index values of the |A| >= k threshold game, by direct summation.
struct ThresholdAudit {
  double bii_pair = 0.0;
  double sii_pair = 0.0;
  double shapley_taylor_pair = 0.0;
};

ThresholdAudit threshold_game_audit(int n, int k);

// ---- Seeded generation utilities (shared with the test suites) ---------

double uniform_pm1(SplitMix64& rng);                  // uniform in [-1, 1]
Mask random_mask(int n, SplitMix64& rng);
Mask random_nonempty_mask(int n, SplitMix64& rng);
std::vector<int> random_permutation(int n, SplitMix64& rng);
TableGamePtr random_table_game(int n, SplitMix64& rng);

// Adds bump * p^{support} to a dense table.
TableGamePtr bump_table(const TableGame& v, Mask support, double bump);

}  // namespace binx
