#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binx/game.hpp"
#include "binx/mobius.hpp"
#include "binx/parallel.hpp"

namespace binx {

enum class IndexTag {
  bii,            // Banzhaf interaction index
  sii,            // Shapley interaction index
  shapley_taylor, // order-k Shapley-Taylor index
  set_qii_on,     // v(S)
  set_qii_off,    // v(N) - v(N \ S)
  banzhaf,        // singleton Banzhaf value
  shapley,        // singleton Shapley value
  additive,       // sum of singleton values of the base index
};

struct IndexKind {
  IndexTag tag = IndexTag::bii;
  int taylor_order = 0;                       // shapley_taylor only
  IndexTag additive_base = IndexTag::banzhaf; // additive only

  static IndexKind bii() { return {IndexTag::bii}; }
  static IndexKind sii() { return {IndexTag::sii}; }
  static IndexKind shapley_taylor(int k) { return {IndexTag::shapley_taylor, k}; }
  static IndexKind set_qii_on() { return {IndexTag::set_qii_on}; }
  static IndexKind set_qii_off() { return {IndexTag::set_qii_off}; }
  static IndexKind banzhaf() { return {IndexTag::banzhaf}; }
  static IndexKind shapley() { return {IndexTag::shapley}; }
  static IndexKind additive(IndexTag base) {
    return {IndexTag::additive, 0, base};
  }

  // CLI spelling: bii, sii, staylor, setqii-on, setqii-off, banzhaf, shapley,
  // additive-banzhaf, additive-shapley.
  std::string name() const;
  static std::optional<IndexKind> parse(const std::string& name);
};

// ---- Exact index values --------------------------------------------------

// Average of the S discrete derivative over all coalitions disjoint from S,
// by direct double summation. Subject to the exact cap.
double bii_exact(const Game& v, const FeatureSet& s);

// Same value through the primitive-basis expansion:
// I(S) = sum over R containing S of coeffs[R] / 2^{|R| - |S|}.
double bii_via_mobius(const MobiusCoefficients& coeffs, const FeatureSet& s);

// Shapley interaction index with weights t! (n-t-s)! / (n-s+1)!.
double sii_exact(const Game& v, const FeatureSet& s);

// Shapley-Taylor index of order k: the dividend m_S(empty) below the top
// order, a binomially weighted derivative average at |S| = k.
double shapley_taylor(const Game& v, const FeatureSet& s, int k);

enum class SetQiiVariant { on, off };

double set_qii(const Game& v, const FeatureSet& s, SetQiiVariant variant);

double banzhaf_value(const Game& v, int feature);
double shapley_value(const Game& v, int feature);

// Sum of singleton values; base must be banzhaf or shapley.
double additive_expansion(IndexTag base, const Game& v, const FeatureSet& s);

// Dispatch on kind. shapley_taylor uses kind.taylor_order; banzhaf/shapley
// accept singletons only.
double evaluate_index(const Game& v, const FeatureSet& s, const IndexKind& kind);

// ---- Reports ---------------------------------------------------------------

struct ReportEntry {
  Mask subset = 0;
  double value = 0.0;
  // Sampled-mode fields; meaningful only when the report is sampled.
  double stderr_of_mean = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct ReportMeta {
  std::string model_id;
  std::string poi_id;
  std::string baseline_id;
  std::uint64_t seed = 0;
};

// Values of one index for every subset with 1 <= |S| <= order, in canonical
// (|S|, bitmask) order.
struct InteractionReport {
  int n = 0;
  int order = 0;
  IndexKind kind;
  bool sampled = false;
  std::vector<ReportEntry> entries;
  ReportMeta meta;

  const ReportEntry* find(Mask subset) const;
};

// Exact report. BII goes through one materialize + Moebius transform; the
// other indices evaluate their direct sums (over a materialized table except
// for the two Set-QII variants, which need only a handful of game values per
// entry). Entries are independent, so evaluation parallelizes freely.
InteractionReport compute_report(const GamePtr& v, const IndexKind& kind, int order,
                                 Exec exec = Exec::parallel);

}  // namespace binx
