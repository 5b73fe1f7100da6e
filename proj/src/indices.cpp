#include "binx/indices.hpp"

#include <algorithm>
#include <cmath>

namespace binx {

namespace {

void require_same_arity(const Game& v, const FeatureSet& s) {
  if (s.n != v.feature_count()) {
    throw dimension_error("subset arity does not match the game");
  }
}

// Interaction weights are rationals 1 / (m * binom(...)); forming the exact
// integer denominator first and dividing once keeps them free of the
// cancellation a factorial-quotient evaluation would risk.
double sii_weight(int n, int s, int t) {
  return 1.0 / (static_cast<double>(n - s + 1) * static_cast<double>(binomial(n - s, t)));
}

double shapley_weight(int n, int t) {
  return 1.0 / (static_cast<double>(n) * static_cast<double>(binomial(n - 1, t)));
}

}  // namespace

std::string IndexKind::name() const {
  switch (tag) {
    case IndexTag::bii: return "bii";
    case IndexTag::sii: return "sii";
    case IndexTag::shapley_taylor: return "staylor";
    case IndexTag::set_qii_on: return "setqii-on";
    case IndexTag::set_qii_off: return "setqii-off";
    case IndexTag::banzhaf: return "banzhaf";
    case IndexTag::shapley: return "shapley";
    case IndexTag::additive:
      return additive_base == IndexTag::shapley ? "additive-shapley" : "additive-banzhaf";
  }
  return "?";
}

std::optional<IndexKind> IndexKind::parse(const std::string& name) {
  if (name == "bii") return bii();
  if (name == "sii") return sii();
  if (name == "staylor") return shapley_taylor(0);  // order filled in by the caller
  if (name == "setqii-on") return set_qii_on();
  if (name == "setqii-off") return set_qii_off();
  if (name == "banzhaf") return banzhaf();
  if (name == "shapley") return shapley();
  if (name == "additive-banzhaf") return additive(IndexTag::banzhaf);
  if (name == "additive-shapley") return additive(IndexTag::shapley);
  return std::nullopt;
}

double bii_exact(const Game& v, const FeatureSet& s) {
  require_same_arity(v, s);
  require_within_exact_cap(v.feature_count(), "bii_exact");
  const int n = v.feature_count();
  const Mask comp = s.complement();
  const int m = n - s.size();
  double acc = 0.0;
  for (Mask idx = 0; idx < (Mask{1} << m); ++idx) {
    acc += discrete_derivative(v, s, FeatureSet(scatter_bits(idx, comp), n));
  }
  return std::ldexp(acc, -m);
}

double bii_via_mobius(const MobiusCoefficients& coeffs, const FeatureSet& s) {
  if (s.n != coeffs.n) throw dimension_error("subset arity does not match the coefficients");
  const Mask comp = s.complement();
  const int m = coeffs.n - s.size();
  double acc = 0.0;
  for (Mask idx = 0; idx < (Mask{1} << m); ++idx) {
    const Mask extra = scatter_bits(idx, comp);
    acc += std::ldexp(coeffs.coeffs[s.bits | extra], -std::popcount(extra));
  }
  return acc;
}

double sii_exact(const Game& v, const FeatureSet& s) {
  require_same_arity(v, s);
  require_within_exact_cap(v.feature_count(), "sii_exact");
  const int n = v.feature_count();
  const int size = s.size();
  const Mask comp = s.complement();
  const int m = n - size;
  double acc = 0.0;
  for (Mask idx = 0; idx < (Mask{1} << m); ++idx) {
    const FeatureSet t(scatter_bits(idx, comp), n);
    acc += sii_weight(n, size, t.size()) * discrete_derivative(v, s, t);
  }
  return acc;
}

double shapley_taylor(const Game& v, const FeatureSet& s, int k) {
  require_same_arity(v, s);
  const int n = v.feature_count();
  if (k < 1 || k > n) {
    throw argument_error("shapley_taylor order must be in 1..n");
  }
  if (s.size() > k) {
    throw argument_error("shapley_taylor subset larger than the index order");
  }
  require_within_exact_cap(n, "shapley_taylor");
  if (s.size() < k) {
    return harsanyi_dividend(v, s);
  }
  const Mask comp = s.complement();
  const int m = n - k;
  double acc = 0.0;
  for (Mask idx = 0; idx < (Mask{1} << m); ++idx) {
    const FeatureSet t(scatter_bits(idx, comp), n);
    acc += discrete_derivative(v, s, t) / static_cast<double>(binomial(n - 1, t.size()));
  }
  return acc * static_cast<double>(k) / static_cast<double>(n);
}

double set_qii(const Game& v, const FeatureSet& s, SetQiiVariant variant) {
  require_same_arity(v, s);
  if (s.empty_set()) throw argument_error("set_qii requires a nonempty subset");
  if (variant == SetQiiVariant::on) {
    return v.at(s.bits);
  }
  const Mask full = low_bits(v.feature_count());
  return v.at(full) - v.at(full & ~s.bits);
}

double banzhaf_value(const Game& v, int feature) {
  return bii_exact(v, FeatureSet::single(feature, v.feature_count()));
}

double shapley_value(const Game& v, int feature) {
  const int n = v.feature_count();
  require_within_exact_cap(n, "shapley_value");
  const FeatureSet s = FeatureSet::single(feature, n);
  const Mask comp = s.complement();
  double acc = 0.0;
  for (Mask idx = 0; idx < (Mask{1} << (n - 1)); ++idx) {
    const FeatureSet t(scatter_bits(idx, comp), n);
    acc += shapley_weight(n, t.size()) * discrete_derivative(v, s, t);
  }
  return acc;
}

double additive_expansion(IndexTag base, const Game& v, const FeatureSet& s) {
  require_same_arity(v, s);
  if (base != IndexTag::banzhaf && base != IndexTag::shapley) {
    throw argument_error("additive expansion base must be banzhaf or shapley");
  }
  double acc = 0.0;
  for (int i : s.members()) {
    acc += base == IndexTag::banzhaf ? banzhaf_value(v, i) : shapley_value(v, i);
  }
  return acc;
}

double evaluate_index(const Game& v, const FeatureSet& s, const IndexKind& kind) {
  switch (kind.tag) {
    case IndexTag::bii: return bii_exact(v, s);
    case IndexTag::sii: return sii_exact(v, s);
    case IndexTag::shapley_taylor: return shapley_taylor(v, s, kind.taylor_order);
    case IndexTag::set_qii_on: return set_qii(v, s, SetQiiVariant::on);
    case IndexTag::set_qii_off: return set_qii(v, s, SetQiiVariant::off);
    case IndexTag::banzhaf:
      if (s.size() != 1) throw argument_error("banzhaf is a singleton index");
      return banzhaf_value(v, s.members().front());
    case IndexTag::shapley:
      if (s.size() != 1) throw argument_error("shapley is a singleton index");
      return shapley_value(v, s.members().front());
    case IndexTag::additive: return additive_expansion(kind.additive_base, v, s);
  }
  throw argument_error("unknown index kind");
}

const ReportEntry* InteractionReport::find(Mask subset) const {
  for (const auto& e : entries) {
    if (e.subset == subset) return &e;
  }
  return nullptr;
}

InteractionReport compute_report(const GamePtr& v, const IndexKind& kind, int order,
                                 Exec exec) {
  const int n = v->feature_count();
  if (order < 1 || order > n) {
    throw argument_error("report order must be in 1..n");
  }
  require_within_exact_cap(n, "compute_report");

  // Validate the (kind, order) pairing up front: entry evaluation runs on
  // worker threads where an exception would be fatal.
  IndexKind effective = kind;
  if (kind.tag == IndexTag::shapley_taylor) {
    if (effective.taylor_order == 0) effective.taylor_order = order;
    if (effective.taylor_order < order) {
      throw argument_error("shapley_taylor index order below the report order");
    }
  }
  if ((kind.tag == IndexTag::banzhaf || kind.tag == IndexTag::shapley) && order != 1) {
    throw argument_error(kind.name() +
                         " is a singleton index; use order 1 or its additive expansion");
  }

  InteractionReport report;
  report.n = n;
  report.order = order;
  report.kind = effective;
  const auto masks = subsets_up_to_order(n, order);
  report.entries.resize(masks.size());

  const bool lazy = kind.tag == IndexTag::set_qii_on || kind.tag == IndexTag::set_qii_off;
  if (kind.tag == IndexTag::bii) {
    const auto table = materialize_table(*v, exec);
    const auto coeffs = mobius_transform(*table, exec);
    parallel_for(exec, static_cast<std::int64_t>(masks.size()), [&](std::int64_t i) {
      const Mask m = masks[static_cast<std::size_t>(i)];
      report.entries[static_cast<std::size_t>(i)] = {m, bii_via_mobius(coeffs, FeatureSet(m, n))};
    });
  } else {
    // Set-QII needs only a few game values per entry; everything else sums
    // over all coalitions, so pay the one-off table materialization.
    const GamePtr target = lazy ? v : materialize_table(*v, exec);
    parallel_for(exec, static_cast<std::int64_t>(masks.size()), [&](std::int64_t i) {
      const Mask m = masks[static_cast<std::size_t>(i)];
      report.entries[static_cast<std::size_t>(i)] = {
          m, evaluate_index(*target, FeatureSet(m, n), effective)};
    });
  }
  return report;
}

}  // namespace binx
