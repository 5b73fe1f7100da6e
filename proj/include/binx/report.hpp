#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "binx/axioms.hpp"
#include "binx/indices.hpp"

namespace binx {

inline constexpr const char* kSchemaVersion = "1";

// Report documents carry the entries plus render hints. Subsets serialize as
// sorted 1-based index arrays; doubles print with their shortest round-trip
// representation, so emitting is byte-deterministic and lossless.
nlohmann::json report_to_json(const InteractionReport& report,
                              const std::vector<std::string>& feature_names);

InteractionReport report_from_json(const nlohmann::json& doc,
                                   std::vector<std::string>* feature_names);

// Multi-index document over identical subsets, with a sign-disagreement
// summary per index pair (computed over the order-2 entries).
nlohmann::json compare_to_json(const std::vector<InteractionReport>& reports,
                               const std::vector<std::string>& feature_names);

nlohmann::json axiom_results_to_json(const std::vector<AxiomCheckResult>& results,
                                     const IndexKind& index, int n, int trials,
                                     std::uint64_t seed);

struct PolynomialFit;  // polyfit.hpp
nlohmann::json polyfit_to_json(const PolynomialFit& fit, double top_degree_discrepancy);

enum class HeatmapFormat { ascii, csv };

// Upper-triangular intensity matrix for reports of order 1-2: diagonal cells
// are the singleton values, off-diagonal cells the pair values, bucketed into
// nine signed levels scaled by the largest |entry|. Reports of higher order
// fall back to a flat CSV listing.
std::string render_heatmap(const InteractionReport& report,
                           const std::vector<std::string>& feature_names,
                           HeatmapFormat format);

// Default render hints x1..xn.
std::vector<std::string> default_feature_names(int n);

}  // namespace binx
