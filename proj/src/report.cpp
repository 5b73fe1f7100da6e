#include "binx/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "binx/polyfit.hpp"

namespace binx {

using nlohmann::json;

namespace {

json subset_array(Mask subset) {
  json arr = json::array();
  for (Mask m = subset; m != 0; m &= m - 1) {
    arr.push_back(std::countr_zero(m) + 1);
  }
  return arr;
}

Mask subset_from_array(const json& arr, int n) {
  Mask out = 0;
  for (const auto& j : arr) {
    const int i = j.get<int>();
    if (i < 1 || i > n) throw data_error("report subset index out of range");
    out |= Mask{1} << (i - 1);
  }
  return out;
}

json index_descriptor(const IndexKind& kind) {
  json j;
  j["name"] = kind.name();
  if (kind.tag == IndexTag::shapley_taylor) j["order"] = kind.taylor_order;
  return j;
}

json entries_array(const InteractionReport& report) {
  json arr = json::array();
  for (const auto& e : report.entries) {
    json je;
    je["subset"] = subset_array(e.subset);
    je["value"] = e.value;
    if (report.sampled) {
      je["stderr"] = e.stderr_of_mean;
      je["samples"] = e.samples;
      je["seed"] = e.seed;
    }
    arr.push_back(std::move(je));
  }
  return arr;
}

json metadata_object(const ReportMeta& meta, bool sampled) {
  json j = json::object();
  if (!meta.model_id.empty()) j["model"] = meta.model_id;
  if (!meta.poi_id.empty()) j["poi"] = meta.poi_id;
  if (!meta.baseline_id.empty()) j["baseline"] = meta.baseline_id;
  if (sampled) j["seed"] = meta.seed;
  return j;
}

// Three-way sign with a fixed noise floor, used by the disagreement summary.
int sign_class(double x) {
  if (x > 1e-12) return 1;
  if (x < -1e-12) return -1;
  return 0;
}

std::string format_value(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::vector<std::string> default_feature_names(int n) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

json report_to_json(const InteractionReport& report,
                    const std::vector<std::string>& feature_names) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["n"] = report.n;
  doc["order"] = report.order;
  doc["index"] = index_descriptor(report.kind);
  doc["mode"] = report.sampled ? "sampled" : "exact";
  doc["feature_names"] = feature_names;
  doc["metadata"] = metadata_object(report.meta, report.sampled);
  doc["entries"] = entries_array(report);
  return doc;
}

InteractionReport report_from_json(const json& doc, std::vector<std::string>* feature_names) {
  if (!doc.contains("schema_version") || doc["schema_version"].get<std::string>() != kSchemaVersion) {
    throw data_error("unsupported report schema version");
  }
  InteractionReport report;
  report.n = doc.at("n").get<int>();
  report.order = doc.at("order").get<int>();
  const auto kind = IndexKind::parse(doc.at("index").at("name").get<std::string>());
  if (!kind.has_value()) throw data_error("report references an unknown index");
  report.kind = *kind;
  if (doc["index"].contains("order")) report.kind.taylor_order = doc["index"]["order"].get<int>();
  report.sampled = doc.at("mode").get<std::string>() == "sampled";
  if (feature_names != nullptr) {
    *feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  }
  for (const auto& je : doc.at("entries")) {
    ReportEntry entry;
    entry.subset = subset_from_array(je.at("subset"), report.n);
    entry.value = je.at("value").get<double>();
    if (report.sampled) {
      entry.stderr_of_mean = je.value("stderr", 0.0);
      entry.samples = je.value("samples", std::uint64_t{0});
      entry.seed = je.value("seed", std::uint64_t{0});
    }
    report.entries.push_back(entry);
  }
  return report;
}

json compare_to_json(const std::vector<InteractionReport>& reports,
                     const std::vector<std::string>& feature_names) {
  if (reports.size() < 2) {
    throw argument_error("comparison needs at least two reports");
  }
  for (const auto& r : reports) {
    if (r.n != reports.front().n || r.order != reports.front().order ||
        r.entries.size() != reports.front().entries.size()) {
      throw argument_error("compared reports must cover identical subsets");
    }
  }

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["n"] = reports.front().n;
  doc["order"] = reports.front().order;
  doc["mode"] = reports.front().sampled ? "sampled" : "exact";
  doc["feature_names"] = feature_names;
  doc["metadata"] = metadata_object(reports.front().meta, reports.front().sampled);

  json list = json::array();
  for (const auto& r : reports) {
    json jr;
    jr["index"] = index_descriptor(r.kind);
    jr["entries"] = entries_array(r);
    list.push_back(std::move(jr));
  }
  doc["reports"] = std::move(list);

  // Sign disagreements between every pair of indices, over the pair entries.
  json summary = json::array();
  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      json item;
      item["indices"] = {reports[a].kind.name(), reports[b].kind.name()};
      int count = 0;
      json subsets = json::array();
      for (std::size_t e = 0; e < reports[a].entries.size(); ++e) {
        const auto& ea = reports[a].entries[e];
        if (std::popcount(ea.subset) != 2) continue;
        if (sign_class(ea.value) != sign_class(reports[b].entries[e].value)) {
          ++count;
          subsets.push_back(subset_array(ea.subset));
        }
      }
      item["count"] = count;
      item["subsets"] = std::move(subsets);
      summary.push_back(std::move(item));
    }
  }
  doc["sign_disagreements"] = std::move(summary);
  return doc;
}

json axiom_results_to_json(const std::vector<AxiomCheckResult>& results,
                           const IndexKind& index, int n, int trials, std::uint64_t seed) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["index"] = index_descriptor(index);
  doc["n"] = n;
  doc["trials"] = trials;
  doc["seed"] = seed;
  json list = json::array();
  for (const auto& r : results) {
    json jr;
    jr["axiom"] = axiom_name(r.axiom);
    jr["trials"] = r.trials;
    jr["violations"] = r.violations;
    if (r.worst_witness.has_value()) {
      jr["worst_witness"] = json::parse(witness_to_json(*r.worst_witness));
    }
    list.push_back(std::move(jr));
  }
  doc["results"] = std::move(list);
  return doc;
}

json polyfit_to_json(const PolynomialFit& fit, double top_degree_discrepancy) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["n"] = fit.n;
  doc["degree"] = fit.degree;
  json terms = json::array();
  for (std::size_t i = 0; i < fit.monomials.size(); ++i) {
    json t;
    t["subset"] = subset_array(fit.monomials[i]);
    t["coef"] = fit.coefficients[i];
    terms.push_back(std::move(t));
  }
  doc["terms"] = std::move(terms);
  doc["residual"] = fit.residual;
  doc["topdegree_max_discrepancy"] = top_degree_discrepancy;
  return doc;
}

std::string render_heatmap(const InteractionReport& report,
                           const std::vector<std::string>& feature_names,
                           HeatmapFormat format) {
  if (static_cast<int>(feature_names.size()) != report.n) {
    throw argument_error("feature name count does not match the report");
  }

  std::ostringstream out;
  if (format == HeatmapFormat::csv || report.order > 2) {
    if (report.order <= 2) {
      out << "i,j,value\n";
      for (const auto& e : report.entries) {
        const auto members = FeatureSet(e.subset, report.n).members();
        const int i = members.front() + 1;
        const int j = members.back() + 1;
        out << i << "," << j << "," << format_value(e.value) << "\n";
      }
    } else {
      out << "subset,value\n";
      for (const auto& e : report.entries) {
        const auto members = FeatureSet(e.subset, report.n).members();
        for (std::size_t k = 0; k < members.size(); ++k) {
          out << (k ? "+" : "") << members[k] + 1;
        }
        out << "," << format_value(e.value) << "\n";
      }
    }
    return out.str();
  }

  double max_abs = 0.0;
  for (const auto& e : report.entries) max_abs = std::max(max_abs, std::abs(e.value));

  // Nine signed buckets: -4 .. +4, scaled by the largest magnitude.
  const auto bucket_of = [&](double v) {
    if (max_abs == 0.0) return 0;
    const int b = static_cast<int>(std::llround(4.0 * v / max_abs));
    return std::clamp(b, -4, 4);
  };
  const auto cell = [&](int bucket) {
    if (bucket == 0) return std::string(" 0");
    std::string s = bucket > 0 ? "+" : "-";
    s += static_cast<char>('0' + std::abs(bucket));
    return s;
  };

  std::size_t width = 2;
  for (const auto& name : feature_names) width = std::max(width, name.size());

  const auto pad = [width](const std::string& s) {
    return std::string(width > s.size() ? width - s.size() : 0, ' ') + s;
  };

  out << pad("");
  for (const auto& name : feature_names) out << " " << pad(name);
  out << "\n";
  for (int i = 0; i < report.n; ++i) {
    out << pad(feature_names[static_cast<std::size_t>(i)]);
    for (int j = 0; j < report.n; ++j) {
      if (j < i) {
        out << " " << pad("");
        continue;
      }
      Mask m = (Mask{1} << i) | (Mask{1} << j);
      const ReportEntry* entry = report.find(m);
      if (entry == nullptr) {
        out << " " << pad(".");
      } else {
        out << " " << pad(cell(bucket_of(entry->value)));
      }
    }
    out << "\n";
  }
  out << "scale: max|entry| = " << format_value(max_abs) << ", one step = "
      << format_value(max_abs / 4.0) << "\n";
  return out.str();
}

}  // namespace binx
