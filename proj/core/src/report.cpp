#include "cfrecs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cfrecs/error.hpp"
#include "cfrecs/metrics.hpp"
#include "json.hpp"

namespace cfrecs {

namespace {

using nlohmann::json;

std::vector<double> flatten_user_features(const Graph& graph) {
  std::vector<double> out;
  for (const UserFeatures& u : graph.users)
    for (const auto& hist : u.histograms) out.insert(out.end(), hist.begin(), hist.end());
  return out;
}

std::vector<double> listing_price_features(const Graph& graph, const Schema& schema) {
  std::vector<double> out;
  out.reserve(graph.listings.size());
  for (const ListingFeatures& l : graph.listings)
    out.push_back(normalized_log_price(l.price, schema));
  return out;
}

std::string format2(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

std::string format_exact(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

constexpr const char* kSummaryHeader =
    "Views Added %,Saves Added %,Submits Added %,Views Removed %,Saves Removed %,"
    "Submits Removed %,User Preferences Similarity %,Listing Price Similarity %,"
    "Average Lift %,Total Increase %,Coefficients";

void write_histogram_csv(const std::string& path, const LiftHistogram& hist) {
  std::ofstream out(path);
  if (!out) throw ValidationError("report '" + path + "': cannot open for writing");
  out << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b)
    out << format_exact(hist.edges[b]) << ',' << format_exact(hist.edges[b + 1]) << ','
        << hist.counts[b] << '\n';
  if (!out) throw ValidationError("report '" + path + "': write failed");
}

}  // namespace

CounterfactualRecord make_record(const CounterfactualResult& result, const Schema& schema) {
  CounterfactualRecord rec;
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    rec.original_edges[t] = static_cast<int>(result.original.edges[t].size());
    rec.added[t] = static_cast<int>(result.added[t].size());
    rec.removed[t] = static_cast<int>(result.removed[t].size());
  }
  rec.user_similarity = cosine(flatten_user_features(result.original),
                               flatten_user_features(result.counterfactual));
  rec.listing_similarity = cosine(listing_price_features(result.original, schema),
                                  listing_price_features(result.counterfactual, schema));
  rec.original_score = result.original_score;
  rec.counterfactual_score = result.counterfactual_score;
  rec.relative_lift = result.relative_lift;
  return rec;
}

void write_records(const std::string& path, const std::vector<CounterfactualRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ValidationError("records '" + path + "': cannot open for writing");
  for (const CounterfactualRecord& r : records) {
    json j = {{"original_edges", r.original_edges},
              {"added", r.added},
              {"removed", r.removed},
              {"user_similarity", r.user_similarity},
              {"listing_similarity", r.listing_similarity},
              {"original_score", r.original_score},
              {"counterfactual_score", r.counterfactual_score},
              {"relative_lift", r.relative_lift}};
    out << j.dump() << '\n';
  }
  if (!out) throw ValidationError("records '" + path + "': write failed");
}

std::vector<CounterfactualRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("records '" + path + "': cannot open");
  std::vector<CounterfactualRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    json j;
    try {
      j = json::parse(line);
      CounterfactualRecord r;
      auto counts = [&](const char* name, std::array<int, kNumEdgeTypes>& dst) {
        const auto values = j.at(name).get<std::vector<int>>();
        if (values.size() != kNumEdgeTypes)
          throw ValidationError(where + ": field '" + name + "' must have " +
                                std::to_string(kNumEdgeTypes) + " entries");
        std::copy(values.begin(), values.end(), dst.begin());
      };
      counts("original_edges", r.original_edges);
      counts("added", r.added);
      counts("removed", r.removed);
      r.user_similarity = j.at("user_similarity").get<double>();
      r.listing_similarity = j.at("listing_similarity").get<double>();
      r.original_score = j.at("original_score").get<double>();
      r.counterfactual_score = j.at("counterfactual_score").get<double>();
      r.relative_lift = j.at("relative_lift").get<double>();
      records.push_back(r);
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return records;
}

LiftHistogram lift_histogram(const std::vector<double>& values, int bins) {
  if (values.empty()) throw std::invalid_argument("lift_histogram: no values");
  if (bins < 1) throw std::invalid_argument("lift_histogram: needs at least one bin");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  LiftHistogram hist;
  hist.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) hist.edges[b] = lo + width * b;
  hist.edges[bins] = hi;
  hist.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++hist.counts[b];
  }
  return hist;
}

StudyReport evaluate(const std::vector<CounterfactualRecord>& results,
                     const std::vector<CounterfactualRecord>& baseline,
                     const std::string& coefficients) {
  if (results.size() != baseline.size())
    throw ValidationError("evaluate: " + std::to_string(results.size()) + " results vs " +
                          std::to_string(baseline.size()) + " baseline records");
  if (results.empty()) throw ValidationError("evaluate: no records");
  const double n = static_cast<double>(results.size());

  StudyReport report;
  report.coefficients = coefficients;
  for (std::size_t i = 0; i < results.size(); ++i)
    for (int t = 0; t < kNumEdgeTypes; ++t)
      if (results[i].added[t] != baseline[i].added[t] ||
          results[i].removed[t] != baseline[i].removed[t])
        throw ValidationError("evaluate: baseline change counts diverge at record " +
                              std::to_string(i) + ", type " + kEdgeTypeNames[t]);

  std::vector<double> lifts, paired;
  lifts.reserve(results.size());
  paired.reserve(results.size());
  std::array<double, kNumEdgeTypes> added_sum{}, removed_sum{};
  double user_sim = 0.0, listing_sim = 0.0, lift_sum = 0.0, baseline_lift_sum = 0.0;
  int positive = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CounterfactualRecord& r = results[i];
    for (int t = 0; t < kNumEdgeTypes; ++t) {
      const double denom = std::max(1, r.original_edges[t]);
      added_sum[t] += 100.0 * r.added[t] / denom;
      removed_sum[t] += 100.0 * r.removed[t] / denom;
      if (r.original_edges[t] == 0) ++report.zero_edge_graphs[t];
    }
    user_sim += r.user_similarity;
    listing_sim += r.listing_similarity;
    lift_sum += r.relative_lift;
    baseline_lift_sum += baseline[i].relative_lift;
    if (r.relative_lift > 0.0) ++positive;
    lifts.push_back(100.0 * r.relative_lift);
    paired.push_back(100.0 * (r.counterfactual_score - baseline[i].counterfactual_score) /
                     baseline[i].counterfactual_score);
  }
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    report.added_pct[t] = added_sum[t] / n;
    report.removed_pct[t] = removed_sum[t] / n;
  }
  report.user_similarity_pct = 100.0 * user_sim / n;
  report.listing_similarity_pct = 100.0 * listing_sim / n;
  report.average_lift_pct = 100.0 * lift_sum / n;
  report.baseline_average_lift_pct = 100.0 * baseline_lift_sum / n;
  report.total_increase_pct = 100.0 * positive / n;
  report.lift_vs_original = lift_histogram(lifts);
  report.lift_vs_random = lift_histogram(paired);
  return report;
}

void emit_report(const StudyReport& report, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::filesystem::path dir(directory);
  {
    std::ofstream out(dir / "summary.csv");
    if (!out) throw ValidationError("report: cannot open summary.csv for writing");
    out << kSummaryHeader << '\n';
    for (int t = 0; t < kNumEdgeTypes; ++t) out << format2(report.added_pct[t]) << ',';
    for (int t = 0; t < kNumEdgeTypes; ++t) out << format2(report.removed_pct[t]) << ',';
    out << format2(report.user_similarity_pct) << ',' << format2(report.listing_similarity_pct)
        << ',' << format2(report.average_lift_pct) << ',' << format2(report.total_increase_pct)
        << ",\"" << report.coefficients << "\"\n";
    if (!out) throw ValidationError("report: summary.csv write failed");
  }
  write_histogram_csv((dir / "lift_vs_original.csv").string(), report.lift_vs_original);
  write_histogram_csv((dir / "lift_vs_random.csv").string(), report.lift_vs_random);
  {
    std::ofstream out(dir / "baseline.csv");
    if (!out) throw ValidationError("report: cannot open baseline.csv for writing");
    out << "Baseline Average Lift %\n" << format2(report.baseline_average_lift_pct) << '\n';
  }
  {
    std::ofstream out(dir / "flags.csv");
    if (!out) throw ValidationError("report: cannot open flags.csv for writing");
    out << "type,zero_edge_graphs\n";
    for (int t = 0; t < kNumEdgeTypes; ++t)
      out << kEdgeTypeNames[t] << ',' << report.zero_edge_graphs[t] << '\n';
  }
}

std::map<std::string, std::string> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("report '" + path + "': cannot open");
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw ValidationError("report '" + path + "': expected a header and one data row");

  auto split = [&](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        fields.push_back(field);
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    fields.push_back(field);
    return fields;
  };

  const std::vector<std::string> names = split(header);
  const std::vector<std::string> values = split(row);
  if (names.size() != values.size())
    throw ValidationError("report '" + path + "': header and row width differ");
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = values[i];
  return out;
}

}  // namespace cfrecs
