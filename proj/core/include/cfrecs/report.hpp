#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cfrecs/generator.hpp"

namespace cfrecs {

// Everything the study needs per graph, detached from the graphs themselves.
struct CounterfactualRecord {
  std::array<int, kNumEdgeTypes> original_edges{};
  std::array<int, kNumEdgeTypes> added{};
  std::array<int, kNumEdgeTypes> removed{};
  double user_similarity = 1.0;     // cosine over flattened histograms
  double listing_similarity = 1.0;  // cosine over normalized prices
  double original_score = 0.0;
  double counterfactual_score = 0.0;
  double relative_lift = 0.0;
};

CounterfactualRecord make_record(const CounterfactualResult& result, const Schema& schema);

void write_records(const std::string& path, const std::vector<CounterfactualRecord>& records);
std::vector<CounterfactualRecord> read_records(const std::string& path);

struct LiftHistogram {
  std::vector<double> edges;       // bins + 1 entries
  std::vector<long long> counts;   // one per bin, sums to the sample count
};

LiftHistogram lift_histogram(const std::vector<double>& values, int bins = 40);

struct StudyReport {
  std::array<double, kNumEdgeTypes> added_pct{};    // macro-averaged over graphs
  std::array<double, kNumEdgeTypes> removed_pct{};
  double user_similarity_pct = 100.0;
  double listing_similarity_pct = 100.0;
  double average_lift_pct = 0.0;
  double total_increase_pct = 0.0;   // share of graphs with positive lift
  double baseline_average_lift_pct = 0.0;
  std::array<int, kNumEdgeTypes> zero_edge_graphs{};  // skewed-denominator flags
  std::string coefficients;
  LiftHistogram lift_vs_original;
  LiftHistogram lift_vs_random;  // counterfactual paired against its matched baseline
};

// Pure aggregation; requires the baseline row-aligned with the results and
// carrying identical change counts.
StudyReport evaluate(const std::vector<CounterfactualRecord>& results,
                     const std::vector<CounterfactualRecord>& baseline,
                     const std::string& coefficients);

// summary.csv (one row), histogram CSVs, baseline.csv, flags.csv.
void emit_report(const StudyReport& report, const std::string& directory);

std::map<std::string, std::string> read_summary_csv(const std::string& path);

}  // namespace cfrecs
