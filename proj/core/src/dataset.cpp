#include "cfrecs/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cfrecs/error.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace cfrecs {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json graph_to_json(const Graph& graph) {
  json users = json::array();
  for (const UserFeatures& u : graph.users)
    users.push_back({{"hist", u.histograms}, {"activity", u.activity}});
  json listings = json::array();
  for (const ListingFeatures& l : graph.listings)
    listings.push_back({{"values", l.values}, {"price", l.price}});
  json edges = json::object();
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    json arr = json::array();
    for (const Edge& e : graph.edges[t]) arr.push_back(json::array({e.user, e.listing}));
    edges[kEdgeTypeNames[t]] = std::move(arr);
  }
  return {{"record", "graph"},
          {"label", graph.label},
          {"users", std::move(users)},
          {"listings", std::move(listings)},
          {"edges", std::move(edges)}};
}

const json& field(const json& j, const char* name, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(where + ": missing field '" + name + "'");
  return *it;
}

template <typename T>
T typed_field(const json& j, const char* name, const std::string& where) {
  try {
    return field(j, name, where).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + name + "' has the wrong type");
  }
}

// Tiny float drift in stored histograms is repaired silently; anything
// larger is a real data problem and gets reported.
void settle_histogram(std::vector<double>& hist, const std::string& where) {
  double sum = 0.0;
  for (double p : hist) sum += p;
  if (sum <= 1e-9) return;  // all-zero histogram: no stated preference
  const double drift = std::abs(sum - 1.0);
  if (drift > 1e-6)
    throw ValidationError(where + ": histogram sums to " + std::to_string(sum));
  if (drift > 1e-9)
    for (double& p : hist) p /= sum;
}

Graph graph_from_json(const json& j, const std::string& where) {
  Graph graph;
  graph.label = typed_field<int>(j, "label", where);
  for (const json& ju : field(j, "users", where)) {
    UserFeatures u;
    u.histograms = typed_field<std::vector<std::vector<double>>>(ju, "hist", where);
    u.activity = typed_field<std::vector<double>>(ju, "activity", where);
    for (std::size_t a = 0; a < u.histograms.size(); ++a)
      settle_histogram(u.histograms[a],
                       where + ": user " + std::to_string(graph.users.size()) + ", attribute " +
                           std::to_string(a));
    graph.users.push_back(std::move(u));
  }
  for (const json& jl : field(j, "listings", where)) {
    ListingFeatures l;
    l.values = typed_field<std::vector<int>>(jl, "values", where);
    l.price = typed_field<double>(jl, "price", where);
    graph.listings.push_back(std::move(l));
  }
  const json& edges = field(j, "edges", where);
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    for (const json& je : field(edges, kEdgeTypeNames[t], where)) {
      if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
          !je[1].is_number_integer())
        throw ValidationError(where + ": field '" + kEdgeTypeNames[t] +
                              "' entries must be [user, listing] pairs");
      graph.edges[t].push_back({je[0].get<int>(), je[1].get<int>()});
    }
  }
  return graph;
}

json parse_line(const std::string& line, const std::string& where) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace

void write_jsonl(const std::string& path, const Dataset& dataset) {
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    try {
      validate_graph(dataset.graphs[i], dataset.schema);
    } catch (const ValidationError& e) {
      throw ValidationError("write '" + path + "', graph " + std::to_string(i) + ": " +
                            e.what());
    }
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("dataset '" + path + "': cannot open for writing");
  json header = {{"record", "header"},
                 {"version", kFormatVersion},
                 {"schema", detail::schema_to_json(dataset.schema)}};
  out << header.dump() << '\n';
  for (const Graph& g : dataset.graphs) out << graph_to_json(g).dump() << '\n';
  if (!out) throw ValidationError("dataset '" + path + "': write failed");
}

Dataset read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("dataset '" + path + "': cannot open");
  Dataset dataset;
  std::string line;
  int line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    json j = parse_line(line, where);
    const auto record = typed_field<std::string>(j, "record", where);
    if (!have_header) {
      if (record != "header")
        throw ValidationError(where + ": first record must be the schema header");
      if (typed_field<int>(j, "version", where) != kFormatVersion)
        throw ValidationError(where + ": unsupported format version");
      dataset.schema = detail::schema_from_json(field(j, "schema", where), where);
      have_header = true;
      continue;
    }
    if (record != "graph")
      throw ValidationError(where + ": unknown record type '" + record + "'");
    Graph graph = graph_from_json(j, where);
    try {
      validate_graph(graph, dataset.schema);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    dataset.graphs.push_back(std::move(graph));
  }
  if (!have_header) throw ValidationError("dataset '" + path + "': empty file");
  return dataset;
}

void write_splits(const std::string& path, const SplitIndices& splits) {
  std::ofstream out(path);
  if (!out) throw ValidationError("splits '" + path + "': cannot open for writing");
  json j = {{"train", splits.train}, {"val", splits.val}, {"test", splits.test}};
  out << j.dump() << '\n';
  if (!out) throw ValidationError("splits '" + path + "': write failed");
}

SplitIndices read_splits(const std::string& path, int dataset_size) {
  std::ifstream in(path);
  if (!in) throw ValidationError("splits '" + path + "': cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("splits '" + path + "': " + e.what());
  }
  SplitIndices splits;
  splits.train = typed_field<std::vector<int>>(j, "train", path);
  splits.val = typed_field<std::vector<int>>(j, "val", path);
  splits.test = typed_field<std::vector<int>>(j, "test", path);
  std::set<int> seen;
  for (const auto* part : {&splits.train, &splits.val, &splits.test})
    for (int idx : *part) {
      if (idx < 0 || idx >= dataset_size)
        throw ValidationError("splits '" + path + "': index " + std::to_string(idx) +
                              " out of range for " + std::to_string(dataset_size) + " graphs");
      if (!seen.insert(idx).second)
        throw ValidationError("splits '" + path + "': index " + std::to_string(idx) +
                              " appears in more than one split");
    }
  return splits;
}

}  // namespace cfrecs
