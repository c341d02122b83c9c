#pragma once

#include <array>
#include <string>
#include <vector>

#include "cfrecs/matrix.hpp"

namespace cfrecs {

enum class EdgeType { kView = 0, kSave = 1, kSubmit = 2 };
inline constexpr int kNumEdgeTypes = 3;
inline constexpr int kNumRelations = kNumEdgeTypes + 1;  // explicit types + densified views
inline constexpr int kActivityDim = 3;
inline constexpr const char* kEdgeTypeNames[kNumEdgeTypes] = {"view", "save", "submit"};

struct AttributeSpec {
  std::string name;
  int vocab_size = 0;
};

// Categorical vocabulary shared by users and listings, plus the price
// normalization stats frozen at dataset-build time.
struct Schema {
  std::vector<AttributeSpec> attributes;
  double price_log_mean = 0.0;
  double price_log_std = 1.0;

  int num_attributes() const { return static_cast<int>(attributes.size()); }
  int total_vocab() const;
  int offset(int attribute) const;
};

struct UserFeatures {
  std::vector<std::vector<double>> histograms;  // per attribute, each sums to 1
  std::vector<double> activity;                 // log1p interaction counts
};

struct ListingFeatures {
  std::vector<int> values;  // vocab index per attribute
  double price = 1.0;
};

struct Edge {
  int user = 0;
  int listing = 0;
};

// Bipartite interaction subgraph. Node v is user v for v < num_users(),
// otherwise listing v - num_users().
struct Graph {
  std::vector<UserFeatures> users;
  std::vector<ListingFeatures> listings;
  std::array<std::vector<Edge>, kNumEdgeTypes> edges;
  int label = 0;

  int num_users() const { return static_cast<int>(users.size()); }
  int num_listings() const { return static_cast<int>(listings.size()); }
  int num_nodes() const { return num_users() + num_listings(); }
  const std::vector<Edge>& edges_of(EdgeType type) const {
    return edges[static_cast<int>(type)];
  }
  std::vector<Edge>& edges_of(EdgeType type) { return edges[static_cast<int>(type)]; }
  bool has_edge(EdgeType type, int user, int listing) const;
};

void validate_graph(const Graph& graph, const Schema& schema);

// Attribute names, vocabulary sizes, and price statistics all match exactly.
bool same_schema(const Schema& a, const Schema& b);

double normalized_log_price(double price, const Schema& schema);

// Symmetric n x n embedding of one interaction type.
Matrix to_dense_adjacency(const Graph& graph, EdgeType type);

// Adds one-hop-of-two-hops shortcuts: binarize(A + A^2) with a zeroed diagonal.
Matrix densify(const Matrix& adjacency);

// Symmetric renormalization with self-loops: D^-1/2 (A + I) D^-1/2.
Matrix normalize_adjacency(const Matrix& adjacency);

// The stacked relation set fed to the message-passing layers: one raw
// adjacency per interaction type plus the densified view matrix.
std::array<Matrix, kNumRelations> relation_adjacencies(const Graph& graph);

}  // namespace cfrecs
