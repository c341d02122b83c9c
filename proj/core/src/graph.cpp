#include "cfrecs/graph.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "cfrecs/error.hpp"

namespace cfrecs {

int Schema::total_vocab() const {
  int total = 0;
  for (const AttributeSpec& a : attributes) total += a.vocab_size;
  return total;
}

int Schema::offset(int attribute) const {
  if (attribute < 0 || attribute >= num_attributes())
    throw std::invalid_argument("Schema::offset: attribute " + std::to_string(attribute) +
                                " out of range");
  int off = 0;
  for (int a = 0; a < attribute; ++a) off += attributes[a].vocab_size;
  return off;
}

bool Graph::has_edge(EdgeType type, int user, int listing) const {
  for (const Edge& e : edges_of(type))
    if (e.user == user && e.listing == listing) return true;
  return false;
}

void validate_graph(const Graph& graph, const Schema& schema) {
  if (graph.num_users() < 1 || graph.num_listings() < 1)
    throw ValidationError("graph: needs at least one user and one listing, got " +
                          std::to_string(graph.num_users()) + " users / " +
                          std::to_string(graph.num_listings()) + " listings");
  if (graph.label != 0 && graph.label != 1)
    throw ValidationError("graph: label must be 0 or 1, got " + std::to_string(graph.label));

  const int num_attrs = schema.num_attributes();
  for (int u = 0; u < graph.num_users(); ++u) {
    const UserFeatures& f = graph.users[u];
    if (static_cast<int>(f.histograms.size()) != num_attrs)
      throw ValidationError("user " + std::to_string(u) + ": expected " +
                            std::to_string(num_attrs) + " histograms, got " +
                            std::to_string(f.histograms.size()));
    for (int a = 0; a < num_attrs; ++a) {
      const auto& hist = f.histograms[a];
      const AttributeSpec& spec = schema.attributes[a];
      if (static_cast<int>(hist.size()) != spec.vocab_size)
        throw ValidationError("user " + std::to_string(u) + ", attribute '" + spec.name +
                              "': histogram length " + std::to_string(hist.size()) +
                              " != vocab size " + std::to_string(spec.vocab_size));
      double sum = 0.0;
      for (double p : hist) {
        if (!std::isfinite(p) || p < 0.0)
          throw ValidationError("user " + std::to_string(u) + ", attribute '" + spec.name +
                                "': histogram entries must be finite and non-negative");
        sum += p;
      }
      // all-zero histograms are legal (no stated preference)
      if (sum > 1e-9 && std::abs(sum - 1.0) > 1e-6)
        throw ValidationError("user " + std::to_string(u) + ", attribute '" + spec.name +
                              "': histogram sums to " + std::to_string(sum));
    }
    if (static_cast<int>(f.activity.size()) != kActivityDim)
      throw ValidationError("user " + std::to_string(u) + ": expected " +
                            std::to_string(kActivityDim) + " activity features, got " +
                            std::to_string(f.activity.size()));
    for (double v : f.activity)
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("user " + std::to_string(u) +
                              ": activity features must be finite and non-negative");
  }

  for (int l = 0; l < graph.num_listings(); ++l) {
    const ListingFeatures& f = graph.listings[l];
    if (static_cast<int>(f.values.size()) != num_attrs)
      throw ValidationError("listing " + std::to_string(l) + ": expected " +
                            std::to_string(num_attrs) + " attribute values, got " +
                            std::to_string(f.values.size()));
    for (int a = 0; a < num_attrs; ++a) {
      const AttributeSpec& spec = schema.attributes[a];
      if (f.values[a] < 0 || f.values[a] >= spec.vocab_size)
        throw ValidationError("listing " + std::to_string(l) + ", attribute '" + spec.name +
                              "': value " + std::to_string(f.values[a]) + " out of vocab [0, " +
                              std::to_string(spec.vocab_size) + ")");
    }
    if (!std::isfinite(f.price) || f.price <= 0.0)
      throw ValidationError("listing " + std::to_string(l) + ": price must be positive, got " +
                            std::to_string(f.price));
  }

  for (int t = 0; t < kNumEdgeTypes; ++t) {
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : graph.edges[t]) {
      if (e.user < 0 || e.user >= graph.num_users() || e.listing < 0 ||
          e.listing >= graph.num_listings())
        throw ValidationError(std::string(kEdgeTypeNames[t]) + " edge (" +
                              std::to_string(e.user) + ", " + std::to_string(e.listing) +
                              ") references a missing node");
      if (!seen.insert({e.user, e.listing}).second)
        throw ValidationError(std::string("duplicate ") + kEdgeTypeNames[t] + " edge (" +
                              std::to_string(e.user) + ", " + std::to_string(e.listing) + ")");
    }
  }
}

double normalized_log_price(double price, const Schema& schema) {
  if (!(price > 0.0) || !std::isfinite(price))
    throw std::invalid_argument("normalized_log_price: price must be positive");
  if (!(schema.price_log_std > 0.0))
    throw std::invalid_argument("normalized_log_price: schema price_log_std must be positive");
  return (std::log(price) - schema.price_log_mean) / schema.price_log_std;
}

Matrix to_dense_adjacency(const Graph& graph, EdgeType type) {
  const int n = graph.num_nodes();
  const int nu = graph.num_users();
  Matrix a(n, n);
  for (const Edge& e : graph.edges_of(type)) {
    a(e.user, nu + e.listing) = 1.0;
    a(nu + e.listing, e.user) = 1.0;
  }
  return a;
}

Matrix densify(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols())
    throw std::invalid_argument("densify: expected square matrix, got " +
                                shape_string(adjacency));
  Matrix out = matmul(adjacency, adjacency);
  for (int i = 0; i < out.size(); ++i) out[i] += adjacency[i];
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = (i != j && out(i, j) > 0.0) ? 1.0 : 0.0;
  return out;
}

Matrix normalize_adjacency(const Matrix& adjacency) {
  const int n = adjacency.rows();
  if (n != adjacency.cols())
    throw std::invalid_argument("normalize_adjacency: expected square matrix, got " +
                                shape_string(adjacency));
  for (int i = 0; i < adjacency.size(); ++i)
    if (!(adjacency[i] >= 0.0))
      throw std::invalid_argument("normalize_adjacency: entries must be non-negative");
  std::vector<double> inv_sqrt_degree(n);
  for (int i = 0; i < n; ++i) {
    double degree = 1.0;  // self-loop
    for (int j = 0; j < n; ++j) degree += adjacency(i, j);
    inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double with_loop = adjacency(i, j) + (i == j ? 1.0 : 0.0);
      out(i, j) = inv_sqrt_degree[i] * with_loop * inv_sqrt_degree[j];
    }
  return out;
}

std::array<Matrix, kNumRelations> relation_adjacencies(const Graph& graph) {
  Matrix views = to_dense_adjacency(graph, EdgeType::kView);
  Matrix dense = densify(views);
  return {std::move(views), to_dense_adjacency(graph, EdgeType::kSave),
          to_dense_adjacency(graph, EdgeType::kSubmit), std::move(dense)};
}

bool same_schema(const Schema& a, const Schema& b) {
  if (a.attributes.size() != b.attributes.size()) return false;
  for (std::size_t i = 0; i < a.attributes.size(); ++i)
    if (a.attributes[i].name != b.attributes[i].name ||
        a.attributes[i].vocab_size != b.attributes[i].vocab_size)
      return false;
  return a.price_log_mean == b.price_log_mean && a.price_log_std == b.price_log_std;
}

}  // namespace cfrecs
