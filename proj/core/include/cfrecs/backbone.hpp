#pragma once

#include <array>
#include <string>
#include <vector>

#include "cfrecs/graph.hpp"
#include "cfrecs/optim.hpp"
#include "cfrecs/tensor.hpp"

namespace cfrecs {

struct BackboneConfig {
  int embedding_dim = 16;  // width of one vocabulary row
  int hidden_dim = 32;     // shared node-state width
  int num_layers = 2;
  double dropout = 0.2;
};

// Per-graph inputs to the message-passing trunk. The hard path builds
// constants from a Graph; the generator's relaxed pass swaps in decoded
// tensors (soft preferences, soft price, soft relations) so gradients can
// flow back into the decoder.
struct BackboneInputs {
  int num_users = 0;
  int num_listings = 0;
  Tensor user_preferences;  // n_u x total_vocab, stacked histograms
  Tensor user_activity;     // n_u x kActivityDim
  std::vector<std::vector<int>> listing_rows;  // per attribute: embedding row per listing
  Tensor listing_price;     // n_l x 1, normalized log price
  std::array<Tensor, kNumRelations> relations;  // normalized adjacencies
};

BackboneInputs graph_inputs(const Graph& graph, const Schema& schema);

// Differentiable counterparts of the adjacency pipeline. On 0/1 constant
// inputs they agree exactly with the hard versions in graph.hpp.
Tensor bipartite_adjacency(const Tensor& probabilities, int num_users, int num_listings);
Tensor densify_soft(const Tensor& adjacency);
Tensor normalize_adjacency_soft(const Tensor& adjacency);
std::array<Tensor, kNumRelations> soft_relations(
    const std::array<Tensor, kNumEdgeTypes>& probabilities, int num_users, int num_listings);

// Embedding table, side projections, and L relational layers; registers its
// weights into the given store under `prefix`.
class RelationalBackbone {
 public:
  RelationalBackbone(const Schema& schema, const BackboneConfig& config, ParameterStore& params,
                     std::string prefix, Rng& rng);

  Tensor embed_users(const BackboneInputs& inputs) const;
  Tensor embed_listings(const BackboneInputs& inputs) const;
  Tensor node_states(const BackboneInputs& inputs, bool training = false,
                     Rng* dropout_rng = nullptr) const;

  int user_width() const;
  int listing_width() const;
  const BackboneConfig& config() const { return config_; }
  // relative names of every weight this backbone owns (no prefix)
  std::vector<std::string> parameter_suffixes() const;

 private:
  Schema schema_;
  BackboneConfig config_;
  std::string prefix_;
  Tensor embedding_;
  Tensor user_proj_w_, user_proj_b_;
  Tensor listing_proj_w_, listing_proj_b_;
  std::vector<std::array<Tensor, kNumRelations>> layers_;
};

// Copies src_prefix+suffix into dst_prefix+suffix for every backbone weight.
void copy_backbone_weights(const ParameterStore& src, const std::string& src_prefix,
                           ParameterStore& dst, const std::string& dst_prefix,
                           const std::vector<std::string>& suffixes);

}  // namespace cfrecs
