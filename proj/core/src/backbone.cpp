#include "cfrecs/backbone.hpp"

#include <stdexcept>

#include "cfrecs/error.hpp"

namespace cfrecs {

BackboneInputs graph_inputs(const Graph& graph, const Schema& schema) {
  validate_graph(graph, schema);
  BackboneInputs in;
  in.num_users = graph.num_users();
  in.num_listings = graph.num_listings();

  const int vocab = schema.total_vocab();
  Matrix prefs(in.num_users, vocab);
  Matrix activity(in.num_users, kActivityDim);
  for (int u = 0; u < in.num_users; ++u) {
    for (int a = 0; a < schema.num_attributes(); ++a) {
      const int off = schema.offset(a);
      const auto& hist = graph.users[u].histograms[a];
      for (std::size_t i = 0; i < hist.size(); ++i) prefs(u, off + static_cast<int>(i)) = hist[i];
    }
    for (int j = 0; j < kActivityDim; ++j) activity(u, j) = graph.users[u].activity[j];
  }
  in.user_preferences = Tensor::constant(std::move(prefs));
  in.user_activity = Tensor::constant(std::move(activity));

  in.listing_rows.assign(schema.num_attributes(), std::vector<int>(in.num_listings));
  Matrix price(in.num_listings, 1);
  for (int l = 0; l < in.num_listings; ++l) {
    for (int a = 0; a < schema.num_attributes(); ++a)
      in.listing_rows[a][l] = schema.offset(a) + graph.listings[l].values[a];
    price(l, 0) = normalized_log_price(graph.listings[l].price, schema);
  }
  in.listing_price = Tensor::constant(std::move(price));

  auto raw = relation_adjacencies(graph);
  for (int r = 0; r < kNumRelations; ++r)
    in.relations[r] = Tensor::constant(normalize_adjacency(raw[r]));
  return in;
}

Tensor bipartite_adjacency(const Tensor& probabilities, int num_users, int num_listings) {
  if (probabilities.rows() != num_users || probabilities.cols() != num_listings)
    throw std::invalid_argument("bipartite_adjacency: map is " +
                                shape_string(probabilities.value()) + ", expected " +
                                std::to_string(num_users) + "x" + std::to_string(num_listings));
  Tensor user_block = Tensor::constant(Matrix(num_users, num_users));
  Tensor listing_block = Tensor::constant(Matrix(num_listings, num_listings));
  Tensor top = concat_cols({user_block, probabilities});
  Tensor bottom = concat_cols({transpose(probabilities), listing_block});
  return concat_rows({top, bottom});
}

Tensor densify_soft(const Tensor& adjacency) {
  const int n = adjacency.rows();
  if (n != adjacency.cols())
    throw std::invalid_argument("densify_soft: expected square matrix, got " +
                                shape_string(adjacency.value()));
  Tensor sum = add(adjacency, matmul(adjacency, adjacency));
  // min(s, 1) = s - relu(s - 1): matches hard binarization on 0/1 inputs
  Tensor clipped = sub(sum, relu(add_scalar(sum, -1.0)));
  Matrix hollow = Matrix::filled(n, n, 1.0);
  for (int i = 0; i < n; ++i) hollow(i, i) = 0.0;
  return mul(clipped, Tensor::constant(std::move(hollow)));
}

Tensor normalize_adjacency_soft(const Tensor& adjacency) {
  const int n = adjacency.rows();
  if (n != adjacency.cols())
    throw std::invalid_argument("normalize_adjacency_soft: expected square matrix, got " +
                                shape_string(adjacency.value()));
  Tensor with_loops = add(adjacency, Tensor::constant(Matrix::identity(n)));
  Tensor degree = add_scalar(row_sum(adjacency), 1.0);          // n x 1, >= 1
  Tensor inv_sqrt = exp(scale(log(degree), -0.5));              // degree^-1/2
  Tensor outer = matmul(inv_sqrt, transpose(inv_sqrt));         // n x n
  return mul(with_loops, outer);
}

std::array<Tensor, kNumRelations> soft_relations(
    const std::array<Tensor, kNumEdgeTypes>& probabilities, int num_users, int num_listings) {
  std::array<Tensor, kNumRelations> out;
  Tensor views = bipartite_adjacency(probabilities[0], num_users, num_listings);
  out[0] = normalize_adjacency_soft(views);
  for (int t = 1; t < kNumEdgeTypes; ++t)
    out[t] = normalize_adjacency_soft(
        bipartite_adjacency(probabilities[t], num_users, num_listings));
  out[kNumEdgeTypes] = normalize_adjacency_soft(densify_soft(views));
  return out;
}

RelationalBackbone::RelationalBackbone(const Schema& schema, const BackboneConfig& config,
                                       ParameterStore& params, std::string prefix, Rng& rng)
    : schema_(schema), config_(config), prefix_(std::move(prefix)) {
  if (config.embedding_dim < 1 || config.hidden_dim < 1 || config.num_layers < 1)
    throw std::invalid_argument("RelationalBackbone: dimensions must be positive");
  const int d = config.hidden_dim;
  embedding_ = params.create(prefix_ + "embedding",
                             glorot_uniform(schema.total_vocab(), config.embedding_dim, rng));
  user_proj_w_ = params.create(prefix_ + "proj_user.w", glorot_uniform(user_width(), d, rng));
  user_proj_b_ = params.create(prefix_ + "proj_user.b", 1, d);
  listing_proj_w_ =
      params.create(prefix_ + "proj_listing.w", glorot_uniform(listing_width(), d, rng));
  listing_proj_b_ = params.create(prefix_ + "proj_listing.b", 1, d);
  layers_.resize(config.num_layers);
  for (int l = 0; l < config.num_layers; ++l)
    for (int r = 0; r < kNumRelations; ++r)
      layers_[l][r] = params.create(
          prefix_ + "layer" + std::to_string(l) + ".rel" + std::to_string(r),
          glorot_uniform(d, d, rng));
}

int RelationalBackbone::user_width() const {
  return schema_.num_attributes() * config_.embedding_dim + kActivityDim;
}

int RelationalBackbone::listing_width() const {
  return schema_.num_attributes() * config_.embedding_dim + 1;
}

std::vector<std::string> RelationalBackbone::parameter_suffixes() const {
  std::vector<std::string> names = {"embedding", "proj_user.w", "proj_user.b",
                                    "proj_listing.w", "proj_listing.b"};
  for (int l = 0; l < config_.num_layers; ++l)
    for (int r = 0; r < kNumRelations; ++r)
      names.push_back("layer" + std::to_string(l) + ".rel" + std::to_string(r));
  return names;
}

Tensor RelationalBackbone::embed_users(const BackboneInputs& inputs) const {
  if (inputs.user_preferences.cols() != schema_.total_vocab())
    throw ValidationError("embed_users: preferences width " +
                          std::to_string(inputs.user_preferences.cols()) +
                          " does not match schema vocab " +
                          std::to_string(schema_.total_vocab()));
  std::vector<Tensor> parts;
  for (int a = 0; a < schema_.num_attributes(); ++a) {
    const int off = schema_.offset(a);
    const int vocab = schema_.attributes[a].vocab_size;
    parts.push_back(matmul(slice_cols(inputs.user_preferences, off, vocab),
                           slice_rows(embedding_, off, vocab)));
  }
  parts.push_back(inputs.user_activity);
  return concat_cols(parts);
}

Tensor RelationalBackbone::embed_listings(const BackboneInputs& inputs) const {
  if (static_cast<int>(inputs.listing_rows.size()) != schema_.num_attributes())
    throw ValidationError("embed_listings: expected " +
                          std::to_string(schema_.num_attributes()) + " attribute row sets, got " +
                          std::to_string(inputs.listing_rows.size()));
  std::vector<Tensor> parts;
  for (int a = 0; a < schema_.num_attributes(); ++a)
    parts.push_back(row_select(embedding_, inputs.listing_rows[a]));
  parts.push_back(inputs.listing_price);
  return concat_cols(parts);
}

Tensor RelationalBackbone::node_states(const BackboneInputs& inputs, bool training,
                                       Rng* dropout_rng) const {
  Tensor user_states = add_row(matmul(embed_users(inputs), user_proj_w_), user_proj_b_);
  Tensor listing_states =
      add_row(matmul(embed_listings(inputs), listing_proj_w_), listing_proj_b_);
  Tensor z = concat_rows({user_states, listing_states});
  const bool drop = training && config_.dropout > 0.0;
  if (drop && dropout_rng == nullptr)
    throw std::invalid_argument("node_states: training mode needs a dropout rng");
  for (const auto& layer : layers_) {
    Tensor acc = matmul(inputs.relations[0], matmul(z, layer[0]));
    for (int r = 1; r < kNumRelations; ++r)
      acc = add(acc, matmul(inputs.relations[r], matmul(z, layer[r])));
    z = relu(acc);
    if (drop) z = dropout(z, config_.dropout, *dropout_rng, true);
  }
  return z;
}

void copy_backbone_weights(const ParameterStore& src, const std::string& src_prefix,
                           ParameterStore& dst, const std::string& dst_prefix,
                           const std::vector<std::string>& suffixes) {
  for (const std::string& suffix : suffixes) {
    const Matrix& from = src.get(src_prefix + suffix).value();
    Tensor to = dst.get(dst_prefix + suffix);
    if (!from.same_shape(to.value()))
      throw ValidationError("copy_backbone_weights: '" + suffix + "' is " + shape_string(from) +
                            " in the source but " + shape_string(to.value()) +
                            " in the destination");
    to.mutable_value() = from;
  }
}

}  // namespace cfrecs
