#include "cfrecs/generator.hpp"

#include <algorithm>
#include <cmath>

#include "cfrecs/error.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace cfrecs {

namespace {

void check_weights(const LossWeights& w) {
  for (double a : w.alpha)
    if (!(a >= 0.0)) throw std::invalid_argument("loss weights: alpha must be non-negative");
  if (!(w.gamma >= 0.0 && w.gamma < 1.0))
    throw std::invalid_argument("loss weights: gamma must be in [0, 1)");
  if (!(w.zeta >= 0.0 && w.beta >= 0.0 && w.eta >= 0.0 && w.lambda >= 0.0))
    throw std::invalid_argument("loss weights: term weights must be non-negative");
}

void check_thresholds(const Thresholds& t) {
  if (!(t.tau_add > 0.0 && t.tau_add <= 1.0))
    throw std::invalid_argument("thresholds: tau_add must be in (0, 1]");
  if (!(t.tau_rem >= 0.0 && t.tau_rem < 1.0))
    throw std::invalid_argument("thresholds: tau_rem must be in [0, 1)");
  if (t.tau_rem > t.tau_add)
    throw std::invalid_argument("thresholds: tau_rem exceeds tau_add");
}

std::array<Tensor, 4> make_head(ParameterStore& params, const std::string& prefix, int in,
                                int hidden, int out, Rng& rng) {
  return {params.create(prefix + ".w1", glorot_uniform(in, hidden, rng)),
          params.create(prefix + ".b1", 1, hidden),
          params.create(prefix + ".w2", glorot_uniform(hidden, out, rng)),
          params.create(prefix + ".b2", 1, out)};
}

}  // namespace

GeneratorModel::GeneratorModel(const Schema& schema, const GeneratorConfig& config,
                               std::uint64_t init_seed)
    : schema_(schema),
      config_(config),
      init_rng_(init_seed),
      encoder_(schema, config.backbone, params_, kEncoderPrefix, init_rng_) {
  if (config.latent_dim < 1 || config.edge_dim < 1 || config.head_hidden < 1)
    throw std::invalid_argument("GeneratorModel: head dimensions must be positive");
  const int d = config.backbone.hidden_dim;
  mu_head_ = make_head(params_, "mu", d, config.head_hidden, config.latent_dim, init_rng_);
  log_var_head_ =
      make_head(params_, "log_var", d, config.head_hidden, config.latent_dim, init_rng_);
  for (int t = 0; t < kNumEdgeTypes; ++t)
    edge_heads_[t] = make_head(params_, std::string("edge_") + kEdgeTypeNames[t],
                               config.latent_dim, config.head_hidden, config.edge_dim, init_rng_);
  preference_head_ = make_head(params_, "preference", config.latent_dim, config.head_hidden,
                               schema.total_vocab(), init_rng_);
  price_head_ = make_head(params_, "price", config.latent_dim, config.head_hidden, 1, init_rng_);
}

Tensor GeneratorModel::head(const Tensor& in, const std::array<Tensor, 4>& weights) const {
  Tensor hidden = relu(add_row(matmul(in, weights[0]), weights[1]));
  return add_row(matmul(hidden, weights[2]), weights[3]);
}

Encoding GeneratorModel::encode(const BackboneInputs& inputs) const {
  Tensor states = encoder_.node_states(inputs);
  Encoding enc;
  enc.mu = head(states, mu_head_);
  enc.log_var = head(states, log_var_head_);
  enc.sigma = exp(scale(enc.log_var, 0.5));
  return enc;
}

Decoded GeneratorModel::decode(const Tensor& z, int num_users, int num_listings) const {
  if (z.rows() != num_users + num_listings)
    throw std::invalid_argument("decode: z has " + std::to_string(z.rows()) + " rows for " +
                                std::to_string(num_users + num_listings) + " nodes");
  Decoded dec;
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    Tensor transformed = head(z, edge_heads_[t]);
    Tensor user_side = slice_rows(transformed, 0, num_users);
    Tensor listing_side = slice_rows(transformed, num_users, num_listings);
    dec.edge_probabilities[t] = sigmoid(matmul(user_side, transpose(listing_side)));
  }
  Tensor raw_prefs = head(slice_rows(z, 0, num_users), preference_head_);
  std::vector<Tensor> blocks;
  for (int a = 0; a < schema_.num_attributes(); ++a)
    blocks.push_back(softmax_rows(
        slice_cols(raw_prefs, schema_.offset(a), schema_.attributes[a].vocab_size)));
  dec.user_preferences = concat_cols(blocks);
  dec.listing_price = head(slice_rows(z, num_users, num_listings), price_head_);
  return dec;
}

void GeneratorModel::init_from_classifier(const ClassifierModel& classifier) {
  if (!same_schema(schema_, classifier.schema()))
    throw ValidationError("init_from_classifier: schema mismatch");
  const BackboneConfig& a = config_.backbone;
  const BackboneConfig& b = classifier.config().backbone;
  if (a.embedding_dim != b.embedding_dim || a.hidden_dim != b.hidden_dim ||
      a.num_layers != b.num_layers)
    throw ValidationError("init_from_classifier: backbone dimensions differ");
  copy_backbone_weights(classifier.params(), ClassifierModel::kBackbonePrefix, params_,
                        kEncoderPrefix, encoder_.parameter_suffixes());
}

void GeneratorModel::save(const std::string& path) const {
  nlohmann::json meta = {{"kind", "generator"},
                         {"schema", detail::schema_to_json(schema_)},
                         {"config",
                          {{"embedding_dim", config_.backbone.embedding_dim},
                           {"hidden_dim", config_.backbone.hidden_dim},
                           {"num_layers", config_.backbone.num_layers},
                           {"dropout", config_.backbone.dropout},
                           {"latent_dim", config_.latent_dim},
                           {"edge_dim", config_.edge_dim},
                           {"head_hidden", config_.head_hidden}}}};
  params_.save(path, meta.dump());
}

GeneratorModel GeneratorModel::load(const std::string& path) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ParameterStore::peek_meta(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint '" + path + "': malformed metadata: " + e.what());
  }
  if (meta.value("kind", "") != "generator")
    throw ValidationError("checkpoint '" + path + "': not a generator checkpoint");
  Schema schema = detail::schema_from_json(meta.at("schema"), path);
  GeneratorConfig config;
  try {
    const nlohmann::json& jc = meta.at("config");
    config.backbone.embedding_dim = jc.at("embedding_dim").get<int>();
    config.backbone.hidden_dim = jc.at("hidden_dim").get<int>();
    config.backbone.num_layers = jc.at("num_layers").get<int>();
    config.backbone.dropout = jc.at("dropout").get<double>();
    config.latent_dim = jc.at("latent_dim").get<int>();
    config.edge_dim = jc.at("edge_dim").get<int>();
    config.head_hidden = jc.at("head_hidden").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint '" + path + "': malformed config: " + e.what());
  }
  GeneratorModel model(schema, config, 0);
  model.params_.load(path);
  return model;
}

GeneratorLoss generator_loss(const Graph& graph, const BackboneInputs& inputs,
                             const GeneratorModel& model, const ClassifierModel& classifier,
                             const LossWeights& weights, Rng& rng) {
  check_weights(weights);
  if (!same_schema(model.schema(), classifier.schema()))
    throw ValidationError("generator_loss: generator and classifier schemas differ");
  const int nu = inputs.num_users;
  const int nl = inputs.num_listings;

  Encoding enc = model.encode(inputs);
  Tensor z = reparameterize(enc.mu, enc.sigma, rng);
  Decoded dec = model.decode(z, nu, nl);

  Tensor edge_term;
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    Matrix target(nu, nl);
    for (const Edge& e : graph.edges[t]) target(e.user, e.listing) = 1.0;
    Tensor term = scale(
        reduce_mean_all(bce(dec.edge_probabilities[t], Tensor::constant(std::move(target)))),
        weights.alpha[t]);
    edge_term = edge_term.defined() ? add(edge_term, term) : term;
  }

  Tensor feature_term =
      add(scale(reduce_sum_all(square(sub(dec.user_preferences, inputs.user_preferences))),
                1.0 / nu),
          scale(reduce_sum_all(square(sub(dec.listing_price, inputs.listing_price))), 1.0 / nl));

  Tensor cf_term;
  if (graph.label == 1) {
    cf_term = Tensor::constant(Matrix(1, 1));
  } else {
    const double f_original = classifier.forward(inputs).item();
    BackboneInputs soft;
    soft.num_users = nu;
    soft.num_listings = nl;
    soft.user_preferences = dec.user_preferences;
    soft.user_activity = inputs.user_activity;
    soft.listing_rows = inputs.listing_rows;
    soft.listing_price = dec.listing_price;
    soft.relations = soft_relations(dec.edge_probabilities, nu, nl);
    Tensor f_soft = classifier.forward(soft);
    cf_term = relu(add_scalar(scale(f_soft, -1.0), f_original + weights.gamma));
  }

  Tensor kl_term = scale(kl_diag_gaussian(enc.mu, enc.log_var), 1.0 / (nu + nl));

  Tensor total = add(add(scale(edge_term, weights.zeta), scale(feature_term, weights.beta)),
                     add(scale(cf_term, weights.eta), scale(kl_term, weights.lambda)));

  GeneratorLoss out;
  out.total = total;
  out.breakdown = {edge_term.item(), feature_term.item(), cf_term.item(), kl_term.item(),
                   total.item()};
  return out;
}

namespace {

Graph apply_changes(const Graph& graph,
                    const std::array<std::vector<Edge>, kNumEdgeTypes>& added,
                    const std::array<std::vector<Edge>, kNumEdgeTypes>& removed) {
  Graph cf = graph;
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    if (!removed[t].empty()) {
      std::vector<Edge> kept;
      kept.reserve(cf.edges[t].size());
      for (const Edge& e : cf.edges[t]) {
        bool drop = false;
        for (const Edge& r : removed[t])
          if (r.user == e.user && r.listing == e.listing) {
            drop = true;
            break;
          }
        if (!drop) kept.push_back(e);
      }
      cf.edges[t] = std::move(kept);
    }
    cf.edges[t].insert(cf.edges[t].end(), added[t].begin(), added[t].end());
  }
  return cf;
}

}  // namespace

CounterfactualResult materialize(const Graph& graph, const GeneratorModel& model,
                                 const ClassifierModel& classifier, const Thresholds& thresholds,
                                 PerturbMode mode, Rng& rng, const FeasibilityMask* mask,
                                 int best_of) {
  check_thresholds(thresholds);
  if (best_of < 1) throw std::invalid_argument("materialize: best_of must be positive");
  if (!same_schema(model.schema(), classifier.schema()))
    throw ValidationError("materialize: generator and classifier schemas differ");
  const Schema& schema = model.schema();
  BackboneInputs inputs = graph_inputs(graph, schema);
  const int nu = graph.num_users();
  const int nl = graph.num_listings();
  for (int t = 0; t < kNumEdgeTypes; ++t)
    if (mask && mask->allow_add[t].size() > 0 &&
        (mask->allow_add[t].rows() != nu || mask->allow_add[t].cols() != nl))
      throw ValidationError("materialize: feasibility mask for " +
                            std::string(kEdgeTypeNames[t]) + " is " +
                            shape_string(mask->allow_add[t]) + ", expected " +
                            std::to_string(nu) + "x" + std::to_string(nl));

  const double f_original = classifier.forward(inputs).item();
  Encoding enc = model.encode(inputs);

  CounterfactualResult best;
  for (int draw = 0; draw < best_of; ++draw) {
    Tensor z = reparameterize(enc.mu, enc.sigma, rng);
    Decoded dec = model.decode(z, nu, nl);

    CounterfactualResult result;
    result.original = graph;
    result.original_score = f_original;

    for (int t = 0; t < kNumEdgeTypes; ++t) {
      if (mode == PerturbMode::kViewsOnly && t != static_cast<int>(EdgeType::kView)) continue;
      const Matrix& p = dec.edge_probabilities[t].value();
      const Matrix* allow =
          (mask && mask->allow_add[t].size() > 0) ? &mask->allow_add[t] : nullptr;
      for (int u = 0; u < nu; ++u)
        for (int l = 0; l < nl; ++l) {
          const bool present = graph.has_edge(static_cast<EdgeType>(t), u, l);
          if (present && p(u, l) < thresholds.tau_rem)
            result.removed[t].push_back({u, l});
          else if (!present && p(u, l) > thresholds.tau_add && (!allow || (*allow)(u, l) > 0.5))
            result.added[t].push_back({u, l});
        }
    }

    result.counterfactual = apply_changes(graph, result.added, result.removed);
    if (mode == PerturbMode::kUnconstrained) {
      const Matrix& prefs = dec.user_preferences.value();
      for (int u = 0; u < nu; ++u)
        for (int a = 0; a < schema.num_attributes(); ++a) {
          const int off = schema.offset(a);
          auto& hist = result.counterfactual.users[u].histograms[a];
          for (std::size_t i = 0; i < hist.size(); ++i)
            hist[i] = prefs(u, off + static_cast<int>(i));
        }
      const Matrix& price = dec.listing_price.value();
      for (int l = 0; l < nl; ++l)
        result.counterfactual.listings[l].price =
            std::exp(price(l, 0) * schema.price_log_std + schema.price_log_mean);
    }

    result.counterfactual_score =
        classifier.forward(graph_inputs(result.counterfactual, schema)).item();
    result.relative_lift =
        (result.counterfactual_score - f_original) / f_original;
    if (draw == 0 || result.counterfactual_score > best.counterfactual_score)
      best = std::move(result);
  }
  return best;
}

CounterfactualResult random_baseline(const Graph& graph, const ClassifierModel& classifier,
                                     const std::array<int, kNumEdgeTypes>& num_add,
                                     const std::array<int, kNumEdgeTypes>& num_rem, Rng& rng) {
  const int nu = graph.num_users();
  const int nl = graph.num_listings();
  CounterfactualResult result;
  result.original = graph;
  result.original_score = classifier.score(graph);

  for (int t = 0; t < kNumEdgeTypes; ++t) {
    if (num_add[t] < 0 || num_rem[t] < 0)
      throw std::invalid_argument("random_baseline: change counts must be non-negative");

    std::vector<Edge> present = graph.edges[t];
    const int removals = std::min<int>(num_rem[t], static_cast<int>(present.size()));
    for (int i = 0; i < removals; ++i) {
      const int pick = i + rng.uniform_int(static_cast<int>(present.size()) - i);
      std::swap(present[i], present[pick]);
      result.removed[t].push_back(present[i]);
    }

    std::vector<Edge> absent;
    absent.reserve(static_cast<std::size_t>(nu) * nl - graph.edges[t].size());
    for (int u = 0; u < nu; ++u)
      for (int l = 0; l < nl; ++l)
        if (!graph.has_edge(static_cast<EdgeType>(t), u, l)) absent.push_back({u, l});
    const int additions = std::min<int>(num_add[t], static_cast<int>(absent.size()));
    for (int i = 0; i < additions; ++i) {
      const int pick = i + rng.uniform_int(static_cast<int>(absent.size()) - i);
      std::swap(absent[i], absent[pick]);
      result.added[t].push_back(absent[i]);
    }
  }

  result.counterfactual = apply_changes(graph, result.added, result.removed);
  result.counterfactual_score = classifier.score(result.counterfactual);
  result.relative_lift =
      (result.counterfactual_score - result.original_score) / result.original_score;
  return result;
}

TrainLog train_generator(GeneratorModel& model, const Dataset& data, const SplitIndices& splits,
                         ClassifierModel& classifier, const LossWeights& weights,
                         const GeneratorTrainConfig& config) {
  if (splits.train.empty() || splits.val.empty())
    throw ValidationError("train_generator: train and validation splits must be non-empty");
  if (config.epochs < 1 || config.batch_size < 1 || config.patience < 1)
    throw std::invalid_argument("train_generator: epochs, batch size, patience must be positive");
  if (!same_schema(model.schema(), data.schema))
    throw ValidationError("train_generator: model and dataset schemas differ");
  check_weights(weights);

  std::vector<BackboneInputs> inputs(data.graphs.size());
  for (const auto* part : {&splits.train, &splits.val})
    for (int idx : *part) {
      if (idx < 0 || idx >= static_cast<int>(data.graphs.size()))
        throw ValidationError("train_generator: split index " + std::to_string(idx) +
                              " out of range");
      inputs[idx] = graph_inputs(data.graphs[idx], data.schema);
    }

  // the classifier only supplies scores; it stays frozen from here on
  classifier.params().set_trainable(false);
  model.params().set_trainable(true);
  AdamOptimizer optimizer(model.params(), config.learning_rate);
  Rng rng(config.seed);
  const std::uint64_t val_noise_seed = splitmix64(config.seed ^ 0x5eed1234abcd77ULL);
  std::vector<int> order = splits.train;

  TrainLog log;
  auto best = model.params().snapshot();
  double best_val = 0.0;
  int best_epoch = -1;
  int stall = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);

    double epoch_loss = 0.0;
    for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
      const std::size_t end = std::min(at + config.batch_size, order.size());
      Tensor batch_loss;
      for (std::size_t i = at; i < end; ++i) {
        const int idx = order[i];
        Tensor loss =
            generator_loss(data.graphs[idx], inputs[idx], model, classifier, weights, rng).total;
        batch_loss = batch_loss.defined() ? add(batch_loss, loss) : loss;
      }
      batch_loss = scale(batch_loss, 1.0 / static_cast<double>(end - at));
      const double value = batch_loss.item();
      if (!std::isfinite(value))
        throw NumericError("train_generator: non-finite loss at epoch " + std::to_string(epoch));
      epoch_loss += value * static_cast<double>(end - at);
      optimizer.zero_grad();
      batch_loss.backward();
      optimizer.step();
    }
    epoch_loss /= static_cast<double>(order.size());

    // same noise every epoch so validation losses are comparable
    Rng val_rng(val_noise_seed);
    double val_loss = 0.0;
    for (int idx : splits.val)
      val_loss +=
          generator_loss(data.graphs[idx], inputs[idx], model, classifier, weights, val_rng)
              .breakdown.total;
    val_loss /= static_cast<double>(splits.val.size());
    if (!std::isfinite(val_loss))
      throw NumericError("train_generator: non-finite validation loss at epoch " +
                         std::to_string(epoch));
    log.epochs.push_back({epoch, epoch_loss, val_loss});

    if (best_epoch < 0 || val_loss < best_val - 1e-12) {
      best_val = val_loss;
      best_epoch = epoch;
      best = model.params().snapshot();
      stall = 0;
    } else if (++stall >= config.patience) {
      break;
    }
  }

  model.params().restore(best);
  log.best_epoch = best_epoch;
  log.best_val_metric = best_val;
  return log;
}

}  // namespace cfrecs
