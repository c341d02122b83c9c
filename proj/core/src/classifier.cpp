#include "cfrecs/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cfrecs/error.hpp"
#include "cfrecs/metrics.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace cfrecs {

ClassifierModel::ClassifierModel(const Schema& schema, const ClassifierConfig& config,
                                 std::uint64_t init_seed)
    : schema_(schema),
      config_(config),
      init_rng_(init_seed),
      backbone_(schema, config.backbone, params_, kBackbonePrefix, init_rng_) {
  if (config.readout_hidden < 1)
    throw std::invalid_argument("ClassifierModel: readout width must be positive");
  const int d = config.backbone.hidden_dim;
  readout_w1_ =
      params_.create("readout.w1", glorot_uniform(d, config.readout_hidden, init_rng_));
  readout_b1_ = params_.create("readout.b1", 1, config.readout_hidden);
  readout_w2_ = params_.create("readout.w2", glorot_uniform(config.readout_hidden, 1, init_rng_));
  readout_b2_ = params_.create("readout.b2", 1, 1);
}

Tensor ClassifierModel::forward(const BackboneInputs& inputs, bool training,
                                Rng* dropout_rng) const {
  Tensor states = backbone_.node_states(inputs, training, dropout_rng);
  Tensor pooled = reduce_mean_rows(states);
  Tensor hidden = relu(add_row(matmul(pooled, readout_w1_), readout_b1_));
  return sigmoid(add_row(matmul(hidden, readout_w2_), readout_b2_));
}

double ClassifierModel::score(const Graph& graph) const {
  return forward(graph_inputs(graph, schema_)).item();
}

void ClassifierModel::save(const std::string& path) const {
  nlohmann::json meta = {{"kind", "classifier"},
                         {"schema", detail::schema_to_json(schema_)},
                         {"config",
                          {{"embedding_dim", config_.backbone.embedding_dim},
                           {"hidden_dim", config_.backbone.hidden_dim},
                           {"num_layers", config_.backbone.num_layers},
                           {"dropout", config_.backbone.dropout},
                           {"readout_hidden", config_.readout_hidden}}}};
  params_.save(path, meta.dump());
}

ClassifierModel ClassifierModel::load(const std::string& path) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ParameterStore::peek_meta(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint '" + path + "': malformed metadata: " + e.what());
  }
  if (meta.value("kind", "") != "classifier")
    throw ValidationError("checkpoint '" + path + "': not a classifier checkpoint");
  Schema schema = detail::schema_from_json(meta.at("schema"), path);
  ClassifierConfig config;
  try {
    const nlohmann::json& jc = meta.at("config");
    config.backbone.embedding_dim = jc.at("embedding_dim").get<int>();
    config.backbone.hidden_dim = jc.at("hidden_dim").get<int>();
    config.backbone.num_layers = jc.at("num_layers").get<int>();
    config.backbone.dropout = jc.at("dropout").get<double>();
    config.readout_hidden = jc.at("readout_hidden").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("checkpoint '" + path + "': malformed config: " + e.what());
  }
  ClassifierModel model(schema, config, 0);
  model.params_.load(path);
  return model;
}

namespace {

std::vector<BackboneInputs> prepare_inputs(const Dataset& data) {
  std::vector<BackboneInputs> inputs;
  inputs.reserve(data.graphs.size());
  for (const Graph& g : data.graphs) inputs.push_back(graph_inputs(g, data.schema));
  return inputs;
}

}  // namespace

TrainLog train_classifier(ClassifierModel& model, const Dataset& data,
                          const SplitIndices& splits, const TrainConfig& config) {
  if (splits.train.empty() || splits.val.empty())
    throw ValidationError("train_classifier: train and validation splits must be non-empty");
  if (config.epochs < 1 || config.batch_size < 1 || config.patience < 1)
    throw std::invalid_argument("train_classifier: epochs, batch size, patience must be positive");
  if (!same_schema(model.schema(), data.schema))
    throw ValidationError("train_classifier: model and dataset schemas differ");

  std::vector<BackboneInputs> inputs = prepare_inputs(data);
  std::vector<Tensor> labels;
  labels.reserve(data.graphs.size());
  for (const Graph& g : data.graphs)
    labels.push_back(Tensor::constant(Matrix(1, 1, {static_cast<double>(g.label)})));

  model.params().set_trainable(true);
  AdamOptimizer optimizer(model.params(), config.learning_rate);
  Rng rng(config.seed);
  std::vector<int> order = splits.train;

  TrainLog log;
  auto best = model.params().snapshot();
  double best_val = -1.0;
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
        Tensor loss = bce(model.forward(inputs[idx], true, &rng), labels[idx]);
        batch_loss = batch_loss.defined() ? add(batch_loss, loss) : loss;
      }
      batch_loss = scale(batch_loss, 1.0 / static_cast<double>(end - at));
      const double value = batch_loss.item();
      if (!std::isfinite(value))
        throw NumericError("train_classifier: non-finite loss at epoch " +
                           std::to_string(epoch));
      epoch_loss += value * static_cast<double>(end - at);
      optimizer.zero_grad();
      batch_loss.backward();
      optimizer.step();
    }
    epoch_loss /= static_cast<double>(order.size());

    std::vector<double> val_scores;
    std::vector<int> val_labels;
    for (int idx : splits.val) {
      val_scores.push_back(model.forward(inputs[idx]).item());
      val_labels.push_back(data.graphs[idx].label);
    }
    const double val_auc = roc_auc(val_scores, val_labels);
    log.epochs.push_back({epoch, epoch_loss, val_auc});

    if (val_auc > best_val + 1e-12) {
      best_val = val_auc;
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

std::vector<double> score_graphs(const ClassifierModel& model, const Dataset& data,
                                 const std::vector<int>& indices) {
  std::vector<double> scores;
  scores.reserve(indices.size());
  for (int idx : indices) {
    if (idx < 0 || idx >= static_cast<int>(data.graphs.size()))
      throw ValidationError("score_graphs: index " + std::to_string(idx) + " out of range");
    scores.push_back(model.score(data.graphs[idx]));
  }
  return scores;
}

double dataset_auc(const ClassifierModel& model, const Dataset& data,
                   const std::vector<int>& indices) {
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (int idx : indices) labels.push_back(data.graphs[idx].label);
  return roc_auc(score_graphs(model, data, indices), labels);
}

void write_training_log(const std::string& path, const TrainLog& log,
                        const std::string& val_column) {
  std::ofstream out(path);
  if (!out) throw ValidationError("training log '" + path + "': cannot open for writing");
  out << "epoch,train_loss," << val_column << "\n";
  char buffer[96];
  for (const EpochLog& e : log.epochs) {
    std::snprintf(buffer, sizeof(buffer), "%d,%.17g,%.17g\n", e.epoch, e.train_loss,
                  e.val_metric);
    out << buffer;
  }
  if (!out) throw ValidationError("training log '" + path + "': write failed");
}

}  // namespace cfrecs
