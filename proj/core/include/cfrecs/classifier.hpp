#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfrecs/backbone.hpp"
#include "cfrecs/dataset.hpp"

namespace cfrecs {

struct ClassifierConfig {
  BackboneConfig backbone;
  int readout_hidden = 32;
};

// Relational GNN scoring the transaction probability of one interaction
// graph: backbone node states, mean pooling, then a small readout MLP
// ending in a sigmoid.
class ClassifierModel {
 public:
  static constexpr const char* kBackbonePrefix = "backbone.";

  ClassifierModel(const Schema& schema, const ClassifierConfig& config, std::uint64_t init_seed);

  Tensor forward(const BackboneInputs& inputs, bool training = false,
                 Rng* dropout_rng = nullptr) const;
  double score(const Graph& graph) const;

  const Schema& schema() const { return schema_; }
  const ClassifierConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const RelationalBackbone& backbone() const { return backbone_; }

  void save(const std::string& path) const;
  static ClassifierModel load(const std::string& path);

 private:
  Schema schema_;
  ClassifierConfig config_;
  ParameterStore params_;
  Rng init_rng_;
  RelationalBackbone backbone_;
  Tensor readout_w1_, readout_b1_, readout_w2_, readout_b2_;
};

struct TrainConfig {
  int epochs = 40;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int patience = 8;
  std::uint64_t seed = 1;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;  // AUC for the classifier, loss for the generator
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  int best_epoch = -1;
  double best_val_metric = 0.0;
};

// Mean BCE over minibatches with Adam; tracks validation ROC-AUC per epoch,
// stops early on a stale patience window, and restores the best-validation
// weights before returning.
TrainLog train_classifier(ClassifierModel& model, const Dataset& data,
                          const SplitIndices& splits, const TrainConfig& config);

std::vector<double> score_graphs(const ClassifierModel& model, const Dataset& data,
                                 const std::vector<int>& indices);
double dataset_auc(const ClassifierModel& model, const Dataset& data,
                   const std::vector<int>& indices);

void write_training_log(const std::string& path, const TrainLog& log,
                        const std::string& val_column);

}  // namespace cfrecs
