#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cfrecs/classifier.hpp"

namespace cfrecs {

struct GeneratorConfig {
  BackboneConfig backbone;
  int latent_dim = 32;   // per-node Gaussian width
  int edge_dim = 16;     // width of the per-type edge transforms
  int head_hidden = 32;  // hidden width of the head MLPs
};

struct LossWeights {
  std::array<double, kNumEdgeTypes> alpha{1.0, 2.0, 4.0};  // view, save, submit
  double gamma = 0.2;   // counterfactual margin
  double zeta = 1.0;    // edge reconstruction
  double beta = 1.0;    // feature reconstruction
  double eta = 1.0;     // counterfactual hinge
  double lambda = 1.0;  // KL
};

struct Thresholds {
  double tau_add = 0.9;  // in (0, 1]
  double tau_rem = 0.1;  // in [0, 1), at most tau_add
};

enum class PerturbMode { kUnconstrained, kViewsOnly };

struct Encoding {
  Tensor mu;       // n x d_z
  Tensor log_var;  // n x d_z
  Tensor sigma;
};

struct Decoded {
  std::array<Tensor, kNumEdgeTypes> edge_probabilities;  // n_u x n_l each
  Tensor user_preferences;  // n_u x total_vocab, valid histogram per attribute block
  Tensor listing_price;     // n_l x 1, normalized
};

struct LossBreakdown {
  double edge = 0.0;  // raw term values, before their weights
  double feature = 0.0;
  double counterfactual = 0.0;
  double kl = 0.0;
  double total = 0.0;  // weighted sum
};

struct GeneratorLoss {
  Tensor total;
  LossBreakdown breakdown;
};

struct CounterfactualResult {
  Graph original;
  Graph counterfactual;
  std::array<std::vector<Edge>, kNumEdgeTypes> added;
  std::array<std::vector<Edge>, kNumEdgeTypes> removed;
  double original_score = 0.0;
  double counterfactual_score = 0.0;
  double relative_lift = 0.0;
};

// Optional per-type addition masks (e.g. price-range restrictions); an
// empty matrix leaves every pair feasible.
struct FeasibilityMask {
  std::array<Matrix, kNumEdgeTypes> allow_add;
};

// Variational generator: the classifier-shaped encoder backbone feeds
// per-node mu / log-variance heads; the decoder scores bipartite pairs by
// inner products of per-type transforms and rebuilds mutable features.
class GeneratorModel {
 public:
  static constexpr const char* kEncoderPrefix = "encoder.";

  GeneratorModel(const Schema& schema, const GeneratorConfig& config, std::uint64_t init_seed);

  Encoding encode(const BackboneInputs& inputs) const;
  Decoded decode(const Tensor& z, int num_users, int num_listings) const;

  void init_from_classifier(const ClassifierModel& classifier);

  const Schema& schema() const { return schema_; }
  const GeneratorConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const RelationalBackbone& encoder_backbone() const { return encoder_; }

  void save(const std::string& path) const;
  static GeneratorModel load(const std::string& path);

 private:
  Tensor head(const Tensor& in, const std::array<Tensor, 4>& weights) const;

  Schema schema_;
  GeneratorConfig config_;
  ParameterStore params_;
  Rng init_rng_;
  RelationalBackbone encoder_;
  std::array<Tensor, 4> mu_head_, log_var_head_;                // w1, b1, w2, b2
  std::array<std::array<Tensor, 4>, kNumEdgeTypes> edge_heads_;
  std::array<Tensor, 4> preference_head_, price_head_;
};

// Weighted sum of edge reconstruction, feature reconstruction, the
// counterfactual hinge on the relaxed (probability-weighted) graph, and the
// per-node-averaged KL. The hinge is identically zero for transactional
// graphs. Precondition: the classifier's parameters are frozen.
GeneratorLoss generator_loss(const Graph& graph, const BackboneInputs& inputs,
                             const GeneratorModel& model, const ClassifierModel& classifier,
                             const LossWeights& weights, Rng& rng);

// Samples one latent draw (best_of > 1 keeps the highest-scoring of several)
// and thresholds decoded edge probabilities into a discrete counterfactual.
// views_only mode copies saves, submits, and every feature verbatim;
// unconstrained mode also swaps in decoded user preferences and prices.
CounterfactualResult materialize(const Graph& graph, const GeneratorModel& model,
                                 const ClassifierModel& classifier, const Thresholds& thresholds,
                                 PerturbMode mode, Rng& rng,
                                 const FeasibilityMask* mask = nullptr, int best_of = 1);

// Matched-budget control: uniformly adds absent pairs and removes present
// edges per type (clamped to feasibility), features untouched.
CounterfactualResult random_baseline(const Graph& graph, const ClassifierModel& classifier,
                                     const std::array<int, kNumEdgeTypes>& num_add,
                                     const std::array<int, kNumEdgeTypes>& num_rem, Rng& rng);

struct GeneratorTrainConfig {
  int epochs = 30;
  int batch_size = 16;
  double learning_rate = 1e-3;
  int patience = 6;
  std::uint64_t seed = 1;
};

// Freezes the classifier, minimizes the generator loss with Adam, tracks a
// fixed-noise validation loss per epoch, and restores the best checkpoint.
TrainLog train_generator(GeneratorModel& model, const Dataset& data, const SplitIndices& splits,
                         ClassifierModel& classifier, const LossWeights& weights,
                         const GeneratorTrainConfig& config);

}  // namespace cfrecs
