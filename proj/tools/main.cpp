// cfrecs: command-line front end for the counterfactual recommendation pipeline.
//
// Subcommands cover the full workflow: synthesize a marketplace, sample a
// labeled subgraph dataset, train/evaluate the transaction classifier, train
// the generator, materialize counterfactuals, and build the evaluation report.
// Every option can come from a JSON config file (--config); explicit flags win
// over config values, which win over compiled defaults.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfrecs/classifier.hpp"
#include "cfrecs/dataset.hpp"
#include "cfrecs/error.hpp"
#include "cfrecs/generator.hpp"
#include "cfrecs/graph.hpp"
#include "cfrecs/manifest.hpp"
#include "cfrecs/metrics.hpp"
#include "cfrecs/report.hpp"
#include "cfrecs/rng.hpp"
#include "cfrecs/sampler.hpp"
#include "cfrecs/synth.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw cfrecs::ValidationError("config '" + path + "': cannot open");
  json parsed;
  try {
    in >> parsed;
  } catch (const json::parse_error& e) {
    throw cfrecs::ValidationError("config '" + path + "': " + e.what());
  }
  if (!parsed.is_object()) {
    throw cfrecs::ValidationError("config '" + path + "': top level must be an object");
  }
  return parsed;
}

json config_section(const json& config, const char* name) {
  if (!config.contains(name)) return json::object();
  const json& sec = config.at(name);
  if (!sec.is_object()) {
    throw cfrecs::ValidationError(std::string("config: section '") + name + "' must be an object");
  }
  return sec;
}

// Fills `value` from the config section unless the flag was given explicitly.
template <typename T>
void merge(const CLI::App& cmd, const std::string& flag, const json& sec, const char* key,
           T& value) {
  if (cmd.count(flag) > 0) return;
  if (!sec.contains(key)) return;
  try {
    value = sec.at(key).get<T>();
  } catch (const json::exception&) {
    throw cfrecs::ValidationError(std::string("config: field '") + key + "' has the wrong type");
  }
}

std::string format_weight(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return std::string(buf);
}

std::string coefficient_tuple(double gamma, double zeta, double beta, double eta) {
  return "(" + format_weight(gamma) + ", " + format_weight(zeta) + ", " + format_weight(beta) +
         ", " + format_weight(eta) + ")";
}

void print_split_auc(const char* label, const cfrecs::ClassifierModel& model,
                     const cfrecs::Dataset& data, const std::vector<int>& indices) {
  if (indices.empty()) {
    std::printf("%s AUC: n/a (empty split)\n", label);
    return;
  }
  double auc = cfrecs::dataset_auc(model, data, indices);
  std::printf("%s AUC: %.4f\n", label, auc);
}

void print_file(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) std::printf("%s\n", line.c_str());
}

struct SynthArgs {
  std::string config_path;
  std::string out;
  cfrecs::SynthConfig cfg;
};

void run_synth(const CLI::App& cmd, SynthArgs& a) {
  json config = load_config(a.config_path);
  json sec = config_section(config, "synth");
  merge(cmd, "--users", sec, "num_users", a.cfg.num_users);
  merge(cmd, "--listings", sec, "num_listings", a.cfg.num_listings);
  merge(cmd, "--seed", sec, "seed", a.cfg.seed);
  merge(cmd, "--segments", sec, "num_segments", a.cfg.num_segments);
  merge(cmd, "--match-probability", sec, "match_probability", a.cfg.match_probability);
  merge(cmd, "--prototype-concentration", sec, "prototype_concentration",
        a.cfg.prototype_concentration);
  merge(cmd, "--histogram-concentration", sec, "histogram_concentration",
        a.cfg.histogram_concentration);
  merge(cmd, "--histogram-support", sec, "histogram_support", a.cfg.histogram_support);
  merge(cmd, "--activity-noise", sec, "activity_noise", a.cfg.activity_noise);
  merge(cmd, "--price-sigma", sec, "price_sigma", a.cfg.price_sigma);
  merge(cmd, "--view-gain", sec, "view_gain", a.cfg.view.gain);
  merge(cmd, "--view-bias", sec, "view_bias", a.cfg.view.bias);
  merge(cmd, "--save-gain", sec, "save_gain", a.cfg.save.gain);
  merge(cmd, "--save-bias", sec, "save_bias", a.cfg.save.bias);
  merge(cmd, "--submit-gain", sec, "submit_gain", a.cfg.submit.gain);
  merge(cmd, "--submit-bias", sec, "submit_bias", a.cfg.submit.bias);
  merge(cmd, "--transaction-gain", sec, "transaction_gain", a.cfg.transaction.gain);
  merge(cmd, "--transaction-bias", sec, "transaction_bias", a.cfg.transaction.bias);

  cfrecs::Marketplace market = cfrecs::generate_marketplace(a.cfg);
  cfrecs::write_market(a.out, market);

  json resolved = {
      {"num_users", a.cfg.num_users},
      {"num_listings", a.cfg.num_listings},
      {"num_segments", a.cfg.num_segments},
      {"match_probability", a.cfg.match_probability},
      {"prototype_concentration", a.cfg.prototype_concentration},
      {"histogram_concentration", a.cfg.histogram_concentration},
      {"histogram_support", a.cfg.histogram_support},
      {"activity_noise", a.cfg.activity_noise},
      {"price_sigma", a.cfg.price_sigma},
  };
  cfrecs::write_run_manifest(a.out + ".manifest.json", "synth", resolved.dump(), a.cfg.seed, {});

  std::printf("marketplace: %d users, %d listings\n", a.cfg.num_users, a.cfg.num_listings);
  std::printf("views: %zu  saves: %zu  submits: %zu  transactions: %zu\n",
              market.edges[0].size(), market.edges[1].size(), market.edges[2].size(),
              market.transactions.size());
  std::printf("wrote %s\n", a.out.c_str());
}

struct SampleArgs {
  std::string config_path;
  std::string market;
  std::string out;
  std::string splits_out;
  cfrecs::SampleSpec spec;
  int train = -1;
  int val = -1;
  int test = -1;
};

void run_sample(const CLI::App& cmd, SampleArgs& a) {
  json config = load_config(a.config_path);
  json sec = config_section(config, "sample");
  merge(cmd, "--k", sec, "k", a.spec.k);
  merge(cmd, "--num-positive", sec, "num_positive", a.spec.num_positive);
  merge(cmd, "--num-negative", sec, "num_negative", a.spec.num_negative);
  merge(cmd, "--seed", sec, "seed", a.spec.seed);
  merge(cmd, "--max-attempts", sec, "max_attempts", a.spec.max_attempts);
  merge(cmd, "--train", sec, "train", a.train);
  merge(cmd, "--val", sec, "val", a.val);
  merge(cmd, "--test", sec, "test", a.test);

  cfrecs::Marketplace market = cfrecs::read_market(a.market);
  cfrecs::Dataset dataset = cfrecs::build_labeled_dataset(market, a.spec);
  cfrecs::write_jsonl(a.out, dataset);

  int n = static_cast<int>(dataset.graphs.size());
  if (a.train < 0 && a.val < 0 && a.test < 0) {
    // default 80/10/10, remainder into train
    a.val = n / 10;
    a.test = n / 10;
    a.train = n - a.val - a.test;
  }
  if (a.train < 0 || a.val < 0 || a.test < 0) {
    throw cfrecs::ValidationError("sample: --train/--val/--test must be given together");
  }
  cfrecs::SplitIndices splits = cfrecs::make_splits(n, a.train, a.val, a.test, a.spec.seed);
  if (a.splits_out.empty()) a.splits_out = a.out + ".splits.json";
  cfrecs::write_splits(a.splits_out, splits);

  json resolved = {
      {"k", a.spec.k},
      {"num_positive", a.spec.num_positive},
      {"num_negative", a.spec.num_negative},
      {"max_attempts", a.spec.max_attempts},
      {"train", a.train},
      {"val", a.val},
      {"test", a.test},
  };
  cfrecs::write_run_manifest(a.out + ".manifest.json", "sample", resolved.dump(), a.spec.seed,
                             {{"market", a.market}});

  std::printf("dataset: %d graphs (%d positive, %d negative)\n", n, a.spec.num_positive,
              a.spec.num_negative);
  std::printf("splits: train %zu  val %zu  test %zu\n", splits.train.size(), splits.val.size(),
              splits.test.size());
  std::printf("wrote %s and %s\n", a.out.c_str(), a.splits_out.c_str());
}

struct TrainClfArgs {
  std::string config_path;
  std::string data;
  std::string splits;
  std::string out;
  std::string log;
  cfrecs::ClassifierConfig cfg;
  cfrecs::TrainConfig train;
};

void run_train_clf(const CLI::App& cmd, TrainClfArgs& a) {
  json config = load_config(a.config_path);
  json sec = config_section(config, "classifier");
  merge(cmd, "--embedding-dim", sec, "embedding_dim", a.cfg.backbone.embedding_dim);
  merge(cmd, "--hidden-dim", sec, "hidden_dim", a.cfg.backbone.hidden_dim);
  merge(cmd, "--layers", sec, "num_layers", a.cfg.backbone.num_layers);
  merge(cmd, "--dropout", sec, "dropout", a.cfg.backbone.dropout);
  merge(cmd, "--readout-hidden", sec, "readout_hidden", a.cfg.readout_hidden);
  merge(cmd, "--epochs", sec, "epochs", a.train.epochs);
  merge(cmd, "--batch-size", sec, "batch_size", a.train.batch_size);
  merge(cmd, "--lr", sec, "learning_rate", a.train.learning_rate);
  merge(cmd, "--patience", sec, "patience", a.train.patience);
  merge(cmd, "--seed", sec, "seed", a.train.seed);

  cfrecs::Dataset data = cfrecs::read_jsonl(a.data);
  cfrecs::SplitIndices splits =
      cfrecs::read_splits(a.splits, static_cast<int>(data.graphs.size()));

  cfrecs::ClassifierModel model(data.schema, a.cfg, a.train.seed);
  cfrecs::TrainLog log = cfrecs::train_classifier(model, data, splits, a.train);
  model.save(a.out);
  if (a.log.empty()) a.log = a.out + ".log.csv";
  cfrecs::write_training_log(a.log, log, "val_auc");

  print_split_auc("Train", model, data, splits.train);
  print_split_auc("Val", model, data, splits.val);
  print_split_auc("Test", model, data, splits.test);

  json resolved = {
      {"embedding_dim", a.cfg.backbone.embedding_dim},
      {"hidden_dim", a.cfg.backbone.hidden_dim},
      {"num_layers", a.cfg.backbone.num_layers},
      {"dropout", a.cfg.backbone.dropout},
      {"readout_hidden", a.cfg.readout_hidden},
      {"epochs", a.train.epochs},
      {"batch_size", a.train.batch_size},
      {"learning_rate", a.train.learning_rate},
      {"patience", a.train.patience},
  };
  cfrecs::write_run_manifest(a.out + ".manifest.json", "train-clf", resolved.dump(), a.train.seed,
                             {{"data", a.data}, {"splits", a.splits}});
  std::printf("wrote %s\n", a.out.c_str());
}

struct EvalClfArgs {
  std::string data;
  std::string splits;
  std::string model;
};

void run_eval_clf(EvalClfArgs& a) {
  cfrecs::Dataset data = cfrecs::read_jsonl(a.data);
  cfrecs::SplitIndices splits =
      cfrecs::read_splits(a.splits, static_cast<int>(data.graphs.size()));
  cfrecs::ClassifierModel model = cfrecs::ClassifierModel::load(a.model);
  if (!cfrecs::same_schema(model.schema(), data.schema)) {
    throw cfrecs::ValidationError("eval-clf: model schema does not match dataset schema");
  }
  print_split_auc("Train", model, data, splits.train);
  print_split_auc("Val", model, data, splits.val);
  print_split_auc("Test", model, data, splits.test);
  cfrecs::write_run_manifest(a.model + ".eval.manifest.json", "eval-clf", "{}", 0,
                             {{"data", a.data}, {"splits", a.splits}, {"model", a.model}});
}

struct TrainGenArgs {
  std::string config_path;
  std::string data;
  std::string splits;
  std::string classifier;
  std::string out;
  std::string log;
  cfrecs::GeneratorConfig cfg;
  cfrecs::GeneratorTrainConfig tcfg;
  cfrecs::LossWeights weights;
  bool no_transfer_init = false;
};

void run_train_gen(const CLI::App& cmd, TrainGenArgs& a) {
  json config = load_config(a.config_path);
  json sec = config_section(config, "generator");

  cfrecs::Dataset data = cfrecs::read_jsonl(a.data);
  cfrecs::SplitIndices splits =
      cfrecs::read_splits(a.splits, static_cast<int>(data.graphs.size()));
  cfrecs::ClassifierModel clf = cfrecs::ClassifierModel::load(a.classifier);
  if (!cfrecs::same_schema(clf.schema(), data.schema)) {
    throw cfrecs::ValidationError("train-gen: classifier schema does not match dataset schema");
  }

  // The encoder shares the classifier's backbone shape so transfer init lines up.
  a.cfg.backbone = clf.config().backbone;
  merge(cmd, "--latent-dim", sec, "latent_dim", a.cfg.latent_dim);
  merge(cmd, "--edge-dim", sec, "edge_dim", a.cfg.edge_dim);
  merge(cmd, "--head-hidden", sec, "head_hidden", a.cfg.head_hidden);
  merge(cmd, "--epochs", sec, "epochs", a.tcfg.epochs);
  merge(cmd, "--batch-size", sec, "batch_size", a.tcfg.batch_size);
  merge(cmd, "--lr", sec, "learning_rate", a.tcfg.learning_rate);
  merge(cmd, "--patience", sec, "patience", a.tcfg.patience);
  merge(cmd, "--seed", sec, "seed", a.tcfg.seed);
  merge(cmd, "--alpha-views", sec, "alpha_views", a.weights.alpha[0]);
  merge(cmd, "--alpha-saves", sec, "alpha_saves", a.weights.alpha[1]);
  merge(cmd, "--alpha-submits", sec, "alpha_submits", a.weights.alpha[2]);
  merge(cmd, "--gamma", sec, "gamma", a.weights.gamma);
  merge(cmd, "--zeta", sec, "zeta", a.weights.zeta);
  merge(cmd, "--beta", sec, "beta", a.weights.beta);
  merge(cmd, "--eta", sec, "eta", a.weights.eta);
  merge(cmd, "--lambda", sec, "lambda", a.weights.lambda);
  merge(cmd, "--no-transfer-init", sec, "no_transfer_init", a.no_transfer_init);

  cfrecs::GeneratorModel model(data.schema, a.cfg, a.tcfg.seed);
  if (!a.no_transfer_init) model.init_from_classifier(clf);
  cfrecs::TrainLog log = cfrecs::train_generator(model, data, splits, clf, a.weights, a.tcfg);
  model.save(a.out);
  if (a.log.empty()) a.log = a.out + ".log.csv";
  cfrecs::write_training_log(a.log, log, "val_loss");

  json resolved = {
      {"latent_dim", a.cfg.latent_dim},
      {"edge_dim", a.cfg.edge_dim},
      {"head_hidden", a.cfg.head_hidden},
      {"epochs", a.tcfg.epochs},
      {"batch_size", a.tcfg.batch_size},
      {"learning_rate", a.tcfg.learning_rate},
      {"patience", a.tcfg.patience},
      {"alpha", {a.weights.alpha[0], a.weights.alpha[1], a.weights.alpha[2]}},
      {"gamma", a.weights.gamma},
      {"zeta", a.weights.zeta},
      {"beta", a.weights.beta},
      {"eta", a.weights.eta},
      {"lambda", a.weights.lambda},
      {"transfer_init", !a.no_transfer_init},
  };
  cfrecs::write_run_manifest(
      a.out + ".manifest.json", "train-gen", resolved.dump(), a.tcfg.seed,
      {{"data", a.data}, {"splits", a.splits}, {"classifier", a.classifier}});
  std::printf("wrote %s\n", a.out.c_str());
}

struct GenerateArgs {
  std::string config_path;
  std::string data;
  std::string splits;
  std::string classifier;
  std::string generator;
  std::string out_dir;
  std::string mode = "views-only";
  cfrecs::Thresholds thresholds;
  int best_of = 1;
  std::uint64_t seed = 1;
};

void run_generate(const CLI::App& cmd, GenerateArgs& a) {
  json config = load_config(a.config_path);
  json sec = config_section(config, "generate");
  merge(cmd, "--mode", sec, "mode", a.mode);
  merge(cmd, "--tau-add", sec, "tau_add", a.thresholds.tau_add);
  merge(cmd, "--tau-rem", sec, "tau_rem", a.thresholds.tau_rem);
  merge(cmd, "--best-of", sec, "best_of", a.best_of);
  merge(cmd, "--seed", sec, "seed", a.seed);

  cfrecs::PerturbMode mode;
  if (a.mode == "views-only") {
    mode = cfrecs::PerturbMode::kViewsOnly;
  } else if (a.mode == "unconstrained") {
    mode = cfrecs::PerturbMode::kUnconstrained;
  } else {
    throw cfrecs::ValidationError("generate: --mode must be views-only or unconstrained");
  }

  cfrecs::Dataset data = cfrecs::read_jsonl(a.data);
  cfrecs::SplitIndices splits =
      cfrecs::read_splits(a.splits, static_cast<int>(data.graphs.size()));
  if (splits.test.empty()) {
    throw cfrecs::ValidationError("generate: test split is empty");
  }
  cfrecs::ClassifierModel clf = cfrecs::ClassifierModel::load(a.classifier);
  cfrecs::GeneratorModel gen = cfrecs::GeneratorModel::load(a.generator);
  if (!cfrecs::same_schema(clf.schema(), data.schema) ||
      !cfrecs::same_schema(gen.schema(), data.schema)) {
    throw cfrecs::ValidationError("generate: model schema does not match dataset schema");
  }

  std::filesystem::create_directories(a.out_dir);
  cfrecs::Rng base(a.seed);
  std::vector<cfrecs::CounterfactualRecord> cf_records;
  std::vector<cfrecs::CounterfactualRecord> rand_records;
  cf_records.reserve(splits.test.size());
  rand_records.reserve(splits.test.size());
  double lift_sum = 0.0;
  for (std::size_t i = 0; i < splits.test.size(); ++i) {
    const cfrecs::Graph& g = data.graphs[splits.test[i]];
    cfrecs::Rng cf_rng = base.split(2 * static_cast<std::uint64_t>(i));
    cfrecs::Rng rand_rng = base.split(2 * static_cast<std::uint64_t>(i) + 1);
    cfrecs::CounterfactualResult cf =
        cfrecs::materialize(g, gen, clf, a.thresholds, mode, cf_rng, nullptr, a.best_of);
    std::array<int, cfrecs::kNumEdgeTypes> added{};
    std::array<int, cfrecs::kNumEdgeTypes> removed{};
    for (int t = 0; t < cfrecs::kNumEdgeTypes; ++t) {
      added[t] = static_cast<int>(cf.added[t].size());
      removed[t] = static_cast<int>(cf.removed[t].size());
    }
    cfrecs::CounterfactualResult rb = cfrecs::random_baseline(g, clf, added, removed, rand_rng);
    lift_sum += cf.relative_lift;
    cf_records.push_back(cfrecs::make_record(cf, data.schema));
    rand_records.push_back(cfrecs::make_record(rb, data.schema));
  }

  std::string cf_path = a.out_dir + "/cf_records.jsonl";
  std::string rand_path = a.out_dir + "/random_records.jsonl";
  cfrecs::write_records(cf_path, cf_records);
  cfrecs::write_records(rand_path, rand_records);

  json resolved = {
      {"mode", a.mode},
      {"tau_add", a.thresholds.tau_add},
      {"tau_rem", a.thresholds.tau_rem},
      {"best_of", a.best_of},
  };
  cfrecs::write_run_manifest(a.out_dir + "/generate.manifest.json", "generate", resolved.dump(),
                             a.seed,
                             {{"data", a.data},
                              {"splits", a.splits},
                              {"classifier", a.classifier},
                              {"generator", a.generator}});

  std::printf("counterfactuals: %zu graphs, mean lift %.4f\n", cf_records.size(),
              lift_sum / static_cast<double>(cf_records.size()));
  std::printf("wrote %s and %s\n", cf_path.c_str(), rand_path.c_str());
}

struct ReportArgs {
  std::string config_path;
  std::string cf;
  std::string random_path;
  std::string out_dir;
  std::string coefficients;
};

void run_report(const CLI::App& cmd, ReportArgs& a) {
  json config = load_config(a.config_path);
  json sec = config_section(config, "report");
  merge(cmd, "--coefficients", sec, "coefficients", a.coefficients);
  if (a.coefficients.empty()) {
    json gsec = config_section(config, "generator");
    cfrecs::LossWeights w;
    if (gsec.contains("gamma")) w.gamma = gsec.at("gamma").get<double>();
    if (gsec.contains("zeta")) w.zeta = gsec.at("zeta").get<double>();
    if (gsec.contains("beta")) w.beta = gsec.at("beta").get<double>();
    if (gsec.contains("eta")) w.eta = gsec.at("eta").get<double>();
    a.coefficients = coefficient_tuple(w.gamma, w.zeta, w.beta, w.eta);
  }

  std::vector<cfrecs::CounterfactualRecord> cf_records = cfrecs::read_records(a.cf);
  std::vector<cfrecs::CounterfactualRecord> rand_records = cfrecs::read_records(a.random_path);
  cfrecs::StudyReport report = cfrecs::evaluate(cf_records, rand_records, a.coefficients);
  cfrecs::emit_report(report, a.out_dir);

  json resolved = {{"coefficients", a.coefficients}};
  cfrecs::write_run_manifest(a.out_dir + "/report.manifest.json", "report", resolved.dump(), 0,
                             {{"cf", a.cf}, {"random", a.random_path}});

  print_file(a.out_dir + "/summary.csv");
  std::printf("wrote report to %s\n", a.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual recommendations over marketplace interaction graphs"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic marketplace");
  synth_cmd->add_option("--config", synth.config_path, "JSON config file");
  synth_cmd->add_option("--out", synth.out, "output marketplace path")->required();
  synth_cmd->add_option("--seed", synth.cfg.seed, "random seed");
  synth_cmd->add_option("--users", synth.cfg.num_users, "number of users");
  synth_cmd->add_option("--listings", synth.cfg.num_listings, "number of listings");
  synth_cmd->add_option("--segments", synth.cfg.num_segments, "number of taste segments");
  synth_cmd->add_option("--match-probability", synth.cfg.match_probability,
                        "probability a listing attribute matches its segment");
  synth_cmd->add_option("--prototype-concentration", synth.cfg.prototype_concentration,
                        "Dirichlet mass on the segment value");
  synth_cmd->add_option("--histogram-concentration", synth.cfg.histogram_concentration,
                        "Dirichlet mass off the segment value");
  synth_cmd->add_option("--histogram-support", synth.cfg.histogram_support,
                        "off-segment values with mass per attribute");
  synth_cmd->add_option("--activity-noise", synth.cfg.activity_noise, "activity noise scale");
  synth_cmd->add_option("--price-sigma", synth.cfg.price_sigma, "log-price noise scale");
  synth_cmd->add_option("--view-gain", synth.cfg.view.gain, "view funnel gain");
  synth_cmd->add_option("--view-bias", synth.cfg.view.bias, "view funnel bias");
  synth_cmd->add_option("--save-gain", synth.cfg.save.gain, "save funnel gain");
  synth_cmd->add_option("--save-bias", synth.cfg.save.bias, "save funnel bias");
  synth_cmd->add_option("--submit-gain", synth.cfg.submit.gain, "submit funnel gain");
  synth_cmd->add_option("--submit-bias", synth.cfg.submit.bias, "submit funnel bias");
  synth_cmd->add_option("--transaction-gain", synth.cfg.transaction.gain,
                        "transaction funnel gain");
  synth_cmd->add_option("--transaction-bias", synth.cfg.transaction.bias,
                        "transaction funnel bias");
  synth_cmd->callback([&] { run_synth(*synth_cmd, synth); });

  SampleArgs sample;
  CLI::App* sample_cmd =
      app.add_subcommand("sample", "build a labeled subgraph dataset from a marketplace");
  sample_cmd->add_option("--config", sample.config_path, "JSON config file");
  sample_cmd->add_option("--market", sample.market, "marketplace path")->required();
  sample_cmd->add_option("--out", sample.out, "output dataset path")->required();
  sample_cmd->add_option("--splits-out", sample.splits_out, "output splits path");
  sample_cmd->add_option("--k", sample.spec.k, "walk length");
  sample_cmd->add_option("--num-positive", sample.spec.num_positive, "positive examples");
  sample_cmd->add_option("--num-negative", sample.spec.num_negative, "negative examples");
  sample_cmd->add_option("--max-attempts", sample.spec.max_attempts,
                         "resampling budget per negative");
  sample_cmd->add_option("--seed", sample.spec.seed, "random seed");
  sample_cmd->add_option("--train", sample.train, "train split size");
  sample_cmd->add_option("--val", sample.val, "val split size");
  sample_cmd->add_option("--test", sample.test, "test split size");
  sample_cmd->callback([&] { run_sample(*sample_cmd, sample); });

  TrainClfArgs train_clf;
  CLI::App* train_clf_cmd = app.add_subcommand("train-clf", "train the transaction classifier");
  train_clf_cmd->add_option("--config", train_clf.config_path, "JSON config file");
  train_clf_cmd->add_option("--data", train_clf.data, "dataset path")->required();
  train_clf_cmd->add_option("--splits", train_clf.splits, "splits path")->required();
  train_clf_cmd->add_option("--out", train_clf.out, "checkpoint output path")->required();
  train_clf_cmd->add_option("--log", train_clf.log, "training log CSV path");
  train_clf_cmd->add_option("--embedding-dim", train_clf.cfg.backbone.embedding_dim,
                            "attribute embedding width");
  train_clf_cmd->add_option("--hidden-dim", train_clf.cfg.backbone.hidden_dim,
                            "node state width");
  train_clf_cmd->add_option("--layers", train_clf.cfg.backbone.num_layers, "relational layers");
  train_clf_cmd->add_option("--dropout", train_clf.cfg.backbone.dropout, "dropout rate");
  train_clf_cmd->add_option("--readout-hidden", train_clf.cfg.readout_hidden,
                            "readout hidden width");
  train_clf_cmd->add_option("--epochs", train_clf.train.epochs, "max epochs");
  train_clf_cmd->add_option("--batch-size", train_clf.train.batch_size, "batch size");
  train_clf_cmd->add_option("--lr", train_clf.train.learning_rate, "learning rate");
  train_clf_cmd->add_option("--patience", train_clf.train.patience, "early stopping patience");
  train_clf_cmd->add_option("--seed", train_clf.train.seed, "random seed");
  train_clf_cmd->callback([&] { run_train_clf(*train_clf_cmd, train_clf); });

  EvalClfArgs eval_clf;
  CLI::App* eval_clf_cmd = app.add_subcommand("eval-clf", "evaluate a trained classifier");
  eval_clf_cmd->add_option("--data", eval_clf.data, "dataset path")->required();
  eval_clf_cmd->add_option("--splits", eval_clf.splits, "splits path")->required();
  eval_clf_cmd->add_option("--model", eval_clf.model, "classifier checkpoint")->required();
  eval_clf_cmd->callback([&] { run_eval_clf(eval_clf); });

  TrainGenArgs train_gen;
  CLI::App* train_gen_cmd =
      app.add_subcommand("train-gen", "train the counterfactual generator");
  train_gen_cmd->add_option("--config", train_gen.config_path, "JSON config file");
  train_gen_cmd->add_option("--data", train_gen.data, "dataset path")->required();
  train_gen_cmd->add_option("--splits", train_gen.splits, "splits path")->required();
  train_gen_cmd->add_option("--classifier", train_gen.classifier, "classifier checkpoint")
      ->required();
  train_gen_cmd->add_option("--out", train_gen.out, "checkpoint output path")->required();
  train_gen_cmd->add_option("--log", train_gen.log, "training log CSV path");
  train_gen_cmd->add_option("--latent-dim", train_gen.cfg.latent_dim, "latent width");
  train_gen_cmd->add_option("--edge-dim", train_gen.cfg.edge_dim, "edge embedding width");
  train_gen_cmd->add_option("--head-hidden", train_gen.cfg.head_hidden, "head hidden width");
  train_gen_cmd->add_option("--epochs", train_gen.tcfg.epochs, "max epochs");
  train_gen_cmd->add_option("--batch-size", train_gen.tcfg.batch_size, "batch size");
  train_gen_cmd->add_option("--lr", train_gen.tcfg.learning_rate, "learning rate");
  train_gen_cmd->add_option("--patience", train_gen.tcfg.patience, "early stopping patience");
  train_gen_cmd->add_option("--seed", train_gen.tcfg.seed, "random seed");
  train_gen_cmd->add_option("--alpha-views", train_gen.weights.alpha[0],
                            "view reconstruction weight");
  train_gen_cmd->add_option("--alpha-saves", train_gen.weights.alpha[1],
                            "save reconstruction weight");
  train_gen_cmd->add_option("--alpha-submits", train_gen.weights.alpha[2],
                            "submit reconstruction weight");
  train_gen_cmd->add_option("--gamma", train_gen.weights.gamma, "hinge margin");
  train_gen_cmd->add_option("--zeta", train_gen.weights.zeta, "interaction loss weight");
  train_gen_cmd->add_option("--beta", train_gen.weights.beta, "feature loss weight");
  train_gen_cmd->add_option("--eta", train_gen.weights.eta, "counterfactual loss weight");
  train_gen_cmd->add_option("--lambda", train_gen.weights.lambda, "KL weight");
  train_gen_cmd->add_flag("--no-transfer-init", train_gen.no_transfer_init,
                          "skip initializing the encoder from the classifier");
  train_gen_cmd->callback([&] { run_train_gen(*train_gen_cmd, train_gen); });

  GenerateArgs gen;
  CLI::App* gen_cmd =
      app.add_subcommand("generate", "materialize counterfactuals for the test split");
  gen_cmd->add_option("--config", gen.config_path, "JSON config file");
  gen_cmd->add_option("--data", gen.data, "dataset path")->required();
  gen_cmd->add_option("--splits", gen.splits, "splits path")->required();
  gen_cmd->add_option("--classifier", gen.classifier, "classifier checkpoint")->required();
  gen_cmd->add_option("--generator", gen.generator, "generator checkpoint")->required();
  gen_cmd->add_option("--out-dir", gen.out_dir, "output directory")->required();
  gen_cmd->add_option("--mode", gen.mode, "edit mode: views-only or unconstrained");
  gen_cmd->add_option("--tau-add", gen.thresholds.tau_add, "edge addition threshold");
  gen_cmd->add_option("--tau-rem", gen.thresholds.tau_rem, "edge removal threshold");
  gen_cmd->add_option("--best-of", gen.best_of, "latent draws per graph");
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->callback([&] { run_generate(*gen_cmd, gen); });

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "aggregate counterfactual records");
  report_cmd->add_option("--config", report.config_path, "JSON config file");
  report_cmd->add_option("--cf", report.cf, "counterfactual records path")->required();
  report_cmd->add_option("--random", report.random_path, "random baseline records path")
      ->required();
  report_cmd->add_option("--out-dir", report.out_dir, "output directory")->required();
  report_cmd->add_option("--coefficients", report.coefficients,
                         "coefficient tuple label for the summary row");
  report_cmd->callback([&] { run_report(*report_cmd, report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // contract: any usage problem exits 1 (help exits 0)
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const cfrecs::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const cfrecs::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
