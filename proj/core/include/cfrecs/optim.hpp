#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfrecs/matrix.hpp"
#include "cfrecs/rng.hpp"
#include "cfrecs/tensor.hpp"

namespace cfrecs {

Matrix glorot_uniform(int rows, int cols, Rng& rng);

// Named collection of trainable leaf tensors. Iteration order is always
// sorted by name so optimizer state and checkpoints line up across runs.
class ParameterStore {
 public:
  Tensor create(const std::string& name, int rows, int cols);
  Tensor create(const std::string& name, Matrix init);
  Tensor get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  std::vector<Tensor> tensors() const;
  std::size_t size() const { return params_.size(); }

  void zero_grad();
  void set_trainable(bool trainable);

  std::map<std::string, Matrix> snapshot() const;
  void restore(const std::map<std::string, Matrix>& snap);

  // Binary checkpoint with a caller-supplied metadata string (JSON by
  // convention). load() requires the file's tensor set to match exactly
  // and returns the stored metadata; peek_meta() reads it without a store.
  void save(const std::string& path, const std::string& meta) const;
  std::string load(const std::string& path);
  static std::string peek_meta(const std::string& path);

 private:
  std::map<std::string, Tensor> params_;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(ParameterStore& params, double learning_rate = 1e-3,
                         double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step();
  void zero_grad() { params_->zero_grad(); }
  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }

 private:
  ParameterStore* params_;
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long long step_count_ = 0;
  std::map<std::string, Matrix> m_;
  std::map<std::string, Matrix> v_;
};

}  // namespace cfrecs
