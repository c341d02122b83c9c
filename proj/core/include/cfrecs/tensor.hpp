#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "cfrecs/matrix.hpp"
#include "cfrecs/rng.hpp"

namespace cfrecs {

namespace detail {
struct TensorNode;
}

// Handle to a node in a dynamically built computation DAG. Forward values are
// computed eagerly; backward() walks the DAG in reverse topological order and
// accumulates adjoints into every node that requires gradients. Gradients
// accumulate across backward calls until explicitly zeroed.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor variable(Matrix value);  // trainable leaf

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const;
  Matrix& mutable_value();  // leaf tensors only (optimizer updates)
  const Matrix& grad() const;
  bool requires_grad() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }

  // scalar convenience for 1x1 tensors
  double item() const;

  void zero_grad();
  // Backward from a 1x1 tensor; `seed` is the adjoint of the output, so a
  // batch-mean can be formed by seeding each element's loss with 1/batch.
  void backward(double seed = 1.0) const;

  std::shared_ptr<detail::TensorNode> node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;

  friend Tensor make_op(Matrix value, std::vector<Tensor> parents,
                        std::function<void(detail::TensorNode&)> backward);
};

namespace detail {
struct TensorNode {
  Matrix value;
  Matrix grad;  // allocated on first use, same shape as value
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward;

  Matrix& ensure_grad();
};
}  // namespace detail

// --- primitive ops (each with an exact adjoint) ---

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor add_row(const Tensor& a, const Tensor& row);  // broadcast 1xN row over MxN
Tensor add_scalar(const Tensor& a, double c);
Tensor scale(const Tensor& a, double s);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& a, int begin, int count);
Tensor slice_cols(const Tensor& a, int begin, int count);
Tensor row_select(const Tensor& a, std::vector<int> rows);  // embedding lookup
Tensor transpose(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
Tensor reduce_mean_rows(const Tensor& a);  // MxN -> 1xN column means (global pooling)
Tensor row_sum(const Tensor& a);           // MxN -> Mx1
Tensor reduce_sum_all(const Tensor& a);    // -> 1x1
Tensor reduce_mean_all(const Tensor& a);   // -> 1x1
// out[p] = <a[row first], b[row second]> for each pair; a and b may alias.
Tensor row_pair_dot(const Tensor& a, const Tensor& b,
                    const std::vector<std::pair<int, int>>& pairs);
Tensor softmax_rows(const Tensor& a);

// Elementwise binary cross entropy against a constant-valued target in {0,1};
// predictions are clamped to [kBceEpsilon, 1-kBceEpsilon] so the value and
// gradient stay finite at the boundaries.
inline constexpr double kBceEpsilon = 1e-7;
Tensor bce(const Tensor& prediction, const Tensor& target);

// Total divergence of per-row diagonal Gaussians N(mu, sigma^2) from N(0, I),
// summed over every entry: 1/2 * sum(mu^2 + sigma^2 - 1 - log sigma^2), with
// sigma^2 = exp(log_var).
Tensor kl_diag_gaussian(const Tensor& mu, const Tensor& log_var);

// mu + sigma .* eps with eps ~ N(0, I) drawn from rng. Gradient w.r.t. mu is
// the upstream adjoint; w.r.t. sigma it is the adjoint times the drawn eps.
Tensor reparameterize(const Tensor& mu, const Tensor& sigma, Rng& rng);

// Inverted-scaling dropout: identity when !training or rate == 0.
Tensor dropout(const Tensor& a, double rate, Rng& rng, bool training);

}  // namespace cfrecs
