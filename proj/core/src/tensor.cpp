#include "cfrecs/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "cfrecs/error.hpp"

namespace cfrecs {

namespace detail {
Matrix& TensorNode::ensure_grad() {
  if (grad.rows() != value.rows() || grad.cols() != value.cols())
    grad = Matrix(value.rows(), value.cols());
  return grad;
}
}  // namespace detail

using detail::TensorNode;

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(value);
  node->requires_grad = false;
  return Tensor(std::move(node));
}

Tensor Tensor::variable(Matrix value) {
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Tensor(std::move(node));
}

const Matrix& Tensor::value() const {
  if (!node_) throw std::logic_error("Tensor: undefined");
  return node_->value;
}

Matrix& Tensor::mutable_value() {
  if (!node_) throw std::logic_error("Tensor: undefined");
  return node_->value;
}

const Matrix& Tensor::grad() const {
  if (!node_) throw std::logic_error("Tensor: undefined");
  return node_->ensure_grad();
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1)
    throw std::invalid_argument("Tensor::item: expected 1x1, got " + shape_string(v));
  return v(0, 0);
}

void Tensor::zero_grad() {
  if (node_ && node_->grad.rows() > 0) node_->grad.fill(0.0);
}

void Tensor::backward(double seed) const {
  if (!node_) throw std::logic_error("Tensor: undefined");
  const Matrix& v = node_->value;
  if (v.rows() != 1 || v.cols() != 1)
    throw std::invalid_argument("backward: root must be 1x1, got " + shape_string(v));
  if (!node_->requires_grad) return;

  // reverse post-order = every node is visited before its parents, so all
  // adjoint contributions to a node land before its own rule runs
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  struct Frame {
    TensorNode* node;
    std::size_t next;
  };
  std::vector<Frame> stack;
  stack.push_back({node_.get(), 0});
  visited.insert(node_.get());
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next < top.node->parents.size()) {
      TensorNode* parent = top.node->parents[top.next++].get();
      if (visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(top.node);
      stack.pop_back();
    }
  }

  // interior adjoints are per-pass scratch; only leaves accumulate across calls
  for (TensorNode* node : order) {
    if (node->backward && node->grad.rows() > 0) node->grad.fill(0.0);
  }

  node_->ensure_grad()(0, 0) += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

Tensor make_op(Matrix value, std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backward) {
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(value);
  bool needs = false;
  for (const Tensor& p : parents) needs = needs || p.requires_grad();
  node->requires_grad = needs;
  if (needs) {
    node->parents.reserve(parents.size());
    for (const Tensor& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

namespace {

void check_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a) +
                                " vs " + shape_string(b));
}

void accumulate(Matrix& dst, const Matrix& src) {
  for (int i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  Matrix out = matmul(a.value(), b.value());
  auto pa = a.node();
  auto pb = b.node();
  const bool need_a = a.requires_grad();
  const bool need_b = b.requires_grad();
  return make_op(std::move(out), {a, b}, [pa, pb, need_a, need_b](TensorNode& self) {
    if (need_a) accumulate(pa->ensure_grad(), matmul(self.grad, transposed(pb->value)));
    if (need_b) accumulate(pb->ensure_grad(), matmul(transposed(pa->value), self.grad));
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a.value(), b.value());
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  auto pa = a.node();
  auto pb = b.node();
  const bool need_a = a.requires_grad();
  const bool need_b = b.requires_grad();
  return make_op(std::move(out), {a, b}, [pa, pb, need_a, need_b](TensorNode& self) {
    if (need_a) accumulate(pa->ensure_grad(), self.grad);
    if (need_b) accumulate(pb->ensure_grad(), self.grad);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a.value(), b.value());
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  auto pa = a.node();
  auto pb = b.node();
  const bool need_a = a.requires_grad();
  const bool need_b = b.requires_grad();
  return make_op(std::move(out), {a, b}, [pa, pb, need_a, need_b](TensorNode& self) {
    if (need_a) accumulate(pa->ensure_grad(), self.grad);
    if (need_b) {
      Matrix& g = pb->ensure_grad();
      for (int i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols())
    throw std::invalid_argument("add_row: cannot broadcast " + shape_string(rv) + " over " +
                                shape_string(av));
  Matrix out = av;
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) += rv(0, j);
  auto pa = a.node();
  auto pr = row.node();
  const bool need_a = a.requires_grad();
  const bool need_r = row.requires_grad();
  return make_op(std::move(out), {a, row}, [pa, pr, need_a, need_r](TensorNode& self) {
    if (need_a) accumulate(pa->ensure_grad(), self.grad);
    if (need_r) {
      Matrix& g = pr->ensure_grad();
      for (int i = 0; i < self.grad.rows(); ++i)
        for (int j = 0; j < self.grad.cols(); ++j) g(0, j) += self.grad(i, j);
    }
  });
}

Tensor add_scalar(const Tensor& a, double c) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] += c;
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (need) accumulate(pa->ensure_grad(), self.grad);
  });
}

Tensor scale(const Tensor& a, double s) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] *= s;
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, s, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a.value(), b.value());
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  auto pa = a.node();
  auto pb = b.node();
  const bool need_a = a.requires_grad();
  const bool need_b = b.requires_grad();
  return make_op(std::move(out), {a, b}, [pa, pb, need_a, need_b](TensorNode& self) {
    if (need_a) {
      Matrix& g = pa->ensure_grad();
      for (int i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb->value[i];
    }
    if (need_b) {
      Matrix& g = pb->ensure_grad();
      for (int i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa->value[i];
    }
  });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const int cols = parts.front().cols();
  int rows = 0;
  for (const Tensor& p : parts) {
    if (p.cols() != cols)
      throw std::invalid_argument("concat_rows: shape mismatch " + shape_string(p.value()) +
                                  " vs " + shape_string(parts.front().value()));
    rows += p.rows();
  }
  Matrix out(rows, cols);
  int r = 0;
  for (const Tensor& p : parts) {
    const Matrix& v = p.value();
    for (int i = 0; i < v.rows(); ++i)
      for (int j = 0; j < cols; ++j) out(r + i, j) = v(i, j);
    r += v.rows();
  }
  std::vector<std::shared_ptr<TensorNode>> nodes;
  std::vector<bool> needs;
  for (const Tensor& p : parts) {
    nodes.push_back(p.node());
    needs.push_back(p.requires_grad());
  }
  return make_op(std::move(out), parts, [nodes, needs](TensorNode& self) {
    int r = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const int nr = nodes[k]->value.rows();
      if (needs[k]) {
        Matrix& g = nodes[k]->ensure_grad();
        for (int i = 0; i < nr; ++i)
          for (int j = 0; j < g.cols(); ++j) g(i, j) += self.grad(r + i, j);
      }
      r += nr;
    }
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const int rows = parts.front().rows();
  int cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows)
      throw std::invalid_argument("concat_cols: shape mismatch " + shape_string(p.value()) +
                                  " vs " + shape_string(parts.front().value()));
    cols += p.cols();
  }
  Matrix out(rows, cols);
  int c = 0;
  for (const Tensor& p : parts) {
    const Matrix& v = p.value();
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < v.cols(); ++j) out(i, c + j) = v(i, j);
    c += v.cols();
  }
  std::vector<std::shared_ptr<TensorNode>> nodes;
  std::vector<bool> needs;
  for (const Tensor& p : parts) {
    nodes.push_back(p.node());
    needs.push_back(p.requires_grad());
  }
  return make_op(std::move(out), parts, [nodes, needs](TensorNode& self) {
    int c = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const int nc = nodes[k]->value.cols();
      if (needs[k]) {
        Matrix& g = nodes[k]->ensure_grad();
        for (int i = 0; i < g.rows(); ++i)
          for (int j = 0; j < nc; ++j) g(i, j) += self.grad(i, c + j);
      }
      c += nc;
    }
  });
}

Tensor slice_rows(const Tensor& a, int begin, int count) {
  const Matrix& v = a.value();
  if (begin < 0 || count < 0 || begin + count > v.rows())
    throw std::invalid_argument("slice_rows: range [" + std::to_string(begin) + ", " +
                                std::to_string(begin + count) + ") out of " + shape_string(v));
  Matrix out(count, v.cols());
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < v.cols(); ++j) out(i, j) = v(begin + i, j);
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, begin, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < self.grad.rows(); ++i)
      for (int j = 0; j < self.grad.cols(); ++j) g(begin + i, j) += self.grad(i, j);
  });
}

Tensor slice_cols(const Tensor& a, int begin, int count) {
  const Matrix& v = a.value();
  if (begin < 0 || count < 0 || begin + count > v.cols())
    throw std::invalid_argument("slice_cols: range [" + std::to_string(begin) + ", " +
                                std::to_string(begin + count) + ") out of " + shape_string(v));
  Matrix out(v.rows(), count);
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < count; ++j) out(i, j) = v(i, begin + j);
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, begin, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < self.grad.rows(); ++i)
      for (int j = 0; j < self.grad.cols(); ++j) g(i, begin + j) += self.grad(i, j);
  });
}

Tensor row_select(const Tensor& a, std::vector<int> rows) {
  const Matrix& v = a.value();
  Matrix out(static_cast<int>(rows.size()), v.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= v.rows())
      throw std::invalid_argument("row_select: row " + std::to_string(rows[i]) + " out of " +
                                  shape_string(v));
    for (int j = 0; j < v.cols(); ++j) out(static_cast<int>(i), j) = v(rows[i], j);
  }
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, rows = std::move(rows), need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < self.grad.cols(); ++j)
        g(rows[i], j) += self.grad(static_cast<int>(i), j);
  });
}

Tensor transpose(const Tensor& a) {
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(transposed(a.value()), {a}, [pa, need](TensorNode& self) {
    if (need) accumulate(pa->ensure_grad(), transposed(self.grad));
  });
}

Tensor relu(const Tensor& a) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.size(); ++i)
      if (pa->value[i] > 0.0) g[i] += self.grad[i];
  });
}

Tensor sigmoid(const Tensor& a) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.size(); ++i) {
      const double s = self.value[i];
      g[i] += self.grad[i] * s * (1.0 - s);
    }
  });
}

Tensor exp(const Tensor& a) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.size(); ++i) g[i] += self.grad[i] * self.value[i];
  });
}

Tensor log(const Tensor& a) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] = std::log(out[i]);
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.size(); ++i) g[i] += self.grad[i] / pa->value[i];
  });
}

Tensor square(const Tensor& a) {
  Matrix out = a.value();
  for (int i = 0; i < out.size(); ++i) out[i] *= out[i];
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.size(); ++i) g[i] += self.grad[i] * 2.0 * pa->value[i];
  });
}

Tensor reduce_mean_rows(const Tensor& a) {
  const Matrix& v = a.value();
  if (v.rows() == 0) throw std::invalid_argument("reduce_mean_rows: empty input");
  Matrix out(1, v.cols());
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < v.cols(); ++j) out(0, j) += v(i, j);
  for (int j = 0; j < v.cols(); ++j) out(0, j) /= v.rows();
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    const double inv = 1.0 / g.rows();
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) g(i, j) += self.grad(0, j) * inv;
  });
}

Tensor row_sum(const Tensor& a) {
  const Matrix& v = a.value();
  Matrix out(v.rows(), 1);
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < v.cols(); ++j) out(i, 0) += v(i, j);
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) g(i, j) += self.grad(i, 0);
  });
}

Tensor reduce_sum_all(const Tensor& a) {
  const Matrix& v = a.value();
  double total = 0.0;
  for (int i = 0; i < v.size(); ++i) total += v[i];
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(Matrix(1, 1, {total}), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    const double s = self.grad(0, 0);
    for (int i = 0; i < g.size(); ++i) g[i] += s;
  });
}

Tensor reduce_mean_all(const Tensor& a) {
  const int n = a.value().size();
  if (n == 0) throw std::invalid_argument("reduce_mean_all: empty input");
  return scale(reduce_sum_all(a), 1.0 / n);
}

Tensor row_pair_dot(const Tensor& a, const Tensor& b,
                    const std::vector<std::pair<int, int>>& pairs) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.cols())
    throw std::invalid_argument("row_pair_dot: width mismatch " + shape_string(av) + " vs " +
                                shape_string(bv));
  Matrix out(static_cast<int>(pairs.size()), 1);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [r1, r2] = pairs[p];
    if (r1 < 0 || r1 >= av.rows() || r2 < 0 || r2 >= bv.rows())
      throw std::invalid_argument("row_pair_dot: pair out of range");
    double dot = 0.0;
    for (int j = 0; j < av.cols(); ++j) dot += av(r1, j) * bv(r2, j);
    out(static_cast<int>(p), 0) = dot;
  }
  auto pa = a.node();
  auto pb = b.node();
  const bool need_a = a.requires_grad();
  const bool need_b = b.requires_grad();
  return make_op(std::move(out), {a, b}, [pa, pb, pairs, need_a, need_b](TensorNode& self) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [r1, r2] = pairs[p];
      const double gp = self.grad(static_cast<int>(p), 0);
      if (need_a) {
        Matrix& g = pa->ensure_grad();
        for (int j = 0; j < g.cols(); ++j) g(r1, j) += gp * pb->value(r2, j);
      }
      if (need_b) {
        Matrix& g = pb->ensure_grad();
        for (int j = 0; j < g.cols(); ++j) g(r2, j) += gp * pa->value(r1, j);
      }
    }
  });
}

Tensor softmax_rows(const Tensor& a) {
  const Matrix& v = a.value();
  Matrix out(v.rows(), v.cols());
  for (int i = 0; i < v.rows(); ++i) {
    double mx = v(i, 0);
    for (int j = 1; j < v.cols(); ++j) mx = std::max(mx, v(i, j));
    double sum = 0.0;
    for (int j = 0; j < v.cols(); ++j) {
      out(i, j) = std::exp(v(i, j) - mx);
      sum += out(i, j);
    }
    for (int j = 0; j < v.cols(); ++j) out(i, j) /= sum;
  }
  auto pa = a.node();
  const bool need = a.requires_grad();
  return make_op(std::move(out), {a}, [pa, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pa->ensure_grad();
    for (int i = 0; i < g.rows(); ++i) {
      double dot = 0.0;
      for (int j = 0; j < g.cols(); ++j) dot += self.grad(i, j) * self.value(i, j);
      for (int j = 0; j < g.cols(); ++j)
        g(i, j) += self.value(i, j) * (self.grad(i, j) - dot);
    }
  });
}

Tensor bce(const Tensor& prediction, const Tensor& target) {
  if (target.requires_grad())
    throw std::invalid_argument("bce: target must be a constant");
  check_same_shape("bce", prediction.value(), target.value());
  const Matrix& pv = prediction.value();
  const Matrix& tv = target.value();
  Matrix out(pv.rows(), pv.cols());
  for (int i = 0; i < pv.size(); ++i) {
    const double p = std::min(std::max(pv[i], kBceEpsilon), 1.0 - kBceEpsilon);
    out[i] = -(tv[i] * std::log(p) + (1.0 - tv[i]) * std::log(1.0 - p));
  }
  auto pp = prediction.node();
  auto pt = target.node();
  const bool need = prediction.requires_grad();
  return make_op(std::move(out), {prediction, target}, [pp, pt, need](TensorNode& self) {
    if (!need) return;
    Matrix& g = pp->ensure_grad();
    for (int i = 0; i < g.size(); ++i) {
      const double raw = pp->value[i];
      if (raw <= kBceEpsilon || raw >= 1.0 - kBceEpsilon) continue;  // clamp region
      g[i] += self.grad[i] * (raw - pt->value[i]) / (raw * (1.0 - raw));
    }
  });
}

Tensor kl_diag_gaussian(const Tensor& mu, const Tensor& log_var) {
  check_same_shape("kl_diag_gaussian", mu.value(), log_var.value());
  const Matrix& mv = mu.value();
  const Matrix& lv = log_var.value();
  double total = 0.0;
  for (int i = 0; i < mv.size(); ++i)
    total += 0.5 * (mv[i] * mv[i] + std::exp(lv[i]) - 1.0 - lv[i]);
  auto pm = mu.node();
  auto pl = log_var.node();
  const bool need_m = mu.requires_grad();
  const bool need_l = log_var.requires_grad();
  return make_op(Matrix(1, 1, {total}), {mu, log_var},
                 [pm, pl, need_m, need_l](TensorNode& self) {
                   const double s = self.grad(0, 0);
                   if (need_m) {
                     Matrix& g = pm->ensure_grad();
                     for (int i = 0; i < g.size(); ++i) g[i] += s * pm->value[i];
                   }
                   if (need_l) {
                     Matrix& g = pl->ensure_grad();
                     for (int i = 0; i < g.size(); ++i)
                       g[i] += s * 0.5 * (std::exp(pl->value[i]) - 1.0);
                   }
                 });
}

Tensor reparameterize(const Tensor& mu, const Tensor& sigma, Rng& rng) {
  check_same_shape("reparameterize", mu.value(), sigma.value());
  Matrix eps(mu.rows(), mu.cols());
  for (int i = 0; i < eps.size(); ++i) eps[i] = rng.normal();
  return add(mu, mul(sigma, Tensor::constant(std::move(eps))));
}

Tensor dropout(const Tensor& a, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return a;
  const double keep = 1.0 - rate;
  Matrix mask(a.rows(), a.cols());
  for (int i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return mul(a, Tensor::constant(std::move(mask)));
}

}  // namespace cfrecs
