#include "cfrecs/optim.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cfrecs/error.hpp"

namespace cfrecs {

Matrix glorot_uniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Matrix w(rows, cols);
  for (int i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
  return w;
}

Tensor ParameterStore::create(const std::string& name, int rows, int cols) {
  return create(name, Matrix(rows, cols));
}

Tensor ParameterStore::create(const std::string& name, Matrix init) {
  if (params_.count(name))
    throw std::invalid_argument("ParameterStore: duplicate parameter '" + name + "'");
  Tensor t = Tensor::variable(std::move(init));
  params_.emplace(name, t);
  return t;
}

Tensor ParameterStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::invalid_argument("ParameterStore: unknown parameter '" + name + "'");
  return it->second;
}

bool ParameterStore::contains(const std::string& name) const { return params_.count(name) > 0; }

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(name);
  return out;
}

std::vector<Tensor> ParameterStore::tensors() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(t);
  return out;
}

void ParameterStore::zero_grad() {
  for (auto& [name, t] : params_) t.zero_grad();
}

void ParameterStore::set_trainable(bool trainable) {
  for (auto& [name, t] : params_) t.node()->requires_grad = trainable;
}

std::map<std::string, Matrix> ParameterStore::snapshot() const {
  std::map<std::string, Matrix> snap;
  for (const auto& [name, t] : params_) snap.emplace(name, t.value());
  return snap;
}

void ParameterStore::restore(const std::map<std::string, Matrix>& snap) {
  for (auto& [name, t] : params_) {
    auto it = snap.find(name);
    if (it == snap.end())
      throw std::invalid_argument("ParameterStore::restore: missing parameter '" + name + "'");
    if (!it->second.same_shape(t.value()))
      throw std::invalid_argument("ParameterStore::restore: shape mismatch for '" + name + "'");
    t.mutable_value() = it->second;
  }
}

namespace {

constexpr char kMagic[4] = {'C', 'F', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in, const std::string& path) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ValidationError("checkpoint '" + path + "': truncated file");
  return v;
}

void read_header(std::istream& in, const std::string& path, std::string& meta) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ValidationError("checkpoint '" + path + "': bad magic");
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kVersion)
    throw ValidationError("checkpoint '" + path + "': unsupported version");
  const std::uint64_t meta_len = read_u64(in, path);
  meta.resize(meta_len);
  in.read(meta.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw ValidationError("checkpoint '" + path + "': truncated metadata");
}

}  // namespace

void ParameterStore::save(const std::string& path, const std::string& meta) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("checkpoint '" + path + "': cannot open for writing");
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  write_u64(out, meta.size());
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_u64(out, params_.size());
  for (const auto& [name, t] : params_) {
    const Matrix& v = t.value();
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<std::uint64_t>(v.rows()));
    write_u64(out, static_cast<std::uint64_t>(v.cols()));
    out.write(reinterpret_cast<const char*>(v.data().data()),
              static_cast<std::streamsize>(sizeof(double) * v.size()));
  }
  if (!out) throw ValidationError("checkpoint '" + path + "': write failed");
}

std::string ParameterStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint '" + path + "': cannot open");
  std::string meta;
  read_header(in, path, meta);
  const std::uint64_t count = read_u64(in, path);
  if (count != params_.size())
    throw ValidationError("checkpoint '" + path + "': holds " + std::to_string(count) +
                          " tensors, store has " + std::to_string(params_.size()));
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t name_len = read_u64(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    if (!in) throw ValidationError("checkpoint '" + path + "': truncated tensor name");
    const auto rows = static_cast<int>(read_u64(in, path));
    const auto cols = static_cast<int>(read_u64(in, path));
    auto it = params_.find(name);
    if (it == params_.end())
      throw ValidationError("checkpoint '" + path + "': unexpected tensor '" + name + "'");
    Matrix& dst = it->second.mutable_value();
    if (dst.rows() != rows || dst.cols() != cols)
      throw ValidationError("checkpoint '" + path + "': tensor '" + name + "' is " +
                            std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                            shape_string(dst));
    in.read(reinterpret_cast<char*>(dst.data().data()),
            static_cast<std::streamsize>(sizeof(double) * dst.size()));
    if (!in) throw ValidationError("checkpoint '" + path + "': truncated tensor '" + name + "'");
  }
  return meta;
}

std::string ParameterStore::peek_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint '" + path + "': cannot open");
  std::string meta;
  read_header(in, path, meta);
  return meta;
}

AdamOptimizer::AdamOptimizer(ParameterStore& params, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : params_(&params),
      learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {}

void AdamOptimizer::step() {
  ++step_count_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (const std::string& name : params_->names()) {
    Tensor t = params_->get(name);
    if (!t.requires_grad()) continue;
    const Matrix& g = t.grad();
    Matrix& value = t.mutable_value();
    auto mit = m_.find(name);
    if (mit == m_.end()) {
      mit = m_.emplace(name, Matrix(g.rows(), g.cols())).first;
      v_.emplace(name, Matrix(g.rows(), g.cols()));
    }
    Matrix& m = mit->second;
    Matrix& v = v_.at(name);
    for (int i = 0; i < g.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      value[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }
}

}  // namespace cfrecs
