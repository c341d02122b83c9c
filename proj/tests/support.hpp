#pragma once

// Shared helpers for the test binaries: random fixtures and a central
// finite-difference gradient checker.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cfrecs/graph.hpp"
#include "cfrecs/matrix.hpp"
#include "cfrecs/rng.hpp"
#include "cfrecs/tensor.hpp"

namespace testsupport {

inline cfrecs::Matrix random_matrix(int rows, int cols, cfrecs::Rng& rng, double lo = -1.0,
                                    double hi = 1.0) {
  cfrecs::Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m[i] = rng.uniform(lo, hi);
  return m;
}

// Entries bounded away from zero, for ops with a kink at the origin.
inline cfrecs::Matrix random_matrix_off_zero(int rows, int cols, cfrecs::Rng& rng,
                                             double min_abs = 0.1) {
  cfrecs::Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) {
    double mag = rng.uniform(min_abs, 1.0);
    m[i] = rng.bernoulli(0.5) ? mag : -mag;
  }
  return m;
}

// Central finite differences against the analytic gradients of `leaves`.
// make_loss must rebuild the same scalar graph from the leaves' current
// values (fixed noise included) on every call.
inline bool gradcheck(const std::function<cfrecs::Tensor()>& make_loss,
                      const std::vector<cfrecs::Tensor>& leaves, double h = 1e-5,
                      double rel_tol = 1e-4, double abs_tol = 1e-7,
                      std::string* failure = nullptr) {
  for (cfrecs::Tensor leaf : leaves) leaf.zero_grad();
  cfrecs::Tensor loss = make_loss();
  loss.backward();

  std::vector<cfrecs::Matrix> analytic;
  analytic.reserve(leaves.size());
  for (const cfrecs::Tensor& leaf : leaves) {
    cfrecs::Matrix g = leaf.grad();
    if (g.size() == 0) g = cfrecs::Matrix(leaf.rows(), leaf.cols());
    analytic.push_back(g);
  }

  bool ok = true;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    cfrecs::Matrix& v = const_cast<cfrecs::Tensor&>(leaves[li]).mutable_value();
    for (int i = 0; i < v.size(); ++i) {
      const double orig = v[i];
      auto numeric_at = [&](double step) {
        v[i] = orig + step;
        const double up = make_loss().item();
        v[i] = orig - step;
        const double down = make_loss().item();
        v[i] = orig;
        return (up - down) / (2.0 * step);
      };
      const double a = analytic[li][i];
      auto agrees = [&](double numeric) {
        return std::fabs(a - numeric) <=
               rel_tol * std::fmax(std::fabs(a), std::fabs(numeric)) + abs_tol;
      };
      double numeric = numeric_at(h);
      // two benign stencil failures self-identify across step sizes: roundoff
      // cancellation (loss large relative to the entry's gradient) washes out
      // at a wider step, and a relu kink inside (x-h, x+h) at a narrower one;
      // a genuinely wrong gradient disagrees at every step
      if (!agrees(numeric)) numeric = numeric_at(h * 10.0);
      if (!agrees(numeric)) numeric = numeric_at(h * 0.1);
      if (!agrees(numeric)) numeric = numeric_at(h * 0.01);
      if (!agrees(numeric)) {
        ok = false;
        if (failure) {
          *failure = "leaf " + std::to_string(li) + " entry " + std::to_string(i) +
                     ": analytic " + std::to_string(a) + " vs numeric " + std::to_string(numeric);
        }
      }
    }
  }
  return ok;
}

inline cfrecs::Schema toy_schema() {
  cfrecs::Schema schema;
  schema.attributes = {{"color", 3}, {"size", 2}};
  schema.price_log_mean = 11.0;
  schema.price_log_std = 0.6;
  return schema;
}

inline std::vector<double> random_histogram(int vocab, cfrecs::Rng& rng) {
  std::vector<double> h(vocab);
  double total = 0.0;
  for (double& x : h) {
    x = rng.gamma(1.0) + 1e-3;
    total += x;
  }
  for (double& x : h) x /= total;
  return h;
}

inline cfrecs::UserFeatures random_user(const cfrecs::Schema& schema, cfrecs::Rng& rng) {
  cfrecs::UserFeatures u;
  for (const cfrecs::AttributeSpec& a : schema.attributes)
    u.histograms.push_back(random_histogram(a.vocab_size, rng));
  u.activity = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0)};
  return u;
}

inline cfrecs::ListingFeatures random_listing(const cfrecs::Schema& schema, cfrecs::Rng& rng) {
  cfrecs::ListingFeatures l;
  for (const cfrecs::AttributeSpec& a : schema.attributes)
    l.values.push_back(rng.uniform_int(a.vocab_size));
  l.price = std::exp(schema.price_log_mean + schema.price_log_std * rng.normal());
  return l;
}

// Small random bipartite graph; saves nest inside views, submits inside saves.
inline cfrecs::Graph random_graph(const cfrecs::Schema& schema, int num_users, int num_listings,
                                  cfrecs::Rng& rng, double view_p = 0.6) {
  cfrecs::Graph g;
  for (int u = 0; u < num_users; ++u) g.users.push_back(random_user(schema, rng));
  for (int l = 0; l < num_listings; ++l) g.listings.push_back(random_listing(schema, rng));
  for (int u = 0; u < num_users; ++u) {
    for (int l = 0; l < num_listings; ++l) {
      if (!rng.bernoulli(view_p)) continue;
      g.edges[0].push_back({u, l});
      if (!rng.bernoulli(0.6)) continue;
      g.edges[1].push_back({u, l});
      if (rng.bernoulli(0.5)) g.edges[2].push_back({u, l});
    }
  }
  if (g.edges[0].empty()) g.edges[0].push_back({0, 0});  // keep the graph connected enough
  g.label = rng.bernoulli(0.5) ? 1 : 0;
  return g;
}

}  // namespace testsupport
