#include "cfrecs/sampler.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cfrecs/error.hpp"

namespace cfrecs {

SubgraphSampler::SubgraphSampler(const Marketplace& market) : market_(&market) {
  const int nu = market.num_users();
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    listings_by_user_[t].assign(nu, {});
    for (const Edge& e : market.edges[t]) listings_by_user_[t][e.user].push_back(e.listing);
    for (auto& row : listings_by_user_[t]) std::sort(row.begin(), row.end());
  }
  transactions_by_user_.assign(nu, {});
  for (const Edge& e : market.transactions) transactions_by_user_[e.user].push_back(e.listing);
}

SampledGraph SubgraphSampler::sample(const WalkConfig& config, Rng& rng) const {
  if (config.k < 0) throw std::invalid_argument("sample: step budget must be non-negative");
  const Marketplace& market = *market_;
  const int nu = market.num_users();

  SampledGraph out;
  int start = -1;
  int partner = -1;
  if (config.force_transactional) {
    if (market.transactions.empty())
      throw ValidationError("sample: transactional walk requested on a market with no transactions");
    const Edge pair = market.transactions[rng.uniform_int(
        static_cast<int>(market.transactions.size()))];
    out.seed_user = pair.user;
    out.seed_listing = pair.listing;
    if (rng.bernoulli(0.5)) {
      start = pair.user;
      partner = nu + pair.listing;
    } else {
      start = nu + pair.listing;
      partner = pair.user;
    }
  } else {
    start = rng.uniform_int(market.num_nodes());
  }

  std::vector<int> order{start};
  std::unordered_set<int> visited{start};
  std::vector<int> fresh;
  int current = start;
  for (int step = 0; step < config.k; ++step) {
    fresh.clear();
    for (int next : market.adjacency[current])
      if (!visited.count(next)) fresh.push_back(next);
    if (!fresh.empty()) {
      current = fresh[rng.uniform_int(static_cast<int>(fresh.size()))];
      visited.insert(current);
      order.push_back(current);
    } else {
      current = order[rng.uniform_int(static_cast<int>(order.size()))];
    }
  }
  if (partner >= 0 && !visited.count(partner)) {
    visited.insert(partner);
    order.push_back(partner);
  }

  std::unordered_map<int, int> user_local;
  std::unordered_map<int, int> listing_local;
  for (int node : order) {
    if (node < nu) {
      user_local.emplace(node, static_cast<int>(out.user_ids.size()));
      out.user_ids.push_back(node);
      out.graph.users.push_back(market.users[node]);
    } else {
      listing_local.emplace(node - nu, static_cast<int>(out.listing_ids.size()));
      out.listing_ids.push_back(node - nu);
      out.graph.listings.push_back(market.listings[node - nu]);
    }
  }

  for (int t = 0; t < kNumEdgeTypes; ++t) {
    for (std::size_t ui = 0; ui < out.user_ids.size(); ++ui) {
      for (int listing : listings_by_user_[t][out.user_ids[ui]]) {
        auto it = listing_local.find(listing);
        if (it != listing_local.end())
          out.graph.edges[t].push_back({static_cast<int>(ui), it->second});
      }
    }
  }

  out.graph.label = 0;
  for (int user : out.user_ids) {
    for (int listing : transactions_by_user_[user])
      if (listing_local.count(listing)) {
        out.graph.label = 1;
        break;
      }
    if (out.graph.label) break;
  }
  return out;
}

Dataset build_labeled_dataset(const Marketplace& market, const SampleSpec& spec) {
  if (spec.num_positive < 0 || spec.num_negative < 0)
    throw std::invalid_argument("build_labeled_dataset: counts must be non-negative");
  SubgraphSampler sampler(market);
  Rng base(spec.seed);
  Dataset dataset;
  dataset.schema = market.schema;
  dataset.graphs.reserve(spec.num_positive + spec.num_negative);

  WalkConfig positive{spec.k, true};
  for (int i = 0; i < spec.num_positive; ++i) {
    Rng rng = base.split(static_cast<std::uint64_t>(i));
    dataset.graphs.push_back(sampler.sample(positive, rng).graph);
  }

  WalkConfig negative{spec.k, false};
  for (int i = 0; i < spec.num_negative; ++i) {
    Rng rng = base.split(static_cast<std::uint64_t>(spec.num_positive + i));
    bool accepted = false;
    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
      SampledGraph s = sampler.sample(negative, rng);
      if (s.graph.label == 0 && s.graph.num_users() >= 1 && s.graph.num_listings() >= 1) {
        dataset.graphs.push_back(std::move(s.graph));
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NumericError("build_labeled_dataset: could not certify a negative sample after " +
                         std::to_string(spec.max_attempts) + " attempts");
  }
  return dataset;
}

SplitIndices make_splits(int dataset_size, int train, int val, int test, std::uint64_t seed) {
  if (train < 0 || val < 0 || test < 0)
    throw ValidationError("make_splits: counts must be non-negative");
  if (train + val + test > dataset_size)
    throw ValidationError("make_splits: " + std::to_string(train + val + test) +
                          " requested from " + std::to_string(dataset_size) + " graphs");
  std::vector<int> order(dataset_size);
  for (int i = 0; i < dataset_size; ++i) order[i] = i;
  Rng rng(seed);
  for (int i = dataset_size - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(i + 1)]);
  SplitIndices splits;
  splits.train.assign(order.begin(), order.begin() + train);
  splits.val.assign(order.begin() + train, order.begin() + train + val);
  splits.test.assign(order.begin() + train + val, order.begin() + train + val + test);
  return splits;
}

}  // namespace cfrecs
