#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cfrecs/dataset.hpp"
#include "cfrecs/synth.hpp"

namespace cfrecs {

struct WalkConfig {
  int k = 16;  // step budget
  bool force_transactional = false;
};

struct SampledGraph {
  Graph graph;
  std::vector<int> user_ids;     // global marketplace ids, parallel to graph.users
  std::vector<int> listing_ids;  // parallel to graph.listings
  int seed_user = -1;            // forced transaction pair, global ids
  int seed_listing = -1;
};

// Budgeted random walk with restarts over the interaction universe. Each
// step moves to a uniform unvisited neighbor; a stuck walk teleports to a
// uniform already-visited node and the step still counts. Transactional
// walks start at one endpoint of a random transaction pair and always pull
// in the other endpoint, so the node set holds at most k + 2 nodes. The
// label records whether both endpoints of any transaction pair made it in.
class SubgraphSampler {
 public:
  explicit SubgraphSampler(const Marketplace& market);

  SampledGraph sample(const WalkConfig& config, Rng& rng) const;

 private:
  const Marketplace* market_;
  std::array<std::vector<std::vector<int>>, kNumEdgeTypes> listings_by_user_;
  std::vector<std::vector<int>> transactions_by_user_;
};

struct SampleSpec {
  int k = 16;
  int num_positive = 1000;
  int num_negative = 1000;
  std::uint64_t seed = 1;
  int max_attempts = 200;  // negative certification retries per graph
};

// Positives first (forced transactional walks), then certified negatives:
// uniform-seeded walks resampled until they trap no full transaction pair
// and touch both sides of the graph.
Dataset build_labeled_dataset(const Marketplace& market, const SampleSpec& spec);

SplitIndices make_splits(int dataset_size, int train, int val, int test, std::uint64_t seed);

}  // namespace cfrecs
