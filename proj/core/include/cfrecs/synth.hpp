#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cfrecs/graph.hpp"
#include "cfrecs/rng.hpp"

namespace cfrecs {

// sigmoid(gain * affinity + bias)
struct LogisticRate {
  double gain = 1.0;
  double bias = 0.0;
  double probability(double affinity) const;
};

struct SynthConfig {
  int num_users = 300;
  int num_listings = 300;
  std::uint64_t seed = 7;
  int num_segments = 6;
  double match_probability = 0.6;   // listing attribute takes its segment's value
  double prototype_concentration = 4.0;
  double histogram_concentration = 0.5;
  int histogram_support = 4;        // off-prototype values with mass
  double activity_noise = 0.25;
  double price_sigma = 0.5;
  LogisticRate view{10.0, -5.0};
  LogisticRate save{8.0, -3.0};        // given a view
  LogisticRate submit{8.0, -4.0};      // given a save
  LogisticRate transaction{6.0, -5.5}; // given a submit
};

// Full interaction universe the walk sampler draws subgraphs from. Node ids
// are global: user u is u, listing l is num_users() + l.
struct Marketplace {
  Schema schema;
  std::vector<UserFeatures> users;
  std::vector<ListingFeatures> listings;
  std::array<std::vector<Edge>, kNumEdgeTypes> edges;
  std::vector<Edge> transactions;
  std::vector<std::vector<int>> adjacency;  // union of interaction types

  int num_users() const { return static_cast<int>(users.size()); }
  int num_listings() const { return static_cast<int>(listings.size()); }
  int num_nodes() const { return num_users() + num_listings(); }
};

// Mean histogram mass the user puts on the listing's attribute values.
double affinity(const UserFeatures& user, const ListingFeatures& listing);

Marketplace generate_marketplace(const SynthConfig& config);

void write_market(const std::string& path, const Marketplace& market);
Marketplace read_market(const std::string& path);

}  // namespace cfrecs
