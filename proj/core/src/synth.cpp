#include "cfrecs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cfrecs/error.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace cfrecs {

double LogisticRate::probability(double affinity) const {
  return 1.0 / (1.0 + std::exp(-(gain * affinity + bias)));
}

double affinity(const UserFeatures& user, const ListingFeatures& listing) {
  if (user.histograms.size() != listing.values.size())
    throw std::invalid_argument("affinity: attribute count mismatch");
  double total = 0.0;
  for (std::size_t a = 0; a < listing.values.size(); ++a)
    total += user.histograms[a][listing.values[a]];
  return total / static_cast<double>(listing.values.size());
}

namespace {

Schema market_schema() {
  Schema schema;
  schema.attributes = {{"zip", 20},      {"bedrooms", 6},      {"bathrooms", 5},
                       {"sqft_bucket", 10}, {"property_type", 5}, {"year_bucket", 8}};
  return schema;
}

int segment_value(int segment, int attribute, int vocab_size) {
  return (segment * 7 + attribute * 3) % vocab_size;
}

std::vector<double> preference_histogram(const SynthConfig& config, int segment, int attribute,
                                         int vocab_size, Rng& rng) {
  std::vector<double> hist(vocab_size, 0.0);
  hist[segment_value(segment, attribute, vocab_size)] +=
      rng.gamma(config.prototype_concentration);
  const int support = std::min(config.histogram_support, vocab_size);
  for (int s = 0; s < support; ++s) {
    int v = rng.uniform_int(vocab_size);
    hist[v] += rng.gamma(config.histogram_concentration);
  }
  double sum = 0.0;
  for (double p : hist) sum += p;
  for (double& p : hist) p /= sum;
  return hist;
}

}  // namespace

Marketplace generate_marketplace(const SynthConfig& config) {
  if (config.num_users < 1 || config.num_listings < 1)
    throw std::invalid_argument("generate_marketplace: needs users and listings");
  if (config.num_segments < 1)
    throw std::invalid_argument("generate_marketplace: needs at least one segment");

  Marketplace market;
  market.schema = market_schema();
  const int num_attrs = market.schema.num_attributes();
  Rng rng(config.seed);

  std::vector<int> user_segment(config.num_users);
  for (int u = 0; u < config.num_users; ++u) {
    user_segment[u] = rng.uniform_int(config.num_segments);
    UserFeatures f;
    for (int a = 0; a < num_attrs; ++a)
      f.histograms.push_back(preference_histogram(config, user_segment[u], a,
                                                  market.schema.attributes[a].vocab_size, rng));
    f.activity.assign(kActivityDim, 0.0);
    market.users.push_back(std::move(f));
  }

  const double price_weight[] = {0.6, 0.5, 0.3, 0.8, 0.4, 0.2};
  std::vector<double> log_prices(config.num_listings);
  for (int l = 0; l < config.num_listings; ++l) {
    const int segment = rng.uniform_int(config.num_segments);
    ListingFeatures f;
    double log_price = 11.0;
    for (int a = 0; a < num_attrs; ++a) {
      const int vocab = market.schema.attributes[a].vocab_size;
      const int value = rng.bernoulli(config.match_probability)
                            ? segment_value(segment, a, vocab)
                            : rng.uniform_int(vocab);
      f.values.push_back(value);
      if (vocab > 1)
        log_price += price_weight[a % 6] * (static_cast<double>(value) / (vocab - 1) - 0.5);
    }
    log_price += rng.normal(0.0, config.price_sigma);
    f.price = std::exp(log_price);
    log_prices[l] = log_price;
    market.listings.push_back(std::move(f));
  }

  double mean = 0.0;
  for (double lp : log_prices) mean += lp;
  mean /= config.num_listings;
  double var = 0.0;
  for (double lp : log_prices) var += (lp - mean) * (lp - mean);
  var /= config.num_listings;
  market.schema.price_log_mean = mean;
  market.schema.price_log_std = var > 1e-18 ? std::sqrt(var) : 1.0;

  // funnel: every save is a view, every submit is a save, every
  // transaction closes a submit
  std::vector<std::array<int, kNumEdgeTypes>> counts(config.num_users, {0, 0, 0});
  for (int u = 0; u < config.num_users; ++u) {
    for (int l = 0; l < config.num_listings; ++l) {
      const double a = affinity(market.users[u], market.listings[l]);
      if (!rng.bernoulli(config.view.probability(a))) continue;
      market.edges[0].push_back({u, l});
      ++counts[u][0];
      if (!rng.bernoulli(config.save.probability(a))) continue;
      market.edges[1].push_back({u, l});
      ++counts[u][1];
      if (!rng.bernoulli(config.submit.probability(a))) continue;
      market.edges[2].push_back({u, l});
      ++counts[u][2];
      if (rng.bernoulli(config.transaction.probability(a)))
        market.transactions.push_back({u, l});
    }
  }

  for (int u = 0; u < config.num_users; ++u) {
    UserFeatures& f = market.users[u];
    for (int t = 0; t < kNumEdgeTypes; ++t) {
      const double noisy =
          std::log1p(static_cast<double>(counts[u][t])) * (1.0 + rng.normal(0.0, config.activity_noise));
      f.activity[t] = std::max(0.0, noisy);
    }
  }

  market.adjacency.assign(market.num_nodes(), {});
  for (const Edge& e : market.edges[0]) {
    market.adjacency[e.user].push_back(config.num_users + e.listing);
    market.adjacency[config.num_users + e.listing].push_back(e.user);
  }
  return market;
}

namespace {

using nlohmann::json;

json edges_to_json(const std::vector<Edge>& edges) {
  json arr = json::array();
  for (const Edge& e : edges) arr.push_back(json::array({e.user, e.listing}));
  return arr;
}

std::vector<Edge> edges_from_json(const json& arr, int num_users, int num_listings,
                                  const std::string& where) {
  std::vector<Edge> edges;
  for (const json& je : arr) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer())
      throw ValidationError(where + ": edges must be [user, listing] pairs");
    const Edge e{je[0].get<int>(), je[1].get<int>()};
    if (e.user < 0 || e.user >= num_users || e.listing < 0 || e.listing >= num_listings)
      throw ValidationError(where + ": edge (" + std::to_string(e.user) + ", " +
                            std::to_string(e.listing) + ") references a missing node");
    edges.push_back(e);
  }
  return edges;
}

}  // namespace

void write_market(const std::string& path, const Marketplace& market) {
  std::ofstream out(path);
  if (!out) throw ValidationError("market '" + path + "': cannot open for writing");
  json header = {{"record", "market_header"},
                 {"version", 1},
                 {"schema", detail::schema_to_json(market.schema)},
                 {"num_users", market.num_users()},
                 {"num_listings", market.num_listings()}};
  out << header.dump() << '\n';
  for (const UserFeatures& u : market.users)
    out << json{{"record", "user"}, {"hist", u.histograms}, {"activity", u.activity}}.dump()
        << '\n';
  for (const ListingFeatures& l : market.listings)
    out << json{{"record", "listing"}, {"values", l.values}, {"price", l.price}}.dump() << '\n';
  json edges = {{"record", "edges"}, {"transactions", edges_to_json(market.transactions)}};
  for (int t = 0; t < kNumEdgeTypes; ++t)
    edges[kEdgeTypeNames[t]] = edges_to_json(market.edges[t]);
  out << edges.dump() << '\n';
  if (!out) throw ValidationError("market '" + path + "': write failed");
}

Marketplace read_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("market '" + path + "': cannot open");
  Marketplace market;
  int num_users = 0, num_listings = 0;
  bool have_header = false, have_edges = false;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    json j;
    try {
      j = json::parse(line);
      const auto record = j.at("record").get<std::string>();
      if (!have_header) {
        if (record != "market_header")
          throw ValidationError(where + ": first record must be the market header");
        if (j.at("version").get<int>() != 1)
          throw ValidationError(where + ": unsupported format version");
        market.schema = detail::schema_from_json(j.at("schema"), where);
        num_users = j.at("num_users").get<int>();
        num_listings = j.at("num_listings").get<int>();
        if (num_users < 1 || num_listings < 1)
          throw ValidationError(where + ": market must have users and listings");
        have_header = true;
      } else if (record == "user") {
        UserFeatures u;
        u.histograms = j.at("hist").get<std::vector<std::vector<double>>>();
        u.activity = j.at("activity").get<std::vector<double>>();
        market.users.push_back(std::move(u));
      } else if (record == "listing") {
        ListingFeatures l;
        l.values = j.at("values").get<std::vector<int>>();
        l.price = j.at("price").get<double>();
        market.listings.push_back(std::move(l));
      } else if (record == "edges") {
        for (int t = 0; t < kNumEdgeTypes; ++t)
          market.edges[t] =
              edges_from_json(j.at(kEdgeTypeNames[t]), num_users, num_listings, where);
        market.transactions =
            edges_from_json(j.at("transactions"), num_users, num_listings, where);
        have_edges = true;
      } else {
        throw ValidationError(where + ": unknown record type '" + record + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (!have_header || !have_edges)
    throw ValidationError("market '" + path + "': missing header or edges record");
  if (static_cast<int>(market.users.size()) != num_users ||
      static_cast<int>(market.listings.size()) != num_listings)
    throw ValidationError("market '" + path + "': header promises " + std::to_string(num_users) +
                          " users / " + std::to_string(num_listings) + " listings, file holds " +
                          std::to_string(market.users.size()) + " / " +
                          std::to_string(market.listings.size()));
  market.adjacency.assign(market.num_nodes(), {});
  for (const Edge& e : market.edges[0]) {
    market.adjacency[e.user].push_back(num_users + e.listing);
    market.adjacency[num_users + e.listing].push_back(e.user);
  }
  return market;
}

}  // namespace cfrecs

