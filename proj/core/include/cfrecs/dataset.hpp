#pragma once

#include <string>
#include <vector>

#include "cfrecs/graph.hpp"

namespace cfrecs {

struct Dataset {
  Schema schema;
  std::vector<Graph> graphs;
};

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

// One schema header line followed by one graph per line. Readers report
// the offending line number and field on malformed input.
void write_jsonl(const std::string& path, const Dataset& dataset);
Dataset read_jsonl(const std::string& path);

void write_splits(const std::string& path, const SplitIndices& splits);
SplitIndices read_splits(const std::string& path, int dataset_size);

}  // namespace cfrecs
