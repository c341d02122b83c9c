#pragma once

#include <vector>

namespace cfrecs {

// Exact probability that a random positive outranks a random negative,
// ties counted half. Needs both classes present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Bitwise-equal vectors score exactly 1; a zero vector against anything
// else scores 0.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace cfrecs
