#include "cfrecs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfrecs {

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: got " + std::to_string(scores.size()) +
                                " scores for " + std::to_string(labels.size()) + " labels");
  const int n = static_cast<int>(scores.size());
  long long positives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) throw std::invalid_argument("roc_auc: labels must be 0 or 1");
    positives += label;
  }
  const long long negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("roc_auc: needs both classes");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });

  // midranks over tie groups
  double positive_rank_sum = 0.0;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (int k = i; k < j; ++k)
      if (labels[order[k]] == 1) positive_rank_sum += midrank;
    i = j;
  }
  const double numerator =
      positive_rank_sum - 0.5 * static_cast<double>(positives) * (positives + 1);
  return numerator / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: length mismatch " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  if (a == b) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace cfrecs
