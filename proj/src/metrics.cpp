#include "tagsight/metrics.hpp"
#include "tagsight/error.hpp"

#include <algorithm>
#include <string>

namespace tagsight {

double balanced_accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ValidationError("balanced_accuracy: " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(labels.size()) + " labels");
  }
  std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++pos;
      tp += predictions[i] == 1;
    } else if (labels[i] == -1) {
      ++neg;
      tn += predictions[i] == -1;
    } else {
      throw ValidationError("labels must be +1 or -1");
    }
  }
  if (pos == 0 || neg == 0) {
    throw UndefinedMetric("balanced accuracy needs both classes in the labels");
  }
  const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
  const double tnr = static_cast<double>(tn) / static_cast<double>(neg);
  return 0.5 * (tpr + tnr);
}

namespace {

CutoffMetric cutoff(std::span<const std::uint8_t> relevance, std::size_t k) {
  if (k == 0) throw ValidationError("ranking cutoff k must be at least 1");
  CutoffMetric m;
  m.truncated = k > relevance.size();
  m.k = std::min(k, relevance.size());
  return m;
}

}  // namespace

CutoffMetric precision_at_k(std::span<const std::uint8_t> relevance, std::size_t k) {
  CutoffMetric m = cutoff(relevance, k);
  if (m.k == 0) return m;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < m.k; ++i) hits += relevance[i] != 0;
  m.value = static_cast<double>(hits) / static_cast<double>(m.k);
  return m;
}

CutoffMetric average_precision(std::span<const std::uint8_t> relevance, std::size_t k) {
  CutoffMetric m = cutoff(relevance, k);
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < m.k; ++i) {
    if (relevance[i] != 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  m.value = hits == 0 ? 0.0 : sum / static_cast<double>(hits);
  return m;
}

}  // namespace tagsight
