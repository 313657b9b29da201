#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace tagsight {

// Mean of the per-class recalls, i.e. (TPR + TNR) / 2. Labels and predictions
// are +1 / -1. Throws UndefinedMetric unless both classes occur in `labels`.
double balanced_accuracy(std::span<const int> predictions, std::span<const int> labels);

struct CutoffMetric {
  double value = 0.0;
  std::size_t k = 0;       // cutoff actually used
  bool truncated = false;  // requested k exceeded the list length
};

// `relevance` is ordered best-first, entries 0 or 1.
CutoffMetric precision_at_k(std::span<const std::uint8_t> relevance, std::size_t k);

// Mean of precision@i over relevant positions i <= k, normalised by the number
// of relevant items inside the cutoff. Zero when none are relevant.
CutoffMetric average_precision(std::span<const std::uint8_t> relevance, std::size_t k);

}  // namespace tagsight
