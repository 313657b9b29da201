#pragma once

#include "tagsight/corpus.hpp"
#include "tagsight/error.hpp"

#include <cmath>

#include <optional>
#include <string>
#include <vector>

namespace tagsight {

inline constexpr double kDefaultConfidence = 0.5;

struct ConfidentClass {
  Eigen::Index index = 0;
  double probability = 0.0;
};

// Argmax class when its probability is strictly above `threshold`. Throws
// ValidationError for rows that are not a probability distribution.
template <typename Derived>
std::optional<ConfidentClass> confident_class(const Eigen::DenseBase<Derived>& row,
                                              double threshold = kDefaultConfidence);

struct FoodBounds {
  std::size_t n_total = 0;
  std::size_t n_confident_food_or_container = 0;
  std::size_t n_confident_nonfood = 0;
  double lower = 0.0;
  double upper = 1.0;
  double threshold = kDefaultConfidence;
};

FoodBounds food_content_bounds(const Corpus& corpus, double threshold = kDefaultConfidence);
FoodBounds food_content_bounds(const CorpusView& view, double threshold = kDefaultConfidence);

std::vector<std::string> default_distractors();
std::vector<std::string> default_containers();

struct FilterResult {
  CorpusView view;
  std::size_t removed = 0;
};

// Drops posts whose confident class is one of `classes`. Unknown names throw
// ConfigError.
FilterResult prune_distractors(const CorpusView& view, const std::vector<std::string>& classes,
                               double threshold = kDefaultConfidence);

// Keeps only posts whose confident class is one of `classes`.
FilterResult focus_container(const CorpusView& view, const std::vector<std::string>& classes,
                             double threshold = kDefaultConfidence);

// --- implementation ---

template <typename Derived>
std::optional<ConfidentClass> confident_class(const Eigen::DenseBase<Derived>& row,
                                              double threshold) {
  if (row.size() == 0) throw ValidationError("empty posterior row");
  const auto values = row.derived().template cast<double>().eval();
  if (!values.allFinite() || (values.array() < 0.0).any() || (values.array() > 1.0).any() ||
      std::abs(values.sum() - 1.0) > kPosteriorRowTolerance) {
    throw ValidationError("posterior row is not a probability distribution");
  }
  Eigen::Index best = 0;
  const double p = values.maxCoeff(&best);
  if (p > threshold) return ConfidentClass{best, p};
  return std::nullopt;
}

}  // namespace tagsight

namespace tagsight {

enum class FilterKind { none, prune, focus };

struct FilterSpec {
  FilterKind kind = FilterKind::none;
  std::vector<std::string> classes;
  double threshold = kDefaultConfidence;
};

FilterResult apply_filter(const CorpusView& view, const FilterSpec& spec);

// "none", "prune:website|wig@0.5", "focus:plate@0.5"
std::string describe(const FilterSpec& spec);

}  // namespace tagsight
