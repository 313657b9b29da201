#pragma once

#include "tagsight/noise.hpp"
#include "tagsight/visualness.hpp"

#include <string>
#include <vector>

namespace tagsight {

inline constexpr std::size_t kDefaultTopN = 20;

struct TagComparison {
  std::string tag;
  double acc_raw = 0.0;
  double acc_filtered = 0.0;
  double delta() const { return acc_filtered - acc_raw; }
};

struct ComparisonReport {
  FilterSpec filter;
  std::size_t posts_raw = 0;
  std::size_t posts_removed = 0;
  std::vector<TagComparison> tags;        // filtered accuracy descending, then tag
  std::vector<std::string> raw_only;      // evaluable only without the filter
  std::vector<std::string> filtered_only;
  std::size_t top_n = kDefaultTopN;
  double top_mean_raw = 0.0;       // mean of the top_n raw accuracies among common tags
  double top_mean_filtered = 0.0;  // same for the filtered condition
};

// Ranks `tags` on the full view and on the filtered view with the same index
// and seed; negatives are drawn afresh inside each view. Throws EmptyResult
// when no tag is evaluable in both.
ComparisonReport compare_conditions(const CorpusView& view, const TagIndex& index,
                                    const FilterSpec& filter, std::span<const std::string> tags,
                                    const ExperimentConfig& config, std::size_t top_n = kDefaultTopN);

// tag,acc_raw,acc_filtered,delta
std::string comparison_csv(const ComparisonReport& report);
// key,value lines: filter, posts, tag counts and the top-N means.
std::string comparison_summary_csv(const ComparisonReport& report);

// Top-n tags of the ranking restricted to food categories (concrete or
// related); every tag counts when none is categorised.
// rank,tag,freq_rank,category,balanced_accuracy,p_at_k,ap
std::string visual_food_table_csv(const VisualnessReport& report, std::size_t n = kDefaultTopN);

}  // namespace tagsight
