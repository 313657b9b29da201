#pragma once

#include "tagsight/corpus.hpp"
#include "tagsight/linsvm.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tagsight {

enum class TagCategory { concrete_food, food_related, non_food, unlabeled };

std::string_view to_string(TagCategory category);
TagCategory parse_category(std::string_view text);

using CategoryMap = std::map<std::string, TagCategory, std::less<>>;

// Lines of "tag,category"; blank lines and '#' comments are ignored.
CategoryMap load_categories(const std::filesystem::path& path);

struct ExperimentConfig {
  double neg_ratio = 1.0;  // negatives sampled per positive
  double test_fraction = 0.25;
  std::size_t k = 50;  // ranking cutoff for P@k and AP
  std::uint64_t seed = 42;
  std::size_t min_positives = 20;
  std::size_t workers = 1;
  linsvm::TrainConfig svm;  // svm.seed is replaced by a per-tag seed
};

struct TagDataset {
  std::string tag;
  std::vector<std::uint32_t> train_rows;
  std::vector<int> train_labels;
  std::vector<std::uint32_t> test_rows;
  std::vector<int> test_labels;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<std::string> warnings;
};

struct TagSkip {
  std::string tag;
  std::string reason;
};

// Positives are the view's posts carrying `tag`; negatives are sampled without
// replacement from the remaining view posts at neg_ratio; both are split
// stratified by test_fraction. Returns TagSkip when the tag cannot be evaluated.
std::variant<TagDataset, TagSkip> assemble_tag_dataset(const CorpusView& view,
                                                       const TagIndex& index,
                                                       std::string_view tag,
                                                       const ExperimentConfig& config);

struct TagVisualness {
  std::string tag;
  std::size_t freq_rank = 0;
  double balanced_accuracy = 0.0;
  double precision_at_k = 0.0;
  double average_precision = 0.0;
  std::size_t k = 0;  // cutoff used, <= requested k
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  TagCategory category = TagCategory::unlabeled;
};

struct TagEvaluation {
  TagVisualness score;
  TagDataset dataset;
  linsvm::LinearModel<double> model;
};

// Trains on the train split and scores the test split. Throws InsufficientData
// when the tag would be skipped.
TagEvaluation evaluate_tag_detailed(const CorpusView& view, const TagIndex& index,
                                    std::string_view tag, const ExperimentConfig& config);

TagVisualness evaluate_tag(const CorpusView& view, const TagIndex& index, std::string_view tag,
                           const ExperimentConfig& config);

struct VisualnessReport {
  std::vector<TagVisualness> ranked;  // balanced accuracy descending, then tag
  std::vector<TagSkip> skipped;       // tag order
};

// Evaluates every tag on `config.workers` threads. Results do not depend on the
// worker count. Throws EmptyResult when no tag can be evaluated.
VisualnessReport rank_visualness(const CorpusView& view, const TagIndex& index,
                                 std::span<const std::string> tags, const ExperimentConfig& config,
                                 const CategoryMap* categories = nullptr);

// Ids of the k candidates with the highest decision values, best first; equal
// scores keep the lower row first.
std::vector<std::string> top_ranked_images(const Corpus& corpus,
                                           const linsvm::LinearModel<double>& model,
                                           std::span<const std::uint32_t> candidates,
                                           std::size_t k);

// tag,freq_rank,n_pos,n_neg,balanced_accuracy,p_at_k,ap,category
std::string visualness_csv(const VisualnessReport& report);

}  // namespace tagsight
