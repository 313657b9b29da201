#include "tagsight/visualness.hpp"
#include "tagsight/csv.hpp"
#include "tagsight/error.hpp"
#include "tagsight/metrics.hpp"
#include "tagsight/parallel.hpp"
#include "tagsight/random.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace tagsight {

std::string_view to_string(TagCategory category) {
  switch (category) {
    case TagCategory::concrete_food: return "concrete-food";
    case TagCategory::food_related: return "food-related";
    case TagCategory::non_food: return "non-food";
    case TagCategory::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

TagCategory parse_category(std::string_view text) {
  if (text == "concrete-food") return TagCategory::concrete_food;
  if (text == "food-related") return TagCategory::food_related;
  if (text == "non-food") return TagCategory::non_food;
  if (text == "unlabeled") return TagCategory::unlabeled;
  throw ConfigError("unknown tag category '" + std::string(text) + "'");
}

CategoryMap load_categories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open categories file " + path.string());
  CategoryMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected tag,category");
    }
    std::string category = line.substr(comma + 1);
    category.erase(0, category.find_first_not_of(" \t"));
    category.erase(category.find_last_not_of(" \t") + 1);
    out[normalize_tag(line.substr(0, comma))] = parse_category(category);
  }
  return out;
}

namespace {

// Draws `count` items from `pool` without replacement, returned ascending.
std::vector<std::uint32_t> sample_without_replacement(std::vector<std::uint32_t> pool,
                                                      std::size_t count, Rng& rng) {
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::size_t test_count(std::size_t n, double fraction) {
  const auto raw = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(raw, 1, n - 1);
}

}  // namespace

std::variant<TagDataset, TagSkip> assemble_tag_dataset(const CorpusView& view,
                                                       const TagIndex& index,
                                                       std::string_view tag,
                                                       const ExperimentConfig& config) {
  if (!(config.neg_ratio > 0.0)) throw ValidationError("neg_ratio must be positive");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0, 1)");
  }
  if (config.k == 0) throw ValidationError("k must be at least 1");

  const TagEntry* entry = index.find(tag);
  if (entry == nullptr) return TagSkip{std::string(tag), "tag not in index"};

  std::vector<std::uint32_t> positives;
  std::set_intersection(entry->postings.begin(), entry->postings.end(), view.rows().begin(),
                        view.rows().end(), std::back_inserter(positives));
  const std::size_t min_pos = std::max<std::size_t>(config.min_positives, 2);
  if (positives.size() < min_pos) {
    return TagSkip{std::string(tag), fmt::format("{} positives, need {}", positives.size(), min_pos)};
  }
  std::vector<std::uint32_t> pool;
  std::set_difference(view.rows().begin(), view.rows().end(), entry->postings.begin(),
                      entry->postings.end(), std::back_inserter(pool));
  if (pool.size() < 2) {
    return TagSkip{std::string(tag), fmt::format("{} negatives available, need 2", pool.size())};
  }

  TagDataset ds;
  ds.tag = std::string(tag);
  Rng rng(derive_seed(derive_seed(config.seed, tag), std::uint64_t{1}));
  const auto wanted = static_cast<std::size_t>(
      std::max<long long>(2, std::llround(config.neg_ratio * static_cast<double>(positives.size()))));
  if (pool.size() < wanted) {
    ds.warnings.push_back(fmt::format("{}: only {} negatives available, wanted {}", tag,
                                      pool.size(), wanted));
  }
  std::vector<std::uint32_t> negatives = sample_without_replacement(std::move(pool), wanted, rng);
  ds.n_pos = positives.size();
  ds.n_neg = negatives.size();

  struct Item {
    std::uint32_t row;
    int label;
  };
  std::vector<Item> train, test;
  auto split = [&](std::vector<std::uint32_t> rows, int label) {
    rng.shuffle(std::span<std::uint32_t>(rows));
    const std::size_t n_test = test_count(rows.size(), config.test_fraction);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (i < n_test ? test : train).push_back({rows[i], label});
    }
  };
  split(std::move(positives), 1);
  split(std::move(negatives), -1);
  auto by_row = [](const Item& a, const Item& b) { return a.row < b.row; };
  std::sort(train.begin(), train.end(), by_row);
  std::sort(test.begin(), test.end(), by_row);
  for (const Item& it : train) {
    ds.train_rows.push_back(it.row);
    ds.train_labels.push_back(it.label);
  }
  for (const Item& it : test) {
    ds.test_rows.push_back(it.row);
    ds.test_labels.push_back(it.label);
  }
  return ds;
}

namespace {

TagEvaluation evaluate_dataset(const CorpusView& view, const TagIndex& index, TagDataset dataset,
                               const ExperimentConfig& config) {
  TagEvaluation eval;
  eval.dataset = std::move(dataset);
  const TagDataset& ds = eval.dataset;
  const FeatureMatrix& features = view.corpus().features();

  linsvm::TrainConfig svm = config.svm;
  svm.seed = derive_seed(derive_seed(config.seed, ds.tag), std::uint64_t{2});
  eval.model = linsvm::train<double>(features(ds.train_rows, Eigen::all), ds.train_labels, svm);

  const Eigen::VectorXd scores = linsvm::decision_values(eval.model, features(ds.test_rows, Eigen::all));
  std::vector<int> predicted(ds.test_rows.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    predicted[i] = scores(static_cast<Eigen::Index>(i)) >= 0.0 ? 1 : -1;
  }

  std::vector<std::size_t> order(ds.test_rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores(static_cast<Eigen::Index>(a));
    const double sb = scores(static_cast<Eigen::Index>(b));
    if (sa != sb) return sa > sb;
    return ds.test_rows[a] < ds.test_rows[b];
  });
  std::vector<std::uint8_t> relevance(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) relevance[i] = ds.test_labels[order[i]] == 1;

  TagVisualness& v = eval.score;
  v.tag = ds.tag;
  v.freq_rank = index.find(ds.tag)->rank;
  v.balanced_accuracy = balanced_accuracy(predicted, ds.test_labels);
  const CutoffMetric p = precision_at_k(relevance, config.k);
  v.precision_at_k = p.value;
  v.average_precision = average_precision(relevance, config.k).value;
  v.k = p.k;
  v.n_pos = ds.n_pos;
  v.n_neg = ds.n_neg;
  return eval;
}

}  // namespace

TagEvaluation evaluate_tag_detailed(const CorpusView& view, const TagIndex& index,
                                    std::string_view tag, const ExperimentConfig& config) {
  auto outcome = assemble_tag_dataset(view, index, tag, config);
  if (auto* skip = std::get_if<TagSkip>(&outcome)) {
    throw InsufficientData("tag '" + skip->tag + "' skipped: " + skip->reason);
  }
  return evaluate_dataset(view, index, std::get<TagDataset>(std::move(outcome)), config);
}

TagVisualness evaluate_tag(const CorpusView& view, const TagIndex& index, std::string_view tag,
                           const ExperimentConfig& config) {
  return evaluate_tag_detailed(view, index, tag, config).score;
}

VisualnessReport rank_visualness(const CorpusView& view, const TagIndex& index,
                                 std::span<const std::string> tags, const ExperimentConfig& config,
                                 const CategoryMap* categories) {
  const std::set<std::string, std::less<>> unique(tags.begin(), tags.end());
  const std::vector<std::string> ordered(unique.begin(), unique.end());

  std::vector<std::variant<TagVisualness, TagSkip>> slots(ordered.size());
  std::vector<std::vector<std::string>> warnings(ordered.size());
  parallel_for(ordered.size(), config.workers, [&](std::size_t i) {
    auto outcome = assemble_tag_dataset(view, index, ordered[i], config);
    if (auto* skip = std::get_if<TagSkip>(&outcome)) {
      slots[i] = std::move(*skip);
      return;
    }
    TagEvaluation eval =
        evaluate_dataset(view, index, std::get<TagDataset>(std::move(outcome)), config);
    warnings[i] = std::move(eval.dataset.warnings);
    slots[i] = std::move(eval.score);
  });

  VisualnessReport report;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    for (const auto& w : warnings[i]) spdlog::warn("{}", w);
    if (auto* skip = std::get_if<TagSkip>(&slots[i])) {
      spdlog::info("skipping tag '{}': {}", skip->tag, skip->reason);
      report.skipped.push_back(std::move(*skip));
      continue;
    }
    TagVisualness v = std::get<TagVisualness>(std::move(slots[i]));
    if (categories != nullptr) {
      if (auto it = categories->find(v.tag); it != categories->end()) v.category = it->second;
    }
    report.ranked.push_back(std::move(v));
  }
  if (report.ranked.empty()) throw EmptyResult("no tag could be evaluated");
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [](const TagVisualness& a, const TagVisualness& b) {
                     return a.balanced_accuracy > b.balanced_accuracy;
                   });
  return report;
}

std::vector<std::string> top_ranked_images(const Corpus& corpus,
                                           const linsvm::LinearModel<double>& model,
                                           std::span<const std::uint32_t> candidates,
                                           std::size_t k) {
  std::vector<std::uint32_t> rows(candidates.begin(), candidates.end());
  for (std::uint32_t r : rows) {
    if (r >= corpus.size()) throw ValidationError("candidate row out of range");
  }
  const Eigen::VectorXd scores = linsvm::decision_values(model, corpus.features()(rows, Eigen::all));
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores(static_cast<Eigen::Index>(a));
    const double sb = scores(static_cast<Eigen::Index>(b));
    if (sa != sb) return sa > sb;
    return rows[a] < rows[b];
  });
  order.resize(std::min(k, order.size()));
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (std::size_t i : order) ids.push_back(corpus.post(rows[i]).id);
  return ids;
}

std::string visualness_csv(const VisualnessReport& report) {
  std::string out = "tag,freq_rank,n_pos,n_neg,balanced_accuracy,p_at_k,ap,category\n";
  for (const TagVisualness& v : report.ranked) {
    out += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{}\n", csv_field(v.tag), v.freq_rank, v.n_pos,
                       v.n_neg, v.balanced_accuracy, v.precision_at_k, v.average_precision,
                       to_string(v.category));
  }
  return out;
}

}  // namespace tagsight
