#include "tagsight/report.hpp"
#include "tagsight/csv.hpp"
#include "tagsight/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace tagsight {
namespace {

std::map<std::string, double> accuracies(const VisualnessReport& r) {
  std::map<std::string, double> out;
  for (const TagVisualness& t : r.ranked) out.emplace(t.tag, t.balanced_accuracy);
  return out;
}

double top_mean(std::vector<double> values, std::size_t n) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end(), std::greater<>());
  values.resize(std::min(n, values.size()));
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

ComparisonReport compare_conditions(const CorpusView& view, const TagIndex& index,
                                    const FilterSpec& filter, std::span<const std::string> tags,
                                    const ExperimentConfig& config, std::size_t top_n) {
  if (top_n == 0) throw ValidationError("top_n must be at least 1");
  const FilterResult filtered = apply_filter(view, filter);

  auto run = [&](const CorpusView& v) -> std::map<std::string, double> {
    try {
      return accuracies(rank_visualness(v, index, tags, config));
    } catch (const EmptyResult&) {
      return {};
    }
  };
  const auto raw = run(view);
  const auto flt = run(filtered.view);

  ComparisonReport report;
  report.filter = filter;
  report.posts_raw = view.size();
  report.posts_removed = filtered.removed;
  report.top_n = top_n;
  std::vector<double> raw_acc, flt_acc;
  for (const auto& [tag, acc] : raw) {
    const auto it = flt.find(tag);
    if (it == flt.end()) {
      report.raw_only.push_back(tag);
      continue;
    }
    report.tags.push_back({tag, acc, it->second});
    raw_acc.push_back(acc);
    flt_acc.push_back(it->second);
  }
  for (const auto& [tag, acc] : flt) {
    if (!raw.contains(tag)) report.filtered_only.push_back(tag);
  }
  if (report.tags.empty()) throw EmptyResult("no tag is evaluable in both conditions");
  std::stable_sort(report.tags.begin(), report.tags.end(),
                   [](const TagComparison& a, const TagComparison& b) {
                     return a.acc_filtered > b.acc_filtered;
                   });
  report.top_mean_raw = top_mean(std::move(raw_acc), top_n);
  report.top_mean_filtered = top_mean(std::move(flt_acc), top_n);
  return report;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "tag,acc_raw,acc_filtered,delta\n";
  for (const TagComparison& t : report.tags) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f}\n", csv_field(t.tag), t.acc_raw, t.acc_filtered,
                       t.delta());
  }
  return out;
}

std::string comparison_summary_csv(const ComparisonReport& report) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "|" : "") + v[i];
    return s;
  };
  std::string out = "key,value\n";
  out += fmt::format("filter,{}\n", csv_field(describe(report.filter)));
  out += fmt::format("posts_raw,{}\n", report.posts_raw);
  out += fmt::format("posts_removed,{}\n", report.posts_removed);
  out += fmt::format("common_tags,{}\n", report.tags.size());
  out += fmt::format("raw_only,{}\n", csv_field(join(report.raw_only)));
  out += fmt::format("filtered_only,{}\n", csv_field(join(report.filtered_only)));
  out += fmt::format("top_n,{}\n", report.top_n);
  out += fmt::format("top_mean_raw,{:.6f}\n", report.top_mean_raw);
  out += fmt::format("top_mean_filtered,{:.6f}\n", report.top_mean_filtered);
  return out;
}

std::string visual_food_table_csv(const VisualnessReport& report, std::size_t n) {
  const bool categorised = std::any_of(report.ranked.begin(), report.ranked.end(), [](const auto& t) {
    return t.category != TagCategory::unlabeled;
  });
  std::string out = "rank,tag,freq_rank,category,balanced_accuracy,p_at_k,ap\n";
  std::size_t emitted = 0;
  for (std::size_t i = 0; i < report.ranked.size() && emitted < n; ++i) {
    const TagVisualness& t = report.ranked[i];
    const bool food = t.category == TagCategory::concrete_food || t.category == TagCategory::food_related;
    if (categorised && !food) continue;
    out += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f}\n", i + 1, csv_field(t.tag), t.freq_rank,
                       to_string(t.category), t.balanced_accuracy, t.precision_at_k,
                       t.average_precision);
    ++emitted;
  }
  return out;
}

}  // namespace tagsight
