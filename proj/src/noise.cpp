#include "tagsight/noise.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace tagsight {
namespace {

std::vector<bool> class_mask(const PosteriorMatrix& pm, const std::vector<std::string>& classes) {
  std::vector<bool> mask(static_cast<std::size_t>(pm.classes()), false);
  for (const std::string& name : classes) {
    const auto idx = pm.find_class(name);
    if (!idx) throw ConfigError("unknown posterior class '" + name + "'");
    mask[static_cast<std::size_t>(*idx)] = true;
  }
  return mask;
}

FilterResult select(const CorpusView& view, const std::vector<std::string>& classes,
                    double threshold, bool keep_matching) {
  const PosteriorMatrix& pm = view.corpus().posteriors();
  const std::vector<bool> mask = class_mask(pm, classes);
  std::vector<std::uint32_t> kept;
  kept.reserve(view.size());
  for (std::uint32_t row : view.rows()) {
    const auto c = confident_class(pm.probs.row(row), threshold);
    const bool match = c && mask[static_cast<std::size_t>(c->index)];
    if (match == keep_matching) kept.push_back(row);
  }
  const std::size_t removed = view.size() - kept.size();
  return {CorpusView(view.corpus_ptr(), std::move(kept)), removed};
}

}  // namespace

FoodBounds food_content_bounds(const CorpusView& view, double threshold) {
  const PosteriorMatrix& pm = view.corpus().posteriors();
  FoodBounds b;
  b.threshold = threshold;
  b.n_total = view.size();
  for (std::uint32_t row : view.rows()) {
    const auto c = confident_class(pm.probs.row(row), threshold);
    if (!c) continue;
    if (pm.class_roles[static_cast<std::size_t>(c->index)] == ClassRole::other) {
      ++b.n_confident_nonfood;
    } else {
      ++b.n_confident_food_or_container;
    }
  }
  if (b.n_total > 0) {
    const auto n = static_cast<double>(b.n_total);
    b.lower = static_cast<double>(b.n_confident_food_or_container) / n;
    b.upper = 1.0 - static_cast<double>(b.n_confident_nonfood) / n;
  }
  return b;
}

FoodBounds food_content_bounds(const Corpus& corpus, double threshold) {
  // The view needs shared ownership; a non-owning alias keeps the caller's object.
  CorpusPtr alias(std::shared_ptr<const Corpus>{}, &corpus);
  return food_content_bounds(CorpusView::all(alias), threshold);
}

std::vector<std::string> default_distractors() {
  return {"website", "restaurant", "book jacket", "comic book", "wig"};
}

std::vector<std::string> default_containers() { return {"plate"}; }

FilterResult prune_distractors(const CorpusView& view, const std::vector<std::string>& classes,
                               double threshold) {
  return select(view, classes, threshold, false);
}

FilterResult focus_container(const CorpusView& view, const std::vector<std::string>& classes,
                             double threshold) {
  return select(view, classes, threshold, true);
}

}  // namespace tagsight

namespace tagsight {

FilterResult apply_filter(const CorpusView& view, const FilterSpec& spec) {
  switch (spec.kind) {
    case FilterKind::none: return {view, 0};
    case FilterKind::prune: return prune_distractors(view, spec.classes, spec.threshold);
    case FilterKind::focus: return focus_container(view, spec.classes, spec.threshold);
  }
  return {view, 0};
}

std::string describe(const FilterSpec& spec) {
  if (spec.kind == FilterKind::none) return "none";
  std::string out = spec.kind == FilterKind::prune ? "prune:" : "focus:";
  for (std::size_t i = 0; i < spec.classes.size(); ++i) {
    if (i) out += '|';
    out += spec.classes[i];
  }
  return out + fmt::format("@{}", spec.threshold);
}

}  // namespace tagsight
