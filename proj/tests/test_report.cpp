#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "tagsight/error.hpp"
#include "tagsight/report.hpp"
#include "tagsight/synth.hpp"

using namespace tagsight;

namespace {

synth::SynthCorpus noisy(std::uint64_t seed) {
  synth::SynthSpec spec;
  spec.n_posts = 2500;
  spec.dim = 32;
  spec.seed = seed;
  spec.distractor_fraction = 0.2;
  spec.false_positive_rate = 0.2;
  spec.false_positive_target = synth::FalsePositiveTarget::distractor;
  const char* names[] = {"salad", "sushi", "pizza", "cake", "steak", "ramen"};
  double sep = 1.5;
  for (const char* n : names) {
    spec.visual_tags.push_back({n, sep, 0.15});
    sep += 0.5;
  }
  spec.nonvisual_tags = {{"love", 0.3}, {"tbt", 0.3}};
  return synth::generate(spec);
}

std::vector<std::string> all_tags(const TagIndex& index) {
  std::vector<std::string> out;
  for (const TagEntry& e : index.ranked()) out.push_back(e.tag);
  return out;
}

}  // namespace

TEST_CASE("identity filter gives zero deltas") {
  const auto s = noisy(1);
  const auto view = CorpusView::all(s.corpus);
  const auto index = TagIndex::build(*s.corpus, 100);
  const auto tags = all_tags(index);
  const ComparisonReport r = compare_conditions(view, index, FilterSpec{}, tags, {}, 5);
  CHECK(r.posts_removed == 0);
  CHECK(r.tags.size() == tags.size());
  for (const auto& t : r.tags) CHECK(t.delta() == 0.0);
  CHECK(r.top_mean_raw == r.top_mean_filtered);
  CHECK(r.raw_only.empty());
  CHECK(r.filtered_only.empty());
}

TEST_CASE("pruning distractor-borne noise lifts the top means") {
  const auto s = noisy(2);
  const auto view = CorpusView::all(s.corpus);
  const auto index = TagIndex::build(*s.corpus, 100);
  const auto tags = all_tags(index);
  const FilterSpec prune{FilterKind::prune, default_distractors(), 0.5};
  const ComparisonReport r = compare_conditions(view, index, prune, tags, {}, 5);
  CHECK(r.posts_removed > 400);
  CHECK(r.top_mean_filtered > r.top_mean_raw);
  for (std::size_t i = 1; i < r.tags.size(); ++i) CHECK(r.tags[i - 1].acc_filtered >= r.tags[i].acc_filtered);

  const std::string csv = comparison_csv(r);
  CHECK(csv.starts_with("tag,acc_raw,acc_filtered,delta\n"));
  const std::string summary = comparison_summary_csv(r);
  CHECK(summary.find("filter,prune:website|restaurant|book jacket|comic book|wig@0.5\n") != std::string::npos);
  CHECK(summary.find("top_n,5\n") != std::string::npos);
}

TEST_CASE("tags evaluable in one condition are listed apart") {
  // Plates hold 30 "a" posts but no "b" posts; "b" only survives raw.
  std::vector<std::string> confident;
  std::vector<std::vector<std::string>> tags;
  for (int i = 0; i < 60; ++i) {
    confident.push_back("plate");
    tags.push_back(i < 30 ? std::vector<std::string>{"a"} : std::vector<std::string>{});
  }
  for (int i = 0; i < 60; ++i) {
    confident.push_back("");
    tags.push_back(i < 30 ? std::vector<std::string>{"a", "b"} : std::vector<std::string>{});
  }
  const auto corpus = fixture::make_geo_corpus(tags, {}, fixture::make_posteriors(confident));
  const auto view = CorpusView::all(corpus);
  const auto index = TagIndex::build(*corpus, 10);
  const std::vector<std::string> names = {"a", "b"};
  const FilterSpec focus{FilterKind::focus, {"plate"}, 0.5};
  const ComparisonReport r = compare_conditions(view, index, focus, names, {});
  REQUIRE(r.tags.size() == 1);
  CHECK(r.tags[0].tag == "a");
  CHECK(r.raw_only == std::vector<std::string>{"b"});

  const std::vector<std::string> only_b = {"b"};
  CHECK_THROWS_AS(compare_conditions(view, index, focus, only_b, {}), EmptyResult);
  CHECK_THROWS_AS(compare_conditions(view, index, focus, names, {}, 0), ValidationError);
}

TEST_CASE("visual food table") {
  VisualnessReport rep;
  rep.ranked = {{"jeans", 3, 0.9, 0, 0, 50, 30, 30, TagCategory::non_food},
                {"salad", 1, 0.8, 0.5, 0.6, 50, 30, 30, TagCategory::concrete_food},
                {"brunch", 2, 0.7, 0.5, 0.6, 50, 30, 30, TagCategory::food_related}};
  const std::string csv = visual_food_table_csv(rep, 1);
  CHECK(csv == "rank,tag,freq_rank,category,balanced_accuracy,p_at_k,ap\n"
               "2,salad,1,concrete-food,0.800000,0.500000,0.600000\n");
  for (auto& t : rep.ranked) t.category = TagCategory::unlabeled;
  CHECK(visual_food_table_csv(rep, 1).find("1,jeans") != std::string::npos);
}
