#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "tagsight/error.hpp"
#include "tagsight/noise.hpp"
#include "tagsight/synth.hpp"

#include <random>

using namespace tagsight;

namespace {

CorpusPtr with_posteriors(const std::vector<std::string>& confident, float p = 0.8f) {
  return fixture::make_geo_corpus(std::vector<std::vector<std::string>>(confident.size()), {},
                                  fixture::make_posteriors(confident, p));
}

}  // namespace

TEST_CASE("confident class rule") {
  const PosteriorMatrix pm = fixture::make_posteriors({"plate", "", "pizza"}, 0.62f);
  const auto c = confident_class(pm.probs.row(0));
  REQUIRE(c);
  CHECK(pm.class_names[static_cast<std::size_t>(c->index)] == "plate");
  CHECK(c->probability == doctest::Approx(0.62));
  CHECK_FALSE(confident_class(pm.probs.row(1)));

  Eigen::RowVectorXf half(4);
  half << 0.5f, 0.25f, 0.25f, 0.0f;
  CHECK_FALSE(confident_class(half));
  CHECK(confident_class(half, 0.49));

  Eigen::RowVectorXf uniform = Eigen::RowVectorXf::Constant(1000, 0.001f);
  CHECK_FALSE(confident_class(uniform));

  Eigen::RowVectorXf bad(3);
  bad << 0.9f, 0.9f, 0.1f;
  CHECK_THROWS_AS(confident_class(bad), ValidationError);
  bad << 1.2f, -0.1f, -0.1f;
  CHECK_THROWS_AS(confident_class(bad), ValidationError);
}

TEST_CASE("bounds on the 19/11 composition") {
  std::vector<std::string> confident;
  for (int i = 0; i < 12; ++i) confident.push_back("pizza");
  for (int i = 0; i < 7; ++i) confident.push_back("plate");
  for (int i = 0; i < 11; ++i) confident.push_back(i % 2 ? "website" : "menu");
  confident.resize(100, "");
  const FoodBounds b = food_content_bounds(*with_posteriors(confident));
  CHECK(b.n_total == 100);
  CHECK(b.n_confident_food_or_container == 19);
  CHECK(b.n_confident_nonfood == 11);
  CHECK(b.lower == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(b.upper == doctest::Approx(0.89).epsilon(1e-12));
}

TEST_CASE("bounds edge cases") {
  const FoodBounds all = food_content_bounds(*with_posteriors({"pizza", "ice cream", "bowl"}));
  CHECK(all.lower == 1.0);
  CHECK(all.upper == 1.0);
  const FoodBounds none = food_content_bounds(*with_posteriors({"", "", ""}));
  CHECK(none.lower == 0.0);
  CHECK(none.upper == 1.0);
  CHECK_THROWS_AS(food_content_bounds(*fixture::make_corpus({{"a"}})), MissingData);
}

TEST_CASE("raising the threshold never grows the confident set") {
  std::mt19937_64 gen(4);
  const std::vector<std::string> names = {"pizza", "plate", "website", "menu", ""};
  std::vector<std::string> confident;
  for (int i = 0; i < 60; ++i) confident.push_back(names[gen() % names.size()]);
  const auto corpus = with_posteriors(confident, 0.7f);
  std::size_t prev = corpus->size() + 1;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const FoodBounds b = food_content_bounds(*corpus, t);
    const std::size_t n = b.n_confident_food_or_container + b.n_confident_nonfood;
    CHECK(n <= prev);
    CHECK(b.lower <= b.upper);
    prev = n;
  }
}

TEST_CASE("prune exactly the planted website rows") {
  std::vector<std::string> confident(40, "");
  std::vector<std::uint32_t> planted;
  for (std::uint32_t i = 3; i < 40; i += 4) {
    confident[i] = "website";
    planted.push_back(i);
  }
  confident[2] = "pizza";
  REQUIRE(planted.size() == 10);
  const auto corpus = with_posteriors(confident);
  const auto view = CorpusView::all(corpus);
  const FilterResult r = prune_distractors(view, default_distractors());
  CHECK(r.removed == 10);
  CHECK(r.view.size() + r.removed == corpus->size());
  for (std::uint32_t row : planted) CHECK_FALSE(r.view.contains(row));
  CHECK(r.view.contains(2));

  const FilterResult identity = prune_distractors(view, {});
  CHECK(identity.view == view);
  CHECK(identity.removed == 0);

  const FilterResult twice = prune_distractors(r.view, default_distractors());
  CHECK(twice.view == r.view);
  CHECK(twice.removed == 0);

  CHECK_THROWS_AS(prune_distractors(view, {"spaceship"}), ConfigError);
  CHECK_THROWS_AS(prune_distractors(CorpusView::all(fixture::make_corpus({{"a"}})), {}), MissingData);
}

TEST_CASE("focus on containers") {
  std::vector<std::string> confident = {"plate", "", "pizza", "plate", "website", "", "", "plate", "bowl", ""};
  const auto corpus = with_posteriors(confident);
  const auto view = CorpusView::all(corpus);
  const FilterResult r = focus_container(view, default_containers());
  CHECK(r.view.size() == 3);
  CHECK(r.removed == 7);
  CHECK(focus_container(r.view, default_containers()).view == r.view);

  // All classes at threshold 0 keeps exactly the rows with a confident class.
  const auto& names = corpus->posteriors().class_names;
  const FilterResult any = focus_container(view, names, 0.0);
  CHECK(any.view.size() == corpus->size());
  const FilterResult any_half = focus_container(view, names, 0.5);
  CHECK(any_half.view.size() == 6);

  const auto no_plates = with_posteriors({"pizza", "", "website"});
  CHECK(focus_container(CorpusView::all(no_plates), default_containers()).view.empty());
  CHECK_THROWS_AS(focus_container(view, {"saucer"}), ConfigError);
}

TEST_CASE("apply_filter and describe") {
  const auto corpus = with_posteriors({"plate", "website", ""});
  const auto view = CorpusView::all(corpus);
  CHECK(apply_filter(view, {}).view == view);
  CHECK(apply_filter(view, {FilterKind::prune, {"website"}, 0.5}).view.size() == 2);
  CHECK(apply_filter(view, {FilterKind::focus, {"plate"}, 0.5}).view.size() == 1);
  CHECK(describe({}) == "none");
  CHECK(describe({FilterKind::prune, {"website", "wig"}, 0.5}) == "prune:website|wig@0.5");
}

TEST_CASE("bounds bracket the true food fraction on synthetic corpora") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    synth::SynthSpec spec;
    spec.n_posts = 400;
    spec.dim = 2;
    spec.seed = 1000 + trial;
    spec.distractor_fraction = 0.3 * u(gen);
    spec.food_fraction = (1.0 - spec.distractor_fraction) * u(gen);
    spec.container_fraction = u(gen);
    spec.food_confident_fraction = u(gen);
    spec.nonfood_confident_fraction = u(gen);
    const auto s = synth::generate(spec);
    const FoodBounds b = food_content_bounds(*s.corpus);
    CHECK(b.lower <= s.truth.food_fraction());
    CHECK(s.truth.food_fraction() <= b.upper);
  }
}
