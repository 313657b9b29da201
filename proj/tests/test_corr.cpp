#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tagsight/corr.hpp"
#include "tagsight/error.hpp"
#include "tagsight/synth.hpp"

#include <cmath>
#include <random>

using namespace tagsight;

namespace {

std::vector<std::vector<std::string>> indicator_tags(const std::vector<std::vector<int>>& x,
                                                     const std::vector<std::string>& names) {
  std::vector<std::vector<std::string>> tags(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j)
      if (x[i][j]) tags[i].push_back(names[j]);
  return tags;
}

bool has_pair(const std::vector<TagPair>& pairs, const std::string& a, const std::string& b) {
  return std::any_of(pairs.begin(), pairs.end(),
                     [&](const TagPair& p) { return p.a == std::min(a, b) && p.b == std::max(a, b); });
}

}  // namespace

TEST_CASE("phi from hand counted tables") {
  const std::vector<std::string> names = {"a", "b"};
  const auto corpus = fixture::make_corpus(indicator_tags({{1, 1}, {1, 0}, {0, 1}, {0, 0}}, names));
  const auto m = tag_phi_matrix(CorpusView::all(corpus), names);
  CHECK(m.values(0, 1) == 0.0);
  CHECK(m.values(0, 0) == 1.0);
  CHECK(m.n == 4);

  const auto same = fixture::make_corpus(indicator_tags({{1, 1}, {1, 1}, {0, 0}}, names));
  CHECK(tag_phi_matrix(CorpusView::all(same), names).values(0, 1) == 1.0);
  CHECK(phi_coefficient(0, 2, 2, 0) == -1.0);
  CHECK(std::isnan(phi_coefficient(3, 0, 1, 0)));
}

TEST_CASE("constant indicators are flagged undefined") {
  const std::vector<std::string> names = {"a", "b", "all", "none"};
  const auto corpus = fixture::make_corpus(
      indicator_tags({{1, 0, 1, 0}, {0, 1, 1, 0}, {1, 1, 1, 0}}, names));
  const auto m = tag_phi_matrix(CorpusView::all(corpus), names);
  CHECK(m.defined(0, 1));
  CHECK_FALSE(m.defined(0, 2));
  CHECK_FALSE(m.defined(2, 2));
  CHECK_FALSE(m.defined(3, 1));
  CHECK(std::isnan(m.values(3, 1)));
  const std::string csv = correlation_csv(m);
  CHECK(csv.starts_with("tag,a,b,all,none\na,1.000000,-0.500000,n/a,n/a\n"));
}

TEST_CASE("phi matches the pearson oracle on random indicator matrices") {
  std::mt19937_64 gen(17);
  const std::vector<std::string> names = {"t0", "t1", "t2", "t3", "t4"};
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<int>> x(8, std::vector<int>(5));
    for (auto& row : x)
      for (int& v : row) v = static_cast<int>(gen() % 2);
    const auto m = tag_phi_matrix(CorpusView::all(fixture::make_corpus(indicator_tags(x, names))), names);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        std::vector<double> a, b;
        for (const auto& row : x) {
          a.push_back(row[i]);
          b.push_back(row[j]);
        }
        const double expected = oracle::pearson(a, b);
        CHECK(m.defined(i, j) == !std::isnan(expected));
        if (!std::isnan(expected)) {
          CHECK(std::abs(m.values(i, j) - expected) <= 1e-12);
          ++compared;
        }
        CHECK((m.values(i, j) == m.values(j, i) || (std::isnan(m.values(i, j)) && std::isnan(m.values(j, i)))));
      }
    }
  }
  CHECK(compared > 2000);
}

TEST_CASE("phi is invariant to post order and duplication") {
  std::mt19937_64 gen(23);
  const std::vector<std::string> names = {"a", "b", "c"};
  std::vector<std::vector<int>> x(30, std::vector<int>(3));
  for (auto& row : x)
    for (int& v : row) v = static_cast<int>(gen() % 3 == 0);
  auto doubled = x;
  doubled.insert(doubled.end(), x.begin(), x.end());
  auto shuffled = x;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto base = tag_phi_matrix(CorpusView::all(fixture::make_corpus(indicator_tags(x, names))), names);
  const auto twice = tag_phi_matrix(CorpusView::all(fixture::make_corpus(indicator_tags(doubled, names))), names);
  const auto perm = tag_phi_matrix(CorpusView::all(fixture::make_corpus(indicator_tags(shuffled, names))), names);
  CHECK(base.values == twice.values);
  CHECK(base.values == perm.values);
}

TEST_CASE("tag_phi_matrix preconditions") {
  const auto one = fixture::make_corpus({{"a"}});
  CHECK_THROWS_AS(tag_phi_matrix(CorpusView::all(one), {"a"}), InsufficientData);
  const auto two = fixture::make_corpus({{"a"}, {}});
  CHECK_THROWS_AS(tag_phi_matrix(CorpusView::all(two), {}), ValidationError);
  CHECK_THROWS_AS(tag_phi_matrix(CorpusView::all(two), {"a", "a"}), ValidationError);
}

TEST_CASE("top_correlations ordering and limits") {
  CorrelationMatrix m;
  m.tags = {"c", "a", "b"};
  m.values.resize(3, 3);
  m.values << 1, 0.5, -0.5, 0.5, 1, 0.9, -0.5, 0.9, 1;
  m.defined.setConstant(3, 3, true);
  const auto pos = top_correlations(m, 10, Sign::positive);
  REQUIRE(pos.size() == 2);
  CHECK(pos[0].a == "a");
  CHECK(pos[0].b == "b");
  CHECK(pos[1].a == "a");
  CHECK(pos[1].b == "c");
  CHECK(top_correlations(m, 1, Sign::positive).size() == 1);
  const auto neg = top_correlations(m, 10, Sign::negative);
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].a == "b");
  CHECK(neg[0].phi == -0.5);

  // Equal magnitudes fall back to pair order.
  m.values(1, 2) = m.values(2, 1) = 0.5;
  const auto tied = top_correlations(m, 10, Sign::positive);
  CHECK(tied[0].b == "b");
  CHECK(tied[1].b == "c");

  m.defined.setConstant(false);
  CHECK(top_correlations(m, 5, Sign::positive).empty());
}

TEST_CASE("planted sweet cluster leads the positive correlations") {
  synth::SynthSpec spec;
  spec.n_posts = 3000;
  spec.dim = 4;
  spec.seed = 9;
  spec.clusters.push_back({{"dessert", "cake", "chocolate"}, 0.15, std::nullopt});
  for (const char* t : {"coffee", "salad", "beer", "sushi", "pasta"}) spec.nonvisual_tags.push_back({t, 0.1});
  spec.nonvisual_tags.push_back({"dessert", 0.05});
  spec.nonvisual_tags.push_back({"cake", 0.05});
  const auto gen = synth::generate(spec);
  const std::vector<std::string> tags = {"beer", "cake", "chocolate", "coffee", "dessert", "pasta", "salad", "sushi"};
  const auto m = tag_phi_matrix(CorpusView::all(gen.corpus), tags);
  const auto top = top_correlations(m, 5, Sign::positive);
  CHECK(has_pair(top, "dessert", "cake"));
  CHECK(has_pair(top, "dessert", "chocolate"));
  CHECK(has_pair(top, "cake", "chocolate"));
  CHECK(top[0].phi > 0.5);
}

TEST_CASE("per continent correlations") {
  synth::SynthSpec spec;
  spec.n_posts = 4000;
  spec.dim = 4;
  spec.seed = 31;
  spec.geotag_fraction = 1.0;
  spec.geo_mixture = {{Continent::europe, 0.5}, {Continent::australia, 0.49}, {Continent::africa, 0.01}};
  spec.nonvisual_tags = {{"cake", 0.1}, {"coffee", 0.1}};
  spec.clusters.push_back({{"cake", "coffee"}, 0.2, Continent::europe});
  spec.clusters.push_back({{"cake", "coffee"}, 0.03, Continent::australia});
  const auto gen = synth::generate(spec);
  const auto view = CorpusView::all(gen.corpus);
  const GeoStats stats = geocode_corpus(view, CountryAtlas::load(default_atlas_path()));
  const auto by = per_continent_correlations(view, stats, {"cake", "coffee"});
  REQUIRE(by.contains(Continent::europe));
  REQUIRE(by.contains(Continent::australia));
  CHECK_FALSE(by.contains(Continent::africa));  // about 40 posts, below the minimum
  CHECK(by.at(Continent::europe).values(0, 1) > by.at(Continent::australia).values(0, 1));

  // A corpus entirely in one continent gives one entry.
  spec.geo_mixture = {{Continent::europe, 1.0}};
  const auto europe = synth::generate(spec);
  const auto ev = CorpusView::all(europe.corpus);
  const auto single = per_continent_correlations(ev, geocode_corpus(ev, CountryAtlas::load(default_atlas_path())),
                                                 {"cake", "coffee"});
  CHECK(single.size() == 1);
}
