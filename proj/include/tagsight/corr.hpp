#pragma once

#include "tagsight/continent.hpp"
#include "tagsight/corpus.hpp"
#include "tagsight/geo.hpp"

#include <map>
#include <string>
#include <vector>

namespace tagsight {

inline constexpr std::size_t kMinContinentPosts = 50;

struct CorrelationMatrix {
  std::vector<std::string> tags;
  Eigen::MatrixXd values;                                         // NaN where undefined
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> defined;
  std::size_t n = 0;                                              // posts counted
};

// Phi coefficient from a 2x2 table: n11 both, n10 only a, n01 only b, n00 neither.
// NaN when either indicator is constant.
double phi_coefficient(std::size_t n11, std::size_t n10, std::size_t n01, std::size_t n00);

// Over every post of the view. Needs at least two posts and one tag.
CorrelationMatrix tag_phi_matrix(const CorpusView& view, const std::vector<std::string>& tags);

enum class Sign { positive, negative };

struct TagPair {
  std::string a;  // a < b
  std::string b;
  double phi = 0.0;
};

// Strongest defined off-diagonal pairs of the requested sign (zero belongs to
// neither), |phi| descending, ties by (a, b).
std::vector<TagPair> top_correlations(const CorrelationMatrix& m, std::size_t n, Sign sign);

// One matrix per continent with at least `min_posts` resolved posts in the view.
std::map<Continent, CorrelationMatrix> per_continent_correlations(
    const CorpusView& view, const GeoStats& stats, const std::vector<std::string>& tags,
    std::size_t min_posts = kMinContinentPosts);

// Square CSV with a leading "tag" column; undefined entries print as n/a.
std::string correlation_csv(const CorrelationMatrix& m);

}  // namespace tagsight
