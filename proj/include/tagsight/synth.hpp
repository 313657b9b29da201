#pragma once

#include "tagsight/continent.hpp"
#include "tagsight/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tagsight::synth {

struct VisualTag {
  std::string tag;
  double separation = 4.0;  // shift of the class mean, in feature standard deviations
  double prevalence = 0.1;  // among non-distractor posts
};

struct NonVisualTag {
  std::string tag;
  double prevalence = 0.1;
};

// Tags planted together on a post with probability `prevalence`, optionally
// only on posts geotagged in one continent.
struct TagCluster {
  std::vector<std::string> tags;
  double prevalence = 0.1;
  std::optional<Continent> continent;
};

enum class FalsePositiveTarget { any, distractor };

struct SynthSpec {
  std::size_t n_posts = 1000;
  std::size_t dim = 64;
  std::vector<VisualTag> visual_tags;
  std::vector<NonVisualTag> nonvisual_tags;
  std::vector<TagCluster> clusters;
  // Fraction of each visual tag's assignments moved from content posts onto
  // posts without that content.
  double false_positive_rate = 0.0;
  FalsePositiveTarget false_positive_target = FalsePositiveTarget::any;
  double food_fraction = 0.6;        // of all posts
  double distractor_fraction = 0.0;  // of all posts, website-confident, never food
  double container_fraction = 0.2;   // of food posts, plate-confident
  double food_confident_fraction = 0.3;     // of remaining food posts
  double nonfood_confident_fraction = 0.3;  // of ordinary non-food posts
  double geotag_fraction = 0.4;
  std::map<Continent, double> geo_mixture;  // empty = uniform over the six populated continents
  std::uint64_t seed = 42;
};

// Throws ValidationError on out-of-range fields.
void validate(const SynthSpec& spec);

// Plain-text key/value format, one "key = value" per line. Lines starting
// with '#' and anything after " # " are comments. Keys:
//   n_posts, dim, seed, false_positive_rate, false_positive_target (any|distractor),
//   food_fraction, distractor_fraction, container_fraction, food_confident_fraction,
//   nonfood_confident_fraction, geotag_fraction,
//   visual_tag = <tag> <separation> <prevalence>       (repeatable)
//   nonvisual_tag = <tag> <prevalence>                 (repeatable)
//   cluster = <prevalence> <continent|*> <tag> <tag>...  (repeatable)
//   geo_weight = <continent> <weight>                  (repeatable)
// Continent names inside values use no spaces ("N.America").
SynthSpec parse_spec(std::string_view text);
SynthSpec load_spec(const std::filesystem::path& path);

enum class PostKind : std::uint8_t { food, nonfood, distractor };

struct GroundTruth {
  std::vector<PostKind> kind;                         // per row
  std::vector<std::optional<std::size_t>> confident;  // planted confident class per row
  std::vector<std::optional<Continent>> continent;    // planted continent per geotagged row
  std::map<std::string, std::vector<std::uint32_t>> content_rows;         // visual tag -> rows
  std::map<std::string, std::vector<std::uint32_t>> false_positive_rows;  // tagged, no content
  std::map<std::string, Eigen::VectorXd> directions;  // unit mean-shift direction per visual tag
  std::size_t capped_posts = 0;                       // posts that hit the tag cap

  double food_fraction() const;
};

struct SynthCorpus {
  CorpusPtr corpus;
  GroundTruth truth;
};

// The 24-class posterior table used by generated corpora: 8 food classes, 6
// containers (plate first), and 10 other classes including the five default
// distractors.
PosteriorMatrix class_table();

SynthCorpus generate(const SynthSpec& spec);

std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth);

}  // namespace tagsight::synth
