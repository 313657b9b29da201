#pragma once

#include "tagsight/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fixture {

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tagsight_" + name + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Posts with the given tag sets, zero features of width d, optional geotags.
inline tagsight::CorpusPtr make_corpus(const std::vector<std::vector<std::string>>& tags, int d = 2) {
  std::vector<tagsight::Post> posts;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    tagsight::Post p;
    p.id = "p" + std::to_string(i);
    p.tags = tags[i];
    std::sort(p.tags.begin(), p.tags.end());
    p.row = static_cast<std::uint32_t>(i);
    posts.push_back(std::move(p));
  }
  tagsight::FeatureMatrix f = tagsight::FeatureMatrix::Zero(static_cast<Eigen::Index>(tags.size()), d);
  return std::make_shared<const tagsight::Corpus>(std::move(posts), std::move(f));
}

// Posterior table with a handful of named classes; `confident[i]` names the
// class holding `p` of the mass in row i (empty string = flat row).
inline tagsight::PosteriorMatrix make_posteriors(const std::vector<std::string>& confident,
                                                 float p = 0.8f) {
  tagsight::PosteriorMatrix pm;
  pm.class_names = {"pizza", "ice cream", "plate", "bowl", "website", "restaurant", "book jacket",
                    "comic book", "wig", "menu"};
  pm.class_roles = {tagsight::ClassRole::food,      tagsight::ClassRole::food,
                    tagsight::ClassRole::container, tagsight::ClassRole::container,
                    tagsight::ClassRole::other,     tagsight::ClassRole::other,
                    tagsight::ClassRole::other,     tagsight::ClassRole::other,
                    tagsight::ClassRole::other,     tagsight::ClassRole::other};
  const auto k = static_cast<Eigen::Index>(pm.class_names.size());
  pm.probs.resize(static_cast<Eigen::Index>(confident.size()), k);
  for (std::size_t i = 0; i < confident.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (confident[i].empty()) {
      pm.probs.row(r).setConstant(1.0f / static_cast<float>(k));
      continue;
    }
    const auto c = *pm.find_class(confident[i]);
    pm.probs.row(r).setConstant((1.0f - p) / static_cast<float>(k - 1));
    pm.probs(r, c) = p;
  }
  return pm;
}

}  // namespace fixture

namespace fixture {

// Like make_corpus, with per-post geotags and optional posteriors.
inline tagsight::CorpusPtr make_geo_corpus(
    const std::vector<std::vector<std::string>>& tags,
    const std::vector<std::optional<tagsight::GeoPoint>>& geotags,
    std::optional<tagsight::PosteriorMatrix> posteriors = std::nullopt) {
  std::vector<tagsight::Post> posts = make_corpus(tags)->posts();
  for (std::size_t i = 0; i < posts.size() && i < geotags.size(); ++i) posts[i].geotag = geotags[i];
  tagsight::FeatureMatrix f = tagsight::FeatureMatrix::Zero(static_cast<Eigen::Index>(tags.size()), 2);
  return std::make_shared<const tagsight::Corpus>(std::move(posts), std::move(f), std::move(posteriors));
}

}  // namespace fixture
