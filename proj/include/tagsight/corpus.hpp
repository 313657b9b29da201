#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tagsight {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using FeatureMatrix = RowMatrix<float>;

inline constexpr std::size_t kMaxTagsPerPost = 30;
inline constexpr double kPosteriorRowTolerance = 1e-3;

enum class ClassRole : std::uint8_t { other = 0, food = 1, container = 2 };

struct PosteriorMatrix {
  RowMatrix<float> probs;
  std::vector<std::string> class_names;
  std::vector<ClassRole> class_roles;

  Eigen::Index classes() const { return probs.cols(); }
  std::optional<Eigen::Index> find_class(std::string_view name) const;
  std::size_t count_role(ClassRole role) const;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Post {
  std::string id;
  std::vector<std::string> tags;  // normalized, sorted, unique
  std::optional<GeoPoint> geotag;
  std::uint64_t likes = 0;
  std::uint64_t comments = 0;
  std::uint32_t row = 0;

  bool has_tag(std::string_view tag) const;

  friend bool operator==(const Post&, const Post&) = default;
};

// Lowercases, strips one leading '#', trims surrounding whitespace and applies
// NFC composition. Throws RejectedTag if nothing is left.
std::string normalize_tag(std::string_view raw);

bool valid_geotag(double lat, double lon);

// Immutable after construction. Post i owns row i of every matrix.
class Corpus {
 public:
  Corpus(std::vector<Post> posts, FeatureMatrix features,
         std::optional<PosteriorMatrix> posteriors = std::nullopt);

  std::size_t size() const { return posts_.size(); }
  bool empty() const { return posts_.empty(); }
  Eigen::Index dim() const { return features_.cols(); }

  const std::vector<Post>& posts() const { return posts_; }
  const Post& post(std::size_t row) const { return posts_.at(row); }

  const FeatureMatrix& features() const { return features_; }

  bool has_posteriors() const { return posteriors_.has_value(); }
  // Throws MissingData when the corpus was ingested without posteriors.
  const PosteriorMatrix& posteriors() const;

  friend bool operator==(const Corpus& a, const Corpus& b);

 private:
  std::vector<Post> posts_;
  FeatureMatrix features_;
  std::optional<PosteriorMatrix> posteriors_;
};

using CorpusPtr = std::shared_ptr<const Corpus>;

// A subset of corpus rows, sorted ascending. Filters produce these instead of
// copying matrices.
class CorpusView {
 public:
  CorpusView(CorpusPtr corpus, std::vector<std::uint32_t> rows);
  static CorpusView all(CorpusPtr corpus);

  const Corpus& corpus() const { return *corpus_; }
  const CorpusPtr& corpus_ptr() const { return corpus_; }
  std::span<const std::uint32_t> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool contains(std::uint32_t row) const;

  friend bool operator==(const CorpusView& a, const CorpusView& b) {
    return a.corpus_ == b.corpus_ && a.rows_ == b.rows_;
  }

 private:
  CorpusPtr corpus_;
  std::vector<std::uint32_t> rows_;
};

struct IngestReport {
  std::size_t records = 0;  // non-blank metadata lines
  std::size_t posts = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t dropped_geotags = 0;
  std::size_t rejected_tags = 0;
  std::vector<std::string> warnings;
};

struct IngestResult {
  CorpusPtr corpus;
  IngestReport report;
};

IngestResult ingest(const std::filesystem::path& metadata_path,
                    const std::filesystem::path& feature_path,
                    const std::optional<std::filesystem::path>& posterior_path = std::nullopt);

// Writes the three corpus files so that ingest() reproduces an equal corpus.
void write_corpus(const Corpus& corpus, const std::filesystem::path& metadata_path,
                  const std::filesystem::path& feature_path,
                  const std::optional<std::filesystem::path>& posterior_path = std::nullopt);

std::string metadata_line(const Post& post);

// Matrix file: "TSGM0001", u32 n, u32 d, n*d little-endian float32 row-major.
// Posterior files append u32 count, then per class a u32 byte length, the UTF-8
// name and one role byte.
FeatureMatrix read_matrix(const std::filesystem::path& path);
PosteriorMatrix read_posteriors(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m);
void write_posteriors(const std::filesystem::path& path, const PosteriorMatrix& p);

struct TagEntry {
  std::string tag;
  std::vector<std::uint32_t> postings;  // ascending rows
  std::size_t rank = 0;                 // 1 = most frequent

  std::size_t frequency() const { return postings.size(); }
};

class TagIndex {
 public:
  // Top `top_k` tags by frequency, ties broken lexicographically. top_k larger
  // than the vocabulary indexes every tag.
  static TagIndex build(const Corpus& corpus, std::size_t top_k);

  std::span<const TagEntry> ranked() const { return entries_; }
  const TagEntry* find(std::string_view tag) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<TagEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> by_tag_;
};

inline TagIndex build_tag_index(const Corpus& corpus, std::size_t top_k) {
  return TagIndex::build(corpus, top_k);
}

}  // namespace tagsight
