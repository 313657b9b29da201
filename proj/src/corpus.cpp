#include "tagsight/corpus.hpp"
#include "tagsight/error.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

namespace tagsight {

using json = nlohmann::json;

std::optional<Eigen::Index> PosteriorMatrix::find_class(std::string_view name) const {
  const auto it = std::find(class_names.begin(), class_names.end(), name);
  if (it == class_names.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - class_names.begin());
}

std::size_t PosteriorMatrix::count_role(ClassRole role) const {
  return static_cast<std::size_t>(std::count(class_roles.begin(), class_roles.end(), role));
}

bool Post::has_tag(std::string_view tag) const {
  return std::binary_search(tags.begin(), tags.end(), tag, std::less<>{});
}

Corpus::Corpus(std::vector<Post> posts, FeatureMatrix features,
               std::optional<PosteriorMatrix> posteriors)
    : posts_(std::move(posts)), features_(std::move(features)), posteriors_(std::move(posteriors)) {
  const auto n = static_cast<Eigen::Index>(posts_.size());
  if (features_.rows() != n) {
    throw DataError("feature matrix has " + std::to_string(features_.rows()) + " rows for " +
                    std::to_string(n) + " posts");
  }
  if (!features_.allFinite()) throw ValidationError("feature matrix contains non-finite values");

  std::unordered_set<std::string_view> ids;
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    const Post& p = posts_[i];
    if (p.row != i) throw ValidationError("post " + p.id + " is not stored at its row");
    if (!ids.insert(p.id).second) throw ValidationError("duplicate post id " + p.id);
    if (p.tags.size() > kMaxTagsPerPost) throw ValidationError("post " + p.id + " has too many tags");
    if (!std::is_sorted(p.tags.begin(), p.tags.end()) ||
        std::adjacent_find(p.tags.begin(), p.tags.end()) != p.tags.end()) {
      throw ValidationError("tags of post " + p.id + " are not sorted and unique");
    }
    if (p.geotag && !valid_geotag(p.geotag->lat, p.geotag->lon)) {
      throw ValidationError("post " + p.id + " has an out-of-range geotag");
    }
  }

  if (posteriors_) {
    const PosteriorMatrix& pm = *posteriors_;
    if (pm.probs.rows() != n) {
      throw DataError("posterior matrix has " + std::to_string(pm.probs.rows()) + " rows for " +
                      std::to_string(n) + " posts");
    }
    if (pm.class_names.size() != static_cast<std::size_t>(pm.probs.cols()) ||
        pm.class_roles.size() != pm.class_names.size()) {
      throw DataError("posterior class table does not match the matrix width");
    }
    if (!pm.probs.allFinite() || (pm.probs.array() < 0.0f).any() ||
        (pm.probs.array() > 1.0f).any()) {
      throw ValidationError("posterior entries must lie in [0, 1]");
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      const double sum = pm.probs.row(r).cast<double>().sum();
      if (std::abs(sum - 1.0) > kPosteriorRowTolerance) {
        throw ValidationError("posterior row " + std::to_string(r) + " sums to " +
                              std::to_string(sum));
      }
    }
  }
}

const PosteriorMatrix& Corpus::posteriors() const {
  if (!posteriors_) throw MissingData("corpus was ingested without a posterior matrix");
  return *posteriors_;
}

bool operator==(const Corpus& a, const Corpus& b) {
  if (a.posts_ != b.posts_ || a.features_ != b.features_) return false;
  if (a.posteriors_.has_value() != b.posteriors_.has_value()) return false;
  if (!a.posteriors_) return true;
  const PosteriorMatrix& pa = *a.posteriors_;
  const PosteriorMatrix& pb = *b.posteriors_;
  return pa.probs == pb.probs && pa.class_names == pb.class_names &&
         pa.class_roles == pb.class_roles;
}

CorpusView::CorpusView(CorpusPtr corpus, std::vector<std::uint32_t> rows)
    : corpus_(std::move(corpus)), rows_(std::move(rows)) {
  if (!corpus_) throw ValidationError("corpus view needs a corpus");
  std::sort(rows_.begin(), rows_.end());
  rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
  if (!rows_.empty() && rows_.back() >= corpus_->size()) {
    throw ValidationError("corpus view row out of range");
  }
}

CorpusView CorpusView::all(CorpusPtr corpus) {
  std::vector<std::uint32_t> rows(corpus ? corpus->size() : 0);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
  return CorpusView(std::move(corpus), std::move(rows));
}

bool CorpusView::contains(std::uint32_t row) const {
  return std::binary_search(rows_.begin(), rows_.end(), row);
}

namespace {

std::uint64_t count_field(const json& record, const char* key) {
  if (!record.contains(key) || record[key].is_null()) return 0;
  const json& v = record[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw ValidationError(std::string(key) + " must be a non-negative integer");
}

// Parses one metadata record. Throws ValidationError for a malformed record.
Post parse_record(const std::string& line, IngestReport& report) {
  const json record = json::parse(line);
  if (!record.is_object()) throw ValidationError("record is not an object");
  if (!record.contains("id") || !record["id"].is_string() ||
      record["id"].get<std::string>().empty()) {
    throw ValidationError("record has no id");
  }
  Post post;
  post.id = record["id"].get<std::string>();

  if (record.contains("tags") && !record["tags"].is_null()) {
    if (!record["tags"].is_array()) throw ValidationError("tags must be an array");
    std::set<std::string> tags;
    for (const json& t : record["tags"]) {
      if (!t.is_string()) throw ValidationError("tag must be a string");
      try {
        tags.insert(normalize_tag(t.get<std::string>()));
      } catch (const RejectedTag&) {
        ++report.rejected_tags;
      }
    }
    if (tags.size() > kMaxTagsPerPost) {
      throw ValidationError("post " + post.id + " carries " + std::to_string(tags.size()) +
                            " tags");
    }
    post.tags.assign(tags.begin(), tags.end());
  }

  const bool has_lat = record.contains("lat") && !record["lat"].is_null();
  const bool has_lon = record.contains("lon") && !record["lon"].is_null();
  if (has_lat || has_lon) {
    const bool numeric = has_lat && has_lon && record["lat"].is_number() && record["lon"].is_number();
    if (numeric && valid_geotag(record["lat"].get<double>(), record["lon"].get<double>())) {
      post.geotag = GeoPoint{record["lat"].get<double>(), record["lon"].get<double>()};
    } else {
      ++report.dropped_geotags;
      report.warnings.push_back("post " + post.id + ": geotag dropped");
    }
  }

  post.likes = count_field(record, "likes");
  post.comments = count_field(record, "comments");
  return post;
}

template <typename Matrix>
Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& keep) {
  if (static_cast<Eigen::Index>(keep.size()) == m.rows()) return m;
  return m(keep, Eigen::all);
}

}  // namespace

IngestResult ingest(const std::filesystem::path& metadata_path,
                    const std::filesystem::path& feature_path,
                    const std::optional<std::filesystem::path>& posterior_path) {
  std::ifstream in(metadata_path);
  if (!in) throw DataError("cannot open metadata file " + metadata_path.string());

  IngestReport report;
  std::vector<Post> posts;
  std::vector<Eigen::Index> keep;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto record_row = static_cast<Eigen::Index>(report.records++);
    try {
      Post post = parse_record(line, report);
      if (!seen.insert(post.id).second) {
        ++report.duplicates;
        report.warnings.push_back("line " + std::to_string(line_no) + ": duplicate id " + post.id);
        continue;
      }
      post.row = static_cast<std::uint32_t>(posts.size());
      posts.push_back(std::move(post));
      keep.push_back(record_row);
    } catch (const std::exception& e) {  // json::parse_error or ValidationError
      ++report.malformed;
      report.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  FeatureMatrix features = read_matrix(feature_path);
  if (features.rows() != static_cast<Eigen::Index>(report.records)) {
    throw DataError("metadata has " + std::to_string(report.records) + " records but " +
                    feature_path.string() + " has " + std::to_string(features.rows()) + " rows");
  }
  std::optional<PosteriorMatrix> posteriors;
  if (posterior_path) {
    posteriors = read_posteriors(*posterior_path);
    if (posteriors->probs.rows() != static_cast<Eigen::Index>(report.records)) {
      throw DataError("metadata has " + std::to_string(report.records) + " records but " +
                      posterior_path->string() + " has " +
                      std::to_string(posteriors->probs.rows()) + " rows");
    }
    posteriors->probs = select_rows(posteriors->probs, keep);
  }
  features = select_rows(features, keep);

  report.posts = posts.size();
  for (const auto& w : report.warnings) spdlog::debug("ingest: {}", w);
  if (report.malformed + report.duplicates + report.dropped_geotags > 0) {
    spdlog::warn("ingest: {} malformed, {} duplicate, {} geotags dropped", report.malformed,
                 report.duplicates, report.dropped_geotags);
  }
  auto corpus = std::make_shared<const Corpus>(std::move(posts), std::move(features),
                                               std::move(posteriors));
  return {std::move(corpus), std::move(report)};
}

std::string metadata_line(const Post& post) {
  json record;
  record["id"] = post.id;
  record["tags"] = post.tags;
  if (post.geotag) {
    record["lat"] = post.geotag->lat;
    record["lon"] = post.geotag->lon;
  } else {
    record["lat"] = nullptr;
    record["lon"] = nullptr;
  }
  record["likes"] = post.likes;
  record["comments"] = post.comments;
  return record.dump();
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& metadata_path,
                  const std::filesystem::path& feature_path,
                  const std::optional<std::filesystem::path>& posterior_path) {
  {
    std::ofstream out(metadata_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + metadata_path.string());
    for (const Post& p : corpus.posts()) out << metadata_line(p) << '\n';
    if (!out) throw DataError("failed writing " + metadata_path.string());
  }
  write_matrix(feature_path, corpus.features());
  if (posterior_path) write_posteriors(*posterior_path, corpus.posteriors());
}

TagIndex TagIndex::build(const Corpus& corpus, std::size_t top_k) {
  if (corpus.empty()) throw ValidationError("cannot index an empty corpus");
  if (top_k == 0) throw ValidationError("top_k must be at least 1");

  std::map<std::string, std::vector<std::uint32_t>, std::less<>> postings;
  for (const Post& p : corpus.posts()) {
    for (const std::string& t : p.tags) postings[t].push_back(p.row);
  }
  std::vector<TagEntry> all;
  all.reserve(postings.size());
  for (auto& [tag, rows] : postings) all.push_back(TagEntry{tag, std::move(rows), 0});
  // std::map iteration is already lexicographic, so a stable sort on frequency
  // leaves ties in tag order.
  std::stable_sort(all.begin(), all.end(), [](const TagEntry& a, const TagEntry& b) {
    return a.frequency() > b.frequency();
  });
  if (all.size() > top_k) all.resize(top_k);

  TagIndex index;
  index.entries_ = std::move(all);
  for (std::size_t i = 0; i < index.entries_.size(); ++i) {
    index.entries_[i].rank = i + 1;
    index.by_tag_.emplace(index.entries_[i].tag, i);
  }
  return index;
}

const TagEntry* TagIndex::find(std::string_view tag) const {
  const auto it = by_tag_.find(tag);
  return it == by_tag_.end() ? nullptr : &entries_[it->second];
}

}  // namespace tagsight
