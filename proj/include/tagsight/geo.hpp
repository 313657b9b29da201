#pragma once

#include "tagsight/continent.hpp"
#include "tagsight/corpus.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tagsight {

inline constexpr double kDefaultCoastalKm = 25.0;
inline constexpr double kEarthRadiusKm = 6371.0088;

struct Vertex {
  double lon = 0.0;
  double lat = 0.0;
};

struct Ring {
  std::string country;
  std::vector<Vertex> vertices;  // closed, longitudes unwrapped to be continuous
  double min_lon = 0.0, max_lon = 0.0, min_lat = 0.0, max_lat = 0.0;
};

// Countries are the union of their rings under the even-odd rule, so a hole is
// just another ring of the same country.
class CountryAtlas {
 public:
  static CountryAtlas parse(std::string_view text);
  static CountryAtlas load(const std::filesystem::path& path);

  void add_ring(std::string country, Continent continent, std::vector<Vertex> vertices);

  std::span<const Ring> rings() const { return rings_; }
  std::optional<Continent> continent_of(std::string_view country) const;
  std::size_t country_count() const { return continents_.size(); }

 private:
  std::vector<Ring> rings_;
  std::map<std::string, Continent, std::less<>> continents_;
};

// Bundled Natural Earth 1:110m atlas.
std::filesystem::path default_atlas_path();

// Even-odd containment of (lon, lat) in one ring, half-open on vertices.
bool ring_contains(const Ring& ring, double lon, double lat);

// Shortest great-circle distance from the point to any edge of the ring.
double ring_distance_km(const Ring& ring, double lat, double lon);

enum class Resolution { direct, coastal_fallback, unresolved };
std::string_view to_string(Resolution r);

struct GeoRecord {
  double lat = 0.0;
  double lon = 0.0;
  std::optional<std::string> country;
  std::optional<Continent> continent;
  Resolution resolution = Resolution::unresolved;
  double distance_km = 0.0;  // to the matched boundary for coastal fallbacks
};

// Direct hit first; otherwise the nearest boundary within coastal_km (0
// disables the fallback). Ties go to the lexicographically smaller country.
GeoRecord reverse_geocode(double lat, double lon, const CountryAtlas& atlas,
                          double coastal_km = kDefaultCoastalKm);

struct GeoStats {
  std::size_t n_posts = 0;
  std::size_t n_geotagged = 0;
  std::size_t n_resolved = 0;
  std::size_t n_coastal = 0;
  std::vector<std::optional<GeoRecord>> records;  // by corpus row, empty when not geotagged or outside the view
  std::map<std::string, std::size_t> country_counts;
  std::map<Continent, std::size_t> continent_counts;

  double geotagged_fraction() const;
  double resolved_fraction() const;  // of geotagged posts
  std::optional<Continent> continent(std::uint32_t row) const;
};

GeoStats geocode_corpus(const CorpusView& view, const CountryAtlas& atlas,
                        double coastal_km = kDefaultCoastalKm, std::size_t workers = 1);

// country,continent,posts
std::string country_csv(const GeoStats& stats);
// id,lat,lon,country,continent,resolution
std::string geo_records_csv(const CorpusView& view, const GeoStats& stats);

struct PosteriorFoodLabels {
  double threshold = 0.5;
};
struct VisualTagLabels {
  std::vector<std::string> tags;
};
using LabelSource = std::variant<PosteriorFoodLabels, VisualTagLabels>;

struct LabelCount {
  std::string label;
  std::size_t posts = 0;
};

struct BreakdownColumn {
  std::string name;  // "Overall" or a continent display name
  std::size_t n_posts = 0;
  std::vector<LabelCount> top;  // posts descending, then label
};

struct BreakdownTable {
  std::vector<BreakdownColumn> columns;  // Overall, then continents in enum order
};

// Posterior labels count posts whose confident class has the food role; tag
// labels count posts carrying each tag. Overall covers the whole view,
// continent columns only resolved posts. Continents without posts are omitted.
BreakdownTable continent_breakdown(const CorpusView& view, const GeoStats& stats,
                                   const LabelSource& source, std::size_t top_n);

// column,rank,label,posts
std::string breakdown_csv(const BreakdownTable& table);

}  // namespace tagsight
