#include "tagsight/geo.hpp"
#include "tagsight/csv.hpp"
#include "tagsight/error.hpp"
#include "tagsight/noise.hpp"
#include "tagsight/parallel.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <functional>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#ifndef TAGSIGHT_DATA_DIR
#define TAGSIGHT_DATA_DIR "data"
#endif

namespace tagsight {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kKmPerDegree = kEarthRadiusKm * kDeg;

Eigen::Vector3d unit(double lat, double lon) {
  return {std::cos(lat * kDeg) * std::cos(lon * kDeg), std::cos(lat * kDeg) * std::sin(lon * kDeg),
          std::sin(lat * kDeg)};
}

double angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Angular distance from p to the minor arc a-b.
double arc_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d n = a.cross(b);
  const double len = n.norm();
  const double endpoints = std::min(angle(p, a), angle(p, b));
  if (len < 1e-15) return endpoints;
  const Eigen::Vector3d nu = n / len;
  // Foot of the perpendicular lies on the arc when it is between a and b.
  const Eigen::Vector3d foot = p - p.dot(nu) * nu;
  if (foot.norm() < 1e-15) return endpoints;
  if (a.cross(foot).dot(nu) >= 0.0 && foot.cross(b).dot(nu) >= 0.0) {
    return std::min(endpoints, std::abs(std::asin(std::clamp(p.dot(nu), -1.0, 1.0))));
  }
  return endpoints;
}

bool at_pole(const Vertex& v) { return std::abs(v.lat) >= 90.0; }

// Candidate longitudes for a query so that rings unwrapped past +-180 match.
template <typename F>
bool any_shift(double lon, const Ring& ring, double pad, F&& f) {
  for (double shift : {0.0, -360.0, 360.0}) {
    const double x = lon + shift;
    if (x < ring.min_lon - pad || x > ring.max_lon + pad) continue;
    if (f(x)) return true;
  }
  return false;
}

}  // namespace

void CountryAtlas::add_ring(std::string country, Continent continent, std::vector<Vertex> vertices) {
  if (vertices.size() < 4) throw ValidationError("atlas ring for " + country + " has fewer than 4 vertices");
  if (vertices.front().lon != vertices.back().lon || vertices.front().lat != vertices.back().lat) {
    throw ValidationError("atlas ring for " + country + " is not closed");
  }
  for (const Vertex& v : vertices) {
    if (!valid_geotag(v.lat, v.lon)) throw ValidationError("atlas vertex out of range for " + country);
  }
  const auto [it, inserted] = continents_.emplace(country, continent);
  if (!inserted && it->second != continent) {
    throw ValidationError("country " + country + " mapped to two continents");
  }
  // Unwrap longitudes across the antimeridian; edges along a pole stay as they are.
  double offset = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double prev = vertices[i - 1].lon;
    double lon = vertices[i].lon + offset;
    if (!(at_pole(vertices[i - 1]) && at_pole(vertices[i]))) {
      if (lon - prev > 180.0) {
        offset -= 360.0;
        lon -= 360.0;
      } else if (prev - lon > 180.0) {
        offset += 360.0;
        lon += 360.0;
      }
    }
    vertices[i].lon = lon;
  }
  Ring ring;
  ring.country = std::move(country);
  ring.min_lon = ring.max_lon = vertices.front().lon;
  ring.min_lat = ring.max_lat = vertices.front().lat;
  for (const Vertex& v : vertices) {
    ring.min_lon = std::min(ring.min_lon, v.lon);
    ring.max_lon = std::max(ring.max_lon, v.lon);
    ring.min_lat = std::min(ring.min_lat, v.lat);
    ring.max_lat = std::max(ring.max_lat, v.lat);
  }
  ring.vertices = std::move(vertices);
  rings_.push_back(std::move(ring));
}

CountryAtlas CountryAtlas::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.substr(0, 9) != "TSATLAS 1") {
    throw DataError("atlas does not start with 'TSATLAS 1'");
  }
  CountryAtlas atlas;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    // Header: code \t continent \t count (continent names may contain spaces).
    const auto t1 = line.find('\t');
    const auto t2 = line.rfind('\t');
    if (t1 == std::string::npos || t2 == t1) {
      throw DataError(fmt::format("atlas line {}: expected 'code<TAB>continent<TAB>count'", line_no));
    }
    std::string code = line.substr(0, t1);
    Continent continent;
    std::size_t count = 0;
    try {
      continent = parse_continent(line.substr(t1 + 1, t2 - t1 - 1));
      count = std::stoul(line.substr(t2 + 1));
    } catch (const std::exception& e) {
      throw DataError(fmt::format("atlas line {}: {}", line_no, e.what()));
    }
    std::vector<Vertex> vertices;
    vertices.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      ++line_no;
      Vertex v;
      if (!std::getline(in, line) || !(std::istringstream(line) >> v.lon >> v.lat)) {
        throw DataError(fmt::format("atlas line {}: expected 'lon lat'", line_no));
      }
      vertices.push_back(v);
    }
    try {
      atlas.add_ring(std::move(code), continent, std::move(vertices));
    } catch (const ValidationError& e) {
      throw DataError(fmt::format("atlas line {}: {}", line_no, e.what()));
    }
  }
  return atlas;
}

CountryAtlas CountryAtlas::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingData("cannot open atlas " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<Continent> CountryAtlas::continent_of(std::string_view country) const {
  const auto it = continents_.find(country);
  if (it == continents_.end()) return std::nullopt;
  return it->second;
}

std::filesystem::path default_atlas_path() {
  return std::filesystem::path(TAGSIGHT_DATA_DIR) / "world_110m.tsatlas";
}

bool ring_contains(const Ring& ring, double lon, double lat) {
  if (lat < ring.min_lat || lat > ring.max_lat) return false;
  return any_shift(lon, ring, 0.0, [&](double x) {
    bool inside = false;
    const auto& v = ring.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      if ((v[i].lat > lat) != (v[j].lat > lat)) {
        const double cross = v[j].lon + (lat - v[j].lat) * (v[i].lon - v[j].lon) / (v[i].lat - v[j].lat);
        if (x < cross) inside = !inside;
      }
    }
    return inside;
  });
}

double ring_distance_km(const Ring& ring, double lat, double lon) {
  const Eigen::Vector3d p = unit(lat, lon);
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector3d prev = unit(ring.vertices.front().lat, ring.vertices.front().lon);
  for (std::size_t i = 1; i < ring.vertices.size(); ++i) {
    const Eigen::Vector3d cur = unit(ring.vertices[i].lat, ring.vertices[i].lon);
    best = std::min(best, arc_distance(p, prev, cur));
    prev = cur;
  }
  return best * kEarthRadiusKm;
}

std::string_view to_string(Resolution r) {
  switch (r) {
    case Resolution::direct: return "direct";
    case Resolution::coastal_fallback: return "coastal-fallback";
    case Resolution::unresolved: return "unresolved";
  }
  return "unresolved";
}

GeoRecord reverse_geocode(double lat, double lon, const CountryAtlas& atlas, double coastal_km) {
  if (!valid_geotag(lat, lon)) {
    throw ValidationError(fmt::format("coordinate ({}, {}) out of range", lat, lon));
  }
  if (!(coastal_km >= 0.0)) throw ValidationError("coastal_km must be >= 0");
  GeoRecord rec{lat, lon, std::nullopt, std::nullopt, Resolution::unresolved, 0.0};

  // Parity per country over all of its rings.
  std::map<std::string_view, bool> parity;
  for (const Ring& ring : atlas.rings()) {
    if (ring_contains(ring, lon, lat)) parity[ring.country] = !parity[ring.country];
  }
  for (const auto& [country, inside] : parity) {
    if (inside) {
      rec.country = std::string(country);
      rec.continent = atlas.continent_of(country);
      rec.resolution = Resolution::direct;
      return rec;
    }
  }
  if (coastal_km <= 0.0) return rec;

  const double lat_pad = coastal_km / kKmPerDegree * 1.01;
  const double reach = std::min(90.0, std::abs(lat) + lat_pad);
  const double lon_pad =
      reach >= 89.0 ? 360.0 : std::min(360.0, lat_pad / std::cos(reach * kDeg));
  double best = std::numeric_limits<double>::infinity();
  const Ring* nearest = nullptr;
  for (const Ring& ring : atlas.rings()) {
    if (lat < ring.min_lat - lat_pad || lat > ring.max_lat + lat_pad) continue;
    if (!any_shift(lon, ring, lon_pad, [](double) { return true; })) continue;
    const double d = ring_distance_km(ring, lat, lon);
    if (d < best || (d == best && nearest && ring.country < nearest->country)) {
      best = d;
      nearest = &ring;
    }
  }
  if (nearest && best <= coastal_km) {
    rec.country = nearest->country;
    rec.continent = atlas.continent_of(nearest->country);
    rec.resolution = Resolution::coastal_fallback;
    rec.distance_km = best;
  }
  return rec;
}

double GeoStats::geotagged_fraction() const {
  return n_posts ? static_cast<double>(n_geotagged) / static_cast<double>(n_posts) : 0.0;
}

double GeoStats::resolved_fraction() const {
  return n_geotagged ? static_cast<double>(n_resolved) / static_cast<double>(n_geotagged) : 0.0;
}

std::optional<Continent> GeoStats::continent(std::uint32_t row) const {
  if (row >= records.size() || !records[row]) return std::nullopt;
  return records[row]->continent;
}

GeoStats geocode_corpus(const CorpusView& view, const CountryAtlas& atlas, double coastal_km,
                        std::size_t workers) {
  GeoStats stats;
  stats.n_posts = view.size();
  stats.records.resize(view.corpus().size());
  std::vector<std::uint32_t> tagged;
  for (std::uint32_t row : view.rows()) {
    if (view.corpus().post(row).geotag) tagged.push_back(row);
  }
  parallel_for(tagged.size(), workers, [&](std::size_t i) {
    const GeoPoint& g = *view.corpus().post(tagged[i]).geotag;
    stats.records[tagged[i]] = reverse_geocode(g.lat, g.lon, atlas, coastal_km);
  });
  stats.n_geotagged = tagged.size();
  for (std::uint32_t row : tagged) {
    const GeoRecord& r = *stats.records[row];
    if (!r.country) continue;
    ++stats.n_resolved;
    if (r.resolution == Resolution::coastal_fallback) ++stats.n_coastal;
    ++stats.country_counts[*r.country];
    if (r.continent) ++stats.continent_counts[*r.continent];
  }
  return stats;
}

std::string country_csv(const GeoStats& stats) {
  // Continent per country is taken from any record of that country.
  std::map<std::string, std::string> continent;
  for (const auto& r : stats.records) {
    if (r && r->country && r->continent) continent[*r->country] = std::string(to_string(*r->continent));
  }
  std::string out = "country,continent,posts\n";
  for (const auto& [country, count] : stats.country_counts) {
    out += fmt::format("{},{},{}\n", csv_field(country), csv_field(continent[country]), count);
  }
  return out;
}

std::string geo_records_csv(const CorpusView& view, const GeoStats& stats) {
  std::string out = "id,lat,lon,country,continent,resolution\n";
  for (std::uint32_t row : view.rows()) {
    if (row >= stats.records.size() || !stats.records[row]) continue;
    const GeoRecord& r = *stats.records[row];
    out += fmt::format("{},{:.6f},{:.6f},{},{},{}\n", csv_field(view.corpus().post(row).id), r.lat,
                       r.lon, r.country.value_or(""),
                       r.continent ? csv_field(to_string(*r.continent)) : std::string(),
                       to_string(r.resolution));
  }
  return out;
}

BreakdownTable continent_breakdown(const CorpusView& view, const GeoStats& stats,
                                   const LabelSource& source, std::size_t top_n) {
  const Corpus& corpus = view.corpus();
  if (stats.records.size() != corpus.size()) {
    throw MissingData("geo statistics do not belong to this corpus");
  }
  // labels_of(row) -> labels carried by the post.
  std::vector<std::string> vocabulary;
  std::function<std::vector<std::size_t>(std::uint32_t)> labels_of;
  if (const auto* p = std::get_if<PosteriorFoodLabels>(&source)) {
    const PosteriorMatrix& pm = corpus.posteriors();
    vocabulary = pm.class_names;
    const double threshold = p->threshold;
    labels_of = [&pm, threshold](std::uint32_t row) -> std::vector<std::size_t> {
      const auto c = confident_class(pm.probs.row(row), threshold);
      if (c && pm.class_roles[static_cast<std::size_t>(c->index)] == ClassRole::food) {
        return {static_cast<std::size_t>(c->index)};
      }
      return {};
    };
  } else {
    const auto& tags = std::get<VisualTagLabels>(source).tags;
    if (tags.empty()) throw MissingData("no visual tags supplied for the breakdown");
    const std::set<std::string> unique(tags.begin(), tags.end());
    vocabulary.assign(unique.begin(), unique.end());
    labels_of = [&corpus, &vocabulary](std::uint32_t row) {
      std::vector<std::size_t> hits;
      const Post& post = corpus.post(row);
      for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        if (post.has_tag(vocabulary[i])) hits.push_back(i);
      }
      return hits;
    };
  }

  constexpr std::size_t kOverall = kContinents.size();
  std::vector<std::vector<std::size_t>> counts(kContinents.size() + 1,
                                               std::vector<std::size_t>(vocabulary.size(), 0));
  std::vector<std::size_t> posts(kContinents.size() + 1, 0);
  for (std::uint32_t row : view.rows()) {
    const auto labels = labels_of(row);
    const auto continent = stats.continent(row);
    ++posts[kOverall];
    if (continent) ++posts[static_cast<std::size_t>(*continent)];
    for (std::size_t l : labels) {
      ++counts[kOverall][l];
      if (continent) ++counts[static_cast<std::size_t>(*continent)][l];
    }
  }

  auto column = [&](std::size_t c, std::string name) {
    BreakdownColumn col{std::move(name), posts[c], {}};
    for (std::size_t l = 0; l < vocabulary.size(); ++l) {
      if (counts[c][l] > 0) col.top.push_back({vocabulary[l], counts[c][l]});
    }
    std::sort(col.top.begin(), col.top.end(), [](const LabelCount& a, const LabelCount& b) {
      return a.posts != b.posts ? a.posts > b.posts : a.label < b.label;
    });
    if (col.top.size() > top_n) col.top.resize(top_n);
    return col;
  };

  BreakdownTable table;
  table.columns.push_back(column(kOverall, "Overall"));
  for (Continent c : kContinents) {
    const auto i = static_cast<std::size_t>(c);
    if (posts[i] > 0) table.columns.push_back(column(i, std::string(to_string(c))));
  }
  return table;
}

std::string breakdown_csv(const BreakdownTable& table) {
  std::string out = "column,rank,label,posts\n";
  for (const BreakdownColumn& col : table.columns) {
    for (std::size_t i = 0; i < col.top.size(); ++i) {
      out += fmt::format("{},{},{},{}\n", csv_field(col.name), i + 1, csv_field(col.top[i].label),
                         col.top[i].posts);
    }
  }
  return out;
}

}  // namespace tagsight
