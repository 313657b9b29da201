#include "tagsight/corr.hpp"
#include "tagsight/csv.hpp"
#include "tagsight/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace tagsight {

double phi_coefficient(std::size_t n11, std::size_t n10, std::size_t n01, std::size_t n00) {
  const auto a = static_cast<double>(n11), b = static_cast<double>(n10);
  const auto c = static_cast<double>(n01), d = static_cast<double>(n00);
  const double denom = (a + b) * (c + d) * (a + c) * (b + d);
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double phi = (a * d - b * c) / std::sqrt(denom);
  return std::clamp(phi, -1.0, 1.0);
}

CorrelationMatrix tag_phi_matrix(const CorpusView& view, const std::vector<std::string>& tags) {
  if (tags.empty()) throw ValidationError("correlation needs at least one tag");
  if (view.size() < 2) throw InsufficientData("correlation needs at least two posts");
  const std::set<std::string> unique(tags.begin(), tags.end());
  if (unique.size() != tags.size()) throw ValidationError("correlation tags must be unique");

  const auto t = static_cast<Eigen::Index>(tags.size());
  // Indicator matrix, posts x tags; the Gram matrix gives every n11.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(view.size()), t);
  Eigen::Index r = 0;
  for (std::uint32_t row : view.rows()) {
    const Post& post = view.corpus().post(row);
    for (Eigen::Index j = 0; j < t; ++j) {
      if (post.has_tag(tags[static_cast<std::size_t>(j)])) x(r, j) = 1.0;
    }
    ++r;
  }
  const Eigen::MatrixXd both = x.transpose() * x;
  const Eigen::VectorXd count = x.colwise().sum().transpose();
  const auto n = static_cast<std::size_t>(view.size());

  CorrelationMatrix m;
  m.tags = tags;
  m.n = n;
  m.values.resize(t, t);
  m.defined.resize(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i; j < t; ++j) {
      const auto n11 = static_cast<std::size_t>(both(i, j));
      const auto ni = static_cast<std::size_t>(count(i)), nj = static_cast<std::size_t>(count(j));
      const double phi = phi_coefficient(n11, ni - n11, nj - n11, n - ni - nj + n11);
      m.values(i, j) = m.values(j, i) = phi;
      m.defined(i, j) = m.defined(j, i) = !std::isnan(phi);
    }
  }
  return m;
}

std::vector<TagPair> top_correlations(const CorrelationMatrix& m, std::size_t n, Sign sign) {
  std::vector<TagPair> pairs;
  const auto t = static_cast<Eigen::Index>(m.tags.size());
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) {
      if (!m.defined(i, j)) continue;
      const double phi = m.values(i, j);
      if (sign == Sign::positive ? !(phi > 0.0) : !(phi < 0.0)) continue;
      std::string a = m.tags[static_cast<std::size_t>(i)], b = m.tags[static_cast<std::size_t>(j)];
      if (b < a) std::swap(a, b);
      pairs.push_back({std::move(a), std::move(b), phi});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const TagPair& x, const TagPair& y) {
    if (std::abs(x.phi) != std::abs(y.phi)) return std::abs(x.phi) > std::abs(y.phi);
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  if (pairs.size() > n) pairs.resize(n);
  return pairs;
}

std::map<Continent, CorrelationMatrix> per_continent_correlations(
    const CorpusView& view, const GeoStats& stats, const std::vector<std::string>& tags,
    std::size_t min_posts) {
  std::map<Continent, std::vector<std::uint32_t>> rows;
  for (std::uint32_t row : view.rows()) {
    if (const auto c = stats.continent(row)) rows[*c].push_back(row);
  }
  std::map<Continent, CorrelationMatrix> out;
  for (auto& [continent, members] : rows) {
    if (members.size() < std::max<std::size_t>(min_posts, 2)) {
      spdlog::warn("skipping {} for correlations: {} posts, need {}", to_string(continent),
                   members.size(), min_posts);
      continue;
    }
    out.emplace(continent, tag_phi_matrix(CorpusView(view.corpus_ptr(), std::move(members)), tags));
  }
  return out;
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::string out = "tag";
  for (const auto& t : m.tags) out += "," + csv_field(t);
  out += '\n';
  for (std::size_t i = 0; i < m.tags.size(); ++i) {
    out += csv_field(m.tags[i]);
    for (std::size_t j = 0; j < m.tags.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
      out += m.defined(r, c) ? fmt::format(",{:.6f}", m.values(r, c)) : std::string(",n/a");
    }
    out += '\n';
  }
  return out;
}

}  // namespace tagsight
