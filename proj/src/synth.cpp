#include "tagsight/synth.hpp"
#include "tagsight/error.hpp"
#include "tagsight/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tagsight::synth {
namespace {

struct Anchor {
  Continent continent;
  double lat;
  double lon;
};

// Interior points whose +-1.2 degree box lies inside one country of the
// bundled 1:110m atlas.
constexpr Anchor kAnchors[] = {
    {Continent::africa, 9.0, 8.0},          {Continent::africa, -2.0, 23.0},
    {Continent::africa, 15.0, 30.0},        {Continent::africa, -30.0, 24.0},
    {Continent::asia, 35.0, 105.0},         {Continent::asia, 22.0, 79.0},
    {Continent::asia, 48.0, 68.0},          {Continent::australia, -25.0, 134.0},
    {Continent::australia, -30.0, 120.0},   {Continent::australia, -22.0, 145.0},
    {Continent::europe, 46.5, 2.5},         {Continent::europe, 51.0, 10.0},
    {Continent::europe, 40.0, -3.5},        {Continent::europe, 52.0, 20.0},
    {Continent::north_america, 39.0, -98.0}, {Continent::north_america, 56.0, -106.0},
    {Continent::north_america, 24.0, -103.0}, {Continent::south_america, -10.0, -53.0},
    {Continent::south_america, -34.0, -64.0}, {Continent::south_america, -10.0, -75.0},
    {Continent::antarctica, -80.0, 0.0},    {Continent::antarctica, -75.0, 100.0},
};
constexpr double kJitterDegrees = 1.0;

void check_fraction(double v, const std::string& name, bool open = false) {
  const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
  if (!ok || !std::isfinite(v)) {
    throw ValidationError(name + " must lie in " + (open ? "(0, 1)" : "[0, 1]"));
  }
}

// Confident row: mass p on class c, the rest spread with random weights.
void fill_confident(Eigen::Ref<RowMatrix<float>::RowXpr::PlainObject> row, std::size_t c, Rng& rng) {
  const auto k = row.size();
  const double p = rng.uniform(0.6, 0.95);
  Eigen::VectorXd rest(k);
  for (Eigen::Index j = 0; j < k; ++j) rest(j) = rng.uniform(0.5, 1.5);
  rest(static_cast<Eigen::Index>(c)) = 0.0;
  rest *= (1.0 - p) / rest.sum();
  rest(static_cast<Eigen::Index>(c)) = p;
  row = rest.cast<float>().transpose();
}

void fill_flat(Eigen::Ref<RowMatrix<float>::RowXpr::PlainObject> row, Rng& rng) {
  const auto k = row.size();
  Eigen::VectorXd w(k);
  for (Eigen::Index j = 0; j < k; ++j) w(j) = rng.uniform(0.5, 1.5);
  row = (w / w.sum()).cast<float>().transpose();
}

}  // namespace

PosteriorMatrix class_table() {
  PosteriorMatrix pm;
  const std::vector<std::string> food = {"pizza",   "ice cream", "burrito",  "cheeseburger",
                                         "hotdog",  "carbonara", "hot pot",  "chocolate sauce"};
  const std::vector<std::string> containers = {"plate", "soup bowl", "mixing bowl",
                                               "tray",  "coffee mug", "frying pan"};
  const std::vector<std::string> other = {"website", "restaurant", "book jacket", "comic book",
                                          "wig",     "menu",       "packet",      "envelope",
                                          "lipstick", "sunglasses"};
  for (const auto& n : food) {
    pm.class_names.push_back(n);
    pm.class_roles.push_back(ClassRole::food);
  }
  for (const auto& n : containers) {
    pm.class_names.push_back(n);
    pm.class_roles.push_back(ClassRole::container);
  }
  for (const auto& n : other) {
    pm.class_names.push_back(n);
    pm.class_roles.push_back(ClassRole::other);
  }
  pm.probs.resize(0, static_cast<Eigen::Index>(pm.class_names.size()));
  return pm;
}

double GroundTruth::food_fraction() const {
  if (kind.empty()) return 0.0;
  return static_cast<double>(std::count(kind.begin(), kind.end(), PostKind::food)) /
         static_cast<double>(kind.size());
}

void validate(const SynthSpec& spec) {
  if (spec.n_posts == 0) throw ValidationError("n_posts must be at least 1");
  if (spec.dim == 0) throw ValidationError("dim must be at least 1");
  check_fraction(spec.false_positive_rate, "false_positive_rate");
  check_fraction(spec.food_fraction, "food_fraction");
  check_fraction(spec.distractor_fraction, "distractor_fraction");
  check_fraction(spec.container_fraction, "container_fraction");
  check_fraction(spec.food_confident_fraction, "food_confident_fraction");
  check_fraction(spec.nonfood_confident_fraction, "nonfood_confident_fraction");
  check_fraction(spec.geotag_fraction, "geotag_fraction");
  if (spec.food_fraction + spec.distractor_fraction > 1.0 + 1e-12) {
    throw ValidationError("food_fraction + distractor_fraction must not exceed 1");
  }
  std::set<std::string> seen;
  for (const VisualTag& t : spec.visual_tags) {
    check_fraction(t.prevalence, "prevalence of " + t.tag, true);
    if (!(t.separation >= 0.0) || !std::isfinite(t.separation)) {
      throw ValidationError("separation of " + t.tag + " must be >= 0");
    }
    if (normalize_tag(t.tag) != t.tag || !seen.insert(t.tag).second) {
      throw ValidationError("visual tag '" + t.tag + "' must be normalized and unique");
    }
  }
  for (const NonVisualTag& t : spec.nonvisual_tags) {
    check_fraction(t.prevalence, "prevalence of " + t.tag, true);
    if (normalize_tag(t.tag) != t.tag || !seen.insert(t.tag).second) {
      throw ValidationError("non-visual tag '" + t.tag + "' must be normalized and unique");
    }
  }
  for (const TagCluster& c : spec.clusters) {
    check_fraction(c.prevalence, "cluster prevalence", true);
    if (c.tags.empty()) throw ValidationError("cluster without tags");
    for (const auto& t : c.tags) {
      if (normalize_tag(t) != t) throw ValidationError("cluster tag '" + t + "' is not normalized");
    }
  }
  for (const auto& [continent, weight] : spec.geo_mixture) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw ValidationError("geo weights must be non-negative");
    }
  }
  if (spec.false_positive_rate > 0.0 && spec.false_positive_target == FalsePositiveTarget::distractor &&
      spec.distractor_fraction == 0.0) {
    throw ValidationError("false positives target distractor posts but distractor_fraction is 0");
  }
}

SynthSpec parse_spec(std::string_view text) {
  SynthSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ValidationError("synth spec line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    // Comments are whole lines or start at " # "; tags may still begin with '#'.
    if (const auto first = line.find_first_not_of(" \t"); first != std::string::npos && line[first] == '#') {
      line.clear();
    } else if (const auto hash = line.find(" # "); hash != std::string::npos) {
      line.erase(hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::istringstream key_in(line.substr(0, eq));
    std::string key;
    key_in >> key;
    std::istringstream value(line.substr(eq + 1));
    auto number = [&]() {
      double v;
      if (!(value >> v)) fail("expected a number for " + key);
      return v;
    };
    auto word = [&]() {
      std::string w;
      if (!(value >> w)) fail("expected a word for " + key);
      return w;
    };
    auto count = [&]() {
      const double v = number();
      if (v < 0 || v != std::floor(v)) fail(key + " must be a non-negative integer");
      return static_cast<std::size_t>(v);
    };
    if (key == "n_posts") spec.n_posts = count();
    else if (key == "dim") spec.dim = count();
    else if (key == "seed") {
      std::uint64_t s;
      if (!(value >> s)) fail("seed must be an unsigned integer");
      spec.seed = s;
    } else if (key == "false_positive_rate") spec.false_positive_rate = number();
    else if (key == "false_positive_target") {
      const std::string w = word();
      if (w == "any") spec.false_positive_target = FalsePositiveTarget::any;
      else if (w == "distractor") spec.false_positive_target = FalsePositiveTarget::distractor;
      else fail("false_positive_target must be any or distractor");
    } else if (key == "food_fraction") spec.food_fraction = number();
    else if (key == "distractor_fraction") spec.distractor_fraction = number();
    else if (key == "container_fraction") spec.container_fraction = number();
    else if (key == "food_confident_fraction") spec.food_confident_fraction = number();
    else if (key == "nonfood_confident_fraction") spec.nonfood_confident_fraction = number();
    else if (key == "geotag_fraction") spec.geotag_fraction = number();
    else if (key == "visual_tag") {
      VisualTag t;
      t.tag = normalize_tag(word());
      t.separation = number();
      t.prevalence = number();
      spec.visual_tags.push_back(std::move(t));
    } else if (key == "nonvisual_tag") {
      NonVisualTag t;
      t.tag = normalize_tag(word());
      t.prevalence = number();
      spec.nonvisual_tags.push_back(std::move(t));
    } else if (key == "cluster") {
      TagCluster c;
      c.prevalence = number();
      const std::string where = word();
      if (where != "*") c.continent = parse_continent(where);
      std::string t;
      while (value >> t) c.tags.push_back(normalize_tag(t));
      spec.clusters.push_back(std::move(c));
    } else if (key == "geo_weight") {
      const Continent c = parse_continent(word());
      spec.geo_mixture[c] = number();
    } else {
      fail("unknown key '" + key + "'");
    }
    std::string extra;
    if (key != "cluster" && (value >> extra)) fail("trailing text after " + key);
  }
  validate(spec);
  return spec;
}

SynthSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synth spec " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

SynthCorpus generate(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const std::size_t n = spec.n_posts;
  const auto d = static_cast<Eigen::Index>(spec.dim);

  PosteriorMatrix posteriors = class_table();
  const auto k = posteriors.classes();
  posteriors.probs.resize(static_cast<Eigen::Index>(n), k);
  std::vector<std::size_t> food_classes, other_classes;
  for (std::size_t c = 0; c < posteriors.class_names.size(); ++c) {
    if (posteriors.class_roles[c] == ClassRole::food) food_classes.push_back(c);
    if (posteriors.class_roles[c] == ClassRole::other && c != static_cast<std::size_t>(*posteriors.find_class("website")) &&
        c != static_cast<std::size_t>(*posteriors.find_class("restaurant")) &&
        c != static_cast<std::size_t>(*posteriors.find_class("book jacket")) &&
        c != static_cast<std::size_t>(*posteriors.find_class("comic book")) &&
        c != static_cast<std::size_t>(*posteriors.find_class("wig"))) {
      other_classes.push_back(c);
    }
  }
  const auto plate = static_cast<std::size_t>(*posteriors.find_class("plate"));
  const auto website = static_cast<std::size_t>(*posteriors.find_class("website"));

  std::vector<std::pair<Continent, double>> mixture;
  if (spec.geo_mixture.empty()) {
    for (Continent c : kContinents) {
      if (c != Continent::antarctica) mixture.emplace_back(c, 1.0);
    }
  } else {
    mixture.assign(spec.geo_mixture.begin(), spec.geo_mixture.end());
  }
  double mixture_total = 0.0;
  for (const auto& [c, w] : mixture) mixture_total += w;

  GroundTruth truth;
  truth.kind.resize(n);
  truth.confident.resize(n);
  truth.continent.resize(n);
  std::vector<Post> posts(n);
  std::vector<std::set<std::string>> tags(n);

  // Post kind, posterior row and geotag.
  for (std::size_t i = 0; i < n; ++i) {
    Post& p = posts[i];
    p.row = static_cast<std::uint32_t>(i);
    char id[32];
    std::snprintf(id, sizeof id, "s%07zu", i);
    p.id = id;
    auto row = posteriors.probs.row(static_cast<Eigen::Index>(i));
    RowMatrix<float>::RowXpr::PlainObject buffer(k);

    const double u = rng.uniform();
    std::optional<std::size_t> confident;
    if (u < spec.distractor_fraction) {
      truth.kind[i] = PostKind::distractor;
      confident = website;
    } else if (u < spec.distractor_fraction + spec.food_fraction) {
      truth.kind[i] = PostKind::food;
      if (rng.bernoulli(spec.container_fraction)) {
        confident = plate;
      } else if (rng.bernoulli(spec.food_confident_fraction)) {
        confident = food_classes[rng.below(food_classes.size())];
      }
    } else {
      truth.kind[i] = PostKind::nonfood;
      if (rng.bernoulli(spec.nonfood_confident_fraction)) {
        confident = other_classes[rng.below(other_classes.size())];
      }
    }
    if (confident) {
      fill_confident(buffer, *confident, rng);
    } else {
      fill_flat(buffer, rng);
    }
    row = buffer;
    truth.confident[i] = confident;

    if (mixture_total > 0.0 && rng.bernoulli(spec.geotag_fraction)) {
      double pick = rng.uniform() * mixture_total;
      Continent chosen = mixture.back().first;
      for (const auto& [c, w] : mixture) {
        if (pick < w) {
          chosen = c;
          break;
        }
        pick -= w;
      }
      std::vector<const Anchor*> candidates;
      for (const Anchor& a : kAnchors) {
        if (a.continent == chosen) candidates.push_back(&a);
      }
      const Anchor& a = *candidates[rng.below(candidates.size())];
      p.geotag = GeoPoint{a.lat + rng.uniform(-kJitterDegrees, kJitterDegrees),
                          a.lon + rng.uniform(-kJitterDegrees, kJitterDegrees)};
      truth.continent[i] = chosen;
    }
    p.likes = rng.below(200);
    p.comments = rng.below(20);
  }

  // Features: isotropic noise plus one mean shift per visual tag whose content
  // the post shows.
  FeatureMatrix features(static_cast<Eigen::Index>(n), d);
  RowMatrix<double> shifted(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < shifted.size(); ++i) shifted.data()[i] = rng.normal();

  std::vector<std::uint32_t> distractors;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth.kind[i] == PostKind::distractor) distractors.push_back(static_cast<std::uint32_t>(i));
  }

  for (const VisualTag& vt : spec.visual_tags) {
    Eigen::VectorXd dir(d);
    for (Eigen::Index j = 0; j < d; ++j) dir(j) = rng.normal();
    dir.normalize();
    truth.directions[vt.tag] = dir;

    std::vector<std::uint32_t>& content = truth.content_rows[vt.tag];
    for (std::size_t i = 0; i < n; ++i) {
      if (truth.kind[i] != PostKind::distractor && rng.bernoulli(vt.prevalence)) {
        content.push_back(static_cast<std::uint32_t>(i));
        shifted.row(static_cast<Eigen::Index>(i)) += vt.separation * dir.transpose();
        tags[i].insert(vt.tag);
      }
    }

    // Move a fraction of assignments onto posts without the content.
    std::vector<std::uint32_t>& moved = truth.false_positive_rows[vt.tag];
    if (spec.false_positive_rate > 0.0) {
      const bool to_distractors = spec.false_positive_target == FalsePositiveTarget::distractor;
      for (std::uint32_t row : content) {
        if (!rng.bernoulli(spec.false_positive_rate)) continue;
        const std::vector<std::uint32_t>* pool = to_distractors ? &distractors : nullptr;
        std::uint32_t target = 0;
        bool found = false;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
          target = pool ? (*pool)[rng.below(pool->size())] : static_cast<std::uint32_t>(rng.below(n));
          found = !tags[target].contains(vt.tag) &&
                  !std::binary_search(content.begin(), content.end(), target);
        }
        if (!found) continue;
        tags[row].erase(vt.tag);
        tags[target].insert(vt.tag);
        moved.push_back(target);
      }
      std::sort(moved.begin(), moved.end());
    }
  }
  features = shifted.cast<float>();

  for (const NonVisualTag& t : spec.nonvisual_tags) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(t.prevalence)) tags[i].insert(t.tag);
    }
  }
  for (const TagCluster& c : spec.clusters) {
    for (std::size_t i = 0; i < n; ++i) {
      if (c.continent && truth.continent[i] != c.continent) continue;
      if (rng.bernoulli(c.prevalence)) tags[i].insert(c.tags.begin(), c.tags.end());
    }
  }

  std::set<std::string> protected_tags;
  for (const VisualTag& vt : spec.visual_tags) protected_tags.insert(vt.tag);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> list(tags[i].begin(), tags[i].end());
    if (list.size() > kMaxTagsPerPost) {
      ++truth.capped_posts;
      for (auto it = list.end(); list.size() > kMaxTagsPerPost && it != list.begin();) {
        --it;
        if (!protected_tags.contains(*it)) it = list.erase(it);
      }
    }
    posts[i].tags = std::move(list);
  }

  auto corpus = std::make_shared<const Corpus>(std::move(posts), std::move(features),
                                               std::move(posteriors));
  return {std::move(corpus), std::move(truth)};
}

std::string ground_truth_json(const SynthSpec& spec, const GroundTruth& truth) {
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["n_posts"] = spec.n_posts;
  j["dim"] = spec.dim;
  j["true_food_fraction"] = truth.food_fraction();
  j["capped_posts"] = truth.capped_posts;
  auto& kinds = j["kind_counts"];
  kinds["food"] = std::count(truth.kind.begin(), truth.kind.end(), PostKind::food);
  kinds["nonfood"] = std::count(truth.kind.begin(), truth.kind.end(), PostKind::nonfood);
  kinds["distractor"] = std::count(truth.kind.begin(), truth.kind.end(), PostKind::distractor);
  for (const VisualTag& vt : spec.visual_tags) {
    auto& t = j["visual_tags"][vt.tag];
    t["separation"] = vt.separation;
    t["prevalence"] = vt.prevalence;
    t["content_rows"] = truth.content_rows.at(vt.tag);
    t["false_positive_rows"] = truth.false_positive_rows.at(vt.tag);
  }
  for (const NonVisualTag& t : spec.nonvisual_tags) j["nonvisual_tags"][t.tag] = t.prevalence;
  j["rows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < truth.kind.size(); ++i) {
    nlohmann::json row;
    row["kind"] = truth.kind[i] == PostKind::food ? "food"
                  : truth.kind[i] == PostKind::nonfood ? "nonfood"
                                                        : "distractor";
    if (truth.confident[i]) row["confident_class"] = *truth.confident[i];
    if (truth.continent[i]) row["continent"] = std::string(to_string(*truth.continent[i]));
    j["rows"].push_back(std::move(row));
  }
  return j.dump(1);
}

}  // namespace tagsight::synth
