#include "tagsight/cli.hpp"

#include "tagsight/corpus.hpp"
#include "tagsight/corr.hpp"
#include "tagsight/csv.hpp"
#include "tagsight/error.hpp"
#include "tagsight/geo.hpp"
#include "tagsight/noise.hpp"
#include "tagsight/parallel.hpp"
#include "tagsight/plot.hpp"
#include "tagsight/random.hpp"
#include "tagsight/report.hpp"
#include "tagsight/synth.hpp"
#include "tagsight/visualness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace tagsight::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Options {
  std::string corpus_dir;
  std::string metadata, features, posteriors, atlas, categories, spec, out = "out";
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  double threshold = kDefaultConfidence;
  double neg_ratio = 1.0;
  double test_fraction = 0.25;
  std::size_t top_k_tags = 1000;
  std::size_t k = 50;
  std::size_t top_n = kDefaultTopN;
  std::vector<std::string> filter, container, tags;
  std::string label_source = "posterior";
  double coastal_km = kDefaultCoastalKm;
  std::size_t min_posts = kMinContinentPosts;
  std::size_t min_positives = 20;
  double cost = 1.0;
  bool seed_given = false;
  bool no_plots = false;
};

class Run {
 public:
  Run(std::string command, const Options& opt, json config)
      : command_(std::move(command)), opt_(opt), config_(std::move(config)) {
    fs::create_directories(opt_.out);
  }

  template <typename F>
  auto stage(const std::string& name, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
      stages_.push_back({{"stage", name}, {"seconds", d.count()}});
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto result = f();
      finish();
      return result;
    }
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(opt_.out) / name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
    if (!f) throw DataError("failed writing " + path.string());
    outputs_.push_back(name);
  }

  void note_output(const std::string& name) { outputs_.push_back(name); }

  // Runs are merged by command so several commands can share one directory.
  void manifest() {
    const fs::path path = fs::path(opt_.out) / "run_manifest.json";
    json m = json::object();
    if (std::ifstream in(path); in) {
      try {
        m = json::parse(in);
      } catch (const json::exception&) {
        m = json::object();
      }
    }
    const std::string canonical = config_.dump();
    m["runs"][command_] = {
        {"config", config_},
        {"config_hash", fmt::format("{:016x}", fnv1a64(canonical))},
        {"seed", opt_.seed},
        {"workers", opt_.workers},
        {"stages", stages_},
        {"outputs", outputs_},
    };
    std::ofstream f(path, std::ios::binary);
    f << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  const Options& opt_;
  json config_;
  json stages_ = json::array();
  std::vector<std::string> outputs_;
};

struct Paths {
  fs::path metadata, features;
  std::optional<fs::path> posteriors;
};

Paths corpus_paths(const Options& opt) {
  Paths p;
  const fs::path dir = opt.corpus_dir;
  p.metadata = !opt.metadata.empty() ? fs::path(opt.metadata) : dir / "corpus.jsonl";
  p.features = !opt.features.empty() ? fs::path(opt.features) : dir / "features.tsgm";
  if (!opt.posteriors.empty()) {
    p.posteriors = opt.posteriors;
  } else if (!opt.corpus_dir.empty() && fs::exists(dir / "posteriors.tsgm")) {
    p.posteriors = dir / "posteriors.tsgm";
  }
  if (opt.corpus_dir.empty() && (opt.metadata.empty() || opt.features.empty())) {
    throw ConfigError("--metadata and --features (or --corpus DIR) are required");
  }
  return p;
}

json corpus_config(const Options& opt) {
  const Paths p = corpus_paths(opt);
  return {{"metadata", p.metadata.string()},
          {"features", p.features.string()},
          {"posteriors", p.posteriors ? p.posteriors->string() : ""}};
}

CorpusPtr load_corpus(Run& run, const Options& opt) {
  const Paths p = corpus_paths(opt);
  return run.stage("ingest", [&] { return ingest(p.metadata, p.features, p.posteriors).corpus; });
}

FilterSpec filter_spec(const Options& opt) {
  if (!opt.filter.empty() && !opt.container.empty()) {
    throw ConfigError("--filter and --container cannot be combined");
  }
  FilterSpec f;
  f.threshold = opt.threshold;
  if (!opt.filter.empty()) {
    f.kind = FilterKind::prune;
    f.classes = opt.filter;
  } else if (!opt.container.empty()) {
    f.kind = FilterKind::focus;
    f.classes = opt.container;
  }
  return f;
}

json filter_json(const FilterSpec& f) { return describe(f); }

ExperimentConfig experiment(const Options& opt) {
  ExperimentConfig c;
  c.seed = opt.seed;
  c.workers = opt.workers;
  c.neg_ratio = opt.neg_ratio;
  c.test_fraction = opt.test_fraction;
  c.k = opt.k;
  c.min_positives = opt.min_positives;
  c.svm.cost = opt.cost;
  return c;
}

json experiment_json(const Options& opt) {
  return {{"seed", opt.seed},         {"neg_ratio", opt.neg_ratio},       {"test_fraction", opt.test_fraction},
          {"k", opt.k},               {"min_positives", opt.min_positives}, {"cost", opt.cost},
          {"top_k_tags", opt.top_k_tags}, {"tags", opt.tags}};
}

std::vector<std::string> normalized(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& t : raw) out.push_back(normalize_tag(t));
  return out;
}

std::vector<std::string> selected_tags(const Options& opt, const TagIndex& index) {
  if (!opt.tags.empty()) return normalized(opt.tags);
  std::vector<std::string> out;
  for (const TagEntry& e : index.ranked()) out.push_back(e.tag);
  return out;
}

CountryAtlas load_atlas(Run& run, const Options& opt) {
  const fs::path path = opt.atlas.empty() ? default_atlas_path() : fs::path(opt.atlas);
  return run.stage("atlas", [&] { return CountryAtlas::load(path); });
}

std::string atlas_path(const Options& opt) {
  return opt.atlas.empty() ? default_atlas_path().string() : opt.atlas;
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string tag_file_name(std::string_view tag) {
  // Tags may hold any UTF-8; keep ASCII alphanumerics and disambiguate with a hash.
  return fmt::format("{}_{:08x}", slug(tag), static_cast<std::uint32_t>(fnv1a64(tag)));
}

// --- commands ---

void cmd_ingest(const Options& opt, std::ostream& out) {
  json cfg = corpus_config(opt);
  cfg["top_k_tags"] = opt.top_k_tags;
  Run run("ingest", opt, cfg);
  const Paths p = corpus_paths(opt);
  const IngestResult r = run.stage("ingest", [&] { return ingest(p.metadata, p.features, p.posteriors); });
  const TagIndex index = run.stage("index", [&] { return TagIndex::build(*r.corpus, opt.top_k_tags); });
  json rep = {{"records", r.report.records},           {"posts", r.report.posts},
              {"malformed", r.report.malformed},       {"duplicates", r.report.duplicates},
              {"dropped_geotags", r.report.dropped_geotags}, {"rejected_tags", r.report.rejected_tags},
              {"feature_dim", r.corpus->dim()},        {"posterior_classes", r.corpus->has_posteriors() ? r.corpus->posteriors().classes() : 0},
              {"warnings", r.report.warnings}};
  run.write("ingest_report.json", rep.dump(2) + "\n");
  std::string csv = "rank,tag,frequency\n";
  for (const TagEntry& e : index.ranked()) csv += fmt::format("{},{},{}\n", e.rank, csv_field(e.tag), e.frequency());
  run.write("tag_index.csv", csv);
  run.manifest();
  out << fmt::format("ingested {} posts ({} malformed, {} duplicates, {} geotags dropped)\n", r.report.posts,
                     r.report.malformed, r.report.duplicates, r.report.dropped_geotags);
}

void cmd_synth(const Options& opt, std::ostream& out) {
  synth::SynthSpec spec;
  if (!opt.spec.empty()) spec = synth::load_spec(opt.spec);
  if (opt.seed_given) spec.seed = opt.seed;
  synth::validate(spec);
  json cfg = {{"spec", opt.spec}, {"seed", spec.seed}};
  Run run("synth", opt, cfg);
  const synth::SynthCorpus s = run.stage("generate", [&] { return synth::generate(spec); });
  run.stage("write", [&] {
    const fs::path dir = opt.out;
    write_corpus(*s.corpus, dir / "corpus.jsonl", dir / "features.tsgm", dir / "posteriors.tsgm");
  });
  run.note_output("corpus.jsonl");
  run.note_output("features.tsgm");
  run.note_output("posteriors.tsgm");
  run.write("ground_truth.json", synth::ground_truth_json(spec, s.truth) + "\n");
  run.manifest();
  out << fmt::format("generated {} posts, d={}, true food fraction {:.4f}\n", s.corpus->size(),
                     s.corpus->dim(), s.truth.food_fraction());
}

void cmd_bounds(const Options& opt, std::ostream& out) {
  json cfg = corpus_config(opt);
  cfg["threshold"] = opt.threshold;
  Run run("bounds", opt, cfg);
  const CorpusPtr corpus = load_corpus(run, opt);
  const FoodBounds b = run.stage("bounds", [&] { return food_content_bounds(*corpus, opt.threshold); });
  run.write("bounds.csv",
            fmt::format("n_total,n_confident_food_or_container,n_confident_nonfood,threshold,lower,upper\n"
                        "{},{},{},{},{:.6f},{:.6f}\n",
                        b.n_total, b.n_confident_food_or_container, b.n_confident_nonfood, b.threshold,
                        b.lower, b.upper));
  run.manifest();
  out << fmt::format("lower {:.2f} upper {:.2f}\n", b.lower, b.upper);
}

void cmd_filter(const Options& opt, std::ostream& out) {
  FilterSpec f = filter_spec(opt);
  if (f.kind == FilterKind::none) {
    f.kind = FilterKind::prune;
    f.classes = default_distractors();
  }
  json cfg = corpus_config(opt);
  cfg["filter"] = filter_json(f);
  Run run("filter", opt, cfg);
  const CorpusPtr corpus = load_corpus(run, opt);
  const FilterResult r = run.stage("filter", [&] { return apply_filter(CorpusView::all(corpus), f); });
  std::string ids = "id\n";
  for (std::uint32_t row : r.view.rows()) ids += csv_field(corpus->post(row).id) + "\n";
  run.write("kept_ids.csv", ids);
  run.write("filter_summary.csv", fmt::format("key,value\nfilter,{}\nposts,{}\nkept,{}\nremoved,{}\n",
                                              csv_field(describe(f)), corpus->size(), r.view.size(), r.removed));
  run.manifest();
  out << fmt::format("{}: kept {} of {} posts, removed {}\n", describe(f), r.view.size(), corpus->size(),
                     r.removed);
}

struct Prepared {
  CorpusPtr corpus;
  CorpusView view;
  TagIndex index;
  std::vector<std::string> tags;
  FilterSpec filter;
  std::size_t removed = 0;
};

Prepared prepare(Run& run, const Options& opt) {
  CorpusPtr corpus = load_corpus(run, opt);
  TagIndex index = run.stage("index", [&] { return TagIndex::build(*corpus, opt.top_k_tags); });
  FilterSpec f = filter_spec(opt);
  FilterResult r = apply_filter(CorpusView::all(corpus), f);
  auto tags = selected_tags(opt, index);
  return {corpus, std::move(r.view), std::move(index), std::move(tags), std::move(f), r.removed};
}

json experiment_config(const Options& opt) {
  json cfg = corpus_config(opt);
  cfg["experiment"] = experiment_json(opt);
  cfg["filter"] = filter_json(filter_spec(opt));
  return cfg;
}

void cmd_train_tags(const Options& opt, std::ostream& out) {
  Run run("train-tags", opt, experiment_config(opt));
  const Prepared p = prepare(run, opt);
  const ExperimentConfig cfg = experiment(opt);
  std::vector<std::optional<TagEvaluation>> evals(p.tags.size());
  std::vector<std::string> skipped(p.tags.size());
  run.stage("train", [&] {
    parallel_for(p.tags.size(), opt.workers, [&](std::size_t i) {
      try {
        evals[i] = evaluate_tag_detailed(p.view, p.index, p.tags[i], cfg);
      } catch (const InsufficientData& e) {
        skipped[i] = e.what();
      }
    });
  });
  std::string summary = "tag,model,n_pos,n_neg,epochs,objective,balanced_accuracy\n";
  std::string images = "tag,rank,id\n";
  std::size_t trained = 0;
  for (std::size_t i = 0; i < p.tags.size(); ++i) {
    if (!evals[i]) {
      spdlog::warn("{}", skipped[i]);
      continue;
    }
    const TagEvaluation& e = *evals[i];
    const std::string file = "models/" + tag_file_name(e.score.tag) + ".tsvm";
    fs::create_directories(fs::path(opt.out) / "models");
    linsvm::save_model(fs::path(opt.out) / file, e.model);
    run.note_output(file);
    summary += fmt::format("{},{},{},{},{},{:.6f},{:.6f}\n", csv_field(e.score.tag), file, e.score.n_pos,
                           e.score.n_neg, e.model.epochs_run, e.model.final_objective,
                           e.score.balanced_accuracy);
    const auto ids = top_ranked_images(*p.corpus, e.model, e.dataset.test_rows, opt.k);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      images += fmt::format("{},{},{}\n", csv_field(e.score.tag), r + 1, csv_field(ids[r]));
    }
    ++trained;
  }
  run.write("models.csv", summary);
  run.write("top_images.csv", images);
  run.manifest();
  out << fmt::format("trained {} of {} tags\n", trained, p.tags.size());
}

void cmd_rank(const Options& opt, std::ostream& out) {
  json cfg = experiment_config(opt);
  cfg["categories"] = opt.categories;
  Run run("rank", opt, cfg);
  const Prepared p = prepare(run, opt);
  CategoryMap categories;
  if (!opt.categories.empty()) categories = load_categories(opt.categories);
  const VisualnessReport rep = run.stage("rank", [&] {
    return rank_visualness(p.view, p.index, p.tags, experiment(opt), opt.categories.empty() ? nullptr : &categories);
  });
  run.write("visualness.csv", visualness_csv(rep));
  run.write("visual_food_table.csv", visual_food_table_csv(rep, opt.top_n));
  std::string skipped = "tag,reason\n";
  for (const TagSkip& s : rep.skipped) skipped += csv_field(s.tag) + "," + csv_field(s.reason) + "\n";
  run.write("skipped.csv", skipped);
  if (!opt.no_plots) run.write("visualness.svg", plot::visualness_svg(rep));
  run.manifest();
  out << fmt::format("ranked {} tags, skipped {}\n", rep.ranked.size(), rep.skipped.size());
}

GeoStats geocode(Run& run, const Options& opt, const CorpusView& view, const CountryAtlas& atlas) {
  return run.stage("geocode", [&] { return geocode_corpus(view, atlas, opt.coastal_km, opt.workers); });
}

void cmd_geocode(const Options& opt, std::ostream& out) {
  json cfg = corpus_config(opt);
  cfg["atlas"] = atlas_path(opt);
  cfg["coastal_km"] = opt.coastal_km;
  Run run("geocode", opt, cfg);
  const CorpusPtr corpus = load_corpus(run, opt);
  const CountryAtlas atlas = load_atlas(run, opt);
  const CorpusView view = CorpusView::all(corpus);
  const GeoStats s = geocode(run, opt, view, atlas);
  run.write("geo_records.csv", geo_records_csv(view, s));
  run.write("countries.csv", country_csv(s));
  std::string continents = "continent,posts\n";
  for (const auto& [c, n] : s.continent_counts) continents += fmt::format("{},{}\n", csv_field(to_string(c)), n);
  run.write("continents.csv", continents);
  run.write("geo_summary.csv",
            fmt::format("key,value\nposts,{}\ngeotagged,{}\nresolved,{}\ncoastal_fallback,{}\n"
                        "geotagged_fraction,{:.6f}\nresolved_fraction,{:.6f}\n",
                        s.n_posts, s.n_geotagged, s.n_resolved, s.n_coastal, s.geotagged_fraction(),
                        s.resolved_fraction()));
  if (!opt.no_plots) run.write("geo_scatter.svg", plot::geo_scatter_svg(atlas, s));
  run.manifest();
  out << fmt::format("geotagged {:.2f}, resolved {:.2f} of geotagged ({} via coastal fallback)\n",
                     s.geotagged_fraction(), s.resolved_fraction(), s.n_coastal);
}

void cmd_breakdown(const Options& opt, std::ostream& out) {
  json cfg = corpus_config(opt);
  cfg["atlas"] = atlas_path(opt);
  cfg["coastal_km"] = opt.coastal_km;
  cfg["label_source"] = opt.label_source;
  cfg["tags"] = opt.tags;
  cfg["threshold"] = opt.threshold;
  cfg["top_n"] = opt.top_n;
  Run run("breakdown", opt, cfg);
  LabelSource source;
  if (opt.label_source == "posterior") {
    source = PosteriorFoodLabels{opt.threshold};
  } else if (opt.label_source == "tags") {
    source = VisualTagLabels{normalized(opt.tags)};
  } else {
    throw ConfigError("--label-source must be posterior or tags");
  }
  const CorpusPtr corpus = load_corpus(run, opt);
  const CountryAtlas atlas = load_atlas(run, opt);
  const CorpusView view = CorpusView::all(corpus);
  const GeoStats s = geocode(run, opt, view, atlas);
  const BreakdownTable t = run.stage("breakdown", [&] { return continent_breakdown(view, s, source, opt.top_n); });
  run.write("breakdown.csv", breakdown_csv(t));
  run.manifest();
  for (const BreakdownColumn& c : t.columns) {
    out << fmt::format("{}: {}\n", c.name, c.top.empty() ? std::string("-") : c.top.front().label);
  }
}

void cmd_correlate(const Options& opt, std::ostream& out) {
  json cfg = experiment_config(opt);
  cfg["atlas"] = atlas_path(opt);
  cfg["coastal_km"] = opt.coastal_km;
  cfg["min_posts"] = opt.min_posts;
  cfg["top_n"] = opt.top_n;
  Run run("correlate", opt, cfg);
  const Prepared p = prepare(run, opt);
  const CorrelationMatrix m = run.stage("correlate", [&] { return tag_phi_matrix(p.view, p.tags); });
  run.write("correlations.csv", correlation_csv(m));
  std::string top = "sign,rank,tag_a,tag_b,phi\n";
  for (const auto& [sign, name] : {std::pair{Sign::positive, "positive"}, std::pair{Sign::negative, "negative"}}) {
    const auto pairs = top_correlations(m, opt.top_n, sign);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      top += fmt::format("{},{},{},{},{:.6f}\n", name, i + 1, csv_field(pairs[i].a), csv_field(pairs[i].b),
                         pairs[i].phi);
    }
  }
  run.write("top_correlations.csv", top);
  const CountryAtlas atlas = load_atlas(run, opt);
  const GeoStats s = geocode(run, opt, p.view, atlas);
  const auto by = run.stage("per_continent", [&] { return per_continent_correlations(p.view, s, p.tags, opt.min_posts); });
  for (const auto& [continent, cm] : by) {
    run.write("correlations_" + slug(to_string(continent)) + ".csv", correlation_csv(cm));
  }
  if (!opt.no_plots) run.write("correlation_heatmap.svg", plot::correlation_heatmap_svg(m));
  run.manifest();
  out << fmt::format("correlated {} tags over {} posts; {} continents\n", m.tags.size(), m.n, by.size());
}

void cmd_report(const Options& opt, std::ostream& out) {
  FilterSpec f = filter_spec(opt);
  if (f.kind == FilterKind::none) {
    f.kind = FilterKind::focus;
    f.classes = default_containers();
  }
  json cfg = experiment_config(opt);
  cfg["filter"] = filter_json(f);
  cfg["top_n"] = opt.top_n;
  Run run("report", opt, cfg);
  const CorpusPtr corpus = load_corpus(run, opt);
  const TagIndex index = run.stage("index", [&] { return TagIndex::build(*corpus, opt.top_k_tags); });
  const auto tags = selected_tags(opt, index);
  const ComparisonReport r = run.stage("compare", [&] {
    return compare_conditions(CorpusView::all(corpus), index, f, tags, experiment(opt), opt.top_n);
  });
  run.write("comparison.csv", comparison_csv(r));
  run.write("comparison_summary.csv", comparison_summary_csv(r));
  run.manifest();
  out << fmt::format("top-{} mean balanced accuracy: raw {:.4f}, filtered {:.4f} ({})\n", r.top_n,
                     r.top_mean_raw, r.top_mean_filtered, describe(f));
}

void setup_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("tagsight");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("TAGSIGHT_LOG")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  setup_logging();
  Options opt;
  CLI::App app{"tagsight: tag visualness and food-image corpus analysis", "tagsight"};
  app.require_subcommand(1);

  auto corpus_opts = [&](CLI::App* c) {
    c->add_option("--corpus", opt.corpus_dir, "Directory with corpus.jsonl, features.tsgm, posteriors.tsgm");
    c->add_option("--metadata", opt.metadata, "Line-delimited JSON post records");
    c->add_option("--features", opt.features, "Feature matrix file");
    c->add_option("--posteriors", opt.posteriors, "Posterior matrix file");
  };
  auto out_opts = [&](CLI::App* c) {
    c->add_option("--out", opt.out, "Output directory")->capture_default_str();
    c->add_option("--seed", opt.seed, "Global seed")->capture_default_str();
    c->add_option("--workers", opt.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto experiment_opts = [&](CLI::App* c) {
    c->add_option("--neg-ratio", opt.neg_ratio, "Negatives per positive")->capture_default_str();
    c->add_option("--test-fraction", opt.test_fraction, "Held-out fraction")->capture_default_str();
    c->add_option("--top-k-tags", opt.top_k_tags, "Most frequent tags to index")->capture_default_str();
    c->add_option("--k", opt.k, "Ranking cutoff for P@k and AP")->capture_default_str();
    c->add_option("--min-positives", opt.min_positives, "Skip tags with fewer positives")->capture_default_str();
    c->add_option("--cost", opt.cost, "SVM cost C")->capture_default_str();
    c->add_option("--tags", opt.tags, "Tags to evaluate (default: indexed tags)")->delimiter(',');
  };
  auto filter_opts = [&](CLI::App* c) {
    c->add_option("--filter", opt.filter, "Distractor class to prune (repeatable)");
    c->add_option("--container", opt.container, "Container class to focus on (repeatable)");
    c->add_option("--threshold", opt.threshold, "Posterior confidence threshold")->capture_default_str();
  };
  auto geo_opts = [&](CLI::App* c) {
    c->add_option("--atlas", opt.atlas, "TSATLAS boundary file (default: bundled)");
    c->add_option("--coastal-km", opt.coastal_km, "Coastal fallback distance, 0 disables")->capture_default_str();
  };
  auto plot_opt = [&](CLI::App* c) { c->add_flag("--no-plots", opt.no_plots, "Skip SVG output"); };

  std::map<CLI::App*, std::function<void(const Options&, std::ostream&)>> handlers;
  auto add = [&](const char* name, const char* help, auto handler) {
    CLI::App* c = app.add_subcommand(name, help);
    out_opts(c);
    handlers[c] = handler;
    return c;
  };

  auto* ingest_cmd = add("ingest", "Validate and index a corpus", cmd_ingest);
  corpus_opts(ingest_cmd);
  ingest_cmd->add_option("--top-k-tags", opt.top_k_tags, "Most frequent tags to index")->capture_default_str();

  auto* synth_cmd = add("synth", "Generate a synthetic corpus with ground truth", cmd_synth);
  synth_cmd->add_option("--spec", opt.spec, "Synthetic corpus spec file");

  auto* bounds_cmd = add("bounds", "Food content bounds from posteriors", cmd_bounds);
  corpus_opts(bounds_cmd);
  bounds_cmd->add_option("--threshold", opt.threshold, "Posterior confidence threshold")->capture_default_str();

  auto* filter_cmd = add("filter", "Prune distractors or focus on containers", cmd_filter);
  corpus_opts(filter_cmd);
  filter_opts(filter_cmd);

  auto* train_cmd = add("train-tags", "Train and save one classifier per tag", cmd_train_tags);
  corpus_opts(train_cmd);
  experiment_opts(train_cmd);
  filter_opts(train_cmd);

  auto* rank_cmd = add("rank", "Rank tags by visualness", cmd_rank);
  corpus_opts(rank_cmd);
  experiment_opts(rank_cmd);
  filter_opts(rank_cmd);
  plot_opt(rank_cmd);
  rank_cmd->add_option("--categories", opt.categories, "tag,category file");
  rank_cmd->add_option("--top-n", opt.top_n, "Rows in the food table")->capture_default_str();

  auto* geocode_cmd = add("geocode", "Reverse geocode geotagged posts", cmd_geocode);
  corpus_opts(geocode_cmd);
  geo_opts(geocode_cmd);
  plot_opt(geocode_cmd);

  auto* breakdown_cmd = add("breakdown", "Top labels per continent", cmd_breakdown);
  corpus_opts(breakdown_cmd);
  geo_opts(breakdown_cmd);
  breakdown_cmd->add_option("--label-source", opt.label_source, "posterior or tags")->capture_default_str();
  breakdown_cmd->add_option("--tags", opt.tags, "Visual tags when --label-source tags")->delimiter(',');
  breakdown_cmd->add_option("--threshold", opt.threshold, "Posterior confidence threshold")->capture_default_str();
  breakdown_cmd->add_option("--top-n", opt.top_n, "Labels per continent")->capture_default_str();

  auto* corr_cmd = add("correlate", "Tag co-occurrence correlations", cmd_correlate);
  corpus_opts(corr_cmd);
  experiment_opts(corr_cmd);
  filter_opts(corr_cmd);
  geo_opts(corr_cmd);
  plot_opt(corr_cmd);
  corr_cmd->add_option("--top-n", opt.top_n, "Pairs per sign")->capture_default_str();
  corr_cmd->add_option("--min-posts", opt.min_posts, "Minimum posts per continent")->capture_default_str();

  auto* report_cmd = add("report", "Raw versus filtered visualness comparison", cmd_report);
  corpus_opts(report_cmd);
  experiment_opts(report_cmd);
  filter_opts(report_cmd);
  report_cmd->add_option("--top-n", opt.top_n, "Tags in the top-N means")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return ExitCode::validation;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    for (CLI::Option* o : sub->get_options()) {
      if (o->get_name() == "--seed" && o->count() > 0) opt.seed_given = true;
    }
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    handlers.at(chosen)(opt, out);
    return ExitCode::ok;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::validation;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::data;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::data;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return ExitCode::internal;
  }
}

}  // namespace tagsight::cli
