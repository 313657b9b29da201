#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "tagsight/cli.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

using fixture::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tagsight::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* kSpec = R"(n_posts = 800
dim = 16
seed = 3
visual_tag = salad 4.0 0.2
visual_tag = sushi 3.0 0.2
nonvisual_tag = love 0.4
nonvisual_tag = tbt 0.4
cluster = 0.1 * cake dessert
distractor_fraction = 0.1
false_positive_rate = 0.2
false_positive_target = distractor
geotag_fraction = 0.5
)";

}  // namespace

TEST_CASE("usage errors exit with 1") {
  const Result r = run({"rank", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"rank", "--workers", "0"}).code == 1);
}

TEST_CASE("missing inputs exit with 2 and bad configuration with 1") {
  TempDir dir("cli_err");
  const std::string out = (dir / "out").string();
  CHECK(run({"bounds", "--metadata", (dir / "none.jsonl").string(), "--features", (dir / "none.tsgm").string(),
             "--out", out}).code == 2);
  CHECK(run({"bounds", "--out", out}).code == 1);
  fixture::write_text(dir / "bad.spec", "n_posts = 0\n");
  CHECK(run({"synth", "--spec", (dir / "bad.spec").string(), "--out", out}).code == 1);
}

TEST_CASE("bounds prints the 19/11 composition") {
  TempDir dir("cli_bounds");
  std::vector<std::string> confident;
  for (int i = 0; i < 19; ++i) confident.push_back(i < 10 ? "pizza" : "plate");
  for (int i = 0; i < 11; ++i) confident.push_back("website");
  confident.resize(100, "");
  const auto corpus = fixture::make_geo_corpus(std::vector<std::vector<std::string>>(100), {},
                                               fixture::make_posteriors(confident));
  tagsight::write_corpus(*corpus, dir / "m.jsonl", dir / "f.tsgm", dir / "p.tsgm");
  const Result r = run({"bounds", "--metadata", (dir / "m.jsonl").string(), "--features", (dir / "f.tsgm").string(),
                        "--posteriors", (dir / "p.tsgm").string(), "--out", (dir / "out").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "lower 0.19 upper 0.89\n");
  const std::string csv = fixture::read_text(dir / "out" / "bounds.csv");
  CHECK(csv.find(",0.190000,0.890000") != std::string::npos);

  const auto manifest = nlohmann::json::parse(fixture::read_text(dir / "out" / "run_manifest.json"));
  const auto& run_entry = manifest["runs"]["bounds"];
  CHECK(run_entry["seed"] == 42);
  CHECK(run_entry["config_hash"].get<std::string>().size() == 16);
  CHECK(run_entry["stages"].size() >= 2);
}

TEST_CASE("pipeline commands on a synthetic corpus") {
  TempDir dir("cli_pipeline");
  fixture::write_text(dir / "s.spec", kSpec);
  const std::string corpus = (dir / "corpus").string();
  REQUIRE(run({"synth", "--spec", (dir / "s.spec").string(), "--out", corpus}).code == 0);

  auto with = [&](std::vector<std::string> args, const std::string& out) {
    args.insert(args.end(), {"--corpus", corpus, "--out", (dir / out).string()});
    return run(args);
  };
  REQUIRE(with({"ingest"}, "a").code == 0);
  REQUIRE(with({"rank", "--workers", "2"}, "a").code == 0);
  const auto rows = lines(fixture::read_text(dir / "a" / "visualness.csv"));
  REQUIRE(rows.size() >= 5);
  double prev = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream in(rows[i]);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    const double ba = std::stod(cells[4]);
    CHECK(ba <= prev);
    prev = ba;
  }
  CHECK((rows[1].starts_with("salad,") || rows[1].starts_with("sushi,")));

  // Same command, fresh directory, more workers: identical data files.
  REQUIRE(with({"rank", "--workers", "3"}, "b").code == 0);
  CHECK(fixture::read_text(dir / "a" / "visualness.csv") == fixture::read_text(dir / "b" / "visualness.csv"));

  REQUIRE(with({"train-tags", "--tags", "salad,tbt", "--k", "5"}, "a").code == 0);
  CHECK(lines(fixture::read_text(dir / "a" / "top_images.csv")).size() == 11);
  REQUIRE(with({"geocode"}, "a").code == 0);
  REQUIRE(with({"breakdown", "--label-source", "tags", "--tags", "salad,sushi,cake"}, "a").code == 0);
  CHECK(with({"breakdown", "--label-source", "vibes"}, "a").code == 1);
  REQUIRE(with({"correlate", "--tags", "cake,dessert,love,tbt", "--min-posts", "10"}, "a").code == 0);
  const auto top = lines(fixture::read_text(dir / "a" / "top_correlations.csv"));
  CHECK(top[1].starts_with("positive,1,cake,dessert,"));
  REQUIRE(with({"filter", "--filter", "website"}, "a").code == 0);
  const Result rep = with({"report", "--filter", "website", "--top-n", "2"}, "a");
  REQUIRE(rep.code == 0);
  CHECK(rep.out.find("top-2 mean") != std::string::npos);
  CHECK(with({"report", "--filter", "website", "--container", "plate"}, "a").code == 1);

  const auto manifest = nlohmann::json::parse(fixture::read_text(dir / "a" / "run_manifest.json"));
  for (const char* cmd : {"ingest", "rank", "train-tags", "geocode", "breakdown", "correlate", "filter", "report"}) {
    CHECK(manifest["runs"].contains(cmd));
  }
}
