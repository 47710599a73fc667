#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include "commlabel/pipeline.hpp"
#include "commlabel/synth.hpp"
#include "util.hpp"

using namespace commlabel;
namespace fs = std::filesystem;
using testutil::read_file;
using testutil::TempDir;

namespace {

PipelineConfig small_run(const TempDir& dir, std::uint64_t seed = 2) {
  SynthConfig sc;
  sc.k_topics = 3;
  sc.per_topic = 40;
  sc.seed = seed;
  const auto synthetic = generate_synthetic_corpus(sc);
  save_corpus(synthetic.corpus, dir / "corpus.csv", CorpusFormat::csv);
  save_answer_key(synthetic.key, dir / "key.csv");
  PipelineConfig c;
  c.corpus = dir / "corpus.csv";
  c.answer_key = dir / "key.csv";
  c.output_dir = dir / "out";
  c.forest.n_trees = 10;
  c.svm.epochs = 5;
  return c;
}

bool mentions(const std::vector<std::string>& notices, const std::string& word) {
  return std::any_of(notices.begin(), notices.end(), [&](const auto& n) { return n.find(word) != std::string::npos; });
}

}  // namespace

TEST_CASE("config text parsing") {
  PipelineConfig c;
  apply_config_text(c,
                    "# run settings\n"
                    "corpus = data/c.csv\n"
                    "thresholds = 0.1:0.5:0.1  # grid\n"
                    "threshold = 0.35\n"
                    "synonyms = false\n"
                    "model_seed = 17\n"
                    "threads = 2\n"
                    "\n");
  CHECK(c.corpus == "data/c.csv");
  CHECK(c.thresholds.size() == 5);
  REQUIRE(c.threshold.has_value());
  CHECK(*c.threshold == 0.35);
  CHECK_FALSE(c.synonyms);
  CHECK(c.svm.seed == 17);
  CHECK(c.forest.seed == 17);
  CHECK(c.forest.threads == 2);
  c.set("threshold", "auto");
  CHECK_FALSE(c.threshold.has_value());
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors") {
  PipelineConfig c;
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("synonyms", "perhaps"), ConfigError);
  CHECK_THROWS_AS(c.set("split_seed", "-3"), ConfigError);
  CHECK_THROWS_AS(c.set("train_ratio", "0.8x"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(c, "corpus\n"), ConfigError);
  CHECK_THROWS_AS(c.validate(), ConfigError);  // no corpus
  c.corpus = "x.csv";
  c.train_ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.train_ratio = 0.8;
  c.thresholds = {0.5};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.thresholds = {0.5, 0.4};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/commlabel.conf"), Error);
}

TEST_CASE("full run on a labeled corpus") {
  TempDir dir;
  auto config = small_run(dir);
  std::ostringstream log;
  const auto r = run_pipeline(config, log);
  CHECK(r.labeled);
  CHECK(r.selection.source == "sweep");
  CHECK(r.scores.has_value());
  REQUIRE(r.comparison.size() == 4);
  std::set<std::string> cells;
  for (const auto& row : r.comparison) {
    cells.insert(row.model + "/" + row.labeling);
    CHECK(row.result.accuracy >= 0.0);
    CHECK(row.result.accuracy <= 1.0);
  }
  CHECK(cells == std::set<std::string>{"svm/human", "svm/community", "random_forest/human", "random_forest/community"});
  for (const char* name : {artifact::preprocessed, artifact::vocabulary, artifact::vectors, artifact::sweep,
                           artifact::curves, artifact::selection, artifact::graph, artifact::partition,
                           artifact::labeled, artifact::class_map, artifact::ambiguity, artifact::community_map,
                           artifact::evaluation, artifact::report}) {
    CAPTURE(name);
    CHECK(fs::exists(config.output_dir / name));
  }
  CHECK(fs::exists(config.output_dir / model_artifact("svm", "community")));
  CHECK_FALSE(fs::exists(config.output_dir / ".staging"));

  const auto rows = read_comparison_json(config.output_dir / artifact::evaluation);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].result.accuracy == r.comparison[0].result.accuracy);

  const auto sel = read_selection(config.output_dir / artifact::selection);
  CHECK(sel.threshold == r.selection.threshold);

  const auto labeled = read_file(config.output_dir / artifact::labeled);
  CHECK(labeled.rfind("sentence,community_id\n", 0) == 0);
}

TEST_CASE("single stages reproduce cached outputs") {
  TempDir dir;
  auto config = small_run(dir, 4);
  std::ostringstream log;
  run_pipeline(config, log);
  for (const char* stage : {"preprocess", "vectorize", "sweep", "graph", "detect", "label", "train", "evaluate",
                            "report"}) {
    CAPTURE(stage);
    std::map<std::string, std::string> before;
    for (const auto& e : fs::directory_iterator(config.output_dir))
      before[e.path().filename().string()] = read_file(e.path());
    const auto out = run_stage(stage, config, log);
    CHECK_FALSE(out.files.empty());
    for (const auto& f : out.files) {
      CAPTURE(f);
      REQUIRE(before.count(f));
      CHECK(read_file(config.output_dir / f) == before[f]);
    }
  }
  CHECK_THROWS_AS(run_stage("polish", config, log), ConfigError);
}

TEST_CASE("fixed threshold skips the sweep") {
  TempDir dir;
  auto config = small_run(dir);
  config.threshold = 0.3;
  std::ostringstream log;
  const auto r = run_pipeline(config, log);
  CHECK(r.selection.source == "fixed");
  CHECK(r.selection.threshold == 0.3);
  CHECK_FALSE(fs::exists(config.output_dir / artifact::sweep));
}

TEST_CASE("unlabeled corpus produces labeling outputs only") {
  TempDir dir;
  Corpus c;
  for (int i = 0; i < 30; ++i) c.add("word" + std::to_string(i % 5) + " other" + std::to_string(i % 3) + " n" + std::to_string(i));
  save_corpus(c, dir / "u.csv", CorpusFormat::csv);
  PipelineConfig config;
  config.corpus = dir / "u.csv";
  config.output_dir = dir / "out";
  std::ostringstream log;
  const auto r = run_pipeline(config, log);
  CHECK_FALSE(r.labeled);
  CHECK(r.selection.source == "unlabeled_default");
  CHECK(r.selection.threshold == 0.5);
  CHECK(r.comparison.empty());
  CHECK(mentions(r.notices, "sweep skipped"));
  CHECK(mentions(r.notices, "evaluation skipped"));
  CHECK(fs::exists(config.output_dir / artifact::labeled));
  CHECK(fs::exists(config.output_dir / artifact::partition));
  CHECK_FALSE(fs::exists(config.output_dir / artifact::evaluation));
  CHECK_FALSE(fs::exists(config.output_dir / artifact::class_map));
}

TEST_CASE("failures name their stage and leave no outputs") {
  TempDir dir;
  PipelineConfig config;
  config.corpus = dir / "missing.csv";
  config.output_dir = dir / "out";
  std::ostringstream log;
  try {
    run_pipeline(config, log);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("preprocess: ", 0) == 0);
  }
  CHECK_FALSE(fs::exists(config.output_dir / artifact::preprocessed));

  // a later stage without its inputs
  auto labeled = small_run(dir);
  labeled.output_dir = dir / "empty";
  fs::create_directories(labeled.output_dir);
  CHECK_THROWS_AS(run_stage("detect", labeled, log), Error);
}

TEST_CASE("answer key must cover every class") {
  TempDir dir;
  auto config = small_run(dir);
  testutil::write_file(dir / "partial.csv", "class,message_id\ntopic_0,m\n");
  config.answer_key = dir / "partial.csv";
  std::ostringstream log;
  CHECK_THROWS_AS(run_pipeline(config, log), DataError);
}
