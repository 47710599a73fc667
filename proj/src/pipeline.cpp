#include "commlabel/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "commlabel/csv.hpp"
#include "commlabel/error.hpp"

namespace commlabel {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      auto u = std::stoull(v, &used);
      if (used == v.size()) return u;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
}

template <class F>
auto guarded(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(name + ": " + e.what());
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string community_label(std::uint32_t c) { return std::to_string(c); }

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& raw) {
  const auto value = trim(raw);
  if (key == "corpus") corpus = value;
  else if (key == "stopwords") stopwords = value;
  else if (key == "lexicon") lexicon = value;
  else if (key == "answer_key") answer_key = value;
  else if (key == "synonyms") synonyms = parse_bool(key, value);
  else if (key == "bigrams") bigrams = parse_bool(key, value);
  else if (key == "thresholds") thresholds = parse_threshold_grid(value);
  else if (key == "threshold") {
    if (value == "auto") threshold.reset();
    else threshold = parse_double(key, value);
  }
  else if (key == "unlabeled_threshold") unlabeled_threshold = parse_double(key, value);
  else if (key == "louvain_seed") louvain.seed = parse_uint(key, value);
  else if (key == "min_gain") louvain.min_gain = parse_double(key, value);
  else if (key == "max_passes") louvain.max_passes = static_cast<int>(parse_uint(key, value));
  else if (key == "svm_lambda") svm.lambda = parse_double(key, value);
  else if (key == "svm_epochs") svm.epochs = static_cast<int>(parse_uint(key, value));
  else if (key == "forest_trees") forest.n_trees = parse_uint(key, value);
  else if (key == "forest_max_depth") forest.max_depth = parse_uint(key, value);
  else if (key == "model_seed") svm.seed = forest.seed = parse_uint(key, value);
  else if (key == "train_ratio") train_ratio = parse_double(key, value);
  else if (key == "split_seed") split_seed = parse_uint(key, value);
  else if (key == "stratified") stratified = parse_bool(key, value);
  else if (key == "output_dir") output_dir = value;
  else if (key == "threads") threads = forest.threads = static_cast<unsigned>(parse_uint(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

void PipelineConfig::validate() const {
  if (corpus.empty()) throw ConfigError("no corpus given");
  if (output_dir.empty()) throw ConfigError("no output_dir given");
  if (thresholds.size() < 2) throw ConfigError("threshold grid needs at least 2 points");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] < 1.0)) throw ConfigError("grid thresholds must lie in [0, 1)");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) throw ConfigError("grid thresholds must increase");
  }
  auto check_theta = [](double t, const char* what) {
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1)");
  };
  if (threshold) check_theta(*threshold, "threshold");
  check_theta(unlabeled_threshold, "unlabeled_threshold");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train_ratio must lie in (0, 1)");
  if (!(louvain.min_gain > 0.0)) throw ConfigError("min_gain must be positive");
  if (louvain.max_passes < 1) throw ConfigError("max_passes must be >= 1");
  if (!(svm.lambda > 0.0)) throw ConfigError("svm_lambda must be positive");
  if (svm.epochs < 1) throw ConfigError("svm_epochs must be >= 1");
  if (forest.n_trees < 1) throw ConfigError("forest_trees must be >= 1");
}

void apply_config_text(PipelineConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  PipelineConfig config;
  apply_config_text(config, buf.str());
  return config;
}

PreprocessConfig make_preprocess_config(const PipelineConfig& config) {
  PreprocessConfig prep;
  prep.stopwords = config.stopwords ? load_stopwords(*config.stopwords) : default_stopwords();
  prep.lexicon = config.lexicon ? load_lexicon(*config.lexicon) : default_lexicon();
  prep.enable_synonyms = config.synonyms;
  prep.enable_bigrams = config.bigrams;
  return prep;
}

Featurized featurize(const Corpus& corpus, const PreprocessConfig& config) {
  Featurized f;
  f.bags.reserve(corpus.size());
  for (const auto& s : corpus.sentences()) f.bags.push_back(preprocess_sentence(s.text, config));
  f.vocabulary = fit_vocabulary(f.bags);
  f.tfidf.reserve(f.bags.size());
  for (const auto& bag : f.bags) f.tfidf.push_back(transform_tfidf(bag, f.vocabulary));
  return f;
}

std::map<std::string, std::string> community_class_map(std::span<const std::uint32_t> communities,
                                                       std::span<const std::string> human,
                                                       const std::vector<std::size_t>& ids) {
  std::vector<std::uint32_t> c;
  std::vector<std::string> h;
  for (auto id : ids) {
    c.push_back(communities[id]);
    h.push_back(human[id]);
  }
  std::map<std::string, std::string> out;
  for (auto& [community, cls] : majority_classes(build_class_map(c, h))) out.emplace(community_label(community), cls);
  return out;
}

namespace {

struct Cell {
  std::string model;
  std::string labeling;
  std::size_t n_labels = 0;
  Model trained;
};

const char* const kLabelings[] = {"human", "community"};
const char* const kModels[] = {"svm", "random_forest"};

std::size_t count_distinct(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

std::vector<SparseVector> normalized_rows(std::span<const SparseVector> features, const std::vector<std::size_t>& ids) {
  std::vector<SparseVector> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(l2_normalized(features[id]));
  return out;
}

std::vector<Cell> train_cells(std::span<const SparseVector> features, std::size_t dim,
                              std::span<const std::string> human, std::span<const std::uint32_t> communities,
                              const std::vector<std::size_t>& train_ids, const SvmConfig& svm,
                              const ForestConfig& forest) {
  const auto x = normalized_rows(features, train_ids);
  std::vector<Cell> cells;
  for (const char* labeling : kLabelings) {
    std::vector<std::string> y;
    for (auto id : train_ids)
      y.push_back(std::string(labeling) == "human" ? human[id] : community_label(communities[id]));
    const auto n_labels = count_distinct(y);
    cells.push_back({"svm", labeling, n_labels, train_linear_svm(x, y, dim, svm)});
    cells.push_back({"random_forest", labeling, n_labels, train_random_forest(x, y, dim, forest)});
  }
  return cells;
}

ComparisonRow evaluate_cell(const Cell& cell, const std::vector<SparseVector>& x_test,
                            const std::vector<std::string>& truth_test, const AnswerKey& key,
                            const std::map<std::string, std::string>& mapping) {
  const auto* map = cell.labeling == "community" ? &mapping : nullptr;
  return {cell.model, cell.labeling, cell.n_labels, evaluate(cell.trained, x_test, truth_test, &key, map)};
}

}  // namespace

std::vector<ComparisonRow> compare_labelings(std::span<const SparseVector> features, std::size_t dim,
                                             std::span<const std::string> human,
                                             std::span<const std::uint32_t> communities,
                                             std::span<const std::string> truth,
                                             const std::vector<std::size_t>& train_ids,
                                             const std::vector<std::size_t>& test_ids, const AnswerKey& key,
                                             const SvmConfig& svm, const ForestConfig& forest) {
  const auto n = features.size();
  if (human.size() != n || communities.size() != n || truth.size() != n)
    throw std::invalid_argument("compare_labelings: inputs differ in length");
  if (test_ids.empty()) throw std::invalid_argument("compare_labelings: empty test split");

  const auto mapping = community_class_map(communities, human, train_ids);
  const auto x_test = normalized_rows(features, test_ids);
  std::vector<std::string> truth_test;
  for (auto id : test_ids) truth_test.push_back(truth[id]);

  std::vector<ComparisonRow> rows;
  for (const auto& cell : train_cells(features, dim, human, communities, train_ids, svm, forest))
    rows.push_back(evaluate_cell(cell, x_test, truth_test, key, mapping));
  return rows;
}

void write_comparison_json(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows) {
  json table = json::array();
  for (const auto& r : rows) {
    json per_class = json::object();
    for (const auto& [cls, t] : r.result.per_class) per_class[cls] = {{"correct", t.correct}, {"total", t.total}};
    table.push_back({{"model", r.model},
                     {"labeling", r.labeling},
                     {"n_labels", r.n_labels},
                     {"accuracy", r.result.accuracy},
                     {"n_correct", r.result.n_correct},
                     {"n_total", r.result.n_total},
                     {"per_class", per_class}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << json{{"evaluations", table}}.dump(2) << '\n';
}

std::vector<ComparisonRow> read_comparison_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ComparisonRow> rows;
  try {
    const auto doc = json::parse(in);
    for (const auto& r : doc.at("evaluations")) {
      ComparisonRow row;
      row.model = r.at("model").get<std::string>();
      row.labeling = r.at("labeling").get<std::string>();
      row.n_labels = r.at("n_labels").get<std::size_t>();
      row.result.accuracy = r.at("accuracy").get<double>();
      row.result.n_correct = r.at("n_correct").get<std::size_t>();
      row.result.n_total = r.at("n_total").get<std::size_t>();
      for (const auto& [cls, t] : r.at("per_class").items())
        row.result.per_class[cls] = {t.at("correct").get<std::size_t>(), t.at("total").get<std::size_t>()};
      rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return rows;
}

void write_labeled_dataset(const std::filesystem::path& path, const Corpus& corpus, const Partition& p) {
  if (p.n_nodes() != corpus.size()) throw DataError("labeled dataset: partition does not cover the corpus");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "sentence,community_id\n";
  for (const auto& s : corpus.sentences())
    out << csv::format_record({s.text, std::to_string(p.community(s.id))}) << '\n';
}

void write_selection(const std::filesystem::path& path, const Selection& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  json j = {{"threshold", s.threshold}, {"source", s.source}};
  if (s.source == "sweep") {
    j["from_crossing"] = s.from_crossing;
    j["degenerate"] = s.degenerate;
  }
  out << j.dump(2) << '\n';
}

Selection read_selection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string() + " (run the sweep stage first)");
  try {
    auto j = json::parse(in);
    Selection s;
    s.threshold = j.at("threshold").get<double>();
    s.source = j.at("source").get<std::string>();
    s.from_crossing = j.value("from_crossing", false);
    s.degenerate = j.value("degenerate", false);
    return s;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string model_artifact(const std::string& model, const std::string& labeling) {
  return "model_" + model + "_" + labeling + ".json";
}

namespace {

const std::string kUnlabeledSweep = "corpus is unlabeled: threshold sweep skipped";
const std::string kUnlabeledEval = "corpus is unlabeled: training and evaluation skipped";
const std::string kDegenerate = "a score series is constant over the grid: used the grid minimum";

std::filesystem::path input(const std::filesystem::path& dir, const char* name) {
  auto p = dir / name;
  if (!std::filesystem::exists(p)) throw DataError("missing input artifact " + p.string());
  return p;
}

Corpus load_input_corpus(const PipelineConfig& config) {
  if (!std::filesystem::exists(config.corpus))
    throw CorpusError(CorpusErrorKind::missing_file, "no such file: " + config.corpus.string());
  const auto format = format_from_path(config.corpus);
  return load_corpus(config.corpus, format, corpus_has_labels(config.corpus, format));
}

AnswerKey load_input_key(const PipelineConfig& config, const Corpus& corpus) {
  AnswerKey key = config.answer_key ? load_answer_key(*config.answer_key) : AnswerKey::identity(corpus.classes());
  key.require_total(corpus.classes());
  return key;
}

std::vector<SparseVector> load_vectors(const std::filesystem::path& in, std::size_t n) {
  auto v = read_vectors(input(in, artifact::vectors));
  if (v.size() != n) throw DataError("vectors do not match the corpus size");
  return v;
}

Partition load_partition(const std::filesystem::path& in, std::size_t n) {
  auto p = read_partition(input(in, artifact::partition));
  if (p.n_nodes() != n) throw DataError("partition does not match the corpus size");
  return p;
}

std::map<std::string, std::string> read_string_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in).get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

StageOutput stage_preprocess(const PipelineConfig& config, const std::filesystem::path& out) {
  const auto corpus = load_input_corpus(config);
  const auto prep = make_preprocess_config(config);
  std::vector<TermBag> bags;
  bags.reserve(corpus.size());
  for (const auto& s : corpus.sentences()) bags.push_back(preprocess_sentence(s.text, prep));
  write_term_bags(out / artifact::preprocessed, bags);
  return {{artifact::preprocessed}, {}};
}

StageOutput stage_vectorize(const PipelineConfig&, const std::filesystem::path& in,
                            const std::filesystem::path& out) {
  const auto bags = read_term_bags(input(in, artifact::preprocessed));
  const auto vocab = fit_vocabulary(bags);
  std::vector<SparseVector> tfidf;
  tfidf.reserve(bags.size());
  for (const auto& bag : bags) tfidf.push_back(transform_tfidf(bag, vocab));
  write_vocabulary(out / artifact::vocabulary, vocab);
  write_vectors(out / artifact::vectors, tfidf);
  return {{artifact::vocabulary, artifact::vectors}, {}};
}

StageOutput stage_sweep(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out) {
  StageOutput result;
  Selection selection;
  const auto corpus = load_input_corpus(config);
  if (config.threshold) {
    selection = {*config.threshold, "fixed"};
  } else if (!corpus.labeled()) {
    selection = {config.unlabeled_threshold, "unlabeled_default"};
    result.notices.push_back(kUnlabeledSweep);
  } else {
    const auto vectors = load_vectors(in, corpus.size());
    const auto pairs = pairwise_similarities(vectors);
    const auto sweep = sweep_and_select(pairs, corpus, config.thresholds, config.louvain, config.threads);
    write_sweep_csv(out / artifact::sweep, sweep);
    write_curves_tsv(out / artifact::curves, sweep);
    result.files = {artifact::sweep, artifact::curves};
    selection = {sweep.best_threshold, "sweep", sweep.from_crossing, sweep.degenerate};
    if (sweep.degenerate) result.notices.push_back(kDegenerate);
  }
  write_selection(out / artifact::selection, selection);
  result.files.push_back(artifact::selection);
  return result;
}

StageOutput stage_graph(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out) {
  const double theta = config.threshold ? *config.threshold : read_selection(input(in, artifact::selection)).threshold;
  const auto vectors = read_vectors(input(in, artifact::vectors));
  const auto g = build_graph(pairwise_similarities(vectors), vectors.size(), theta);
  export_graph(g, out / artifact::graph, GraphFormat::edge_list);
  return {{artifact::graph}, {}};
}

StageOutput stage_detect(const PipelineConfig& config, const std::filesystem::path& in,
                         const std::filesystem::path& out) {
  const auto g = import_graph(input(in, artifact::graph), GraphFormat::edge_list);
  write_partition(out / artifact::partition, louvain_detect(g, config.louvain));
  return {{artifact::partition}, {}};
}

StageOutput stage_label(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out) {
  const auto corpus = load_input_corpus(config);
  const auto p = load_partition(in, corpus.size());
  StageOutput result;
  write_labeled_dataset(out / artifact::labeled, corpus, p);
  result.files.push_back(artifact::labeled);
  if (corpus.labeled()) {
    const auto map = build_class_map(p, corpus);
    write_class_map_json(out / artifact::class_map, map);
    write_ambiguity_json(out / artifact::ambiguity, ambiguity_report(map, corpus, p));
    result.files.push_back(artifact::class_map);
    result.files.push_back(artifact::ambiguity);
  }
  return result;
}

StageOutput stage_train(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out) {
  const auto corpus = load_input_corpus(config);
  if (!corpus.labeled()) return {{}, {kUnlabeledEval}};
  const auto vectors = load_vectors(in, corpus.size());
  const auto dim = read_vocabulary(input(in, artifact::vocabulary)).size();
  const auto p = load_partition(in, corpus.size());
  const auto split = split_train_test(corpus, config.train_ratio, config.split_seed, config.stratified);
  const auto human = corpus.labels();

  StageOutput result;
  for (const auto& cell :
       train_cells(vectors, dim, human, p.assignment(), split.train_ids, config.svm, config.forest)) {
    auto name = model_artifact(cell.model, cell.labeling);
    save_model(out / name, cell.trained);
    result.files.push_back(name);
  }
  const auto mapping = community_class_map(p.assignment(), human, split.train_ids);
  std::ofstream(out / artifact::community_map, std::ios::binary) << json(mapping).dump(2) << '\n';
  result.files.push_back(artifact::community_map);
  return result;
}

StageOutput stage_evaluate(const PipelineConfig& config, const std::filesystem::path& in,
                           const std::filesystem::path& out) {
  const auto corpus = load_input_corpus(config);
  if (!corpus.labeled()) return {{}, {kUnlabeledEval}};
  const auto key = load_input_key(config, corpus);
  const auto vectors = load_vectors(in, corpus.size());
  const auto split = split_train_test(corpus, config.train_ratio, config.split_seed, config.stratified);
  if (split.test_ids.empty()) throw DataError("test split is empty");
  const auto mapping = read_string_map(input(in, artifact::community_map));
  const auto human = corpus.labels();
  const auto p = load_partition(in, corpus.size());
  std::vector<std::string> community_train;
  for (auto id : split.train_ids) community_train.push_back(community_label(p.community(id)));
  const auto x_test = normalized_rows(vectors, split.test_ids);
  std::vector<std::string> truth_test;
  for (auto id : split.test_ids) truth_test.push_back(human[id]);

  std::vector<ComparisonRow> rows;
  for (const char* labeling : kLabelings) {
    for (const char* model : kModels) {
      auto path = in / model_artifact(model, labeling);
      if (!std::filesystem::exists(path)) throw DataError("missing model " + path.string());
      Cell cell{model, labeling, 0, load_model(path)};
      cell.n_labels = std::string(labeling) == "human" ? model_classes(cell.trained).size()
                                                       : count_distinct(community_train);
      rows.push_back(evaluate_cell(cell, x_test, truth_test, key, mapping));
    }
  }
  write_comparison_json(out / artifact::evaluation, rows);
  return {{artifact::evaluation}, {}};
}

StageOutput stage_report(const PipelineConfig& config, const std::filesystem::path& in,
                         const std::filesystem::path& out) {
  const auto corpus = load_input_corpus(config);
  const auto vocab = read_vocabulary(input(in, artifact::vocabulary));
  const auto selection = read_selection(input(in, artifact::selection));
  const auto g = import_graph(input(in, artifact::graph), GraphFormat::edge_list);
  const auto stats = graph_stats(g);
  const auto p = load_partition(in, corpus.size());

  std::ofstream o(out / artifact::report, std::ios::binary);
  if (!o) throw DataError("cannot write " + (out / artifact::report).string());
  o << "sentences          " << corpus.size() << '\n';
  o << "classes            " << (corpus.labeled() ? std::to_string(corpus.classes().size()) : "-") << '\n';
  o << "vocabulary         " << vocab.size() << '\n';
  o << "threshold          " << format_number(selection.threshold);
  if (selection.source == "sweep") o << (selection.from_crossing ? " (curve crossing)" : " (grid minimum)");
  else if (selection.source == "fixed") o << " (fixed)";
  else o << " (unlabeled default)";
  o << '\n';
  o << "edges              " << stats.n_edges << '\n';
  o << "components         " << stats.n_components << '\n';
  o << "communities        " << p.n_communities() << '\n';
  o << "single-node        " << p.n_singletons() << '\n';

  std::vector<std::string> notices;
  if (corpus.labeled()) {
    const auto map = build_class_map(p, corpus);
    const auto scores = split_merge_scores(map);
    o << "class-split score  " << format_number(scores.split_score) << '\n';
    o << "class-merge score  " << format_number(scores.merge_score) << '\n';
    o << "mixed communities  " << ambiguity_report(map, corpus, p).size() << '\n';

    const auto rows = read_comparison_json(input(in, artifact::evaluation));
    o << "\nlabeling    svm       random_forest\n";
    for (const char* labeling : kLabelings) {
      double acc[2] = {0.0, 0.0};
      for (const auto& row : rows)
        if (row.labeling == labeling) acc[row.model == "svm" ? 0 : 1] = row.result.accuracy;
      char line[96];
      std::snprintf(line, sizeof line, "%-11s %-9.4f %.4f\n", labeling, acc[0], acc[1]);
      o << line;
    }
    if (selection.degenerate) notices.push_back(kDegenerate);
  } else {
    if (selection.source == "unlabeled_default") notices.push_back(kUnlabeledSweep);
    notices.push_back(kUnlabeledEval);
  }
  for (const auto& n : notices) o << "note: " << n << '\n';
  return {{artifact::report}, {}};
}

namespace {

using StageFn = StageOutput (*)(const PipelineConfig&, const std::filesystem::path&, const std::filesystem::path&);

StageOutput preprocess_adapter(const PipelineConfig& c, const std::filesystem::path&,
                               const std::filesystem::path& out) {
  return stage_preprocess(c, out);
}

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
  static const std::vector<std::pair<std::string, StageFn>> table = {
      {"preprocess", preprocess_adapter}, {"vectorize", stage_vectorize}, {"sweep", stage_sweep},
      {"graph", stage_graph},             {"detect", stage_detect},       {"label", stage_label},
      {"train", stage_train},             {"evaluate", stage_evaluate},   {"report", stage_report},
  };
  return table;
}

StageFn find_stage(const std::string& name) {
  for (const auto& [n, fn] : stage_table())
    if (n == name) return fn;
  throw ConfigError("unknown stage '" + name + "'");
}

// Runs `body(staging)` and moves what it wrote into `dir`. The staging
// directory is removed whatever happens.
template <class F>
std::vector<std::string> staged(const std::filesystem::path& dir, F&& body) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto staging = dir / ".staging";
  std::filesystem::remove_all(staging, ec);
  std::filesystem::create_directories(staging, ec);
  if (ec) throw DataError("cannot create " + staging.string() + ": " + ec.message());
  try {
    std::vector<std::string> files = body(staging);
    for (const auto& f : files) std::filesystem::rename(staging / f, dir / f);
    std::filesystem::remove_all(staging);
    return files;
  } catch (...) {
    std::filesystem::remove_all(staging, ec);
    throw;
  }
}

}  // namespace

StageOutput run_stage(const std::string& name, const PipelineConfig& config, std::ostream& log) {
  config.validate();
  const auto fn = find_stage(name);
  StageOutput result;
  // Read cached upstream artifacts from the output directory itself.
  const auto dir = config.output_dir;
  result.files = staged(dir, [&](const std::filesystem::path& staging) {
    result = guarded(name, [&] { return fn(config, dir, staging); });
    return result.files;
  });
  log << "[" << name << "] " << result.files.size() << " file(s)\n";
  for (const auto& n : result.notices) log << "note: " << n << '\n';
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  PipelineResult r;
  const auto dir = config.output_dir;
  auto files = staged(dir, [&](const std::filesystem::path& staging) {
    std::vector<std::string> written;
    for (const auto& [name, fn] : stage_table()) {
      auto out = guarded(name, [&] { return fn(config, staging, staging); });
      log << "[" << name << "] " << out.files.size() << " file(s)\n";
      written.insert(written.end(), out.files.begin(), out.files.end());
      for (auto& n : out.notices)
        if (std::find(r.notices.begin(), r.notices.end(), n) == r.notices.end()) r.notices.push_back(n);
    }

    // Summaries for callers, rebuilt from the staged artifacts.
    guarded("summary", [&] {
      const auto corpus = load_input_corpus(config);
      r.labeled = corpus.labeled();
      r.selection = read_selection(staging / artifact::selection);
      r.graph = graph_stats(import_graph(staging / artifact::graph, GraphFormat::edge_list));
      r.partition = load_partition(staging, corpus.size());
      if (r.labeled) {
        const auto map = build_class_map(r.partition, corpus);
        r.scores = split_merge_scores(map);
        r.ambiguity = ambiguity_report(map, corpus, r.partition);
        r.comparison = read_comparison_json(staging / artifact::evaluation);
      }
    });
    return written;
  });
  for (const auto& f : files) r.outputs.push_back(dir / f);
  for (const auto& n : r.notices) log << "note: " << n << '\n';
  return r;
}

}  // namespace commlabel
