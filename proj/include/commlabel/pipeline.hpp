#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commlabel/classify.hpp"
#include "commlabel/classmap.hpp"
#include "commlabel/corpus.hpp"
#include "commlabel/louvain.hpp"
#include "commlabel/simgraph.hpp"
#include "commlabel/textprep.hpp"
#include "commlabel/vectorizer.hpp"

namespace commlabel {

struct PipelineConfig {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> stopwords;  // built-in list when absent
  std::optional<std::filesystem::path> lexicon;    // built-in lexicon when absent
  std::optional<std::filesystem::path> answer_key; // identity key when absent
  bool synonyms = true;
  bool bigrams = true;
  std::vector<double> thresholds = threshold_grid(0.0, 0.9, 0.1);
  /// Fixed threshold; skips selection. Used for unlabeled corpora too.
  std::optional<double> threshold;
  double unlabeled_threshold = 0.5;
  LouvainConfig louvain;
  SvmConfig svm;
  ForestConfig forest;
  double train_ratio = 0.8;
  std::uint64_t split_seed = 0;
  bool stratified = false;
  std::filesystem::path output_dir = "commlabel-out";
  unsigned threads = 0;

  /// Sets one `key = value` option. Throws ConfigError on unknown keys or
  /// bad values. Seeds: split_seed, louvain_seed, model_seed.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError when invariants fail.
  void validate() const;
};

/// Reads `key = value` lines; `#` comments and blank lines ignored.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void apply_config_text(PipelineConfig& config, const std::string& text);

/// Features and term statistics for a corpus.
struct Featurized {
  std::vector<TermBag> bags;
  Vocabulary vocabulary;
  std::vector<SparseVector> tfidf;
};

PreprocessConfig make_preprocess_config(const PipelineConfig& config);
Featurized featurize(const Corpus& corpus, const PreprocessConfig& config);

struct ComparisonRow {
  std::string model;     // svm | random_forest
  std::string labeling;  // human | community
  std::size_t n_labels = 0;
  EvalResult result;
};

/// Trains {SVM, forest} x {human, community} on `train_ids` and scores the
/// test ids at message level against `truth`. Community predictions map to
/// classes by training-split majority over `human`. Features are
/// L2-normalized before training.
std::vector<ComparisonRow> compare_labelings(std::span<const SparseVector> features, std::size_t dim,
                                             std::span<const std::string> human,
                                             std::span<const std::uint32_t> communities,
                                             std::span<const std::string> truth,
                                             const std::vector<std::size_t>& train_ids,
                                             const std::vector<std::size_t>& test_ids, const AnswerKey& key,
                                             const SvmConfig& svm, const ForestConfig& forest);

/// Community -> majority class over the given ids, as label strings.
std::map<std::string, std::string> community_class_map(std::span<const std::uint32_t> communities,
                                                       std::span<const std::string> human,
                                                       const std::vector<std::size_t>& ids);

void write_comparison_json(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows);

/// Where the working threshold came from: "sweep", "fixed" or
/// "unlabeled_default".
struct Selection {
  double threshold = 0.0;
  std::string source;
  bool from_crossing = false;
  bool degenerate = false;
};

void write_selection(const std::filesystem::path& path, const Selection& s);
Selection read_selection(const std::filesystem::path& path);

/// Artifact file names shared by `run` and the single-stage commands.
namespace artifact {
inline constexpr const char* preprocessed = "preprocessed.jsonl";
inline constexpr const char* vocabulary = "vocabulary.json";
inline constexpr const char* vectors = "vectors.jsonl";
inline constexpr const char* sweep = "sweep.csv";
inline constexpr const char* curves = "curves.tsv";
inline constexpr const char* selection = "selection.json";
inline constexpr const char* graph = "graph.edges";
inline constexpr const char* partition = "partition.csv";
inline constexpr const char* labeled = "labeled.csv";
inline constexpr const char* class_map = "class_map.json";
inline constexpr const char* ambiguity = "ambiguity.json";
inline constexpr const char* community_map = "community_map.json";
inline constexpr const char* evaluation = "evaluation.json";
inline constexpr const char* report = "report.txt";
}  // namespace artifact

/// Model artifact name for one {model, labeling} cell, e.g. model_svm_human.json.
std::string model_artifact(const std::string& model, const std::string& labeling);

// Single stages. Each reads upstream artifacts from `in`, writes its own into
// `out` and returns the names it wrote. Re-running a stage on cached inputs
// reproduces its outputs byte for byte.
struct StageOutput {
  std::vector<std::string> files;
  std::vector<std::string> notices;
};

StageOutput stage_preprocess(const PipelineConfig& config, const std::filesystem::path& out);
StageOutput stage_vectorize(const PipelineConfig& config, const std::filesystem::path& in,
                            const std::filesystem::path& out);
StageOutput stage_sweep(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out);
StageOutput stage_graph(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out);
StageOutput stage_detect(const PipelineConfig& config, const std::filesystem::path& in,
                         const std::filesystem::path& out);
StageOutput stage_label(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out);
StageOutput stage_train(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out);
StageOutput stage_evaluate(const PipelineConfig& config, const std::filesystem::path& in,
                           const std::filesystem::path& out);
StageOutput stage_report(const PipelineConfig& config, const std::filesystem::path& in,
                         const std::filesystem::path& out);

/// Runs one named stage against config.output_dir. Outputs land atomically;
/// errors carry the stage name.
StageOutput run_stage(const std::string& name, const PipelineConfig& config, std::ostream& log);

struct PipelineResult {
  bool labeled = false;
  Selection selection;
  GraphStats graph;
  Partition partition;
  std::optional<SplitMergeScores> scores;
  std::optional<AmbiguityReport> ambiguity;
  std::vector<ComparisonRow> comparison;
  std::vector<std::string> notices;
  std::vector<std::filesystem::path> outputs;
};

/// Runs preprocess -> vectorize -> sweep -> graph -> detect -> label ->
/// train -> evaluate -> report and writes every artifact into
/// config.output_dir. Outputs appear only on success. Errors carry the
/// failing stage name.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log);

/// Community-labeled dataset CSV: `sentence,community_id`.
void write_labeled_dataset(const std::filesystem::path& path, const Corpus& corpus, const Partition& p);

std::vector<ComparisonRow> read_comparison_json(const std::filesystem::path& path);

}  // namespace commlabel
