#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "commlabel/corpus.hpp"
#include "commlabel/louvain.hpp"
#include "commlabel/vectorizer.hpp"

namespace commlabel {

/// Contingency counts between detected communities (rows) and reference
/// classes (columns, sorted by name).
class ClassMap {
 public:
  ClassMap() = default;
  ClassMap(std::vector<std::string> classes, std::vector<std::vector<std::size_t>> counts);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t n_communities() const noexcept { return counts_.size(); }
  std::size_t count(std::uint32_t community, std::size_t cls) const { return counts_.at(community).at(cls); }
  const std::vector<std::size_t>& row(std::uint32_t community) const { return counts_.at(community); }
  std::size_t community_size(std::uint32_t community) const;
  std::size_t total() const;

 private:
  std::vector<std::string> classes_;
  std::vector<std::vector<std::size_t>> counts_;
};

/// Throws DataError when the corpus is unlabeled or sizes disagree.
ClassMap build_class_map(const Partition& p, const Corpus& corpus);
ClassMap build_class_map(std::span<const std::uint32_t> communities, std::span<const std::string> labels);

struct SplitMergeScores {
  double split_score = 0.0;
  double merge_score = 0.0;
  /// Per class (in ClassMap order): communities holding any of its sentences.
  std::vector<std::size_t> split_vector;
  /// Per non-empty community: classes present in it.
  std::vector<std::size_t> merge_vector;
};

SplitMergeScores split_merge_scores(const ClassMap& map);

/// Means of already-counted split/merge vectors. Throws
/// std::invalid_argument on an empty vector.
SplitMergeScores split_merge_from_vectors(std::vector<std::size_t> split_vector,
                                          std::vector<std::size_t> merge_vector);

/// Majority reference class of every non-empty community; ties go to the
/// lexicographically smallest class.
std::map<std::uint32_t, std::string> majority_classes(const ClassMap& map);

struct NormalizedSeries {
  std::vector<double> values;
  bool constant = false;  // values are all zero in that case
};

NormalizedSeries min_max_normalize(std::span<const double> series);

struct ThresholdChoice {
  double threshold = 0.0;
  bool from_crossing = false;  // false: grid argmin fallback
  double score_sum = 0.0;      // split_norm + merge_norm at the choice
};

/// Intersection of the piecewise-linear normalized curves; among several
/// crossings the one with the smallest curve sum wins (then the smallest
/// threshold). Without a crossing, the grid argmin of the sum.
ThresholdChoice select_threshold(std::span<const double> grid, std::span<const double> split_norm,
                                 std::span<const double> merge_norm);

struct SweepRecord {
  double threshold = 0.0;
  std::size_t n_edges = 0;
  std::size_t n_communities = 0;
  std::size_t n_singletons = 0;
  double split_score = 0.0;
  double merge_score = 0.0;
  double split_norm = 0.0;
  double merge_norm = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  double best_threshold = 0.0;
  bool from_crossing = false;
  /// A score series was constant over the grid.
  bool degenerate = false;
};

/// Builds, clusters and scores one graph per grid threshold, then picks the
/// optimum. Per-threshold work runs on up to `threads` workers (0 = hardware
/// concurrency); results do not depend on scheduling.
SweepResult sweep_and_select(const SimilarityPairs& pairs, const Corpus& corpus, std::span<const double> grid,
                             const LouvainConfig& config, unsigned threads = 0);

/// Inclusive grid start, start+step, ... <= stop (rounded to 1e-9).
std::vector<double> threshold_grid(double start, double stop, double step);
/// Parses `start:stop:step`; throws ConfigError.
std::vector<double> parse_threshold_grid(const std::string& text);

struct FlaggedSentence {
  std::size_t id = 0;
  std::string text;
  std::string label;
  bool minority = false;  // label differs from the community's majority class
};

struct AmbiguityEntry {
  std::uint32_t community = 0;
  std::string majority_class;
  /// (class, count), majority first.
  std::vector<std::pair<std::string, std::size_t>> classes;
  /// Minority sentences first (rarest class first), then the majority.
  std::vector<FlaggedSentence> sentences;
};

using AmbiguityReport = std::vector<AmbiguityEntry>;

/// One entry per community spanning two or more classes.
AmbiguityReport ambiguity_report(const ClassMap& map, const Corpus& corpus, const Partition& p);

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
void write_curves_tsv(const std::filesystem::path& path, const SweepResult& sweep);
void write_class_map_json(const std::filesystem::path& path, const ClassMap& map);
void write_ambiguity_json(const std::filesystem::path& path, const AmbiguityReport& report);

/// Fixed-format number used across reports.
std::string format_number(double x);

}  // namespace commlabel
