#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "commlabel/corpus.hpp"
#include "commlabel/vectorizer.hpp"

namespace commlabel {

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 0;
};

/// One-vs-rest linear SVM. Class names are sorted; scores are w.x + b.
struct LinearSvmModel {
  std::vector<std::string> classes;
  std::size_t dim = 0;
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> bias;
  SvmConfig config;
  double training_accuracy = 0.0;
  std::uint64_t vocabulary_fingerprint = 0;
};

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;  // 0 = grow until pure
  bool bootstrap = true;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Axis-aligned CART node. Leaves have feature < 0 and carry class counts.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;  // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<double> distribution;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // root at 0
};

struct RandomForestModel {
  std::vector<std::string> classes;
  std::size_t dim = 0;
  std::vector<DecisionTree> trees;
  ForestConfig config;
  /// Out-of-bag accuracy; absent when no sample was ever out of bag.
  std::optional<double> oob_accuracy;
  std::uint64_t vocabulary_fingerprint = 0;
};

using Model = std::variant<LinearSvmModel, RandomForestModel>;

/// One-vs-rest hinge loss fit by seeded stochastic subgradient descent
/// (step 1/(lambda t), bias as an extra constant feature). Throws
/// std::invalid_argument with fewer than two classes.
LinearSvmModel train_linear_svm(std::span<const SparseVector> xs, std::span<const std::string> ys,
                                std::size_t dim, const SvmConfig& config);

/// Gini CART trees on bootstrap samples with sqrt(dim) candidate features
/// per split. Trees use independent seed streams, so the model does not
/// depend on thread scheduling.
RandomForestModel train_random_forest(std::span<const SparseVector> xs, std::span<const std::string> ys,
                                      std::size_t dim, const ForestConfig& config);

std::vector<double> decision_scores(const LinearSvmModel& model, const SparseVector& x);
/// Votes per class (model.classes order); sums to n_trees.
std::vector<std::size_t> forest_votes(const RandomForestModel& model, const SparseVector& x);

/// Argmax; ties go to the lexicographically smallest class.
std::string predict(const LinearSvmModel& model, const SparseVector& x);
std::string predict(const RandomForestModel& model, const SparseVector& x);
std::string predict(const Model& model, const SparseVector& x);

const std::vector<std::string>& model_classes(const Model& model);
std::string model_kind(const Model& model);

struct ClassTally {
  std::size_t correct = 0;
  std::size_t total = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  std::size_t n_correct = 0;
  std::size_t n_total = 0;
  /// Keyed by true reference class.
  std::map<std::string, ClassTally> per_class;
};

/// Hit ratio of `predicted` against reference classes `truth`. A predicted
/// label is first translated by `label_to_class` (when given), then both
/// sides are mapped through `key` (when given) and compared as message ids.
/// Throws DataError for a predicted label missing from label_to_class.
EvalResult evaluate_predictions(std::span<const std::string> predicted, std::span<const std::string> truth,
                                const AnswerKey* key = nullptr,
                                const std::map<std::string, std::string>* label_to_class = nullptr);

EvalResult evaluate(const Model& model, std::span<const SparseVector> xs, std::span<const std::string> truth,
                    const AnswerKey* key = nullptr,
                    const std::map<std::string, std::string>* label_to_class = nullptr);

/// JSON model files with a format version and the vocabulary fingerprint.
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace commlabel
