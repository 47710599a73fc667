#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "commlabel/error.hpp"

namespace commlabel {

struct Sentence {
  std::size_t id = 0;
  std::string text;
  std::optional<std::string> label;
};

/// Why a corpus could not be loaded or split.
enum class CorpusErrorKind {
  missing_file,
  malformed_row,
  duplicate_sentence,
  empty_sentence,
  empty_corpus,
  too_few_class_members,
};

class CorpusError : public DataError {
 public:
  CorpusError(CorpusErrorKind kind, const std::string& what) : DataError(what), kind_(kind) {}
  CorpusErrorKind kind() const noexcept { return kind_; }

 private:
  CorpusErrorKind kind_;
};

/// Ordered set of unique sentences with dense ids in insertion order.
class Corpus {
 public:
  /// Appends a sentence. Rejects empty (after trim) and duplicate texts.
  void add(std::string text, std::optional<std::string> label = std::nullopt);

  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }
  const Sentence& operator[](std::size_t id) const { return sentences_.at(id); }
  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }

  /// True when every sentence carries a label (and there is at least one).
  bool labeled() const noexcept;
  const std::set<std::string>& classes() const noexcept { return classes_; }

  /// Labels in id order; throws DataError on an unlabeled sentence.
  std::vector<std::string> labels() const;
  std::vector<std::string> texts() const;

 private:
  std::vector<Sentence> sentences_;
  std::set<std::string> classes_;
  std::unordered_set<std::string> seen_;
  std::size_t n_labeled_ = 0;
};

enum class CorpusFormat { csv, jsonl };

/// Picks jsonl for .jsonl/.json extensions, csv otherwise.
CorpusFormat format_from_path(const std::filesystem::path& path);

/// Loads `sentence[,class]` CSV or `{"sentence":..,"class":..}` JSONL.
/// With labeled=false any class column is ignored.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, bool labeled);
/// True when the CSV header has a `class` column or the first JSONL
/// object has a `class` key.
bool corpus_has_labels(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

/// Class name -> response message id.
class AnswerKey {
 public:
  AnswerKey() = default;
  explicit AnswerKey(std::map<std::string, std::string> messages) : messages_(std::move(messages)) {}

  /// Identity key: every class answers with its own name.
  static AnswerKey identity(const std::set<std::string>& classes);

  const std::string& message_for(const std::string& cls) const;
  bool contains(const std::string& cls) const { return messages_.count(cls) != 0; }
  const std::map<std::string, std::string>& messages() const noexcept { return messages_; }

  /// Throws DataError unless every class in `classes` is mapped.
  void require_total(const std::set<std::string>& classes) const;

 private:
  std::map<std::string, std::string> messages_;
};

/// Reads a `class,message_id` CSV.
AnswerKey load_answer_key(const std::filesystem::path& path);
void save_answer_key(const AnswerKey& key, const std::filesystem::path& path);

struct TrainTestSplit {
  Corpus train;
  Corpus test;
  /// Parent-corpus id of each sentence in train/test, ascending.
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
};

/// Train size is round-half-up(n * ratio). A stratified split allocates
/// per-class train counts by largest remainder, so each class lands
/// within one sentence of its exact share. Same seed, same split.
TrainTestSplit split_train_test(const Corpus& corpus, double train_ratio, std::uint64_t seed,
                                bool stratified);

/// Returns the sub-corpus made of `ids` (in that order), re-densified.
Corpus subset(const Corpus& corpus, const std::vector<std::size_t>& ids);

}  // namespace commlabel
