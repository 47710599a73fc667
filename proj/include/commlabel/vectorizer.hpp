#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commlabel/textprep.hpp"

namespace commlabel {

struct SparseEntry {
  std::uint32_t index = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse nonnegative vector: strictly increasing indices, no stored zeros.
class SparseVector {
 public:
  SparseVector() = default;

  /// Sorts, sums duplicate indices and drops zeros. Throws
  /// std::invalid_argument on a negative or non-finite weight.
  static SparseVector from_entries(std::vector<SparseEntry> entries);

  const std::vector<SparseEntry>& entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Weight at `index`, zero when absent.
  double at(std::uint32_t index) const;
  double norm() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
};

double dot(const SparseVector& u, const SparseVector& v);

/// u / |u|, or the empty vector when |u| = 0.
SparseVector l2_normalized(const SparseVector& u);

/// Term dictionary with document frequencies. Indices follow lexicographic
/// term order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs);

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n_docs() const noexcept { return n_docs_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::size_t df(std::size_t index) const { return df_.at(index); }
  std::optional<std::uint32_t> find(const std::string& term) const;

  /// FNV-1a over the terms and their document frequencies.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::map<std::string, std::uint32_t> index_;
  std::size_t n_docs_ = 0;
};

/// Throws std::invalid_argument on an empty document list.
Vocabulary fit_vocabulary(std::span<const TermBag> docs);

/// weight(t) = count(t) * ln(n_docs / df(t)). Unknown terms are ignored.
SparseVector transform_tfidf(const TermBag& doc, const Vocabulary& vocab);

/// In [0, 1]; zero when either vector is zero.
double cosine_similarity(const SparseVector& u, const SparseVector& v);

struct SimilarityPair {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double weight = 0.0;
};

/// All strictly positive pairwise similarities, sorted by (i, j). Pairs not
/// listed are exactly zero.
struct SimilarityPairs {
  std::size_t n_nodes = 0;
  std::vector<SimilarityPair> pairs;

  double weight(std::uint32_t a, std::uint32_t b) const;
};

/// Inverted-index all-pairs cosine; visits only pairs sharing a term.
SimilarityPairs pairwise_similarities(std::span<const SparseVector> vectors);

// Artifact IO. Doubles round-trip exactly.
void write_term_bags(const std::filesystem::path& path, std::span<const TermBag> bags);
std::vector<TermBag> read_term_bags(const std::filesystem::path& path);
void write_vectors(const std::filesystem::path& path, std::span<const SparseVector> vectors);
std::vector<SparseVector> read_vectors(const std::filesystem::path& path);
void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary read_vocabulary(const std::filesystem::path& path);

}  // namespace commlabel
