#include "commlabel/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "commlabel/error.hpp"

namespace commlabel {

using nlohmann::json;

SparseVector SparseVector::from_entries(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  SparseVector v;
  for (const auto& e : entries) {
    if (!std::isfinite(e.weight) || e.weight < 0.0)
      throw std::invalid_argument("sparse vector weights must be finite and nonnegative");
    if (!v.entries_.empty() && v.entries_.back().index == e.index)
      v.entries_.back().weight += e.weight;
    else
      v.entries_.push_back(e);
  }
  std::erase_if(v.entries_, [](const SparseEntry& e) { return e.weight == 0.0; });
  return v;
}

double SparseVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const SparseEntry& e, std::uint32_t i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->weight : 0.0;
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.weight * e.weight;
  return std::sqrt(sum);
}

double dot(const SparseVector& u, const SparseVector& v) {
  const auto& a = u.entries();
  const auto& b = v.entries();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      sum += a[i].weight * b[j].weight;
      ++i;
      ++j;
    }
  }
  return sum;
}

SparseVector l2_normalized(const SparseVector& u) {
  double n = u.norm();
  if (n == 0.0) return {};
  std::vector<SparseEntry> out = u.entries();
  for (auto& e : out) e.weight /= n;
  return SparseVector::from_entries(std::move(out));
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs)
    : terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
  if (terms_.size() != df_.size()) throw std::invalid_argument("vocabulary: terms/df size mismatch");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] < 1 || df_[i] > n_docs_) throw std::invalid_argument("vocabulary: df out of range for '" + terms_[i] + "'");
    if (!index_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second)
      throw std::invalid_argument("vocabulary: duplicate term '" + terms_[i] + "'");
  }
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(std::to_string(n_docs_));
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    mix("\x1f");
    mix(terms_[i]);
    mix("\x1e");
    mix(std::to_string(df_[i]));
  }
  return h;
}

Vocabulary fit_vocabulary(std::span<const TermBag> docs) {
  if (docs.empty()) throw std::invalid_argument("fit_vocabulary: no documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs)
    for (const auto& [term, count] : doc)
      if (count > 0) ++df[term];
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  terms.reserve(df.size());
  counts.reserve(df.size());
  for (auto& [term, n] : df) {
    terms.push_back(term);
    counts.push_back(n);
  }
  return Vocabulary(std::move(terms), std::move(counts), docs.size());
}

SparseVector transform_tfidf(const TermBag& doc, const Vocabulary& vocab) {
  std::vector<SparseEntry> entries;
  const double n_docs = static_cast<double>(vocab.n_docs());
  for (const auto& [term, count] : doc) {
    auto idx = vocab.find(term);
    if (!idx || count == 0) continue;
    double idf = std::log(n_docs / static_cast<double>(vocab.df(*idx)));
    double w = static_cast<double>(count) * idf;
    if (w > 0.0) entries.push_back({*idx, w});
  }
  return SparseVector::from_entries(std::move(entries));
}

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double cosine_similarity(const SparseVector& u, const SparseVector& v) {
  double nu = u.norm();
  double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return clamp_unit(dot(u, v) / (nu * nv));
}

double SimilarityPairs::weight(std::uint32_t a, std::uint32_t b) const {
  if (a == b) return 0.0;
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(pairs.begin(), pairs.end(), std::pair{a, b},
                             [](const SimilarityPair& p, const std::pair<std::uint32_t, std::uint32_t>& key) {
                               return std::pair{p.i, p.j} < key;
                             });
  return (it != pairs.end() && it->i == a && it->j == b) ? it->weight : 0.0;
}

SimilarityPairs pairwise_similarities(std::span<const SparseVector> vectors) {
  const auto n = vectors.size();
  SimilarityPairs out;
  out.n_nodes = n;

  std::uint32_t dim = 0;
  for (const auto& v : vectors)
    if (!v.empty()) dim = std::max(dim, v.entries().back().index + 1);

  struct Posting {
    std::uint32_t doc;
    double weight;
  };
  std::vector<std::vector<Posting>> postings(dim);
  std::vector<double> norms(n);
  for (std::size_t d = 0; d < n; ++d) {
    norms[d] = vectors[d].norm();
    for (const auto& e : vectors[d].entries()) postings[e.index].push_back({static_cast<std::uint32_t>(d), e.weight});
  }

  // Products are accumulated per pair in increasing term order, the same
  // order a sorted-merge dot product uses, so both routes agree bitwise.
  std::vector<double> acc(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (const auto& e : vectors[i].entries()) {
      const auto& list = postings[e.index];
      auto start = std::upper_bound(list.begin(), list.end(), static_cast<std::uint32_t>(i),
                                    [](std::uint32_t d, const Posting& p) { return d < p.doc; });
      for (auto it = start; it != list.end(); ++it) {
        if (!seen[it->doc]) {
          seen[it->doc] = 1;
          touched.push_back(it->doc);
        }
        acc[it->doc] += e.weight * it->weight;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto j : touched) {
      double sim = clamp_unit(acc[j] / (norms[i] * norms[j]));
      acc[j] = 0.0;
      seen[j] = 0;
      if (sim > 0.0) out.pairs.push_back({static_cast<std::uint32_t>(i), j, sim});
    }
  }
  return out;
}

void write_term_bags(const std::filesystem::path& path, std::span<const TermBag> bags) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < bags.size(); ++i) {
    json terms = json::object();
    for (const auto& [term, count] : bags[i]) terms[term] = count;
    out << json{{"id", i}, {"terms", terms}}.dump() << '\n';
  }
}

namespace {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

void expect_dense_id(const json& row, std::size_t expected, const std::filesystem::path& path) {
  if (!row.contains("id") || row["id"].get<std::size_t>() != expected)
    throw DataError(path.string() + ": ids must be dense and in order (expected " + std::to_string(expected) + ")");
}

}  // namespace

std::vector<TermBag> read_term_bags(const std::filesystem::path& path) {
  std::vector<TermBag> bags;
  try {
    for (const auto& row : read_jsonl(path)) {
      expect_dense_id(row, bags.size(), path);
      TermBag bag;
      for (const auto& [term, count] : row.at("terms").items()) bag[term] = count.get<std::size_t>();
      bags.push_back(std::move(bag));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return bags;
}

void write_vectors(const std::filesystem::path& path, std::span<const SparseVector> vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    json terms = json::array();
    for (const auto& e : vectors[i].entries()) terms.push_back(json::array({e.index, e.weight}));
    out << json{{"id", i}, {"terms", terms}}.dump() << '\n';
  }
}

std::vector<SparseVector> read_vectors(const std::filesystem::path& path) {
  std::vector<SparseVector> vectors;
  try {
    for (const auto& row : read_jsonl(path)) {
      expect_dense_id(row, vectors.size(), path);
      std::vector<SparseEntry> entries;
      for (const auto& pair : row.at("terms"))
        entries.push_back({pair.at(0).get<std::uint32_t>(), pair.at(1).get<double>()});
      vectors.push_back(SparseVector::from_entries(std::move(entries)));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return vectors;
}

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  json terms = json::array();
  for (std::size_t i = 0; i < vocab.size(); ++i) terms.push_back(json::array({vocab.terms()[i], vocab.df(i)}));
  out << json{{"n_docs", vocab.n_docs()}, {"terms", terms}}.dump(1) << '\n';
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    auto doc = json::parse(in);
    std::vector<std::string> terms;
    std::vector<std::size_t> df;
    for (const auto& t : doc.at("terms")) {
      terms.push_back(t.at(0).get<std::string>());
      df.push_back(t.at(1).get<std::size_t>());
    }
    return Vocabulary(std::move(terms), std::move(df), doc.at("n_docs").get<std::size_t>());
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace commlabel
