#include "commlabel/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "commlabel/csv.hpp"
#include "commlabel/rng.hpp"

namespace commlabel {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(CorpusErrorKind::missing_file, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Corpus parse_csv_corpus(const std::string& text, bool labeled, const std::string& source) {
  auto records = csv::parse(text);
  if (records.empty()) throw CorpusError(CorpusErrorKind::empty_corpus, "empty corpus: " + source);

  const auto& header = records.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return i;
    return std::nullopt;
  };
  auto sentence_col = column("sentence");
  if (!sentence_col)
    throw CorpusError(CorpusErrorKind::malformed_row, source + ": header lacks a 'sentence' column");
  auto class_col = column("class");
  if (labeled && !class_col)
    throw CorpusError(CorpusErrorKind::malformed_row, source + ": header lacks a 'class' column");

  Corpus corpus;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (row.size() != header.size())
      throw CorpusError(CorpusErrorKind::malformed_row,
                        source + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(header.size()));
    std::optional<std::string> label;
    if (labeled) {
      if (trim(row[*class_col]).empty())
        throw CorpusError(CorpusErrorKind::malformed_row,
                          source + ": row " + std::to_string(r + 1) + " has an empty class");
      label = row[*class_col];
    }
    corpus.add(row[*sentence_col], std::move(label));
  }
  if (corpus.empty()) throw CorpusError(CorpusErrorKind::empty_corpus, "empty corpus: " + source);
  return corpus;
}

Corpus parse_jsonl_corpus(const std::string& text, bool labeled, const std::string& source) {
  Corpus corpus;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto where = source + ": line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusError(CorpusErrorKind::malformed_row, where + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("sentence") || !obj["sentence"].is_string())
      throw CorpusError(CorpusErrorKind::malformed_row, where + ": missing string 'sentence'");
    std::optional<std::string> label;
    if (labeled) {
      if (!obj.contains("class") || !obj["class"].is_string() ||
          trim(obj["class"].get_ref<const std::string&>()).empty())
        throw CorpusError(CorpusErrorKind::malformed_row, where + ": missing string 'class'");
      label = obj["class"].get<std::string>();
    }
    corpus.add(obj["sentence"].get<std::string>(), std::move(label));
  }
  if (corpus.empty()) throw CorpusError(CorpusErrorKind::empty_corpus, "empty corpus: " + source);
  return corpus;
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

}  // namespace

void Corpus::add(std::string text, std::optional<std::string> label) {
  if (trim(text).empty())
    throw CorpusError(CorpusErrorKind::empty_sentence,
                      "sentence " + std::to_string(sentences_.size()) + " is empty");
  if (!seen_.insert(text).second)
    throw CorpusError(CorpusErrorKind::duplicate_sentence, "duplicate sentence: \"" + text + "\"");
  if (label) {
    classes_.insert(*label);
    ++n_labeled_;
  }
  sentences_.push_back(Sentence{sentences_.size(), std::move(text), std::move(label)});
}

bool Corpus::labeled() const noexcept { return !sentences_.empty() && n_labeled_ == sentences_.size(); }

std::vector<std::string> Corpus::labels() const {
  std::vector<std::string> out;
  out.reserve(sentences_.size());
  for (const auto& s : sentences_) {
    if (!s.label) throw DataError("sentence " + std::to_string(s.id) + " has no label");
    out.push_back(*s.label);
  }
  return out;
}

std::vector<std::string> Corpus::texts() const {
  std::vector<std::string> out;
  out.reserve(sentences_.size());
  for (const auto& s : sentences_) out.push_back(s.text);
  return out;
}

CorpusFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? CorpusFormat::jsonl : CorpusFormat::csv;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, bool labeled) {
  if (!std::filesystem::exists(path))
    throw CorpusError(CorpusErrorKind::missing_file, "no such file: " + path.string());
  auto text = read_file(path);
  if (trim(text).empty()) throw CorpusError(CorpusErrorKind::empty_corpus, "empty corpus: " + path.string());
  return format == CorpusFormat::csv ? parse_csv_corpus(text, labeled, path.string())
                                     : parse_jsonl_corpus(text, labeled, path.string());
}

bool corpus_has_labels(const std::filesystem::path& path, CorpusFormat format) {
  auto text = read_file(path);
  if (format == CorpusFormat::csv) {
    auto records = csv::parse(text);
    if (records.empty()) return false;
    for (const auto& h : records.front())
      if (trim(h) == "class") return true;
    return false;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      return obj.is_object() && obj.contains("class");
    } catch (const nlohmann::json::parse_error&) {
      return false;
    }
  }
  return false;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const bool labeled = corpus.labeled();
  if (format == CorpusFormat::csv) {
    out << (labeled ? "sentence,class\n" : "sentence\n");
    for (const auto& s : corpus.sentences()) {
      csv::Record rec{s.text};
      if (labeled) rec.push_back(*s.label);
      out << csv::format_record(rec) << '\n';
    }
  } else {
    for (const auto& s : corpus.sentences()) {
      nlohmann::json obj{{"sentence", s.text}};
      if (labeled) obj["class"] = *s.label;
      out << obj.dump() << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

AnswerKey AnswerKey::identity(const std::set<std::string>& classes) {
  std::map<std::string, std::string> m;
  for (const auto& c : classes) m.emplace(c, c);
  return AnswerKey(std::move(m));
}

const std::string& AnswerKey::message_for(const std::string& cls) const {
  auto it = messages_.find(cls);
  if (it == messages_.end()) throw DataError("answer key has no message for class '" + cls + "'");
  return it->second;
}

void AnswerKey::require_total(const std::set<std::string>& classes) const {
  for (const auto& c : classes)
    if (!contains(c)) throw DataError("answer key has no message for class '" + c + "'");
}

AnswerKey load_answer_key(const std::filesystem::path& path) {
  auto records = csv::parse(read_file(path));
  if (records.empty()) throw CorpusError(CorpusErrorKind::empty_corpus, "empty answer key: " + path.string());
  const auto& header = records.front();
  if (header.size() != 2 || trim(header[0]) != "class" || trim(header[1]) != "message_id")
    throw CorpusError(CorpusErrorKind::malformed_row,
                      path.string() + ": answer key header must be 'class,message_id'");
  std::map<std::string, std::string> messages;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != 2)
      throw CorpusError(CorpusErrorKind::malformed_row,
                        path.string() + ": row " + std::to_string(r + 1) + " must have 2 columns");
    if (!messages.emplace(records[r][0], records[r][1]).second)
      throw CorpusError(CorpusErrorKind::duplicate_sentence,
                        path.string() + ": class '" + records[r][0] + "' listed twice");
  }
  return AnswerKey(std::move(messages));
}

void save_answer_key(const AnswerKey& key, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "class,message_id\n";
  for (const auto& [cls, msg] : key.messages()) out << csv::format_record({cls, msg}) << '\n';
}

Corpus subset(const Corpus& corpus, const std::vector<std::size_t>& ids) {
  Corpus out;
  for (auto id : ids) out.add(corpus[id].text, corpus[id].label);
  return out;
}

TrainTestSplit split_train_test(const Corpus& corpus, double train_ratio, std::uint64_t seed,
                                bool stratified) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw ConfigError("train ratio must lie in (0, 1)");
  const std::size_t n = corpus.size();
  const std::size_t n_train = round_half_up(static_cast<double>(n) * train_ratio);
  Rng rng(seed);

  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;

  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    train_ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  } else {
    std::map<std::string, std::vector<std::size_t>> members;
    for (const auto& s : corpus.sentences()) {
      if (!s.label)
        throw CorpusError(CorpusErrorKind::malformed_row, "stratified split needs a labeled corpus");
      members[*s.label].push_back(s.id);
    }
    for (const auto& [cls, ids] : members)
      if (ids.size() < 2)
        throw CorpusError(CorpusErrorKind::too_few_class_members,
                          "class '" + cls + "' has fewer than 2 sentences");

    // largest-remainder allocation of n_train over classes
    struct Quota {
      const std::string* cls;
      std::size_t base;
      double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t allocated = 0;
    for (const auto& [cls, ids] : members) {
      double exact = static_cast<double>(ids.size()) * train_ratio;
      auto base = static_cast<std::size_t>(std::floor(exact));
      quotas.push_back({&cls, base, exact - static_cast<double>(base)});
      allocated += base;
    }
    std::vector<std::size_t> by_remainder(quotas.size());
    std::iota(by_remainder.begin(), by_remainder.end(), 0);
    std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
      return quotas[a].remainder > quotas[b].remainder;
    });
    for (std::size_t i = 0; allocated < n_train && i < by_remainder.size(); ++i, ++allocated)
      ++quotas[by_remainder[i]].base;

    std::size_t q = 0;
    for (auto& [cls, ids] : members) {
      auto shuffled = ids;
      rng.shuffle(shuffled);
      auto take = std::min(quotas[q++].base, shuffled.size());
      train_ids.insert(train_ids.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(take));
      test_ids.insert(test_ids.end(), shuffled.begin() + static_cast<std::ptrdiff_t>(take), shuffled.end());
    }
  }

  std::sort(train_ids.begin(), train_ids.end());
  std::sort(test_ids.begin(), test_ids.end());
  TrainTestSplit split;
  split.train = subset(corpus, train_ids);
  split.test = subset(corpus, test_ids);
  split.train_ids = std::move(train_ids);
  split.test_ids = std::move(test_ids);
  return split;
}

}  // namespace commlabel
