#include "commlabel/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "commlabel/error.hpp"

namespace commlabel {

namespace {

bool is_alnum_ascii(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (is_alnum_ascii(static_cast<unsigned char>(c))) {
      current.push_back(lower_ascii(c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return line;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Stemmed, space-joined form of a possibly multi-word synonym.
std::string normalize_phrase(std::string_view phrase) {
  std::string out;
  for (const auto& word : split_words(phrase)) {
    if (!out.empty()) out.push_back(' ');
    out += porter_stem(word);
  }
  return out;
}

}  // namespace

void SynonymLexicon::add(std::string_view term, const std::vector<std::string>& synonyms) {
  auto key = normalize_phrase(term);
  if (key.empty()) return;
  auto& list = entries_[key];
  for (const auto& raw : synonyms) {
    auto syn = normalize_phrase(raw);
    if (syn.empty() || syn == key) continue;
    if (std::find(list.begin(), list.end(), syn) == list.end()) list.push_back(std::move(syn));
  }
  if (list.empty()) entries_.erase(key);
}

const std::vector<std::string>& SynonymLexicon::synonyms(const std::string& stemmed) const {
  static const std::vector<std::string> none;
  auto it = entries_.find(stemmed);
  return it == entries_.end() ? none : it->second;
}

TokenSequence tokenize_clean(std::string_view raw_text, const StopwordSet& stopwords) {
  TokenSequence tokens;
  for (auto& word : split_words(raw_text))
    if (!stopwords.count(word)) tokens.push_back(std::move(word));
  return tokens;
}

TokenSequence stem_tokens(const TokenSequence& tokens) {
  TokenSequence out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(porter_stem(t));
  return out;
}

TermBag expand_terms(const TokenSequence& stemmed, const PreprocessConfig& config) {
  TermBag bag;
  const bool synonyms = config.enable_synonyms;
  for (const auto& token : stemmed) {
    ++bag[token];
    if (synonyms)
      for (const auto& syn : config.lexicon.synonyms(token)) ++bag[syn];
  }
  if (config.enable_bigrams) {
    for (std::size_t i = 0; i + 1 < stemmed.size(); ++i) {
      const auto& left = stemmed[i];
      const auto& right = stemmed[i + 1];
      ++bag[left + " " + right];
      if (!synonyms) continue;
      for (const auto& syn : config.lexicon.synonyms(left)) ++bag[syn + " " + right];
      for (const auto& syn : config.lexicon.synonyms(right)) ++bag[left + " " + syn];
    }
  }
  return bag;
}

TermBag preprocess_sentence(std::string_view raw_text, const PreprocessConfig& config) {
  return expand_terms(stem_tokens(tokenize_clean(raw_text, config.stopwords)), config);
}

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line))
    for (auto& w : split_words(strip_comment(line))) words.insert(std::move(w));
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) { return parse_stopwords(read_text(path)); }

SynonymLexicon parse_lexicon(std::string_view text) {
  SynonymLexicon lexicon;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = strip_comment(line);
    if (body.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto tab = body.find('\t');
    if (tab == std::string_view::npos)
      throw DataError("lexicon line " + std::to_string(line_no) + ": expected term<TAB>synonyms");
    std::vector<std::string> synonyms;
    std::string_view rest = body.substr(tab + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      synonyms.emplace_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    lexicon.add(body.substr(0, tab), synonyms);
  }
  return lexicon;
}

SynonymLexicon load_lexicon(const std::filesystem::path& path) { return parse_lexicon(read_text(path)); }

}  // namespace commlabel
