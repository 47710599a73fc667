#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace commlabel {

using TokenSequence = std::vector<std::string>;

/// Term multiset: term -> occurrence count. Ordered for reproducible output.
using TermBag = std::map<std::string, std::size_t>;

using StopwordSet = std::unordered_set<std::string>;

/// Porter suffix stripping, with the NLTK default-mode refinements
/// (irregular forms, y->i only after a consonant, short-word guard).
std::string porter_stem(std::string_view word);

/// Stemmed term -> stemmed synonyms, one hop.
class SynonymLexicon {
 public:
  /// Stems `term` and every synonym; multi-word synonyms are stemmed per
  /// word and joined by one space. Self-maps and repeats are dropped.
  void add(std::string_view term, const std::vector<std::string>& synonyms);

  /// Synonyms of an already-stemmed term; empty when absent.
  const std::vector<std::string>& synonyms(const std::string& stemmed) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

struct PreprocessConfig {
  StopwordSet stopwords;
  SynonymLexicon lexicon;
  bool enable_synonyms = true;
  bool enable_bigrams = true;
};

/// Lowercases, splits on every non-alphanumeric byte, and drops stopwords.
TokenSequence tokenize_clean(std::string_view raw_text, const StopwordSet& stopwords);

TokenSequence stem_tokens(const TokenSequence& tokens);

/// Stemmed tokens plus one-hop synonyms and adjacent-pair bigrams. Each
/// bigram also appears with either position (not both) replaced by one of
/// that token's synonyms.
TermBag expand_terms(const TokenSequence& stemmed, const PreprocessConfig& config);

/// expand_terms(stem_tokens(tokenize_clean(text))).
TermBag preprocess_sentence(std::string_view raw_text, const PreprocessConfig& config);

/// One token per line; `#` starts a comment.
StopwordSet load_stopwords(const std::filesystem::path& path);
StopwordSet parse_stopwords(std::string_view text);

/// TSV lines `term<TAB>syn1,syn2,...`; `#` starts a comment.
SynonymLexicon load_lexicon(const std::filesystem::path& path);
SynonymLexicon parse_lexicon(std::string_view text);

/// Built-in English stopword list.
const StopwordSet& default_stopwords();
/// Small built-in lexicon of transit/venue synonyms.
const SynonymLexicon& default_lexicon();

}  // namespace commlabel
