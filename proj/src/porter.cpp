// Porter stemmer. Follows the original five-step algorithm plus the
// refinements used by the NLTK default mode, so that stems agree with the
// widely used Python toolchain.

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "commlabel/textprep.hpp"

namespace commlabel {

namespace {

bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// y is a consonant at the start of a word or after a vowel.
bool is_consonant(std::string_view w, std::size_t i) {
  if (is_vowel_letter(w[i])) return false;
  if (w[i] == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
  return true;
}

// Number of VC sequences in [C](VC){m}[V].
int measure(std::string_view stem) {
  int m = 0;
  bool prev_vowel = false;
  bool prev_cons = true;
  for (std::size_t i = 0; i < stem.size(); ++i) {
    bool cons;
    if (is_vowel_letter(stem[i]))
      cons = false;
    else if (stem[i] == 'y')
      cons = i == 0 ? true : !prev_cons;
    else
      cons = true;
    if (cons && prev_vowel) ++m;
    prev_vowel = !cons;
    prev_cons = cons;
  }
  return m;
}

bool contains_vowel(std::string_view stem) {
  for (std::size_t i = 0; i < stem.size(); ++i)
    if (!is_consonant(stem, i)) return true;
  return false;
}

bool ends_double_consonant(std::string_view w) {
  return w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && is_consonant(w, w.size() - 1);
}

// *o: ends consonant-vowel-consonant, last not w/x/y; also a two-letter
// vowel-consonant word.
bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n >= 3 && is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
      w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'y')
    return true;
  return n == 2 && !is_consonant(w, 0) && is_consonant(w, 1);
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

std::string_view chop(std::string_view w, std::size_t n) { return w.substr(0, w.size() - n); }

using Condition = std::function<bool(std::string_view)>;

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  Condition condition;  // empty = unconditional
};

// The first rule whose suffix matches decides the outcome, even when its
// condition fails.
std::string apply_rules(const std::string& word, const std::vector<Rule>& rules) {
  for (const auto& rule : rules) {
    if (ends_with(word, rule.suffix)) {
      auto stem = chop(word, rule.suffix.size());
      if (!rule.condition || rule.condition(stem)) return std::string(stem) + std::string(rule.replacement);
      return word;
    }
  }
  return word;
}

bool positive_measure(std::string_view s) { return measure(s) > 0; }
bool measure_above_one(std::string_view s) { return measure(s) > 1; }

std::string step1a(const std::string& w) {
  if (ends_with(w, "ies") && w.size() == 4) return std::string(chop(w, 3)) + "ie";
  return apply_rules(w, {{"sses", "ss", {}}, {"ies", "i", {}}, {"ss", "ss", {}}, {"s", "", {}}});
}

std::string step1b(const std::string& w) {
  if (ends_with(w, "ied")) return std::string(chop(w, 3)) + (w.size() == 4 ? "ie" : "i");

  if (ends_with(w, "eed")) {
    auto stem = chop(w, 3);
    return measure(stem) > 0 ? std::string(stem) + "ee" : w;
  }

  std::string stem;
  bool stripped = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (ends_with(w, suffix)) {
      auto candidate = chop(w, suffix.size());
      if (contains_vowel(candidate)) {
        stem = std::string(candidate);
        stripped = true;
        break;
      }
    }
  }
  if (!stripped) return w;

  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  if (ends_double_consonant(stem)) {
    char last = stem.back();
    if (last != 'l' && last != 's' && last != 'z') stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

std::string step1c(const std::string& w) {
  return apply_rules(w, {{"y", "i", [](std::string_view stem) {
                            return stem.size() > 1 && is_consonant(stem, stem.size() - 1);
                          }}});
}

std::string step2(const std::string& w) {
  if (ends_with(w, "alli") && positive_measure(chop(w, 4))) return step2(std::string(chop(w, 4)) + "al");

  static const std::vector<Rule> rules = {
      {"ational", "ate", positive_measure}, {"tional", "tion", positive_measure},
      {"enci", "ence", positive_measure},   {"anci", "ance", positive_measure},
      {"izer", "ize", positive_measure},    {"bli", "ble", positive_measure},
      {"alli", "al", positive_measure},     {"entli", "ent", positive_measure},
      {"eli", "e", positive_measure},       {"ousli", "ous", positive_measure},
      {"ization", "ize", positive_measure}, {"ation", "ate", positive_measure},
      {"ator", "ate", positive_measure},    {"alism", "al", positive_measure},
      {"iveness", "ive", positive_measure}, {"fulness", "ful", positive_measure},
      {"ousness", "ous", positive_measure}, {"aliti", "al", positive_measure},
      {"iviti", "ive", positive_measure},   {"biliti", "ble", positive_measure},
      {"fulli", "ful", positive_measure},
  };
  auto out = apply_rules(w, rules);
  if (out != w) return out;
  // "logi" tests the measure of the word minus three letters, not of the stem
  for (const auto& rule : rules)
    if (ends_with(w, rule.suffix)) return w;
  if (ends_with(w, "logi")) return positive_measure(chop(w, 3)) ? std::string(chop(w, 4)) + "log" : w;
  return w;
}

std::string step3(const std::string& w) {
  return apply_rules(w, {{"icate", "ic", positive_measure},
                         {"ative", "", positive_measure},
                         {"alize", "al", positive_measure},
                         {"iciti", "ic", positive_measure},
                         {"ical", "ic", positive_measure},
                         {"ful", "", positive_measure},
                         {"ness", "", positive_measure}});
}

std::string step4(const std::string& w) {
  static const std::vector<Rule> rules = {
      {"al", "", measure_above_one},
      {"ance", "", measure_above_one},
      {"ence", "", measure_above_one},
      {"er", "", measure_above_one},
      {"ic", "", measure_above_one},
      {"able", "", measure_above_one},
      {"ible", "", measure_above_one},
      {"ant", "", measure_above_one},
      {"ement", "", measure_above_one},
      {"ment", "", measure_above_one},
      {"ent", "", measure_above_one},
      {"ion", "", [](std::string_view s) { return measure(s) > 1 && !s.empty() && (s.back() == 's' || s.back() == 't'); }},
      {"ou", "", measure_above_one},
      {"ism", "", measure_above_one},
      {"ate", "", measure_above_one},
      {"iti", "", measure_above_one},
      {"ous", "", measure_above_one},
      {"ive", "", measure_above_one},
      {"ize", "", measure_above_one},
  };
  return apply_rules(w, rules);
}

std::string step5a(const std::string& w) {
  if (!ends_with(w, "e")) return w;
  auto stem = chop(w, 1);
  int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) return std::string(stem);
  return w;
}

std::string step5b(const std::string& w) {
  if (ends_with(w, "ll") && measure(chop(w, 1)) > 1) return std::string(chop(w, 1));
  return w;
}

const std::unordered_map<std::string_view, std::string_view>& irregular_forms() {
  static const std::unordered_map<std::string_view, std::string_view> forms = {
      {"sky", "sky"},         {"skies", "sky"},       {"dying", "die"},     {"lying", "lie"},
      {"tying", "tie"},       {"news", "news"},       {"innings", "inning"}, {"inning", "inning"},
      {"outings", "outing"},  {"outing", "outing"},   {"cannings", "canning"},
      {"canning", "canning"}, {"howe", "howe"},       {"proceed", "proceed"},
      {"exceed", "exceed"},   {"succeed", "succeed"},
  };
  return forms;
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  for (auto& c : w)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');

  const auto& irregular = irregular_forms();
  if (auto it = irregular.find(w); it != irregular.end()) return std::string(it->second);
  if (w.size() <= 2) return w;

  w = step1a(w);
  w = step1b(w);
  w = step1c(w);
  w = step2(w);
  w = step3(w);
  w = step4(w);
  w = step5a(w);
  w = step5b(w);
  return w;
}

}  // namespace commlabel
