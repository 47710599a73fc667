#include "commlabel/synth.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "commlabel/rng.hpp"

namespace commlabel {

namespace {

constexpr std::size_t kMinWords = 4;
constexpr std::size_t kMaxWords = 10;
constexpr int kMaxRetries = 1000;

// Cumulative Zipf(1) weights over ranks 0..n-1.
std::vector<double> zipf_cdf(std::size_t n) {
  std::vector<double> cdf(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    total += 1.0 / static_cast<double>(r + 1);
    cdf[r] = total;
  }
  for (auto& c : cdf) c /= total;
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  double u = rng.uniform();
  std::size_t lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cdf[mid] > u)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SynthConfig& config) {
  if (config.k_topics < 2) throw ConfigError("synthetic corpus needs at least 2 topics");
  if (config.per_topic < 5) throw ConfigError("synthetic corpus needs at least 5 sentences per topic");
  if (config.vocab_per_topic < 1) throw ConfigError("synthetic corpus needs a non-empty topic vocabulary");
  if (!(config.overlap >= 0.0 && config.overlap < 1.0)) throw ConfigError("overlap must lie in [0, 1)");
  if (!(config.ambiguous_share >= 0.0 && config.ambiguous_share <= 1.0))
    throw ConfigError("ambiguous_share must lie in [0, 1]");
  if (!(config.borrow_rate >= 0.0 && config.borrow_rate < 0.5)) throw ConfigError("borrow_rate must lie in [0, 0.5)");
  if (config.overlap > 0.0 && config.shared_vocab < 1) throw ConfigError("shared pool is empty");

  Rng rng(config.seed);
  const auto cdf = zipf_cdf(config.vocab_per_topic);
  const auto shared_cdf = zipf_cdf(config.shared_vocab);

  // Words end in a digit so stemming leaves them intact.
  auto topic_word = [](std::size_t topic, std::size_t rank) {
    return "t" + std::to_string(topic) + "w" + std::to_string(rank);
  };
  auto shared_word = [](std::size_t rank) { return "s" + std::to_string(rank); };

  SyntheticCorpus out;
  std::map<std::string, std::string> messages;
  for (std::size_t t = 0; t < config.k_topics; ++t) {
    const auto label = "topic_" + std::to_string(t);
    messages.emplace(label, "msg_" + std::to_string(t));
    for (std::size_t s = 0; s < config.per_topic; ++s) {
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxRetries)
          throw ConfigError("synthetic corpus: vocabulary too small for unique sentences");
        auto length = kMinWords + static_cast<std::size_t>(rng.index(kMaxWords - kMinWords + 1));
        std::size_t other = t;
        if (config.overlap > 0.0 && rng.uniform() < config.ambiguous_share)
          other = (t + 1 + static_cast<std::size_t>(rng.index(config.k_topics - 1))) % config.k_topics;
        std::string text;
        for (std::size_t w = 0; w < length; ++w) {
          if (!text.empty()) text.push_back(' ');
          if (rng.uniform() < config.overlap)
            text += shared_word(draw(shared_cdf, rng));
          else if (other != t && rng.uniform() < config.borrow_rate)
            text += topic_word(other, draw(cdf, rng));
          else
            text += topic_word(t, draw(cdf, rng));
        }
        try {
          out.corpus.add(text, label);
          break;
        } catch (const CorpusError& e) {
          if (e.kind() != CorpusErrorKind::duplicate_sentence) throw;
        }
      }
    }
  }
  out.key = AnswerKey(std::move(messages));
  return out;
}

}  // namespace commlabel
