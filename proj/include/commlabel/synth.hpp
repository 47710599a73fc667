#pragma once

#include <cstdint>

#include "commlabel/corpus.hpp"

namespace commlabel {

struct SynthConfig {
  std::size_t k_topics = 5;
  std::size_t per_topic = 100;
  std::size_t vocab_per_topic = 100;
  double overlap = 0.1;  // chance that a word comes from the shared pool
  std::size_t shared_vocab = 10;
  /// Share of sentences that also borrow words from one other topic; they
  /// keep their own topic's label.
  double ambiguous_share = 0.04;
  /// Chance that a non-shared word of an ambiguous sentence is borrowed.
  double borrow_rate = 0.4;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Corpus corpus;   // labels `topic_<k>`
  AnswerKey key;   // topic_<k> -> msg_<k>
};

/// Topic-structured labeled sentences of 4-10 words. Topic words are drawn
/// with Zipf-like frequencies from a per-topic vocabulary; each word comes
/// from a shared pool with probability `overlap`. An ambiguous sentence
/// replaces some of its topic words with words of one other topic. With
/// overlap = 0 topics share no words at all, borrowing included.
/// Throws ConfigError on invalid sizes or rates.
SyntheticCorpus generate_synthetic_corpus(const SynthConfig& config);

}  // namespace commlabel
