#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <string>

#include "commlabel/corpus.hpp"
#include "commlabel/csv.hpp"
#include "util.hpp"

using namespace commlabel;
using testutil::TempDir;
using testutil::write_file;

namespace {

Corpus numbered(std::size_t n, std::size_t n_classes = 0) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    if (n_classes)
      c.add("sentence " + std::to_string(i), "c" + std::to_string(i % n_classes));
    else
      c.add("sentence " + std::to_string(i));
  }
  return c;
}

CorpusErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const CorpusError& e) {
    return e.kind();
  }
  FAIL("no CorpusError thrown");
  return CorpusErrorKind::empty_corpus;
}

}  // namespace

TEST_CASE("csv parsing") {
  const auto rows = csv::parse("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\n\"multi\nline\",z\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == csv::Record{"x, y", "say \"hi\""});
  CHECK(rows[2] == csv::Record{"multi\nline", "z"});
  CHECK_THROWS_AS(csv::parse("\"open"), DataError);
  CHECK(csv::format_record({"plain", "a,b", "q\"q"}) == "plain,\"a,b\",\"q\"\"q\"");
}

TEST_CASE("corpus add rejects empty and duplicate sentences") {
  Corpus c;
  c.add("hello there", "greet");
  CHECK(kind_of([&] { c.add("hello there", "greet"); }) == CorpusErrorKind::duplicate_sentence);
  CHECK(kind_of([&] { c.add("   ", "greet"); }) == CorpusErrorKind::empty_sentence);
  CHECK(c.size() == 1);
  CHECK(c.labeled());
  c.add("no label");
  CHECK_FALSE(c.labeled());
  CHECK_THROWS_AS(c.labels(), DataError);
}

TEST_CASE("load_corpus csv fixture") {
  TempDir dir;
  write_file(dir / "c.csv", "sentence,class\nwhere is parking,PARKING\n\"hi, agent\",AGENT\nany lot free,PARKING\n");
  const auto c = load_corpus(dir / "c.csv", CorpusFormat::csv, true);
  CHECK(c.size() == 3);
  CHECK(c.classes().size() == 2);
  CHECK(c[1].text == "hi, agent");
  CHECK(corpus_has_labels(dir / "c.csv", CorpusFormat::csv));

  const auto bare = load_corpus(dir / "c.csv", CorpusFormat::csv, false);
  CHECK_FALSE(bare.labeled());
}

TEST_CASE("load_corpus jsonl and round trip") {
  TempDir dir;
  write_file(dir / "c.jsonl", "{\"sentence\":\"a b\",\"class\":\"x\"}\n{\"sentence\":\"c d\",\"class\":\"y\"}\n");
  const auto c = load_corpus(dir / "c.jsonl", format_from_path(dir / "c.jsonl"), true);
  CHECK(c.size() == 2);
  save_corpus(c, dir / "out.csv", CorpusFormat::csv);
  const auto back = load_corpus(dir / "out.csv", CorpusFormat::csv, true);
  CHECK(back.texts() == c.texts());
  CHECK(back.labels() == c.labels());
}

TEST_CASE("load_corpus errors") {
  TempDir dir;
  write_file(dir / "empty.csv", "");
  CHECK(kind_of([&] { load_corpus(dir / "empty.csv", CorpusFormat::csv, true); }) == CorpusErrorKind::empty_corpus);
  try {
    load_corpus(dir / "empty.csv", CorpusFormat::csv, true);
  } catch (const CorpusError& e) {
    CHECK(std::string(e.what()).find("empty corpus") != std::string::npos);
  }
  CHECK(kind_of([&] { load_corpus(dir / "nope.csv", CorpusFormat::csv, true); }) == CorpusErrorKind::missing_file);
  write_file(dir / "dup.csv", "sentence,class\na,x\na,y\n");
  CHECK(kind_of([&] { load_corpus(dir / "dup.csv", CorpusFormat::csv, true); }) ==
        CorpusErrorKind::duplicate_sentence);
  write_file(dir / "bad.jsonl", "{\"sentence\": 3}\n");
  CHECK(kind_of([&] { load_corpus(dir / "bad.jsonl", CorpusFormat::jsonl, false); }) ==
        CorpusErrorKind::malformed_row);
}

TEST_CASE("answer key") {
  TempDir dir;
  write_file(dir / "key.csv", "class,message_id\nA,m1\nB,m1\n");
  const auto key = load_answer_key(dir / "key.csv");
  CHECK(key.message_for("A") == "m1");
  CHECK(key.message_for("B") == "m1");
  CHECK_THROWS_AS(key.message_for("C"), DataError);
  CHECK_THROWS_AS(key.require_total({"A", "C"}), DataError);
  const auto id = AnswerKey::identity({"A", "B"});
  CHECK(id.message_for("B") == "B");
}

TEST_CASE("split sizes follow round-half-up") {
  CHECK(split_train_test(numbered(100), 0.8, 1, false).train.size() == 80);
  const auto big = split_train_test(numbered(2212), 0.8, 1, false);
  CHECK(big.train.size() == 1770);
  CHECK(big.test.size() == 442);
  CHECK(split_train_test(numbered(5), 0.5, 1, false).train.size() == 3);
}

TEST_CASE("split is deterministic and disjoint") {
  const auto c = numbered(57, 3);
  const auto a = split_train_test(c, 0.7, 9, false);
  const auto b = split_train_test(c, 0.7, 9, false);
  CHECK(a.train_ids == b.train_ids);
  CHECK(a.test_ids == b.test_ids);
  CHECK(std::is_sorted(a.train_ids.begin(), a.train_ids.end()));
  std::set<std::size_t> all(a.train_ids.begin(), a.train_ids.end());
  all.insert(a.test_ids.begin(), a.test_ids.end());
  CHECK(all.size() == c.size());
  CHECK(a.train_ids != split_train_test(c, 0.7, 10, false).train_ids);
  for (std::size_t k = 0; k < a.train_ids.size(); ++k) CHECK(a.train[k].text == c[a.train_ids[k]].text);
}

TEST_CASE("stratified split keeps each class near its share") {
  Corpus c;
  for (int i = 0; i < 30; ++i) c.add("a" + std::to_string(i), "A");
  for (int i = 0; i < 7; ++i) c.add("b" + std::to_string(i), "B");
  const auto s = split_train_test(c, 0.8, 4, true);
  std::size_t a = 0, b = 0;
  for (auto id : s.train_ids) (c[id].label == "A" ? a : b)++;
  CHECK(a + b == 30);
  CHECK(a >= 23);
  CHECK(a <= 25);
  CHECK(b >= 5);
  CHECK(b <= 6);
  CHECK_THROWS_AS(split_train_test(numbered(10), 0.8, 1, true), CorpusError);
}

TEST_CASE("split rejects bad ratios") {
  CHECK_THROWS_AS(split_train_test(numbered(10), 0.0, 1, false), ConfigError);
  CHECK_THROWS_AS(split_train_test(numbered(10), 1.0, 1, false), ConfigError);
}
