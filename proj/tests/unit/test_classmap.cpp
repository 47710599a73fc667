#include <doctest.h>

#include <string>
#include <vector>

#include "commlabel/classmap.hpp"
#include "util.hpp"

using namespace commlabel;

namespace {

Corpus labeled(const std::vector<std::string>& labels) {
  Corpus c;
  for (std::size_t i = 0; i < labels.size(); ++i) c.add("sentence " + std::to_string(i), labels[i]);
  return c;
}

}  // namespace

TEST_CASE("class map counts") {
  const auto corpus = labeled({"A", "B", "A", "B"});
  const auto diag = build_class_map(Partition({0, 1, 0, 1}), corpus);
  CHECK(diag.count(0, 0) == 2);
  CHECK(diag.count(0, 1) == 0);
  CHECK(diag.count(1, 1) == 2);

  // community 0 = {0, 1, 2}, community 1 = {3}
  const auto mixed = build_class_map(Partition({0, 0, 0, 1}), corpus);
  CHECK(mixed.classes() == std::vector<std::string>{"A", "B"});
  CHECK(mixed.row(0) == std::vector<std::size_t>{2, 1});
  CHECK(mixed.row(1) == std::vector<std::size_t>{0, 1});
  CHECK(mixed.total() == 4);

  Corpus bare;
  bare.add("x");
  CHECK_THROWS_AS(build_class_map(Partition({0}), bare), DataError);
  CHECK_THROWS_AS(build_class_map(Partition({0, 1}), labeled({"A"})), DataError);
}

TEST_CASE("split and merge scores") {
  const auto s = split_merge_from_vectors({2, 1, 4, 5, 1, 2, 2, 1, 1, 4, 1, 9, 1, 1, 4, 2, 2, 2, 7},
                                          {1, 1, 1, 1, 4, 1, 2, 1, 2, 4, 1, 9, 2, 1, 1, 1, 6, 12});
  CHECK(s.split_score == doctest::Approx(2.7368).epsilon(1e-4 / 2.7368));
  CHECK(s.merge_score == doctest::Approx(2.8333).epsilon(1e-4 / 2.8333));
  CHECK_THROWS_AS(split_merge_from_vectors({}, {1}), std::invalid_argument);

  const auto corpus = labeled({"A", "B", "A", "B"});
  const auto perfect = split_merge_scores(build_class_map(Partition({0, 1, 0, 1}), corpus));
  CHECK(perfect.split_score == 1.0);
  CHECK(perfect.merge_score == 1.0);

  const auto mixed = split_merge_scores(build_class_map(Partition({0, 0, 0, 1}), corpus));
  CHECK(mixed.split_vector == std::vector<std::size_t>{1, 2});
  CHECK(mixed.merge_vector == std::vector<std::size_t>{2, 1});
  CHECK(mixed.split_score == 1.5);
  CHECK(mixed.merge_score == 1.5);
}

TEST_CASE("split and merge vectors count the same cells") {
  const auto corpus = labeled({"A", "B", "C", "A", "B", "C", "A", "A", "B"});
  const Partition p({0, 0, 1, 1, 2, 2, 3, 3, 0});
  const auto map = build_class_map(p, corpus);
  const auto s = split_merge_scores(map);
  std::size_t cells = 0, split_sum = 0, merge_sum = 0;
  for (std::uint32_t c = 0; c < map.n_communities(); ++c)
    for (auto v : map.row(c)) cells += v > 0;
  for (auto v : s.split_vector) split_sum += v;
  for (auto v : s.merge_vector) merge_sum += v;
  CHECK(split_sum == cells);
  CHECK(merge_sum == cells);
}

TEST_CASE("majority classes break ties by name") {
  const auto corpus = labeled({"B", "A", "A", "C"});
  const auto m = majority_classes(build_class_map(Partition({0, 0, 1, 1}), corpus));
  CHECK(m.at(0) == "A");
  CHECK(m.at(1) == "A");
}

TEST_CASE("min-max normalization") {
  const std::vector<double> s = {3.0, 1.0, 2.0};
  const auto n = min_max_normalize(s);
  CHECK(n.values == std::vector<double>{1.0, 0.0, 0.5});
  CHECK_FALSE(n.constant);
  const std::vector<double> flat = {2.0, 2.0};
  const auto f = min_max_normalize(flat);
  CHECK(f.constant);
  CHECK(f.values == std::vector<double>{0.0, 0.0});
}

TEST_CASE("threshold selection") {
  {
    const std::vector<double> g = {0.5, 0.6}, sp = {0.0, 1.0}, me = {1.0, 0.0};
    const auto c = select_threshold(g, sp, me);
    CHECK(c.threshold == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(c.from_crossing);
  }
  {
    const std::vector<double> g = {0.1, 0.2, 0.3}, sp = {0.0, 0.5, 1.0}, me = {1.0, 0.5, 0.0};
    CHECK(select_threshold(g, sp, me).threshold == doctest::Approx(0.2).epsilon(1e-12));
  }
  {
    // no crossing: the argmin of the sum
    const std::vector<double> g = {0.1, 0.2, 0.3}, sp = {0.5, 0.0, 0.9}, me = {1.0, 0.2, 1.0};
    const auto c = select_threshold(g, sp, me);
    CHECK_FALSE(c.from_crossing);
    CHECK(c.threshold == doctest::Approx(0.2));
  }
}

TEST_CASE("threshold grids") {
  const auto g = threshold_grid(0.0, 0.9, 0.1);
  REQUIRE(g.size() == 10);
  CHECK(g[3] == doctest::Approx(0.3));
  CHECK(g.back() == doctest::Approx(0.9));
  CHECK(parse_threshold_grid("0.2:0.4:0.1").size() == 3);
  CHECK_THROWS_AS(parse_threshold_grid("0.2:0.4"), ConfigError);
  CHECK_THROWS_AS(parse_threshold_grid("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_threshold_grid("0:1:0"), ConfigError);
}

TEST_CASE("ambiguity report") {
  const auto corpus = labeled({"A", "A", "A", "B", "B", "B"});
  CHECK(ambiguity_report(build_class_map(Partition({0, 0, 0, 1, 1, 1}), corpus), corpus,
                         Partition({0, 0, 0, 1, 1, 1}))
            .empty());

  // sentence 3 (class B) planted among the A sentences
  const Partition p({0, 0, 0, 0, 1, 1});
  const auto report = ambiguity_report(build_class_map(p, corpus), corpus, p);
  REQUIRE(report.size() == 1);
  const auto& e = report[0];
  CHECK(e.community == 0);
  CHECK(e.majority_class == "A");
  CHECK(e.classes.size() == 2);
  REQUIRE(e.sentences.size() == 4);
  CHECK(e.sentences[0].id == 3);
  CHECK(e.sentences[0].minority);
  std::size_t flagged = 0;
  for (const auto& s : e.sentences) flagged += s.minority;
  CHECK(flagged == 1);
}

TEST_CASE("sweep over a toy similarity structure") {
  // two tight groups of three, weakly linked, labels follow the groups
  const auto corpus = labeled({"A", "A", "A", "B", "B", "B"});
  SimilarityPairs pairs;
  pairs.n_nodes = 6;
  pairs.pairs = {{0, 1, 0.9}, {0, 2, 0.8}, {0, 3, 0.3}, {1, 2, 0.85}, {3, 4, 0.9}, {3, 5, 0.8}, {4, 5, 0.7}};
  const auto grid = threshold_grid(0.0, 0.9, 0.1);
  const auto a = sweep_and_select(pairs, corpus, grid, LouvainConfig{1}, 1);
  const auto b = sweep_and_select(pairs, corpus, grid, LouvainConfig{1}, 4);
  REQUIRE(a.records.size() == grid.size());
  CHECK(a.best_threshold == b.best_threshold);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].split_score == b.records[i].split_score);
    CHECK(a.records[i].merge_score >= 1.0);
    CHECK(a.records[i].split_norm >= 0.0);
    CHECK(a.records[i].split_norm <= 1.0);
  }
}
