#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "commlabel/simgraph.hpp"
#include "util.hpp"

using namespace commlabel;

namespace {

SimilarityPairs three_node_pairs() {
  SimilarityPairs p;
  p.n_nodes = 3;
  p.pairs = {{0, 1, 0.6}, {0, 2, 0.3}, {1, 2, 0.5}};
  return p;
}

std::vector<Edge> two_triangles() {
  return {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0}};
}

}  // namespace

TEST_CASE("build_graph keeps pairs at or above the threshold") {
  const auto g = build_graph(three_node_pairs(), 3, 0.5);
  CHECK(g.edges() == std::vector<Edge>{{0, 1, 0.6}, {1, 2, 0.5}});
  const auto none = build_graph(three_node_pairs(), 3, 0.7);
  CHECK(none.edges().empty());
  CHECK(graph_stats(none).n_isolated_nodes == 3);
  CHECK(build_graph(three_node_pairs(), 3, 0.0).edges().size() == 3);
}

TEST_CASE("graph constructor validation") {
  CHECK_THROWS_AS(SentenceGraph(2, {{0, 0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SentenceGraph(2, {{0, 2, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SentenceGraph(2, {{0, 1, 0.5}, {1, 0, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(SentenceGraph(2, {{0, 1, 1.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SentenceGraph(2, {{0, 1, 0.0}}), std::invalid_argument);
  const SentenceGraph g(3, {{2, 1, 0.5}, {1, 0, 0.25}});
  CHECK(g.edges() == std::vector<Edge>{{0, 1, 0.25}, {1, 2, 0.5}});
  CHECK(g.total_weight() == doctest::Approx(0.75));
}

TEST_CASE("graph stats and components") {
  const SentenceGraph empty(5, {});
  const auto s = graph_stats(empty);
  CHECK(s.n_components == 5);
  CHECK(s.n_isolated_nodes == 5);

  const SentenceGraph tri(6, two_triangles());
  const auto t = graph_stats(tri);
  CHECK(t.n_components == 2);
  CHECK(t.n_edges == 6);
  CHECK(t.n_isolated_nodes == 0);
  CHECK(connected_components(tri) == std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});

  auto shuffled = two_triangles();
  std::reverse(shuffled.begin(), shuffled.end());
  const auto u = graph_stats(SentenceGraph(6, shuffled));
  CHECK(u.n_components == t.n_components);
  CHECK(u.total_weight == t.total_weight);
}

TEST_CASE("edge list export") {
  testutil::TempDir dir;
  const auto g = build_graph(three_node_pairs(), 3, 0.5);
  export_graph(g, dir / "g.edges", GraphFormat::edge_list);
  const auto text = testutil::read_file(dir / "g.edges");
  CHECK(text.find("0 1 0.600000000\n") != std::string::npos);
  CHECK(text.find("1 2 0.500000000\n") != std::string::npos);
  CHECK(text.rfind("# nodes 3", 0) == 0);
}

TEST_CASE("graph round trips") {
  testutil::TempDir dir;
  const SentenceGraph g(7, {{0, 1, 0.125}, {2, 5, 0.3}, {3, 4, 1.0}}, 0.1);
  for (auto format : {GraphFormat::edge_list, GraphFormat::graphml}) {
    const auto path = dir / (format == GraphFormat::edge_list ? "g.edges" : "g.graphml");
    CHECK(graph_format_from_path(path) == format);
    export_graph(g, path, format);
    const auto back = import_graph(path, format);
    CHECK(back.n_nodes() == 7);
    CHECK(back.edges() == g.edges());
    CHECK(back.threshold() == g.threshold());
  }
  const SentenceGraph empty(4, {});
  export_graph(empty, dir / "e.edges", GraphFormat::edge_list);
  const auto back = import_graph(dir / "e.edges", GraphFormat::edge_list);
  CHECK(back.n_nodes() == 4);
  CHECK(back.edges().empty());
}
