#include <doctest.h>

#include <cmath>
#include <vector>

#include "../oracles.hpp"
#include "commlabel/louvain.hpp"
#include "commlabel/rng.hpp"
#include "util.hpp"

using namespace commlabel;

namespace {

std::vector<Edge> clique(std::uint32_t from, std::uint32_t n, double w) {
  std::vector<Edge> e;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) e.push_back({from + i, from + j, w});
  return e;
}

std::vector<Edge> two_cliques(std::uint32_t n, double bridge) {
  auto e = clique(0, n, 1.0);
  auto f = clique(n, n, 1.0);
  e.insert(e.end(), f.begin(), f.end());
  if (bridge > 0) e.push_back({0, n, bridge});
  return e;
}

SentenceGraph random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<Edge> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.push_back({u, v, 0.05 + 0.95 * rng.uniform()});
  return SentenceGraph(n, edges);
}

}  // namespace

TEST_CASE("partition canonical ids") {
  const Partition p({7, 7, 3, 9, 3, 3});
  CHECK(p.assignment() == std::vector<std::uint32_t>{1, 1, 0, 2, 0, 0});
  CHECK(p.n_communities() == 3);
  CHECK(p.sizes() == std::vector<std::size_t>{3, 2, 1});
  CHECK(p.n_singletons() == 1);
  CHECK(Partition::singletons(3).n_communities() == 3);
  CHECK(Partition::single_community(3).n_communities() == 1);
}

TEST_CASE("modularity hand values") {
  const SentenceGraph tri(3, clique(0, 3, 1.0));
  CHECK(modularity(tri, Partition::single_community(3)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(modularity(tri, Partition::singletons(3)) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  const SentenceGraph two(6, two_cliques(3, 0.0));
  CHECK(modularity(two, Partition({0, 0, 0, 1, 1, 1})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(modularity(SentenceGraph(4, {}), Partition::singletons(4)) == 0.0);
}

TEST_CASE("modularity agrees with the dense oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = 2 + rng.index(9);
    const auto g = random_graph(rng, n, 0.5);
    std::vector<std::uint32_t> labels(n);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng.index(3));
    const Partition p(labels);
    CHECK(modularity(g, p) == doctest::Approx(oracle::modularity(n, g.edges(), p.assignment())).epsilon(1e-12));
  }
}

TEST_CASE("louvain small cases") {
  const auto one = louvain(SentenceGraph(1, {}), LouvainConfig{});
  CHECK(one.partition.n_communities() == 1);

  const auto none = louvain(SentenceGraph(5, {}), LouvainConfig{});
  CHECK(none.partition.n_communities() == 5);
  CHECK(none.modularity == 0.0);

  const SentenceGraph bridged(8, two_cliques(4, 0.1));
  const auto r = louvain(bridged, LouvainConfig{3});
  CHECK(r.partition == Partition({0, 0, 0, 0, 1, 1, 1, 1}));
  CHECK(r.partition == brute_force_partition(bridged).partition);
  CHECK(r.modularity == doctest::Approx(modularity(bridged, r.partition)));
}

TEST_CASE("louvain trace never decreases and is seed deterministic") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(rng, 30 + rng.index(30), 0.1);
    const auto a = louvain(g, LouvainConfig{static_cast<std::uint64_t>(trial)});
    const auto b = louvain(g, LouvainConfig{static_cast<std::uint64_t>(trial)});
    CHECK(a.partition == b.partition);
    CHECK(a.trace == b.trace);
    for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] >= a.trace[i - 1] - 1e-12);
    CHECK(a.modularity >= 0.0);
  }
}

TEST_CASE("brute force") {
  const auto one = brute_force_partition(SentenceGraph(1, {}));
  CHECK(one.partition.n_communities() == 1);
  CHECK(one.modularity == 0.0);

  const SentenceGraph two(6, two_cliques(3, 0.0));
  const auto b = brute_force_partition(two);
  CHECK(b.partition == Partition({0, 0, 0, 1, 1, 1}));
  CHECK(b.modularity == doctest::Approx(0.5));
  CHECK_THROWS_AS(brute_force_partition(SentenceGraph(11, {})), std::invalid_argument);
}

TEST_CASE("brute force agrees with the enumeration oracle") {
  Rng rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const auto n = 2 + rng.index(6);
    const auto g = random_graph(rng, n, 0.5);
    CHECK(brute_force_partition(g).modularity == doctest::Approx(oracle::best_modularity(n, g.edges())).epsilon(1e-12));
  }
}

TEST_CASE("partition csv round trip") {
  testutil::TempDir dir;
  const Partition p({2, 0, 0, 1, 2});
  write_partition(dir / "p.csv", p);
  CHECK(read_partition(dir / "p.csv") == p);
}
