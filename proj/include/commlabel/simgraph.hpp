#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "commlabel/vectorizer.hpp"

namespace commlabel {

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;  // u < v
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted sentence network. Isolated nodes are kept.
class SentenceGraph {
 public:
  SentenceGraph() = default;
  /// Normalizes each edge to u < v and sorts by (u, v). Throws
  /// std::invalid_argument on self-loops, duplicate pairs, out-of-range
  /// nodes, or weights outside (0, 1].
  SentenceGraph(std::size_t n_nodes, std::vector<Edge> edges, double threshold = 0.0);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  double threshold() const noexcept { return threshold_; }
  double total_weight() const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Edge> edges_;
  double threshold_ = 0.0;
};

struct GraphStats {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::size_t n_components = 0;
  std::size_t n_isolated_nodes = 0;
  double total_weight = 0.0;
};

/// Keeps pair (i, j, w) iff w >= threshold and w > 0.
SentenceGraph build_graph(const SimilarityPairs& pairs, std::size_t n_nodes, double threshold);

GraphStats graph_stats(const SentenceGraph& g);

/// Connected-component id per node, numbered by smallest member.
std::vector<std::uint32_t> connected_components(const SentenceGraph& g);

enum class GraphFormat { graphml, edge_list };

GraphFormat graph_format_from_path(const std::filesystem::path& path);

/// Edge lists start with a `# nodes N threshold T` header followed by
/// `i j w` lines. Weights carry at least nine significant digits.
void export_graph(const SentenceGraph& g, const std::filesystem::path& path, GraphFormat format);
SentenceGraph import_graph(const std::filesystem::path& path, GraphFormat format);

/// Text form of an edge weight as written by export_graph.
std::string format_weight(double w);

}  // namespace commlabel
