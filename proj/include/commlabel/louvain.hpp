#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "commlabel/simgraph.hpp"

namespace commlabel {

/// Community id per node. Ids are dense and canonical: ordered by
/// community size (descending), then by smallest member id.
class Partition {
 public:
  Partition() = default;
  /// Canonicalizes arbitrary labels.
  explicit Partition(const std::vector<std::uint32_t>& labels);

  static Partition singletons(std::size_t n);
  static Partition single_community(std::size_t n);

  std::size_t n_nodes() const noexcept { return assignment_.size(); }
  std::size_t n_communities() const noexcept { return n_communities_; }
  std::uint32_t community(std::size_t node) const { return assignment_.at(node); }
  const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }
  std::vector<std::size_t> sizes() const;
  std::size_t n_singletons() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> assignment_;
  std::size_t n_communities_ = 0;
};

struct LouvainConfig {
  std::uint64_t seed = 0;
  double min_gain = 1e-9;
  int max_passes = 50;
};

struct LouvainResult {
  Partition partition;
  double modularity = 0.0;
  /// Modularity of the flattened partition after every local-move sweep.
  std::vector<double> trace;
  int passes = 0;
};

/// Weighted Newman-Girvan modularity with resolution 1. Zero for a graph
/// without edges.
double modularity(const SentenceGraph& g, const Partition& p);

/// Two-phase greedy modularity maximization (local moves, then
/// aggregation), deterministic for a given seed.
LouvainResult louvain(const SentenceGraph& g, const LouvainConfig& config);
Partition louvain_detect(const SentenceGraph& g, const LouvainConfig& config);

struct BruteForceResult {
  Partition partition;
  double modularity = 0.0;
};

inline constexpr std::size_t kBruteForceMaxNodes = 10;

/// Exhaustive search over all set partitions (Bell number many). Throws
/// std::invalid_argument above kBruteForceMaxNodes nodes.
BruteForceResult brute_force_partition(const SentenceGraph& g);

/// `node_id,community_id` CSV.
void write_partition(const std::filesystem::path& path, const Partition& p);
Partition read_partition(const std::filesystem::path& path);

}  // namespace commlabel
