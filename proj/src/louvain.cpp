#include "commlabel/louvain.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "commlabel/csv.hpp"
#include "commlabel/error.hpp"
#include "commlabel/rng.hpp"

namespace commlabel {

Partition::Partition(const std::vector<std::uint32_t>& labels) {
  const std::size_t n = labels.size();
  if (n == 0) return;
  std::uint32_t max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<std::size_t> size(static_cast<std::size_t>(max_label) + 1, 0);
  std::vector<std::size_t> first(size.size(), SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    ++size[labels[i]];
    first[labels[i]] = std::min(first[labels[i]], i);
  }
  std::vector<std::uint32_t> used;
  for (std::uint32_t c = 0; c < size.size(); ++c)
    if (size[c] > 0) used.push_back(c);
  std::sort(used.begin(), used.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (size[a] != size[b]) return size[a] > size[b];
    return first[a] < first[b];
  });
  std::vector<std::uint32_t> rename(size.size(), 0);
  for (std::uint32_t k = 0; k < used.size(); ++k) rename[used[k]] = k;
  assignment_.resize(n);
  for (std::size_t i = 0; i < n; ++i) assignment_[i] = rename[labels[i]];
  n_communities_ = used.size();
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::uint32_t> labels(n);
  std::iota(labels.begin(), labels.end(), 0u);
  return Partition(labels);
}

Partition Partition::single_community(std::size_t n) { return Partition(std::vector<std::uint32_t>(n, 0)); }

std::vector<std::size_t> Partition::sizes() const {
  std::vector<std::size_t> s(n_communities_, 0);
  for (auto c : assignment_) ++s[c];
  return s;
}

std::size_t Partition::n_singletons() const {
  auto s = sizes();
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), 1u));
}

namespace {

double modularity_of_labels(const SentenceGraph& g, const std::vector<std::uint32_t>& community,
                            std::size_t n_communities) {
  const double total = g.total_weight();
  if (total <= 0.0) return 0.0;
  std::vector<double> internal(n_communities, 0.0);
  std::vector<double> degree_sum(n_communities, 0.0);
  for (const auto& e : g.edges()) {
    auto cu = community[e.u], cv = community[e.v];
    degree_sum[cu] += e.weight;
    degree_sum[cv] += e.weight;
    if (cu == cv) internal[cu] += e.weight;
  }
  const double two_w = 2.0 * total;
  double q = 0.0;
  for (std::size_t c = 0; c < n_communities; ++c) {
    double frac = degree_sum[c] / two_w;
    q += internal[c] / total - frac * frac;
  }
  return q;
}

// Graph being optimized at the current level. Self-loop weight holds the
// internal weight of the aggregated community; degree counts it twice.
struct Level {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;  // excludes self-loops
  std::vector<double> self_loop;
  std::vector<double> degree;
};

Level level_from_graph(const SentenceGraph& g) {
  Level lv;
  lv.n = g.n_nodes();
  lv.adjacency.resize(lv.n);
  lv.self_loop.assign(lv.n, 0.0);
  lv.degree.assign(lv.n, 0.0);
  for (const auto& e : g.edges()) {
    lv.adjacency[e.u].push_back({e.v, e.weight});
    lv.adjacency[e.v].push_back({e.u, e.weight});
    lv.degree[e.u] += e.weight;
    lv.degree[e.v] += e.weight;
  }
  return lv;
}

// Collapses communities (dense ids 0..k-1) into super-nodes.
Level aggregate(const Level& lv, const std::vector<std::uint32_t>& community, std::size_t k) {
  Level out;
  out.n = k;
  out.adjacency.resize(k);
  out.self_loop.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  std::vector<double> acc(k, 0.0);
  std::vector<char> seen(k, 0);
  std::vector<std::vector<std::uint32_t>> members(k);
  for (std::uint32_t i = 0; i < lv.n; ++i) members[community[i]].push_back(i);

  std::vector<std::uint32_t> touched;
  for (std::uint32_t c = 0; c < k; ++c) {
    touched.clear();
    double internal = 0.0;
    for (auto i : members[c]) {
      out.degree[c] += lv.degree[i];
      internal += lv.self_loop[i];
      for (const auto& [j, w] : lv.adjacency[i]) {
        auto cj = community[j];
        if (cj == c) {
          internal += 0.5 * w;  // each internal edge is seen from both ends
        } else {
          if (!seen[cj]) {
            seen[cj] = 1;
            touched.push_back(cj);
          }
          acc[cj] += w;
        }
      }
    }
    out.self_loop[c] = internal;
    std::sort(touched.begin(), touched.end());
    for (auto cj : touched) {
      out.adjacency[c].push_back({cj, acc[cj]});
      acc[cj] = 0.0;
      seen[cj] = 0;
    }
  }
  return out;
}

// Renumbers labels densely in order of first appearance by node id.
std::size_t compact(std::vector<std::uint32_t>& labels) {
  std::vector<std::uint32_t> rename(labels.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& l : labels) {
    if (rename[l] == UINT32_MAX) rename[l] = next++;
    l = rename[l];
  }
  return next;
}

}  // namespace

double modularity(const SentenceGraph& g, const Partition& p) {
  if (p.n_nodes() != g.n_nodes()) throw std::invalid_argument("modularity: partition does not cover the graph");
  return modularity_of_labels(g, p.assignment(), p.n_communities());
}

LouvainResult louvain(const SentenceGraph& g, const LouvainConfig& config) {
  if (!(config.min_gain > 0.0)) throw std::invalid_argument("louvain: min_gain must be positive");
  if (config.max_passes < 1) throw std::invalid_argument("louvain: max_passes must be >= 1");

  LouvainResult result;
  const std::size_t n = g.n_nodes();
  std::vector<std::uint32_t> level_node(n);  // original node -> node of the current level
  std::iota(level_node.begin(), level_node.end(), 0u);

  auto record = [&](const std::vector<std::uint32_t>& community) {
    std::vector<std::uint32_t> flat(n);
    for (std::size_t v = 0; v < n; ++v) flat[v] = community[level_node[v]];
    auto k = compact(flat);
    result.trace.push_back(modularity_of_labels(g, flat, k));
  };

  const double total = g.total_weight();
  Level lv = level_from_graph(g);
  Rng rng(config.seed);
  {
    std::vector<std::uint32_t> identity(n);
    std::iota(identity.begin(), identity.end(), 0u);
    record(identity);
  }

  const double two_w = 2.0 * total;
  while (total > 0.0 && result.passes < config.max_passes) {
    ++result.passes;
    std::vector<std::uint32_t> community(lv.n);
    std::iota(community.begin(), community.end(), 0u);
    std::vector<double> tot = lv.degree;

    std::vector<std::uint32_t> order(lv.n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(order);

    std::vector<double> link(lv.n, 0.0);
    std::vector<char> is_neighbor(lv.n, 0);
    std::vector<std::uint32_t> neighbors;
    bool changed = false;

    for (;;) {
      std::size_t moves = 0;
      for (auto i : order) {
        if (lv.adjacency[i].empty()) continue;
        const double k_i = lv.degree[i];
        neighbors.clear();
        for (const auto& [j, w] : lv.adjacency[i]) {
          auto cj = community[j];
          if (!is_neighbor[cj]) {
            is_neighbor[cj] = 1;
            neighbors.push_back(cj);
          }
          link[cj] += w;
        }
        const auto old = community[i];
        tot[old] -= k_i;

        // inserting i into c changes Q by (link_c - tot_c * k_i / 2W) / W
        auto gain = [&](std::uint32_t c) { return link[c] - tot[c] * k_i / two_w; };
        const double stay = gain(old);
        std::uint32_t best = old;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (auto c : neighbors) {
          if (c == old) continue;
          double gc = gain(c);
          if (gc > best_gain || (gc == best_gain && c < best)) {
            best_gain = gc;
            best = c;
          }
        }
        if (best != old && (best_gain - stay) / total >= config.min_gain) {
          community[i] = best;
          ++moves;
        }
        tot[community[i]] += k_i;

        for (auto c : neighbors) {
          link[c] = 0.0;
          is_neighbor[c] = 0;
        }
      }
      if (moves == 0) break;
      changed = true;
      record(community);
    }
    if (!changed) break;

    auto k = compact(community);
    lv = aggregate(lv, community, k);
    for (auto& v : level_node) v = community[v];
  }

  result.partition = Partition(level_node);
  result.modularity = modularity(g, result.partition);
  return result;
}

Partition louvain_detect(const SentenceGraph& g, const LouvainConfig& config) {
  return louvain(g, config).partition;
}

BruteForceResult brute_force_partition(const SentenceGraph& g) {
  const std::size_t n = g.n_nodes();
  if (n > kBruteForceMaxNodes)
    throw std::invalid_argument("brute_force_partition: more than " + std::to_string(kBruteForceMaxNodes) + " nodes");
  BruteForceResult best;
  if (n == 0) return best;

  // restricted growth strings enumerate every set partition exactly once
  std::vector<std::uint32_t> rgs(n, 0);
  std::vector<std::uint32_t> prefix_max(n, 0);
  double best_q = -std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> best_labels;
  for (;;) {
    auto k = static_cast<std::size_t>(prefix_max[n - 1]) + 1;
    double q = modularity_of_labels(g, rgs, k);
    if (q > best_q) {
      best_q = q;
      best_labels = rgs;
    }
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  best.partition = Partition(best_labels);
  best.modularity = modularity(g, best.partition);
  return best;
}

void write_partition(const std::filesystem::path& path, const Partition& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "node_id,community_id\n";
  for (std::size_t i = 0; i < p.n_nodes(); ++i) out << i << ',' << p.community(i) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Partition read_partition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto records = csv::parse(buf.str());
  if (records.empty() || records[0] != csv::Record{"node_id", "community_id"})
    throw DataError(path.string() + ": expected header 'node_id,community_id'");
  std::vector<std::uint32_t> labels;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    try {
      if (row.size() != 2 || std::stoul(row[0]) != labels.size()) throw std::invalid_argument("row");
      labels.push_back(static_cast<std::uint32_t>(std::stoul(row[1])));
    } catch (const std::exception&) {
      throw DataError(path.string() + ": malformed row " + std::to_string(r + 1));
    }
  }
  return Partition(labels);
}

}  // namespace commlabel
