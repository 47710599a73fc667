#include "commlabel/simgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "commlabel/error.hpp"

namespace commlabel {

SentenceGraph::SentenceGraph(std::size_t n_nodes, std::vector<Edge> edges, double threshold)
    : n_nodes_(n_nodes), edges_(std::move(edges)), threshold_(threshold) {
  for (auto& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw std::invalid_argument("sentence graph: self-loop at node " + std::to_string(e.u));
    if (e.v >= n_nodes_) throw std::invalid_argument("sentence graph: node id out of range");
    if (!(e.weight > 0.0 && e.weight <= 1.0)) throw std::invalid_argument("sentence graph: weight outside (0, 1]");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::pair{a.u, a.v} < std::pair{b.u, b.v}; });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw std::invalid_argument("sentence graph: duplicate edge");
}

double SentenceGraph::total_weight() const {
  double w = 0.0;
  for (const auto& e : edges_) w += e.weight;
  return w;
}

SentenceGraph build_graph(const SimilarityPairs& pairs, std::size_t n_nodes, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in [0, 1)");
  std::vector<Edge> edges;
  for (const auto& p : pairs.pairs)
    if (p.weight > 0.0 && p.weight >= threshold) edges.push_back({p.i, p.j, p.weight});
  return SentenceGraph(n_nodes, std::move(edges), threshold);
}

std::vector<std::uint32_t> connected_components(const SentenceGraph& g) {
  std::vector<std::uint32_t> parent(g.n_nodes());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : g.edges()) {
    auto a = find(e.u), b = find(e.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // roots are the smallest member; renumber in node order
  std::vector<std::uint32_t> label(g.n_nodes());
  std::vector<std::uint32_t> root_label(g.n_nodes(), UINT32_MAX);
  std::uint32_t next = 0;
  for (std::uint32_t i = 0; i < g.n_nodes(); ++i) {
    auto r = find(i);
    if (root_label[r] == UINT32_MAX) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

GraphStats graph_stats(const SentenceGraph& g) {
  GraphStats s;
  s.n_nodes = g.n_nodes();
  s.n_edges = g.edges().size();
  s.total_weight = g.total_weight();
  auto comp = connected_components(g);
  s.n_components = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> degree(g.n_nodes(), 0);
  for (const auto& e : g.edges()) {
    ++degree[e.u];
    ++degree[e.v];
  }
  s.n_isolated_nodes = static_cast<std::size_t>(std::count(degree.begin(), degree.end(), 0u));
  return s;
}

GraphFormat graph_format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".graphml" ? GraphFormat::graphml : GraphFormat::edge_list;
}

std::string format_weight(double w) {
  char buf[64];
  // fixed nine decimals give >= 9 significant digits down to 0.1
  if (w >= 0.1)
    std::snprintf(buf, sizeof buf, "%.9f", w);
  else
    std::snprintf(buf, sizeof buf, "%.9g", w);
  return buf;
}

void export_graph(const SentenceGraph& g, const std::filesystem::path& path, GraphFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  if (format == GraphFormat::edge_list) {
    out << "# nodes " << g.n_nodes() << " threshold " << format_weight(g.threshold()) << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_weight(e.weight) << '\n';
  } else {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
           "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
           "  <key id=\"threshold\" for=\"graph\" attr.name=\"threshold\" attr.type=\"double\"/>\n"
           "  <graph id=\"G\" edgedefault=\"undirected\">\n"
        << "    <data key=\"threshold\">" << format_weight(g.threshold()) << "</data>\n";
    for (std::size_t i = 0; i < g.n_nodes(); ++i) out << "    <node id=\"n" << i << "\"/>\n";
    for (const auto& e : g.edges())
      out << "    <edge source=\"n" << e.u << "\" target=\"n" << e.v << "\"><data key=\"weight\">"
          << format_weight(e.weight) << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

// Value of attr="..." inside `tag`, or empty.
std::string attribute(const std::string& tag, const std::string& name) {
  auto key = name + "=\"";
  auto pos = tag.find(key);
  if (pos == std::string::npos) return {};
  pos += key.size();
  auto end = tag.find('"', pos);
  return tag.substr(pos, end - pos);
}

std::uint32_t parse_node_id(const std::string& id, const std::filesystem::path& path) {
  if (id.size() < 2 || id[0] != 'n') throw DataError(path.string() + ": unexpected node id '" + id + "'");
  return static_cast<std::uint32_t>(std::stoul(id.substr(1)));
}

double data_value(const std::string& body, const std::string& key) {
  auto open = "<data key=\"" + key + "\">";
  auto pos = body.find(open);
  if (pos == std::string::npos) return NAN;
  pos += open.size();
  return std::stod(body.substr(pos, body.find('<', pos) - pos));
}

SentenceGraph import_graphml(const std::string& text, const std::filesystem::path& path) {
  std::size_t n_nodes = 0;
  std::vector<Edge> edges;
  double threshold = 0.0;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    auto end = text.find('>', pos);
    if (end == std::string::npos) break;
    std::string tag = text.substr(pos, end - pos + 1);
    if (tag.rfind("<node ", 0) == 0) {
      n_nodes = std::max<std::size_t>(n_nodes, parse_node_id(attribute(tag, "id"), path) + 1);
    } else if (tag.rfind("<edge ", 0) == 0) {
      auto close = text.find("</edge>", end);
      auto body = text.substr(end + 1, close - end - 1);
      double w = data_value(body, "weight");
      edges.push_back({parse_node_id(attribute(tag, "source"), path), parse_node_id(attribute(tag, "target"), path),
                       std::isnan(w) ? 1.0 : w});
    } else if (tag == "<data key=\"threshold\">") {
      threshold = std::stod(text.substr(end + 1, text.find('<', end) - end - 1));
    }
    pos = end + 1;
  }
  return SentenceGraph(n_nodes, std::move(edges), threshold);
}

SentenceGraph import_edge_list(const std::string& text, const std::filesystem::path& path) {
  std::istringstream in(text);
  std::string line;
  std::size_t n_nodes = 0;
  double threshold = 0.0;
  bool have_header = false;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line[0] == '#') {
      std::string hash, key;
      fields >> hash;
      while (fields >> key) {
        if (key == "nodes") {
          fields >> n_nodes;
          have_header = true;
        } else if (key == "threshold") {
          fields >> threshold;
        }
      }
      continue;
    }
    Edge e;
    if (!(fields >> e.u >> e.v >> e.weight)) throw DataError(path.string() + ": malformed edge line '" + line + "'");
    edges.push_back(e);
    if (!have_header) n_nodes = std::max<std::size_t>(n_nodes, std::max(e.u, e.v) + 1);
  }
  return SentenceGraph(n_nodes, std::move(edges), threshold);
}

}  // namespace

SentenceGraph import_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return format == GraphFormat::graphml ? import_graphml(buf.str(), path) : import_edge_list(buf.str(), path);
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace commlabel
