#include "commlabel/classmap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "commlabel/error.hpp"

namespace commlabel {

using nlohmann::json;

ClassMap::ClassMap(std::vector<std::string> classes, std::vector<std::vector<std::size_t>> counts)
    : classes_(std::move(classes)), counts_(std::move(counts)) {
  for (const auto& row : counts_)
    if (row.size() != classes_.size()) throw std::invalid_argument("class map: ragged contingency table");
}

std::size_t ClassMap::community_size(std::uint32_t community) const {
  const auto& r = row(community);
  return std::accumulate(r.begin(), r.end(), std::size_t{0});
}

std::size_t ClassMap::total() const {
  std::size_t t = 0;
  for (const auto& r : counts_) t = std::accumulate(r.begin(), r.end(), t);
  return t;
}

ClassMap build_class_map(std::span<const std::uint32_t> communities, std::span<const std::string> labels) {
  if (communities.size() != labels.size())
    throw DataError("class map: " + std::to_string(communities.size()) + " community labels for " +
                    std::to_string(labels.size()) + " reference labels");
  std::vector<std::string> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::size_t k = communities.empty() ? 0 : *std::max_element(communities.begin(), communities.end()) + 1;
  std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(classes.size(), 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto col = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
    ++counts[communities[i]][static_cast<std::size_t>(col)];
  }
  return ClassMap(std::move(classes), std::move(counts));
}

ClassMap build_class_map(const Partition& p, const Corpus& corpus) {
  if (!corpus.labeled()) throw DataError("class map needs a labeled corpus");
  if (p.n_nodes() != corpus.size()) throw DataError("class map: partition does not cover the corpus");
  auto labels = corpus.labels();
  return build_class_map(p.assignment(), labels);
}

SplitMergeScores split_merge_from_vectors(std::vector<std::size_t> split_vector,
                                          std::vector<std::size_t> merge_vector) {
  if (split_vector.empty() || merge_vector.empty())
    throw std::invalid_argument("split/merge vectors must be non-empty");
  auto mean = [](const std::vector<std::size_t>& v) {
    double sum = 0.0;
    for (auto x : v) sum += static_cast<double>(x);
    return sum / static_cast<double>(v.size());
  };
  SplitMergeScores s;
  s.split_score = mean(split_vector);
  s.merge_score = mean(merge_vector);
  s.split_vector = std::move(split_vector);
  s.merge_vector = std::move(merge_vector);
  return s;
}

SplitMergeScores split_merge_scores(const ClassMap& map) {
  std::vector<std::size_t> split(map.classes().size(), 0);
  std::vector<std::size_t> merge;
  for (std::uint32_t c = 0; c < map.n_communities(); ++c) {
    std::size_t classes_here = 0;
    for (std::size_t k = 0; k < map.classes().size(); ++k) {
      if (map.count(c, k) > 0) {
        ++classes_here;
        ++split[k];
      }
    }
    if (classes_here > 0) merge.push_back(classes_here);
  }
  // classes with no sentences carry no information
  std::erase(split, 0u);
  if (split.empty() || merge.empty()) throw std::invalid_argument("split_merge_scores: empty class map");
  return split_merge_from_vectors(std::move(split), std::move(merge));
}

std::map<std::uint32_t, std::string> majority_classes(const ClassMap& map) {
  std::map<std::uint32_t, std::string> out;
  for (std::uint32_t c = 0; c < map.n_communities(); ++c) {
    const auto& r = map.row(c);
    auto best = std::max_element(r.begin(), r.end());  // first max = smallest class name
    if (best == r.end() || *best == 0) continue;
    out.emplace(c, map.classes()[static_cast<std::size_t>(best - r.begin())]);
  }
  return out;
}

NormalizedSeries min_max_normalize(std::span<const double> series) {
  NormalizedSeries out;
  out.values.assign(series.size(), 0.0);
  if (series.empty()) {
    out.constant = true;
    return out;
  }
  auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  double range = *hi - *lo;
  if (!(range > 0.0)) {
    out.constant = true;
    return out;
  }
  for (std::size_t i = 0; i < series.size(); ++i) out.values[i] = (series[i] - *lo) / range;
  return out;
}

namespace {

ThresholdChoice grid_argmin(std::span<const double> grid, std::span<const double> split_norm,
                            std::span<const double> merge_norm) {
  ThresholdChoice best;
  best.score_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = split_norm[i] + merge_norm[i];
    if (sum < best.score_sum) best = {grid[i], false, sum};
  }
  return best;
}

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("threshold grid needs at least 2 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] < 1.0)) throw std::invalid_argument("grid thresholds must lie in [0, 1)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("grid thresholds must strictly increase");
  }
}

}  // namespace

ThresholdChoice select_threshold(std::span<const double> grid, std::span<const double> split_norm,
                                 std::span<const double> merge_norm) {
  check_grid(grid);
  if (split_norm.size() != grid.size() || merge_norm.size() != grid.size())
    throw std::invalid_argument("select_threshold: series length differs from grid");

  std::vector<ThresholdChoice> crossings;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double d0 = split_norm[i] - merge_norm[i];
    if (d0 == 0.0) crossings.push_back({grid[i], true, split_norm[i] + merge_norm[i]});
    if (i + 1 == grid.size()) break;
    double d1 = split_norm[i + 1] - merge_norm[i + 1];
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
      double t = d0 / (d0 - d1);
      double theta = grid[i] + t * (grid[i + 1] - grid[i]);
      double s = split_norm[i] + t * (split_norm[i + 1] - split_norm[i]);
      double m = merge_norm[i] + t * (merge_norm[i + 1] - merge_norm[i]);
      crossings.push_back({theta, true, s + m});
    }
  }
  if (crossings.empty()) return grid_argmin(grid, split_norm, merge_norm);
  return *std::min_element(crossings.begin(), crossings.end(), [](const ThresholdChoice& a, const ThresholdChoice& b) {
    if (a.score_sum != b.score_sum) return a.score_sum < b.score_sum;
    return a.threshold < b.threshold;
  });
}

SweepResult sweep_and_select(const SimilarityPairs& pairs, const Corpus& corpus, std::span<const double> grid,
                             const LouvainConfig& config, unsigned threads) {
  check_grid(grid);
  if (!corpus.labeled()) throw DataError("threshold sweep needs a labeled corpus");
  if (pairs.n_nodes != corpus.size()) throw DataError("threshold sweep: similarity structure does not match corpus");

  const auto labels = corpus.labels();
  SweepResult result;
  result.records.resize(grid.size());

  auto run_one = [&](std::size_t i) {
    auto g = build_graph(pairs, corpus.size(), grid[i]);
    auto p = louvain_detect(g, config);
    auto scores = split_merge_scores(build_class_map(p.assignment(), labels));
    auto& rec = result.records[i];
    rec.threshold = grid[i];
    rec.n_edges = g.edges().size();
    rec.n_communities = p.n_communities();
    rec.n_singletons = p.n_singletons();
    rec.split_score = scores.split_score;
    rec.merge_score = scores.merge_score;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> split, merge;
  for (const auto& r : result.records) {
    split.push_back(r.split_score);
    merge.push_back(r.merge_score);
  }
  auto split_norm = min_max_normalize(split);
  auto merge_norm = min_max_normalize(merge);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.records[i].split_norm = split_norm.values[i];
    result.records[i].merge_norm = merge_norm.values[i];
  }
  result.degenerate = split_norm.constant || merge_norm.constant;
  auto choice = result.degenerate ? grid_argmin(grid, split_norm.values, merge_norm.values)
                                  : select_threshold(grid, split_norm.values, merge_norm.values);
  result.best_threshold = choice.threshold;
  result.from_crossing = choice.from_crossing;
  return result;
}

std::vector<double> threshold_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw ConfigError("threshold grid step must be positive");
  if (!(start >= 0.0 && stop < 1.0 && start <= stop)) throw ConfigError("threshold grid must lie in [0, 1)");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    double v = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (v > stop + 1e-12) break;
    grid.push_back(v);
  }
  if (grid.size() < 2) throw ConfigError("threshold grid needs at least 2 points");
  return grid;
}

std::vector<double> parse_threshold_grid(const std::string& text) {
  double parts[3];
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    auto colon = text.find(':', pos);
    if ((k < 2) != (colon != std::string::npos))
      throw ConfigError("threshold grid must be start:stop:step, got '" + text + "'");
    auto piece = text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
    try {
      std::size_t used = 0;
      parts[k] = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw ConfigError("threshold grid: bad number '" + piece + "'");
    }
    pos = colon + 1;
  }
  return threshold_grid(parts[0], parts[1], parts[2]);
}

AmbiguityReport ambiguity_report(const ClassMap& map, const Corpus& corpus, const Partition& p) {
  if (!corpus.labeled()) throw DataError("ambiguity report needs a labeled corpus");
  if (p.n_nodes() != corpus.size()) throw DataError("ambiguity report: partition does not cover the corpus");

  std::vector<std::vector<std::size_t>> members(map.n_communities());
  for (std::size_t i = 0; i < p.n_nodes(); ++i) members.at(p.community(i)).push_back(i);

  AmbiguityReport report;
  for (std::uint32_t c = 0; c < map.n_communities(); ++c) {
    const auto& r = map.row(c);
    AmbiguityEntry entry;
    entry.community = c;
    for (std::size_t k = 0; k < r.size(); ++k)
      if (r[k] > 0) entry.classes.emplace_back(map.classes()[k], r[k]);
    if (entry.classes.size() < 2) continue;
    std::stable_sort(entry.classes.begin(), entry.classes.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    entry.majority_class = entry.classes.front().first;

    std::map<std::string, std::size_t> class_count(entry.classes.begin(), entry.classes.end());
    for (auto id : members[c]) {
      const auto& s = corpus[id];
      entry.sentences.push_back({id, s.text, *s.label, *s.label != entry.majority_class});
    }
    // minority first; among those the rarest class first, ties by class name
    std::stable_sort(entry.sentences.begin(), entry.sentences.end(),
                     [&](const FlaggedSentence& a, const FlaggedSentence& b) {
                       if (a.minority != b.minority) return a.minority;
                       auto ca = class_count[a.label], cb = class_count[b.label];
                       if (ca != cb) return ca < cb;
                       if (a.label != b.label) return a.label < b.label;
                       return a.id < b.id;
                     });
    report.push_back(std::move(entry));
  }
  return report;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "threshold,n_communities,n_singletons,split,merge,split_norm,merge_norm\n";
  for (const auto& r : sweep.records)
    out << format_number(r.threshold) << ',' << r.n_communities << ',' << r.n_singletons << ','
        << format_number(r.split_score) << ',' << format_number(r.merge_score) << ',' << format_number(r.split_norm)
        << ',' << format_number(r.merge_norm) << '\n';
}

void write_curves_tsv(const std::filesystem::path& path, const SweepResult& sweep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "threshold\tsplit_norm\tmerge_norm\n";
  for (const auto& r : sweep.records)
    out << format_number(r.threshold) << '\t' << format_number(r.split_norm) << '\t' << format_number(r.merge_norm)
        << '\n';
}

void write_class_map_json(const std::filesystem::path& path, const ClassMap& map) {
  json communities = json::array();
  for (std::uint32_t c = 0; c < map.n_communities(); ++c) {
    json counts = json::object();
    for (std::size_t k = 0; k < map.classes().size(); ++k)
      if (map.count(c, k) > 0) counts[map.classes()[k]] = map.count(c, k);
    if (counts.empty()) continue;
    communities.push_back({{"community", c}, {"size", map.community_size(c)}, {"classes", counts}});
  }
  json doc{{"classes", map.classes()}, {"communities", communities}};
  auto scores = split_merge_scores(map);
  doc["split_vector"] = scores.split_vector;
  doc["merge_vector"] = scores.merge_vector;
  doc["split_score"] = scores.split_score;
  doc["merge_score"] = scores.merge_score;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void write_ambiguity_json(const std::filesystem::path& path, const AmbiguityReport& report) {
  json entries = json::array();
  for (const auto& e : report) {
    json classes = json::array();
    for (const auto& [cls, n] : e.classes) classes.push_back({{"class", cls}, {"count", n}});
    json sentences = json::array();
    for (const auto& s : e.sentences)
      sentences.push_back({{"id", s.id}, {"text", s.text}, {"class", s.label}, {"minority", s.minority}});
    entries.push_back({{"community", e.community},
                       {"majority_class", e.majority_class},
                       {"classes", classes},
                       {"sentences", sentences}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << json{{"ambiguous_communities", entries}}.dump(2) << '\n';
}

}  // namespace commlabel
