#include "commlabel/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "commlabel/error.hpp"
#include "commlabel/rng.hpp"

namespace commlabel {

using nlohmann::json;

namespace {

struct EncodedLabels {
  std::vector<std::string> classes;
  std::vector<std::uint32_t> index;
};

EncodedLabels encode_labels(std::span<const SparseVector> xs, std::span<const std::string> ys, std::size_t dim) {
  if (xs.size() != ys.size()) throw std::invalid_argument("training set: feature/label count mismatch");
  if (xs.empty()) throw std::invalid_argument("training set is empty");
  for (const auto& x : xs)
    if (!x.empty() && x.entries().back().index >= dim)
      throw std::invalid_argument("training set: feature index beyond dimension");
  EncodedLabels enc;
  enc.classes.assign(ys.begin(), ys.end());
  std::sort(enc.classes.begin(), enc.classes.end());
  enc.classes.erase(std::unique(enc.classes.begin(), enc.classes.end()), enc.classes.end());
  if (enc.classes.size() < 2) throw std::invalid_argument("training set needs at least two classes");
  enc.index.reserve(ys.size());
  for (const auto& y : ys)
    enc.index.push_back(static_cast<std::uint32_t>(
        std::lower_bound(enc.classes.begin(), enc.classes.end(), y) - enc.classes.begin()));
  return enc;
}

// First maximum wins, i.e. the smallest class name.
template <class T>
std::size_t argmax(const std::vector<T>& values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double sparse_dot(const std::vector<double>& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries())
    if (e.index < w.size()) s += w[e.index] * e.weight;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear SVM

LinearSvmModel train_linear_svm(std::span<const SparseVector> xs, std::span<const std::string> ys, std::size_t dim,
                                const SvmConfig& config) {
  if (!(config.lambda > 0.0)) throw std::invalid_argument("svm: lambda must be positive");
  if (config.epochs < 1) throw std::invalid_argument("svm: epochs must be >= 1");
  auto enc = encode_labels(xs, ys, dim);
  const std::size_t k = enc.classes.size();
  const std::size_t n = xs.size();

  // w_c = scale_c * v_c; the last slot of v_c is the bias feature (constant 1)
  std::vector<std::vector<double>> v(k, std::vector<double>(dim + 1, 0.0));
  std::vector<double> scale(k, 1.0);

  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (auto idx : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double decay = 1.0 - eta * config.lambda;
      const auto& x = xs[idx];
      for (std::size_t c = 0; c < k; ++c) {
        const double y = enc.index[idx] == c ? 1.0 : -1.0;
        const double margin = y * scale[c] * (sparse_dot(v[c], x) + v[c][dim]);
        if (decay <= 0.0) {
          std::fill(v[c].begin(), v[c].end(), 0.0);
          scale[c] = 1.0;
        } else {
          scale[c] *= decay;
        }
        if (margin < 1.0) {
          const double step = eta * y / scale[c];
          for (const auto& e : x.entries()) v[c][e.index] += step * e.weight;
          v[c][dim] += step;
        }
        if (scale[c] < 1e-9) {
          for (auto& w : v[c]) w *= scale[c];
          scale[c] = 1.0;
        }
      }
    }
  }

  LinearSvmModel model;
  model.classes = enc.classes;
  model.dim = dim;
  model.config = config;
  model.weights.resize(k);
  model.bias.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    model.weights[c].assign(dim, 0.0);
    for (std::size_t f = 0; f < dim; ++f) model.weights[c][f] = scale[c] * v[c][f];
    model.bias[c] = scale[c] * v[c][dim];
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (argmax(decision_scores(model, xs[i])) == enc.index[i]) ++correct;
  model.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return model;
}

std::vector<double> decision_scores(const LinearSvmModel& model, const SparseVector& x) {
  std::vector<double> scores(model.classes.size());
  for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = sparse_dot(model.weights[c], x) + model.bias[c];
  return scores;
}

std::string predict(const LinearSvmModel& model, const SparseVector& x) {
  return model.classes[argmax(decision_scores(model, x))];
}

// ---------------------------------------------------------------------------
// Random forest

namespace {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> xs, const std::vector<std::uint32_t>& y, std::size_t n_classes,
              std::size_t dim, std::size_t max_depth, Rng& rng)
      : xs_(xs), y_(y), k_(n_classes), dim_(dim), max_depth_(max_depth), rng_(rng), buckets_(dim) {
    max_features_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(dim)))));
  }

  DecisionTree build(const std::vector<double>& sample_weight) {
    DecisionTree tree;
    std::vector<std::uint32_t> root;
    for (std::uint32_t i = 0; i < sample_weight.size(); ++i)
      if (sample_weight[i] > 0.0) root.push_back(i);
    weight_ = &sample_weight;

    struct Task {
      std::int32_t node;
      std::vector<std::uint32_t> samples;
      std::size_t depth;
    };
    std::vector<Task> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(root), 0});
    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      auto split = find_split(task.samples, task.depth);
      if (!split) {
        tree.nodes[static_cast<std::size_t>(task.node)].distribution = class_counts(task.samples);
        continue;
      }
      std::vector<std::uint32_t> left, right;
      for (auto s : task.samples) (xs_[s].at(split->feature) <= split->threshold ? left : right).push_back(s);
      auto left_id = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      auto right_id = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(task.node)];
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      node.left = left_id;
      node.right = right_id;
      // right pushed first so the left subtree is expanded first
      stack.push_back({right_id, std::move(right), task.depth + 1});
      stack.push_back({left_id, std::move(left), task.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    std::uint32_t feature;
    double threshold;
  };

  std::vector<double> class_counts(const std::vector<std::uint32_t>& samples) const {
    std::vector<double> counts(k_, 0.0);
    for (auto s : samples) counts[y_[s]] += (*weight_)[s];
    return counts;
  }

  static double purity(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return sq / total;
  }

  std::optional<Split> find_split(const std::vector<std::uint32_t>& samples, std::size_t depth) {
    if (max_depth_ != 0 && depth >= max_depth_) return std::nullopt;
    const auto counts = class_counts(samples);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (samples.size() < 2 || std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) < 2)
      return std::nullopt;

    // nonzero values of every feature present in this node
    std::vector<std::uint32_t> present;
    for (auto s : samples) {
      for (const auto& e : xs_[s].entries()) {
        auto& b = buckets_[e.index];
        if (b.empty()) present.push_back(e.index);
        b.push_back({e.weight, s});
      }
    }
    std::sort(present.begin(), present.end());

    // Gini: maximize sum(c^2)/w over both children, i.e. minimize weighted impurity
    const double parent = purity(counts, total);
    double best_score = parent + 1e-12;
    std::optional<Split> best;
    std::size_t examined = 0;
    std::vector<double> left(k_);
    for (std::size_t remaining = present.size(); remaining > 0 && examined < max_features_; --remaining) {
      auto pick = static_cast<std::size_t>(rng_.index(remaining));
      std::swap(present[pick], present[remaining - 1]);
      const auto f = present[remaining - 1];
      auto& bucket = buckets_[f];
      std::sort(bucket.begin(), bucket.end());
      const bool has_zero = bucket.size() < samples.size();
      if (!has_zero && bucket.front().first == bucket.back().first) continue;  // constant
      ++examined;

      // zeros start on the left
      left = counts;
      for (const auto& [value, s] : bucket) left[y_[s]] -= (*weight_)[s];
      double left_w = 0.0, left_sq = 0.0;
      for (double c : left) {
        left_w += c;
        left_sq += c * c;
      }
      double right_w = total - left_w, right_sq = 0.0;
      for (std::size_t c = 0; c < k_; ++c) {
        double r = counts[c] - left[c];
        right_sq += r * r;
      }
      double prev_value = 0.0;
      bool have_prev = has_zero;
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        const double value = bucket[i].first;
        if (have_prev && value != prev_value && left_w > 0.0 && right_w > 0.0) {
          double score = left_sq / left_w + right_sq / right_w;
          if (score > best_score) {
            best_score = score;
            double mid = prev_value + (value - prev_value) / 2.0;
            best = Split{f, mid < value ? mid : prev_value};
          }
        }
        const auto s = bucket[i].second;
        const double w = (*weight_)[s];
        const auto cls = y_[s];
        double l = left[cls], r = counts[cls] - l;
        left_sq += (l + w) * (l + w) - l * l;
        right_sq += (r - w) * (r - w) - r * r;
        left[cls] = l + w;
        left_w += w;
        right_w -= w;
        prev_value = value;
        have_prev = true;
      }
    }
    for (auto f : present) buckets_[f].clear();
    return best;
  }

  std::span<const SparseVector> xs_;
  const std::vector<std::uint32_t>& y_;
  std::size_t k_;
  std::size_t dim_;
  std::size_t max_depth_;
  std::size_t max_features_ = 1;
  Rng& rng_;
  const std::vector<double>* weight_ = nullptr;
  std::vector<std::vector<std::pair<double, std::uint32_t>>> buckets_;
};

const std::vector<double>& leaf_for(const DecisionTree& tree, const SparseVector& x) {
  std::size_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = static_cast<std::size_t>(x.at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  return tree.nodes[node].distribution;
}

}  // namespace

RandomForestModel train_random_forest(std::span<const SparseVector> xs, std::span<const std::string> ys,
                                      std::size_t dim, const ForestConfig& config) {
  if (config.n_trees < 1) throw std::invalid_argument("forest: n_trees must be >= 1");
  auto enc = encode_labels(xs, ys, dim);
  const std::size_t n = xs.size();
  const std::size_t k = enc.classes.size();

  RandomForestModel model;
  model.classes = enc.classes;
  model.dim = dim;
  model.config = config;
  model.trees.resize(config.n_trees);
  std::vector<std::vector<double>> weights(config.n_trees);

  auto grow = [&](std::size_t t) {
    Rng rng(mix_seed(config.seed, t));
    std::vector<double> w(n, 0.0);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) w[rng.index(n)] += 1.0;
    } else {
      std::fill(w.begin(), w.end(), 1.0);
    }
    TreeBuilder builder(xs, enc.index, k, dim, config.max_depth, rng);
    model.trees[t] = builder.build(w);
    weights[t] = std::move(w);
  };

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.n_trees));
  if (threads <= 1) {
    for (std::size_t t = 0; t < config.n_trees; ++t) grow(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w)
      workers.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < config.n_trees;) {
          try {
            grow(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  // out-of-bag estimate
  std::size_t oob_seen = 0, oob_correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> votes(k, 0);
    bool any = false;
    for (std::size_t t = 0; t < config.n_trees; ++t) {
      if (weights[t][i] > 0.0) continue;
      ++votes[argmax(leaf_for(model.trees[t], xs[i]))];
      any = true;
    }
    if (!any) continue;
    ++oob_seen;
    if (argmax(votes) == enc.index[i]) ++oob_correct;
  }
  if (oob_seen > 0) model.oob_accuracy = static_cast<double>(oob_correct) / static_cast<double>(oob_seen);
  return model;
}

std::vector<std::size_t> forest_votes(const RandomForestModel& model, const SparseVector& x) {
  std::vector<std::size_t> votes(model.classes.size(), 0);
  for (const auto& tree : model.trees) ++votes[argmax(leaf_for(tree, x))];
  return votes;
}

std::string predict(const RandomForestModel& model, const SparseVector& x) {
  return model.classes[argmax(forest_votes(model, x))];
}

std::string predict(const Model& model, const SparseVector& x) {
  return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

const std::vector<std::string>& model_classes(const Model& model) {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.classes; }, model);
}

std::string model_kind(const Model& model) {
  return std::holds_alternative<LinearSvmModel>(model) ? "svm" : "random_forest";
}

// ---------------------------------------------------------------------------
// Evaluation

EvalResult evaluate_predictions(std::span<const std::string> predicted, std::span<const std::string> truth,
                                const AnswerKey* key, const std::map<std::string, std::string>* label_to_class) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("evaluate: prediction/truth count mismatch");
  if (truth.empty()) throw std::invalid_argument("evaluate: empty test set");
  EvalResult result;
  result.n_total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::string* label = &predicted[i];
    if (label_to_class) {
      auto it = label_to_class->find(*label);
      if (it == label_to_class->end()) throw DataError("predicted label '" + *label + "' has no mapped class");
      label = &it->second;
    }
    bool hit = key ? key->message_for(*label) == key->message_for(truth[i]) : *label == truth[i];
    auto& tally = result.per_class[truth[i]];
    ++tally.total;
    if (hit) {
      ++tally.correct;
      ++result.n_correct;
    }
  }
  result.accuracy = static_cast<double>(result.n_correct) / static_cast<double>(result.n_total);
  return result;
}

EvalResult evaluate(const Model& model, std::span<const SparseVector> xs, std::span<const std::string> truth,
                    const AnswerKey* key, const std::map<std::string, std::string>* label_to_class) {
  std::vector<std::string> predicted;
  predicted.reserve(xs.size());
  for (const auto& x : xs) predicted.push_back(predict(model, x));
  return evaluate_predictions(predicted, truth, key, label_to_class);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kFormat = "commlabel-model";
constexpr int kVersion = 1;

json sparse_row(const std::vector<double>& dense) {
  json row = json::array();
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) row.push_back(json::array({i, dense[i]}));
  return row;
}

std::vector<double> dense_row(const json& row, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  for (const auto& e : row) out.at(e.at(0).get<std::size_t>()) = e.at(1).get<double>();
  return out;
}

json to_json(const LinearSvmModel& m) {
  json weights = json::array();
  for (const auto& w : m.weights) weights.push_back(sparse_row(w));
  return {{"format", kFormat},
          {"version", kVersion},
          {"kind", "svm"},
          {"vocabulary_fingerprint", m.vocabulary_fingerprint},
          {"classes", m.classes},
          {"dim", m.dim},
          {"config", {{"lambda", m.config.lambda}, {"epochs", m.config.epochs}, {"seed", m.config.seed}}},
          {"training_accuracy", m.training_accuracy},
          {"weights", weights},
          {"bias", m.bias}};
}

json to_json(const RandomForestModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      if (n.feature < 0)
        nodes.push_back({{"leaf", n.distribution}});
      else
        nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
    }
    trees.push_back(nodes);
  }
  json doc{{"format", kFormat},
           {"version", kVersion},
           {"kind", "random_forest"},
           {"vocabulary_fingerprint", m.vocabulary_fingerprint},
           {"classes", m.classes},
           {"dim", m.dim},
           {"config",
            {{"n_trees", m.config.n_trees},
             {"max_depth", m.config.max_depth},
             {"bootstrap", m.config.bootstrap},
             {"seed", m.config.seed}}},
           {"trees", trees}};
  doc["oob_accuracy"] = m.oob_accuracy ? json(*m.oob_accuracy) : json(nullptr);
  return doc;
}

}  // namespace

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::visit([](const auto& m) { return to_json(m); }, model).dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    auto doc = json::parse(in);
    if (doc.at("format") != kFormat) throw DataError(path.string() + ": not a model file");
    if (doc.at("version").get<int>() != kVersion)
      throw DataError(path.string() + ": unsupported model version " + doc.at("version").dump());
    const auto kind = doc.at("kind").get<std::string>();
    const auto dim = doc.at("dim").get<std::size_t>();
    if (kind == "svm") {
      LinearSvmModel m;
      m.classes = doc.at("classes").get<std::vector<std::string>>();
      m.dim = dim;
      m.vocabulary_fingerprint = doc.at("vocabulary_fingerprint").get<std::uint64_t>();
      const auto& cfg = doc.at("config");
      m.config = {cfg.at("lambda").get<double>(), cfg.at("epochs").get<int>(), cfg.at("seed").get<std::uint64_t>()};
      m.training_accuracy = doc.at("training_accuracy").get<double>();
      for (const auto& row : doc.at("weights")) m.weights.push_back(dense_row(row, dim));
      m.bias = doc.at("bias").get<std::vector<double>>();
      if (m.weights.size() != m.classes.size() || m.bias.size() != m.classes.size())
        throw DataError(path.string() + ": weight rows do not match classes");
      return m;
    }
    if (kind == "random_forest") {
      RandomForestModel m;
      m.classes = doc.at("classes").get<std::vector<std::string>>();
      m.dim = dim;
      m.vocabulary_fingerprint = doc.at("vocabulary_fingerprint").get<std::uint64_t>();
      const auto& cfg = doc.at("config");
      m.config.n_trees = cfg.at("n_trees").get<std::size_t>();
      m.config.max_depth = cfg.at("max_depth").get<std::size_t>();
      m.config.bootstrap = cfg.at("bootstrap").get<bool>();
      m.config.seed = cfg.at("seed").get<std::uint64_t>();
      if (!doc.at("oob_accuracy").is_null()) m.oob_accuracy = doc.at("oob_accuracy").get<double>();
      for (const auto& t : doc.at("trees")) {
        DecisionTree tree;
        for (const auto& n : t) {
          TreeNode node;
          if (n.contains("leaf")) {
            node.distribution = n.at("leaf").get<std::vector<double>>();
            if (node.distribution.size() != m.classes.size())
              throw DataError(path.string() + ": leaf distribution does not match classes");
          } else {
            node.feature = n.at("f").get<std::int32_t>();
            node.threshold = n.at("t").get<double>();
            node.left = n.at("l").get<std::int32_t>();
            node.right = n.at("r").get<std::int32_t>();
          }
          tree.nodes.push_back(std::move(node));
        }
        for (const auto& node : tree.nodes)
          if (node.feature >= 0 && (node.left <= 0 || node.right <= 0 ||
                                    static_cast<std::size_t>(std::max(node.left, node.right)) >= tree.nodes.size()))
            throw DataError(path.string() + ": tree child index out of range");
        m.trees.push_back(std::move(tree));
      }
      return m;
    }
    throw DataError(path.string() + ": unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace commlabel
