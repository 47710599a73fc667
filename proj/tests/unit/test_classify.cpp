#include <doctest.h>

#include <string>
#include <vector>

#include "commlabel/classify.hpp"
#include "util.hpp"

using namespace commlabel;

namespace {

SparseVector vec(std::vector<SparseEntry> e) { return SparseVector::from_entries(std::move(e)); }

// Three classes, each owning two disjoint features.
struct Fixture {
  std::vector<SparseVector> xs;
  std::vector<std::string> ys;
  std::size_t dim = 6;
};

Fixture disjoint(int per_class) {
  Fixture f;
  const char* names[] = {"alpha", "beta", "gamma"};
  for (std::uint32_t c = 0; c < 3; ++c)
    for (int k = 0; k < per_class; ++k) {
      const double a = 0.5 + 0.1 * k;
      f.xs.push_back(vec({{2 * c, a}, {2 * c + 1, 1.0 - a / 2}}));
      f.ys.push_back(names[c]);
    }
  return f;
}

}  // namespace

TEST_CASE("svm fits a separable set") {
  const auto f = disjoint(5);
  const auto m = train_linear_svm(f.xs, f.ys, f.dim, SvmConfig{1e-3, 30, 1});
  CHECK(m.training_accuracy == 1.0);
  CHECK(m.classes == std::vector<std::string>{"alpha", "beta", "gamma"});
  for (std::size_t i = 0; i < f.xs.size(); ++i) CHECK(predict(m, f.xs[i]) == f.ys[i]);
}

TEST_CASE("svm is deterministic and guards single-class input") {
  const auto f = disjoint(4);
  const auto a = train_linear_svm(f.xs, f.ys, f.dim, SvmConfig{1e-3, 10, 7});
  const auto b = train_linear_svm(f.xs, f.ys, f.dim, SvmConfig{1e-3, 10, 7});
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  const std::vector<std::string> same(f.xs.size(), "alpha");
  CHECK_THROWS_AS(train_linear_svm(f.xs, same, f.dim, SvmConfig{}), std::invalid_argument);
}

TEST_CASE("forest on disjoint supports") {
  const auto f = disjoint(8);
  ForestConfig c;
  c.n_trees = 25;
  c.seed = 3;
  const auto m = train_random_forest(f.xs, f.ys, f.dim, c);
  REQUIRE(m.oob_accuracy.has_value());
  CHECK(*m.oob_accuracy == 1.0);
  for (std::size_t i = 0; i < f.xs.size(); ++i) CHECK(predict(m, f.xs[i]) == f.ys[i]);
  std::size_t votes = 0;
  for (auto v : forest_votes(m, f.xs[0])) votes += v;
  CHECK(votes == 25);
}

TEST_CASE("forest stump on two points") {
  const std::vector<SparseVector> xs = {vec({{0, 1.0}}), vec({{1, 1.0}})};
  const std::vector<std::string> ys = {"a", "b"};
  ForestConfig c;
  c.n_trees = 1;
  c.max_depth = 1;
  c.bootstrap = false;
  const auto m = train_random_forest(xs, ys, 2, c);
  REQUIRE(m.trees.size() == 1);
  CHECK(m.trees[0].nodes.size() == 3);
  CHECK(predict(m, xs[0]) == "a");
  CHECK(predict(m, xs[1]) == "b");
}

TEST_CASE("forest is deterministic across thread counts") {
  const auto f = disjoint(6);
  ForestConfig c;
  c.n_trees = 12;
  c.seed = 11;
  c.threads = 1;
  const auto a = train_random_forest(f.xs, f.ys, f.dim, c);
  c.threads = 4;
  const auto b = train_random_forest(f.xs, f.ys, f.dim, c);
  const std::vector<SparseVector> probes = {vec({{0, 0.2}, {3, 0.2}}), vec({{5, 1.0}}), SparseVector{}};
  for (const auto& x : probes) CHECK(forest_votes(a, x) == forest_votes(b, x));
}

TEST_CASE("prediction details") {
  const auto f = disjoint(5);
  const auto m = train_linear_svm(f.xs, f.ys, f.dim, SvmConfig{1e-3, 20, 2});
  const auto zero_a = predict(m, SparseVector{});
  CHECK(zero_a == predict(m, SparseVector{}));

  // the same document inserted twice trains the same way as a model on the duplicated set
  auto xs = f.xs;
  auto ys = f.ys;
  xs.push_back(f.xs[0]);
  ys.push_back(f.ys[0]);
  const auto dup = train_linear_svm(xs, ys, f.dim, SvmConfig{1e-3, 20, 2});
  CHECK(predict(dup, f.xs[0]) == f.ys[0]);
}

TEST_CASE("evaluation accuracy") {
  std::vector<std::string> truth(100, "A"), pred(100, "A");
  for (int i = 0; i < 15; ++i) pred[i] = "B";
  const auto r = evaluate_predictions(pred, truth);
  CHECK(r.accuracy == doctest::Approx(0.85));
  CHECK(r.n_correct == 85);
  CHECK(r.per_class.at("A").total == 100);
  CHECK(evaluate_predictions(truth, truth).accuracy == 1.0);
}

TEST_CASE("evaluation through a community map and answer key") {
  // communities 0 and 1 both map to class X; X and Y share a message
  const std::vector<std::string> predicted = {"0", "1", "2", "2"};
  const std::vector<std::string> truth = {"X", "X", "X", "Z"};
  const std::map<std::string, std::string> to_class = {{"0", "X"}, {"1", "X"}, {"2", "Y"}};
  const AnswerKey key({{"X", "m1"}, {"Y", "m1"}, {"Z", "m2"}});
  const auto r = evaluate_predictions(predicted, truth, &key, &to_class);
  CHECK(r.n_correct == 3);
  CHECK(r.accuracy == doctest::Approx(0.75));
  const std::vector<std::string> unknown = {"9", "0", "0", "0"};
  CHECK_THROWS_AS(evaluate_predictions(unknown, truth, &key, &to_class), DataError);
}

TEST_CASE("model files round trip") {
  testutil::TempDir dir;
  const auto f = disjoint(5);
  ForestConfig fc;
  fc.n_trees = 5;
  const Model svm = train_linear_svm(f.xs, f.ys, f.dim, SvmConfig{1e-3, 10, 4});
  const Model forest = train_random_forest(f.xs, f.ys, f.dim, fc);
  const std::vector<SparseVector> probes = {f.xs[0], f.xs[7], vec({{1, 0.3}, {4, 0.9}})};
  for (const auto& model : {svm, forest}) {
    const auto path = dir / (model_kind(model) + ".json");
    save_model(path, model);
    const auto back = load_model(path);
    CHECK(model_kind(back) == model_kind(model));
    CHECK(model_classes(back) == model_classes(model));
    for (const auto& x : probes) CHECK(predict(back, x) == predict(model, x));
  }
  const auto& a = std::get<LinearSvmModel>(svm);
  const auto b = std::get<LinearSvmModel>(load_model(dir / (model_kind(svm) + ".json")));
  CHECK(a.weights == b.weights);
  testutil::write_file(dir / "bad.json", "{\"format\": 99}");
  CHECK_THROWS(load_model(dir / "bad.json"));
}
