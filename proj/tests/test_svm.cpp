#include <cmath>
#include <random>

#include "doctest.h"
#include "welfare/svm.hpp"

using namespace welfare;

namespace {

Dataset single(Vector x, Label y) { return Dataset({Individual{std::move(x), 100.0, 0, y}}); }

// Two unit-variance Gaussian blobs at (-2,0) and (+2,0); draws landing on the
// wrong side of x1 = 0 are redrawn, so x1 = 0 separates them by construction.
Dataset separable_blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Individual> people;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    const double center = positive ? 2.0 : -2.0;
    double x1 = 0.0;
    do {
      x1 = center + g(rng);
    } while ((x1 > 0.0) != positive);
    people.push_back(Individual{{x1, g(rng)}, 100.0, static_cast<int>(i % 2),
                                positive ? Label::Positive : Label::Negative});
  }
  return Dataset(people);
}

double accuracy(const LinearClassifier& c, const Dataset& data) {
  std::size_t correct = 0;
  for (const auto& ind : data.individuals()) {
    correct += (margin(c, ind.features) > 0.0) == (ind.label == Label::Positive) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("hinge objective on single points") {
  // theta = 0 so only the intercept sets h(x).
  CHECK(hinge_objective({{0.0}, 1.0}, single({3.0}, Label::Positive), 1e-12) == 0.0);
  CHECK(hinge_objective({{0.0}, 0.0}, single({3.0}, Label::Positive), 1e-12) == 1.0);
  CHECK(hinge_objective({{0.0}, -1.0}, single({3.0}, Label::Positive), 1e-12) == 2.0);
  // Regularization touches theta only.
  CHECK(hinge_objective({{2.0}, 0.0}, single({0.0}, Label::Negative), 0.5) == doctest::Approx(1.0 + 1.0));
}

TEST_CASE("separable blobs reach full training accuracy") {
  const Dataset data = separable_blobs(100, 42);
  // Separator oracle: x1 = 0 splits the labels exactly.
  for (const auto& ind : data.individuals()) CHECK((ind.features[0] > 0.0) == (ind.label == Label::Positive));

  TrainConfig config;
  config.reg_lambda = 1e-3;
  config.epochs = 200;
  config.seed = 42;
  const TrainResult result = train_svm_detailed(data, config);
  CHECK(accuracy(result.classifier, data) == 1.0);
}

TEST_CASE("identical features with mixed labels") {
  std::vector<Individual> people;
  for (int i = 0; i < 10; ++i) people.push_back({{1.0, 1.0}, 50.0, 0, i < 7 ? Label::Positive : Label::Negative});
  const Dataset data(people);
  // Every margin equals one scalar t; brute force the 1-parameter hinge.
  double best = 1e300;
  for (int k = -4000; k <= 4000; ++k) {
    const double t = k * 1e-3;
    best = std::min(best, (7 * std::max(0.0, 1 - t) + 3 * std::max(0.0, 1 + t)) / 10.0);
  }
  CHECK(best == doctest::Approx(0.6));
  TrainConfig config;
  config.epochs = 100;
  const TrainResult r = train_svm_detailed(data, config);
  CHECK(r.objective >= best - 1e-12);
  CHECK(accuracy(r.classifier, data) == doctest::Approx(0.7));
}

TEST_CASE("heavy regularization keeps theta tiny") {
  const Dataset data = separable_blobs(100, 7);
  TrainConfig config;
  config.reg_lambda = 1e6;
  config.epochs = 20;
  const TrainResult r = train_svm_detailed(data, config);
  // Best-seen objective <= objective at theta = 0, b = 0, which is 1.
  const double bound = std::sqrt(2.0 * 1.0 / config.reg_lambda);
  CHECK(r.classifier.norm() <= bound);
  CHECK(r.classifier.norm() <= 1e-2);
}

TEST_CASE("training is deterministic and returns the best iterate") {
  const Dataset data = separable_blobs(60, 3);
  TrainConfig config;
  config.epochs = 30;
  const TrainResult a = train_svm_detailed(data, config);
  const TrainResult b = train_svm_detailed(data, config);
  CHECK(a.classifier == b.classifier);
  CHECK(a.iterate_objective == b.iterate_objective);

  REQUIRE(a.best_objective.size() == static_cast<std::size_t>(config.epochs) + 1);
  for (std::size_t i = 1; i < a.best_objective.size(); ++i) CHECK(a.best_objective[i] <= a.best_objective[i - 1]);
  const std::size_t last = a.iterate_objective.size();
  for (std::size_t i = last - 10; i < last; ++i) CHECK(a.objective <= a.iterate_objective[i] + 1e-9);
  CHECK(hinge_objective(a.classifier, data, config.reg_lambda) == a.objective);

  config.seed = 43;
  CHECK_FALSE(train_svm_detailed(data, config).classifier == a.classifier);
}

TEST_CASE("training rejects degenerate inputs") {
  std::vector<Individual> people(5, Individual{{1.0}, 20.0, 0, Label::Positive});
  CHECK_THROWS_WITH_AS(train_svm(Dataset(people), TrainConfig{}), doctest::Contains("degenerate training set"),
                       ValidationError);
  TrainConfig bad;
  bad.reg_lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = TrainConfig{};
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
