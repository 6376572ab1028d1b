#include <cmath>
#include <random>

#include "doctest.h"
#include "welfare/data_io.hpp"
#include "welfare/fairness.hpp"
#include "welfare/kernels.hpp"
#include "welfare/welfare.hpp"

using namespace welfare;

namespace {

// One-dimensional dataset whose margins under theta = (1), b = 0 are `scores`.
Dataset scored(const std::vector<double>& scores, const std::vector<int>& groups,
               const std::vector<int>& labels = {}) {
  std::vector<Individual> people;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const Label y = labels.empty() ? Label::Positive : to_label(labels[i]);
    people.push_back(Individual{{scores[i]}, 100.0 + static_cast<double>(i), groups[i], y});
  }
  return Dataset(people);
}

std::size_t admitted(const std::vector<double>& h) {
  std::size_t n = 0;
  for (double v : h) n += v > 0.0 ? 1 : 0;
  return n;
}

// Pair counting over all within-group pairs; 1 means identical ordering.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) ++concordant;
      if (s < 0) ++discordant;
    }
  return static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant);
}

GeneratorConfig skewed(std::uint64_t seed) {
  GeneratorConfig c = GeneratorConfig::defaults();
  c.seed = seed;
  c.groups[0].n = 120;
  c.groups[1].n = 80;
  c.groups[1].mean = {-0.8, 0.64, -0.48, -0.32, 0.16};
  return c;
}

}  // namespace

TEST_CASE("largest-remainder apportionment") {
  const std::size_t equal[] = {10, 10};
  CHECK(apportion(6, equal) == std::vector<std::size_t>{3, 3});
  const std::size_t uneven[] = {30, 10};
  CHECK(apportion(8, uneven) == std::vector<std::size_t>{6, 2});
  // 7 * (5, 3) / 8 = (4.375, 2.625): group 1 has the larger remainder.
  const std::size_t odd[] = {5, 3};
  CHECK(apportion(7, odd) == std::vector<std::size_t>{4, 3});
  // Tied remainders favour the first group.
  CHECK(apportion(1, equal) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("demographic parity thresholds") {
  SUBCASE("equal groups split the budget evenly") {
    // 6 positives: 4 in group 0, 2 in group 1.
    std::vector<double> scores{5, 4, 3, 2, -1, -2, -3, -4, -5, -6, 9, 8, -1.5, -2.5, -3.5, -4.5, -5.5, -6.5, -7, -8};
    std::vector<int> groups(20, 0);
    for (int i = 10; i < 20; ++i) groups[i] = 1;
    const Dataset data = scored(scores, groups);
    const auto margins = kernels::margins({{1.0}, 0.0}, data);
    const ThresholdSet ts = find_group_thresholds(data, margins, {FairnessKind::DemographicParity, 0.0});
    const auto adjusted = post_process(margins, data.groups(), ts);
    const auto rates = group_positive_rates(data, allocate_by_sign(adjusted));
    CHECK(rates.at(0) == doctest::Approx(0.3));
    CHECK(rates.at(1) == doctest::Approx(0.3));
    CHECK(admitted(adjusted) == 6);
    // Group 0 keeps its top three: 5, 4, 3; threshold halfway to the fourth.
    CHECK(ts.groups.at(0).tau == doctest::Approx(2.5));
    // Group 1 admits 9, 8 and -1.5.
    CHECK(ts.groups.at(1).tau == doctest::Approx(-2.0));
  }
  SUBCASE("unequal groups") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> scores(40);
    std::vector<int> groups(40, 0);
    for (int i = 30; i < 40; ++i) groups[i] = 1;
    // Exactly 8 positives overall, all in group 1 to start with.
    for (int i = 0; i < 40; ++i) scores[i] = i >= 30 && i < 38 ? 1.0 + std::abs(g(rng)) : -1.0 - std::abs(g(rng));
    const Dataset data = scored(scores, groups);
    const auto margins = kernels::margins({{1.0}, 0.0}, data);
    const ThresholdSet ts = find_group_thresholds(data, margins, {FairnessKind::DemographicParity, 0.0});
    const Allocation after = allocate_by_sign(post_process(margins, data.groups(), ts));
    std::size_t in_group[2] = {0, 0};
    for (std::size_t i = 0; i < data.size(); ++i) in_group[groups[i]] += after.assignments[i];
    CHECK(in_group[0] == 6);
    CHECK(in_group[1] == 2);
  }
}

TEST_CASE("admitted set is the top of each group") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> scores(60);
  std::vector<int> groups(60);
  for (std::size_t i = 0; i < 60; ++i) {
    scores[i] = g(rng) + (i % 3 == 0 ? -1.0 : 0.5);
    groups[i] = i % 3 == 0 ? 1 : 0;
  }
  const Dataset data = scored(scores, groups);
  const auto margins = kernels::margins({{1.0}, 0.0}, data);
  const ThresholdSet ts = find_group_thresholds(data, margins, {FairnessKind::DemographicParity, 0.0});
  const Allocation after = allocate_by_sign(post_process(margins, groups, ts));
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t j = 0; j < 60; ++j)
      if (groups[i] == groups[j] && margins[i] > margins[j]) CHECK(after.assignments[i] >= after.assignments[j]);
}

TEST_CASE("post-processing is a positive affine map per group") {
  const ThresholdSet identity{0.0, {{0, {0.0, 1.0}}, {1, {0.0, 1.0}}}};
  const std::vector<double> h{0.3, -2.0, 7.5};
  const std::vector<int> z{0, 1, 0};
  CHECK(post_process(h, z, identity) == h);

  const ThresholdSet shifted{0.0, {{0, {1.5, 1.0}}, {1, {0.0, 1.0}}}};
  const std::vector<double> group0{2.0, 1.0, -1.0};
  const std::vector<int> zeros{0, 0, 0};
  const auto out = post_process(group0, zeros, shifted);
  CHECK(out == std::vector<double>{0.5, -0.5, -2.5});
  CHECK(admitted(out) == 1);

  const std::vector<int> unknown{0, 2, 0};
  CHECK_THROWS_AS(post_process(h, unknown, shifted), ValidationError);
  const ThresholdSet negative{0.0, {{0, {0.0, -1.0}}}};
  CHECK_THROWS_AS(post_process(group0, zeros, negative), ValidationError);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 3.0);
  std::uniform_real_distribution<double> s(0.01, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ThresholdSet ts{g(rng), {{0, {g(rng), s(rng)}}, {1, {g(rng), s(rng)}}}};
    std::vector<double> m(30);
    std::vector<int> grp(30);
    for (std::size_t i = 0; i < 30; ++i) {
      m[i] = g(rng);
      grp[i] = static_cast<int>(i % 2);
    }
    const auto adj = post_process(m, grp, ts);
    for (int group = 0; group < 2; ++group) {
      std::vector<double> a, b;
      for (std::size_t i = 0; i < 30; ++i)
        if (grp[i] == group) {
          a.push_back(m[i]);
          b.push_back(adj[i]);
        }
      CHECK(kendall_tau(a, b) == 1.0);
    }
  }
}

TEST_CASE("demographic parity on generated populations") {
  TrainConfig train;
  train.epochs = 30;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset data = generate_population(skewed(seed));
    const LinearClassifier model = train_svm(data, train);
    const auto margins = kernels::margins(model, data);
    const Allocation before = allocate_by_sign(margins);
    const ThresholdSet ts = find_group_thresholds(data, margins, {FairnessKind::DemographicParity, 0.0});
    const auto adjusted = post_process(margins, data.groups(), ts);
    const Allocation after = allocate_by_sign(adjusted);
    CHECK(after.budget == before.budget);
    const auto rates = group_positive_rates(data, after);
    const double bound = 1.0 / static_cast<double>(std::min(data.group_count(0), data.group_count(1)));
    CHECK(std::abs(rates.at(0) - rates.at(1)) <= bound);
    CHECK(matched_allocation(adjusted, data.incomes(), WeightFunction{}).matched);
  }
}

TEST_CASE("equal opportunity thresholds") {
  TrainConfig train;
  train.epochs = 30;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset data = generate_population(skewed(seed));
    const auto margins = kernels::margins(train_svm(data, train), data);
    const ThresholdSet ts = find_group_thresholds(data, margins, {FairnessKind::EqualOpportunity, 0.0});
    const Allocation after = allocate_by_sign(post_process(margins, data.groups(), ts));
    std::size_t pos[2] = {0, 0};
    for (const auto& ind : data.individuals()) pos[ind.group] += ind.label == Label::Positive ? 1 : 0;
    const auto tpr = group_true_positive_rates(data, after);
    CHECK(std::abs(tpr.at(0) - tpr.at(1)) <= 1.0 / static_cast<double>(std::min(pos[0], pos[1])));
  }
  const Dataset no_pos = scored({1, 2, 3, 4}, {0, 0, 1, 1}, {1, 1, -1, -1});
  const auto margins = kernels::margins({{1.0}, 0.0}, no_pos);
  CHECK_THROWS_AS(find_group_thresholds(no_pos, margins, {FairnessKind::EqualOpportunity, 0.0}), ValidationError);
}

TEST_CASE("thresholds need both groups") {
  const Dataset one = scored({1.0, -1.0}, {0, 0});
  const auto margins = kernels::margins({{1.0}, 0.0}, one);
  CHECK_THROWS_AS(find_group_thresholds(one, margins, {}), ValidationError);
  CHECK_THROWS_AS(covariance_proxy({{1.0}, 0.0}, one), ValidationError);
}

TEST_CASE("tolerance skips adjustment when already fair") {
  const Dataset data = scored({1, -1, 1, -1}, {0, 0, 1, 1});
  const auto margins = kernels::margins({{1.0}, 0.0}, data);
  const ThresholdSet ts = find_group_thresholds(data, margins, {FairnessKind::DemographicParity, 0.0});
  CHECK(ts.groups.at(0).tau == 0.0);
  CHECK(ts.groups.at(1).tau == 0.0);
}

TEST_CASE("decision-boundary covariance") {
  CHECK(covariance_proxy({{0.0}, 3.0}, scored({1, 2, 3}, {0, 1, 1})) == 0.0);
  // z = (0, 1), margins (0, 2): (1/2)[(-0.5)(0) + (0.5)(2)] = 0.5
  CHECK(covariance_proxy({{1.0}, 0.0}, scored({0, 2}, {0, 1})) == 0.5);
  CHECK(covariance_proxy({{1.0}, 0.0}, scored({1, -3, -3, 1}, {0, 0, 1, 1})) == 0.0);
}

TEST_CASE("covariance-penalized training") {
  GeneratorConfig gen = skewed(5);
  const Dataset data = generate_population(gen);
  TrainConfig train;
  train.epochs = 40;

  const TrainResult plain = train_svm_detailed(data, train);
  const TrainResult zero = train_fair_svm_detailed(data, train, 0.0);
  CHECK(plain.classifier == zero.classifier);
  CHECK(plain.iterate_objective == zero.iterate_objective);

  double previous = std::abs(covariance_proxy(plain.classifier, data));
  CHECK(previous > 0.05);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const double cov = std::abs(covariance_proxy(train_fair_svm(data, train, lambda), data));
    CHECK(cov <= previous);
    previous = cov;
  }
  CHECK(std::abs(covariance_proxy(train_fair_svm(data, train, 1e6), data)) <= 1e-2);
  CHECK_THROWS_AS(train_fair_svm(data, train, -1.0), ValidationError);

  const TrainResult fair = train_fair_svm_detailed(data, train, 1.0);
  CHECK(fair.objective == doctest::Approx(fair_objective(fair.classifier, data, train.reg_lambda, 1.0)).epsilon(1e-9));
}
