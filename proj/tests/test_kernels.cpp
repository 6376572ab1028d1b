#include <random>

#include "doctest.h"
#include "welfare/kernels.hpp"
#include "welfare/svm.hpp"
#include "welfare/welfare.hpp"

using namespace welfare;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Individual> people;
  for (std::size_t i = 0; i < n; ++i) {
    Individual ind;
    ind.features.resize(d);
    for (double& v : ind.features) v = g(rng);
    ind.income = 10.0 + 1000.0 * std::abs(g(rng));
    ind.group = static_cast<int>(i % 2);
    ind.label = g(rng) > 0 ? Label::Positive : Label::Negative;
    people.push_back(ind);
  }
  return Dataset(people);
}

}  // namespace

TEST_CASE("pairwise and blocked sums agree with exact small sums") {
  std::vector<double> ones(1000, 1.0);
  CHECK(kernels::pairwise_sum(ones) == 1000.0);
  CHECK(kernels::blocked_sum(ones, Exec::Serial) == 1000.0);
  CHECK(kernels::blocked_sum({}, Exec::Parallel) == 0.0);
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  const Dataset data = random_dataset(5003, 7, 3);
  const LinearClassifier c{{0.3, -1.2, 0.7, 0.0, 2.0, -0.4, 0.1}, 0.25};
  CHECK(kernels::margins(c, data, Exec::Serial) == kernels::margins(c, data, Exec::Parallel));
  const auto losses_s = kernels::hinge_losses(c, data, Exec::Serial);
  const auto losses_p = kernels::hinge_losses(c, data, Exec::Parallel);
  CHECK(losses_s == losses_p);
  CHECK(kernels::blocked_sum(losses_s, Exec::Serial) == kernels::blocked_sum(losses_p, Exec::Parallel));
  CHECK(hinge_objective(c, data, 0.1, Exec::Serial) == hinge_objective(c, data, 0.1, Exec::Parallel));

  const WeightFunction wf{};
  const auto margins = kernels::margins(c, data);
  const auto incomes = data.incomes();
  CHECK(marginal_gains(wf, margins, incomes, Exec::Serial) == marginal_gains(wf, margins, incomes, Exec::Parallel));
  CHECK(weights(wf, margins, incomes, Exec::Serial) == weights(wf, margins, incomes, Exec::Parallel));
}

TEST_CASE("blocked sum is close to a long-double reference") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100000);
  long double ref = 0.0L;
  for (double& x : v) {
    x = u(rng);
    ref += x;
  }
  CHECK(kernels::blocked_sum(v) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
}
