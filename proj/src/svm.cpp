#include "welfare/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace welfare {

void TrainConfig::validate() const {
  require(std::isfinite(reg_lambda) && reg_lambda > 0.0, "train.reg_lambda must be > 0");
  require(epochs >= 1, "train.epochs must be >= 1");
  require(std::isfinite(eta0) && eta0 > 0.0, "train.eta0 must be > 0");
}

double hinge_objective(const LinearClassifier& classifier, const Dataset& dataset, double reg_lambda,
                       Exec exec) {
  const std::vector<double> losses = kernels::hinge_losses(classifier, dataset, exec);
  const double mean_hinge = kernels::blocked_sum(losses, exec) / static_cast<double>(dataset.size());
  double sq = 0.0;
  for (double v : classifier.theta) sq += v * v;
  return mean_hinge + 0.5 * reg_lambda * sq;
}

namespace {

double dot(const Vector& a, const Vector& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

double penalized_objective(const LinearClassifier& c, const Dataset& data, double reg_lambda,
                           const AbsLinearPenalty& penalty) {
  double obj = hinge_objective(c, data, reg_lambda);
  if (penalty.weight > 0.0) obj += penalty.weight * std::abs(dot(penalty.direction, c.theta));
  return obj;
}

}  // namespace

TrainResult train_svm_penalized(const Dataset& dataset, const TrainConfig& config,
                                const AbsLinearPenalty& penalty) {
  config.validate();
  require(std::isfinite(penalty.weight) && penalty.weight >= 0.0, "penalty weight must be >= 0");
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.dim();
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& ind : dataset.individuals()) {
    has_pos |= ind.label == Label::Positive;
    has_neg |= ind.label == Label::Negative;
  }
  if (!(has_pos && has_neg)) throw ValidationError("degenerate training set: only one label present");
  const bool penalize = penalty.weight > 0.0;
  double direction_sq = 0.0;
  if (penalize) {
    require(penalty.direction.size() == d, "penalty direction has wrong dimension");
    direction_sq = dot(penalty.direction, penalty.direction);
  }

  LinearClassifier current{Vector(d, 0.0), 0.0};
  TrainResult result;
  result.classifier = current;
  result.objective = penalized_objective(current, dataset, config.reg_lambda, penalty);
  result.iterate_objective.push_back(result.objective);
  result.best_objective.push_back(result.objective);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t t = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = config.eta0 / (1.0 + config.reg_lambda * static_cast<double>(t));
      const Individual& ind = dataset[i];
      const double y = sign_of(ind.label);
      const bool violated = y * margin(current, ind.features) < 1.0;
      const double shrink = 1.0 - eta * config.reg_lambda;
      for (std::size_t j = 0; j < d; ++j) {
        current.theta[j] *= shrink;
        if (violated) current.theta[j] += eta * y * ind.features[j];
      }
      if (violated) current.b += eta * y;

      if (penalize && direction_sq > 0.0) {
        const double cap = eta * penalty.weight;
        const double s = std::clamp(dot(penalty.direction, current.theta) / direction_sq, -cap, cap);
        for (std::size_t j = 0; j < d; ++j) current.theta[j] -= s * penalty.direction[j];
      }
    }
    const double obj = penalized_objective(current, dataset, config.reg_lambda, penalty);
    result.iterate_objective.push_back(obj);
    if (obj < result.objective) {
      result.objective = obj;
      result.classifier = current;
    }
    result.best_objective.push_back(result.objective);
  }
  return result;
}

TrainResult train_svm_detailed(const Dataset& dataset, const TrainConfig& config) {
  return train_svm_penalized(dataset, config, AbsLinearPenalty{});
}

LinearClassifier train_svm(const Dataset& dataset, const TrainConfig& config) {
  return train_svm_detailed(dataset, config).classifier;
}

}  // namespace welfare
