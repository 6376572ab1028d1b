#ifndef WELFARE_SVM_HPP_
#define WELFARE_SVM_HPP_

#include <cstdint>
#include <vector>

#include "welfare/core.hpp"
#include "welfare/kernels.hpp"

namespace welfare {

struct TrainConfig {
  double reg_lambda = 1e-3;
  int epochs = 200;
  std::uint64_t seed = 42;
  double eta0 = 0.1;  // step size eta_t = eta0 / (1 + reg_lambda * t)

  void validate() const;
};

struct TrainResult {
  LinearClassifier classifier;            // best-seen iterate
  double objective = 0.0;                 // objective of the returned iterate
  std::vector<double> iterate_objective;  // iterate 0 is the zero classifier, then one per epoch
  std::vector<double> best_objective;     // running minimum of iterate_objective
};

/// Penalty weight * |direction^T theta|, added to the hinge objective.
/// The decision-boundary covariance is of this form.
struct AbsLinearPenalty {
  Vector direction;
  double weight = 0.0;
};

/// (1/n) sum max(0, 1 - y_i h(x_i)) + (reg_lambda/2) ||theta||^2. The
/// intercept is not regularized.
double hinge_objective(const LinearClassifier& classifier, const Dataset& dataset, double reg_lambda,
                       Exec exec = Exec::Parallel);

/// Seeded stochastic subgradient descent (per-epoch shuffle, one example per
/// step). Returns the best iterate seen at epoch boundaries. Throws
/// ValidationError "degenerate training set" if only one label is present.
TrainResult train_svm_detailed(const Dataset& dataset, const TrainConfig& config);
LinearClassifier train_svm(const Dataset& dataset, const TrainConfig& config);

/// Same scheme with an absolute-linear penalty. After every subgradient step
/// the penalty is applied as its exact proximal map (a soft threshold along
/// the penalty direction), which is stable for any weight. A zero weight
/// skips the proximal step, so iterates equal train_svm bit-for-bit.
TrainResult train_svm_penalized(const Dataset& dataset, const TrainConfig& config,
                                const AbsLinearPenalty& penalty);

}  // namespace welfare

#endif  // WELFARE_SVM_HPP_
