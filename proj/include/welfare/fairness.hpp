#ifndef WELFARE_FAIRNESS_HPP_
#define WELFARE_FAIRNESS_HPP_

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "welfare/core.hpp"
#include "welfare/svm.hpp"

namespace welfare {

struct GroupThreshold {
  double tau = 0.0;
  double scale = 1.0;  // slope of the affine margin map, > 0
};

/// Group-specific thresholds. post_process maps a margin h of a member of
/// group g to scale_g * (h - tau_g) + tau_0, so the ordinary sign rule on the
/// new margins realizes the decision h > tau_g when tau_0 == 0.
struct ThresholdSet {
  double tau_0 = 0.0;
  std::map<int, GroupThreshold> groups;

  void validate() const;
  friend bool operator==(const ThresholdSet& a, const ThresholdSet& b) {
    return a.tau_0 == b.tau_0 && a.groups.size() == b.groups.size() &&
           std::equal(a.groups.begin(), a.groups.end(), b.groups.begin(), [](const auto& x, const auto& y) {
             return x.first == y.first && x.second.tau == y.second.tau && x.second.scale == y.second.scale;
           });
  }
};

enum class FairnessKind { DemographicParity, EqualOpportunity };

std::string to_string(FairnessKind kind);
/// "dp" / "eo" or the enum names.
FairnessKind parse_fairness_kind(const std::string& name);

struct FairnessCriterion {
  FairnessKind kind = FairnessKind::DemographicParity;
  /// If the unadjusted rate gap is already within tolerance, thresholds stay at tau_0.
  double tolerance = 0.0;
};

/// Largest-remainder apportionment of `total` seats proportional to `sizes`.
/// Equal remainders favour the earlier entry.
std::vector<std::size_t> apportion(std::size_t total, std::span<const std::size_t> sizes);

/// DemographicParity keeps the original number of positives B and gives each
/// group its largest-remainder share of B; each threshold sits halfway between
/// the last admitted and the first excluded margin of the group.
/// EqualOpportunity targets the pooled true-positive rate: each group admits
/// the round(target * n_g^+) highest-scoring positive-labelled members, so the
/// total number of positives may change.
ThresholdSet find_group_thresholds(const Dataset& dataset, std::span<const double> margins,
                                   const FairnessCriterion& criterion);

std::vector<double> post_process(std::span<const double> margins, std::span<const int> groups,
                                 const ThresholdSet& thresholds);

/// (1/n) sum (z_i - mean z) h(x_i).
double covariance_proxy(const LinearClassifier& classifier, const Dataset& dataset);

/// Gradient of covariance_proxy with respect to theta: (1/n) sum (z_i - mean z) x_i.
Vector covariance_direction(const Dataset& dataset);

/// hinge_objective + fair_lambda * |covariance_proxy|.
double fair_objective(const LinearClassifier& classifier, const Dataset& dataset, double reg_lambda,
                      double fair_lambda);

TrainResult train_fair_svm_detailed(const Dataset& dataset, const TrainConfig& config, double fair_lambda);
LinearClassifier train_fair_svm(const Dataset& dataset, const TrainConfig& config, double fair_lambda);

/// Positive rate of each group under an allocation; index = group tag.
std::map<int, double> group_positive_rates(const Dataset& dataset, const Allocation& allocation);
/// True-positive rate of each group among label +1 members (groups without
/// positives are omitted).
std::map<int, double> group_true_positive_rates(const Dataset& dataset, const Allocation& allocation);

}  // namespace welfare

#endif  // WELFARE_FAIRNESS_HPP_
