#include "welfare/fairness.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "welfare/kernels.hpp"

namespace welfare {

void ThresholdSet::validate() const {
  require(std::isfinite(tau_0), "tau_0 must be finite");
  for (const auto& [group, th] : groups) {
    require(std::isfinite(th.tau), "threshold for group " + std::to_string(group) + " must be finite");
    require(std::isfinite(th.scale) && th.scale > 0.0,
            "scale for group " + std::to_string(group) + " must be > 0");
  }
}

std::string to_string(FairnessKind kind) {
  return kind == FairnessKind::DemographicParity ? "dp" : "eo";
}

FairnessKind parse_fairness_kind(const std::string& name) {
  if (name == "dp" || name == "DemographicParity") return FairnessKind::DemographicParity;
  if (name == "eo" || name == "EqualOpportunity") return FairnessKind::EqualOpportunity;
  throw ValidationError("unknown fairness criterion '" + name + "' (expected dp|eo)");
}

std::vector<std::size_t> apportion(std::size_t total, std::span<const std::size_t> sizes) {
  const std::size_t population = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  require(population > 0, "cannot apportion over an empty population");
  std::vector<std::size_t> seats(sizes.size());
  std::vector<std::size_t> remainder(sizes.size());
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    // Exact integer quotient and remainder of total * size / population.
    const std::size_t numerator = total * sizes[g];
    seats[g] = numerator / population;
    remainder[g] = numerator % population;
    assigned += seats[g];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++seats[order[r]];
  return seats;
}

namespace {

// Threshold admitting exactly the top `k` of `sorted_desc` (distinct values).
double threshold_for_top(const std::vector<double>& sorted_desc, std::size_t k) {
  if (sorted_desc.empty()) return 0.0;
  if (k == 0) return sorted_desc.front() + 1.0;
  if (k >= sorted_desc.size()) return sorted_desc.back() - 1.0;
  return 0.5 * (sorted_desc[k - 1] + sorted_desc[k]);
}

std::vector<double> sorted_desc_where(std::span<const double> margins, const std::function<bool(std::size_t)>& keep) {
  std::vector<double> out;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (keep(i)) out.push_back(margins[i]);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double rate_gap(const std::map<int, double>& rates) {
  return std::abs(rates.at(0) - rates.at(1));
}

}  // namespace

ThresholdSet find_group_thresholds(const Dataset& dataset, std::span<const double> margins,
                                   const FairnessCriterion& criterion) {
  require(margins.size() == dataset.size(), "margins and dataset differ in length");
  require(dataset.has_both_groups(), "group thresholds need both groups present");
  require(criterion.tolerance >= 0.0, "fairness tolerance must be >= 0");

  ThresholdSet result;
  result.groups[0] = GroupThreshold{};
  result.groups[1] = GroupThreshold{};
  const Allocation original = allocate_by_sign(margins);

  if (criterion.kind == FairnessKind::DemographicParity) {
    if (rate_gap(group_positive_rates(dataset, original)) <= criterion.tolerance) return result;
    const std::size_t sizes[2] = {dataset.group_count(0), dataset.group_count(1)};
    const std::vector<std::size_t> quota = apportion(original.budget, sizes);
    for (int g = 0; g < 2; ++g) {
      const auto sorted = sorted_desc_where(margins, [&](std::size_t i) { return dataset[i].group == g; });
      result.groups[g].tau = threshold_for_top(sorted, quota[g]);
    }
    return result;
  }

  std::size_t positives[2] = {0, 0};
  std::size_t admitted = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label != Label::Positive) continue;
    ++positives[dataset[i].group];
    admitted += original.assignments[i];
  }
  require(positives[0] > 0 && positives[1] > 0,
          "equal opportunity needs positive-labelled individuals in both groups");
  if (rate_gap(group_true_positive_rates(dataset, original)) <= criterion.tolerance) return result;
  const double target = static_cast<double>(admitted) / static_cast<double>(positives[0] + positives[1]);
  for (int g = 0; g < 2; ++g) {
    const auto sorted = sorted_desc_where(
        margins, [&](std::size_t i) { return dataset[i].group == g && dataset[i].label == Label::Positive; });
    const auto k = static_cast<std::size_t>(std::llround(target * static_cast<double>(positives[g])));
    result.groups[g].tau = threshold_for_top(sorted, k);
  }
  return result;
}

std::vector<double> post_process(std::span<const double> margins, std::span<const int> groups,
                                 const ThresholdSet& thresholds) {
  require(margins.size() == groups.size(), "margins and groups differ in length");
  thresholds.validate();
  std::vector<double> out(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const auto it = thresholds.groups.find(groups[i]);
    if (it == thresholds.groups.end()) {
      throw ValidationError("no threshold for group tag " + std::to_string(groups[i]) + " (index " +
                            std::to_string(i) + ")");
    }
    out[i] = it->second.scale * (margins[i] - it->second.tau) + thresholds.tau_0;
  }
  return out;
}

double covariance_proxy(const LinearClassifier& classifier, const Dataset& dataset) {
  require(dataset.has_both_groups(), "covariance proxy needs both groups present");
  const std::vector<double> h = kernels::margins(classifier, dataset);
  const double n = static_cast<double>(dataset.size());
  const double z_mean = static_cast<double>(dataset.group_count(1)) / n;
  std::vector<double> terms(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) terms[i] = (dataset[i].group - z_mean) * h[i];
  return kernels::blocked_sum(terms) / n;
}

Vector covariance_direction(const Dataset& dataset) {
  require(dataset.has_both_groups(), "covariance proxy needs both groups present");
  const double n = static_cast<double>(dataset.size());
  const double z_mean = static_cast<double>(dataset.group_count(1)) / n;
  Vector direction(dataset.dim(), 0.0);
  for (const auto& ind : dataset.individuals()) {
    const double centered = ind.group - z_mean;
    for (std::size_t j = 0; j < direction.size(); ++j) direction[j] += centered * ind.features[j];
  }
  for (double& v : direction) v /= n;
  return direction;
}

double fair_objective(const LinearClassifier& classifier, const Dataset& dataset, double reg_lambda,
                      double fair_lambda) {
  double obj = hinge_objective(classifier, dataset, reg_lambda);
  if (fair_lambda > 0.0) obj += fair_lambda * std::abs(covariance_proxy(classifier, dataset));
  return obj;
}

TrainResult train_fair_svm_detailed(const Dataset& dataset, const TrainConfig& config, double fair_lambda) {
  require(std::isfinite(fair_lambda) && fair_lambda >= 0.0, "fair_lambda must be >= 0");
  require(dataset.has_both_groups(), "fair training needs both groups present");
  if (fair_lambda == 0.0) return train_svm_detailed(dataset, config);
  return train_svm_penalized(dataset, config, AbsLinearPenalty{covariance_direction(dataset), fair_lambda});
}

LinearClassifier train_fair_svm(const Dataset& dataset, const TrainConfig& config, double fair_lambda) {
  return train_fair_svm_detailed(dataset, config, fair_lambda).classifier;
}

std::map<int, double> group_positive_rates(const Dataset& dataset, const Allocation& allocation) {
  require(allocation.size() == dataset.size(), "allocation and dataset differ in length");
  std::map<int, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto& c = counts[dataset[i].group];
    c.first += allocation.assignments[i];
    ++c.second;
  }
  std::map<int, double> rates;
  for (const auto& [g, c] : counts) rates[g] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return rates;
}

std::map<int, double> group_true_positive_rates(const Dataset& dataset, const Allocation& allocation) {
  require(allocation.size() == dataset.size(), "allocation and dataset differ in length");
  std::map<int, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label != Label::Positive) continue;
    auto& c = counts[dataset[i].group];
    c.first += allocation.assignments[i];
    ++c.second;
  }
  std::map<int, double> rates;
  for (const auto& [g, c] : counts) rates[g] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return rates;
}

}  // namespace welfare
