#include "welfare/core.hpp"

#include <cmath>
#include <numeric>

#include "welfare/kernels.hpp"

namespace welfare {

Dataset::Dataset(std::vector<Individual> individuals) : individuals_(std::move(individuals)) {
  require(!individuals_.empty(), "dataset must contain at least one individual");
  dim_ = individuals_.front().features.size();
  require(dim_ >= 1, "feature dimension must be at least 1");
  for (std::size_t i = 0; i < individuals_.size(); ++i) {
    const Individual& ind = individuals_[i];
    const std::string where = "individual " + std::to_string(i) + ": ";
    require(ind.features.size() == dim_, where + "expected " + std::to_string(dim_) + " features, got " +
                                             std::to_string(ind.features.size()));
    for (double v : ind.features) require(std::isfinite(v), where + "non-finite feature");
    require(std::isfinite(ind.income) && ind.income > 0.0, where + "income must be finite and > 0");
    require(ind.group == 0 || ind.group == 1, where + "group must be 0 or 1");
    require(ind.label == Label::Negative || ind.label == Label::Positive, where + "label must be -1 or +1");
  }
}

std::vector<double> Dataset::incomes() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& ind : individuals_) out.push_back(ind.income);
  return out;
}

std::vector<int> Dataset::groups() const {
  std::vector<int> out;
  out.reserve(size());
  for (const auto& ind : individuals_) out.push_back(ind.group);
  return out;
}

std::size_t Dataset::group_count(int group) const {
  std::size_t count = 0;
  for (const auto& ind : individuals_) count += ind.group == group ? 1 : 0;
  return count;
}

bool operator==(const Individual& a, const Individual& b) {
  return a.features == b.features && a.income == b.income && a.group == b.group && a.label == b.label;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.dim_ == b.dim_ && a.individuals_ == b.individuals_;
}

double LinearClassifier::norm() const {
  double sq = 0.0;
  for (double v : theta) sq += v * v;
  return std::sqrt(sq);
}

Allocation::Allocation(std::vector<std::uint8_t> assignments_in, std::size_t budget_in)
    : assignments(std::move(assignments_in)), budget(budget_in) {
  std::size_t total = 0;
  for (auto a : assignments) {
    require(a <= 1, "allocation entries must be 0 or 1");
    total += a;
  }
  require(total == budget, "allocation sum " + std::to_string(total) + " does not equal budget " +
                               std::to_string(budget));
}

double margin(const LinearClassifier& classifier, std::span<const double> x) {
  if (x.size() != classifier.dim()) {
    throw ValidationError("dimension mismatch: classifier has " + std::to_string(classifier.dim()) +
                          ", point has " + std::to_string(x.size()));
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) acc += classifier.theta[j] * x[j];
  return acc + classifier.b;
}

Allocation allocate_by_sign(std::span<const double> margins) {
  std::vector<std::uint8_t> assignments(margins.size(), 0);
  std::size_t budget = 0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    // A point exactly on the boundary is not allocated.
    if (margins[i] > 0.0) {
      assignments[i] = 1;
      ++budget;
    }
  }
  return Allocation(std::move(assignments), budget);
}

Allocation classify(const LinearClassifier& classifier, const Dataset& dataset) {
  return allocate_by_sign(kernels::margins(classifier, dataset));
}

std::size_t hamming_distance(const Allocation& a, const Allocation& b) {
  require(a.size() == b.size(), "allocations have different lengths");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a.assignments[i] != b.assignments[i] ? 1 : 0;
  return diff;
}

}  // namespace welfare
