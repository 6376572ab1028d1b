#ifndef WELFARE_CORE_HPP_
#define WELFARE_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace welfare {

using Vector = std::vector<double>;

/// Thrown for malformed inputs: bad dimensions, out-of-domain values,
/// configs that violate a type invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// string_view keeps literal messages allocation-free on the passing path.
inline void require(bool condition, std::string_view message) {
  if (!condition) throw ValidationError(std::string(message));
}

/// Ground-truth label used by the hinge loss. Allocations use {0,1}; the two
/// are converted only through to_label / to_assignment.
enum class Label : int { Negative = -1, Positive = 1 };

inline int sign_of(Label label) { return static_cast<int>(label); }
inline Label to_label(int value) {
  require(value == -1 || value == 1, "label must be -1 or +1, got " + std::to_string(value));
  return value > 0 ? Label::Positive : Label::Negative;
}
inline std::uint8_t to_assignment(Label label) { return label == Label::Positive ? 1 : 0; }

struct Individual {
  Vector features;
  double income = 1.0;  // x^m, strictly positive
  int group = 0;        // sensitive attribute z in {0,1}
  Label label = Label::Negative;
};

/// Ordered population of individuals sharing one feature dimension.
class Dataset {
 public:
  explicit Dataset(std::vector<Individual> individuals);

  std::size_t size() const { return individuals_.size(); }
  std::size_t dim() const { return dim_; }
  const Individual& operator[](std::size_t i) const { return individuals_[i]; }
  const std::vector<Individual>& individuals() const { return individuals_; }

  std::vector<double> incomes() const;
  std::vector<int> groups() const;
  std::size_t group_count(int group) const;
  bool has_both_groups() const { return group_count(0) > 0 && group_count(1) > 0; }

  friend bool operator==(const Dataset&, const Dataset&);

 private:
  std::vector<Individual> individuals_;
  std::size_t dim_ = 0;
};

bool operator==(const Individual& a, const Individual& b);

struct LinearClassifier {
  Vector theta;
  double b = 0.0;

  std::size_t dim() const { return theta.size(); }
  double norm() const;
  friend bool operator==(const LinearClassifier&, const LinearClassifier&) = default;
};

/// Binary allocation y_i in {0,1} together with the budget it spends.
struct Allocation {
  std::vector<std::uint8_t> assignments;
  std::size_t budget = 0;

  Allocation() = default;
  Allocation(std::vector<std::uint8_t> assignments, std::size_t budget);

  std::size_t size() const { return assignments.size(); }
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// theta^T x + b, summed left to right.
double margin(const LinearClassifier& classifier, std::span<const double> x);

/// Sign rule on a precomputed margin vector: y_i = 1 iff margin_i > 0.
Allocation allocate_by_sign(std::span<const double> margins);

/// The classifier's own allocation; the budget is its count of positives.
Allocation classify(const LinearClassifier& classifier, const Dataset& dataset);

/// Number of allocations that differ between a and b.
std::size_t hamming_distance(const Allocation& a, const Allocation& b);

}  // namespace welfare

#endif  // WELFARE_CORE_HPP_
