#ifndef WELFARE_WELFARE_HPP_
#define WELFARE_WELFARE_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "welfare/core.hpp"
#include "welfare/kernels.hpp"

namespace welfare {

enum class UtilityFamily { Linear, AdditivelySeparable, ConcaveLog };

std::string to_string(UtilityFamily family);
/// Accepts the CLI spellings "linear", "addsep", "log" as well as the enum names.
UtilityFamily parse_utility_family(const std::string& name);

/// Utility of income x^m with allocation y in {0,1}:
///   Linear               u = x^m + gamma*y          du = gamma
///   AdditivelySeparable  u = log(x^m) + gamma*y     du = gamma
///   ConcaveLog           u = log(x^m + L*y)         du = log(1 + L/x^m)
struct UtilityModel {
  UtilityFamily family = UtilityFamily::ConcaveLog;
  double gamma = 1.0;
  double loan_amount = 100.0;

  void validate() const;
};

double utility(const UtilityModel& model, double income, int allocated);
/// u(x^m, 1) - u(x^m, 0). Strictly positive.
double delta_u(const UtilityModel& model, double income);
/// d(delta_u)/d(x^m); zero for the linear and additively separable families.
double delta_u_slope(const UtilityModel& model, double income);

/// Implied welfare weight of multiplicative form
///   w(h, x^m) = f(h) * k / delta_u(x^m),  f(h) = exp(beta*h).
struct WeightFunction {
  double beta = 1.0;
  double k = 1.0;
  UtilityModel utility;

  void validate() const;
};

double weight(const WeightFunction& wf, double margin, double income);
/// w * delta_u; equals k*exp(beta*h) for every income.
double marginal_gain(const WeightFunction& wf, double margin, double income);

std::vector<double> weights(const WeightFunction& wf, std::span<const double> margins,
                            std::span<const double> incomes, Exec exec = Exec::Parallel);
std::vector<double> marginal_gains(const WeightFunction& wf, std::span<const double> margins,
                                   std::span<const double> incomes, Exec exec = Exec::Parallel);

/// Planner's budgeted binary allocation: the budget-many individuals with the
/// largest marginal gain receive the good. Equal gains go to the lower index.
/// With unit costs this greedy rule solves the binary knapsack exactly.
Allocation greedy_allocate(std::span<const double> margins, std::span<const double> incomes,
                           const WeightFunction& wf, std::size_t budget);

struct MatchResult {
  Allocation planner;     // greedy welfare-maximizing allocation
  Allocation classifier;  // sign-rule allocation, which fixes the budget
  bool matched = false;
};

MatchResult matched_allocation(std::span<const double> margins, std::span<const double> incomes,
                               const WeightFunction& wf);
MatchResult matched_allocation(const LinearClassifier& classifier, const Dataset& dataset,
                               const WeightFunction& wf);

// ---------------------------------------------------------------------------
// Numerical witnesses for the differential weight conditions.

/// Any weight surface (margin, income) -> w. Lets the checkers run on weight
/// functions that are not of the multiplicative form (negative controls).
using WeightSurface = std::function<double(double margin, double income)>;

WeightSurface surface_of(const WeightFunction& wf);

struct Violation {
  std::string description;
  double observed = 0.0;
  int expected_sign = 0;  // +1 / -1 strict sign expected, 0 = expected to vanish
};

struct ConditionReport {
  std::size_t n_samples = 0;
  std::vector<Violation> violations;
  double max_abs_error_at_dh_zero = 0.0;

  bool passed() const { return violations.empty(); }
};

/// Finite-difference check of the marginal-gain conditions. For each sample a
/// base point (h in [-5, 5], x^m log-uniform in [10, 1e6]) is drawn together
/// with a random direction (dh, dx^m) of norm `step`:
///  - the central difference of w_f must have the sign of dh;
///  - along the pure income direction (dh = 0) |delta w_f| <= tol;
///  - at equal margins and two different incomes w_f agrees to 1e-12 relative.
ConditionReport check_weight_conditions(const WeightSurface& surface, const UtilityModel& utility,
                                        std::size_t samples, std::uint64_t seed, double step, double tol);
ConditionReport check_weight_conditions(const WeightFunction& wf, std::size_t samples, std::uint64_t seed,
                                        double step, double tol);

}  // namespace welfare

#endif  // WELFARE_WELFARE_HPP_
