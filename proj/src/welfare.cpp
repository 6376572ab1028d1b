#include "welfare/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace welfare {

std::string to_string(UtilityFamily family) {
  switch (family) {
    case UtilityFamily::Linear: return "linear";
    case UtilityFamily::AdditivelySeparable: return "addsep";
    case UtilityFamily::ConcaveLog: return "log";
  }
  return "unknown";
}

UtilityFamily parse_utility_family(const std::string& name) {
  if (name == "linear" || name == "Linear") return UtilityFamily::Linear;
  if (name == "addsep" || name == "AdditivelySeparable") return UtilityFamily::AdditivelySeparable;
  if (name == "log" || name == "ConcaveLog") return UtilityFamily::ConcaveLog;
  throw ValidationError("unknown utility family '" + name + "' (expected linear|addsep|log)");
}

void UtilityModel::validate() const {
  require(std::isfinite(gamma) && gamma > 0.0, "utility.gamma must be > 0");
  require(std::isfinite(loan_amount) && loan_amount > 0.0, "utility.loan_amount must be > 0");
}

namespace {

void check_income(double income) {
  require(std::isfinite(income) && income > 0.0, "income must be finite and > 0");
}

}  // namespace

double utility(const UtilityModel& model, double income, int allocated) {
  check_income(income);
  const double y = allocated ? 1.0 : 0.0;
  switch (model.family) {
    case UtilityFamily::Linear: return income + model.gamma * y;
    case UtilityFamily::AdditivelySeparable: return std::log(income) + model.gamma * y;
    case UtilityFamily::ConcaveLog: return std::log(income + model.loan_amount * y);
  }
  return 0.0;
}

double delta_u(const UtilityModel& model, double income) {
  check_income(income);
  if (model.family == UtilityFamily::ConcaveLog) return std::log1p(model.loan_amount / income);
  return model.gamma;
}

double delta_u_slope(const UtilityModel& model, double income) {
  check_income(income);
  if (model.family == UtilityFamily::ConcaveLog) {
    return -model.loan_amount / (income * (income + model.loan_amount));
  }
  return 0.0;
}

void WeightFunction::validate() const {
  require(std::isfinite(beta) && beta > 0.0, "weights.beta must be > 0");
  require(std::isfinite(k) && k > 0.0, "weights.k must be > 0");
  utility.validate();
}

double weight(const WeightFunction& wf, double margin, double income) {
  return std::exp(wf.beta * margin) * wf.k / delta_u(wf.utility, income);
}

double marginal_gain(const WeightFunction& wf, double margin, double income) {
  return weight(wf, margin, income) * delta_u(wf.utility, income);
}

namespace {

template <typename Fn>
std::vector<double> per_individual(std::span<const double> margins, std::span<const double> incomes,
                                   Exec exec, Fn fn) {
  require(margins.size() == incomes.size(), "margins and incomes differ in length");
  for (double m : incomes) check_income(m);
  std::vector<double> out(margins.size());
  const auto n = static_cast<std::ptrdiff_t>(margins.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(margins[i], incomes[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(margins[i], incomes[i]);
  }
  return out;
}

}  // namespace

std::vector<double> weights(const WeightFunction& wf, std::span<const double> margins,
                            std::span<const double> incomes, Exec exec) {
  return per_individual(margins, incomes, exec, [&](double h, double m) { return weight(wf, h, m); });
}

std::vector<double> marginal_gains(const WeightFunction& wf, std::span<const double> margins,
                                   std::span<const double> incomes, Exec exec) {
  return per_individual(margins, incomes, exec,
                        [&](double h, double m) { return marginal_gain(wf, h, m); });
}

Allocation greedy_allocate(std::span<const double> margins, std::span<const double> incomes,
                           const WeightFunction& wf, std::size_t budget) {
  require(budget <= margins.size(), "budget " + std::to_string(budget) + " exceeds population size " +
                                        std::to_string(margins.size()));
  const std::vector<double> gains = marginal_gains(wf, margins, incomes);
  std::vector<std::size_t> order(gains.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  std::vector<std::uint8_t> assignments(gains.size(), 0);
  for (std::size_t r = 0; r < budget; ++r) assignments[order[r]] = 1;
  return Allocation(std::move(assignments), budget);
}

MatchResult matched_allocation(std::span<const double> margins, std::span<const double> incomes,
                               const WeightFunction& wf) {
  MatchResult result;
  result.classifier = allocate_by_sign(margins);
  result.planner = greedy_allocate(margins, incomes, wf, result.classifier.budget);
  result.matched = result.planner == result.classifier;
  return result;
}

MatchResult matched_allocation(const LinearClassifier& classifier, const Dataset& dataset,
                               const WeightFunction& wf) {
  const std::vector<double> margins = kernels::margins(classifier, dataset);
  return matched_allocation(margins, dataset.incomes(), wf);
}

WeightSurface surface_of(const WeightFunction& wf) {
  return [wf](double h, double m) { return weight(wf, h, m); };
}

ConditionReport check_weight_conditions(const WeightSurface& surface, const UtilityModel& model,
                                        std::size_t samples, std::uint64_t seed, double step, double tol) {
  require(step > 0.0 && tol > 0.0, "step and tol must be > 0");
  require(samples >= 1, "samples must be >= 1");
  model.validate();

  const auto gain = [&](double h, double m) { return surface(h, m) * delta_u(model, m); };
  const auto describe = [](const char* what, double h, double m, double dh, double dm) {
    std::ostringstream os;
    os.precision(17);
    os << what << " h=" << h << " income=" << m << " dh=" << dh << " dincome=" << dm;
    return os.str();
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> margin_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> log_income_dist(std::log(10.0), std::log(1e6));
  std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * M_PI);

  ConditionReport report;
  report.n_samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const double h = margin_dist(rng);
    const double m = std::exp(log_income_dist(rng));
    const double other_m = std::exp(log_income_dist(rng));
    const double angle = angle_dist(rng);
    const double dh = step * std::cos(angle);
    const double dm = step * std::sin(angle);

    // Sign of the marginal-gain change follows dh.
    if (dh != 0.0) {
      const double delta = gain(h + dh, m + dm) - gain(h - dh, m - dm);
      const int expected = dh > 0.0 ? 1 : -1;
      if (!(delta * expected > 0.0)) {
        report.violations.push_back({describe("sign", h, m, dh, dm), delta, expected});
      }
    }

    // No margin change: the gain must not move with income.
    const double flat = gain(h, m + step) - gain(h, m - step);
    report.max_abs_error_at_dh_zero = std::max(report.max_abs_error_at_dh_zero, std::abs(flat));
    if (!(std::abs(flat) <= tol)) {
      report.violations.push_back({describe("income-only", h, m, 0.0, step), flat, 0});
    }

    // Equal margins, unequal incomes: equal gains.
    const double g1 = gain(h, m);
    const double g2 = gain(h, other_m);
    const double rel = std::abs(g1 - g2) / std::max(std::abs(g1), std::abs(g2));
    if (!(rel <= 1e-12)) {
      report.violations.push_back({describe("indifference", h, m, 0.0, other_m - m), rel, 0});
    }
  }
  return report;
}

ConditionReport check_weight_conditions(const WeightFunction& wf, std::size_t samples, std::uint64_t seed,
                                        double step, double tol) {
  wf.validate();
  return check_weight_conditions(surface_of(wf), wf.utility, samples, seed, step, tol);
}

}  // namespace welfare
