#ifndef WELFARE_CHECKS_HPP_
#define WELFARE_CHECKS_HPP_

// Randomized numerical witness suites behind `welfare check`.

#include <cstdint>
#include <random>

#include "welfare/geometry.hpp"
#include "welfare/welfare.hpp"

namespace welfare {

/// |marginal_gain(h, x^m) - k exp(beta h)| / (k exp(beta h)) <= rel_tol for
/// h uniform in [-5, 5] and x^m log-uniform in [10, 1e6].
ConditionReport check_multiplicative_identity(const WeightFunction& wf, std::size_t samples, std::uint64_t seed,
                                              double rel_tol = 1e-12);

/// A random pair of hyperplanes with the canonical motion between them and
/// a probe point at transformed distance > min_distance.
struct GeometryCase {
  LinearClassifier h;
  LinearClassifier h_prime;
  HyperplaneProjection source;
  RigidMotion motion;
  Vector x;
};

GeometryCase random_geometry_case(std::mt19937_64& rng, std::size_t dim, double min_distance = 1e-3);

/// Central-difference gradient of transformed_distance; uses only the
/// forward map, never distance_gradient.
Vector central_difference_gradient(std::span<const double> x, const HyperplaneProjection& hp,
                                   const RigidMotion& motion, double step);

struct GradientCheck {
  std::size_t cases = 0;
  double max_relative_error = 0.0;     // analytic vs central differences
  double max_closed_form_error = 0.0;  // h == h': D vs |margin| / |theta|
  double max_gradient_norm = 0.0;
  ConditionReport report;
};

GradientCheck check_distance_gradients(std::size_t configurations, std::size_t min_dim, std::size_t max_dim,
                                       std::uint64_t seed, double step, double rel_tol = 1e-5,
                                       double closed_form_tol = 1e-10);

/// check_boundary_conditions over random hyperplane pairs, `points_per_case` probes each.
ConditionReport check_boundary_conditions_random(const WeightFunction& wf, std::size_t configurations, std::size_t min_dim,
                                 std::size_t max_dim, std::uint64_t seed, double step, double tol,
                                 std::size_t points_per_case = 10);

/// Appends b's samples and violations to a.
void merge(ConditionReport& a, const ConditionReport& b);

}  // namespace welfare

#endif  // WELFARE_CHECKS_HPP_
