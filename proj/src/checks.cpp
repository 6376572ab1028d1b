#include "welfare/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace welfare {

ConditionReport check_multiplicative_identity(const WeightFunction& wf, std::size_t samples, std::uint64_t seed,
                                              double rel_tol) {
  wf.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> margin_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> log_income(std::log(10.0), std::log(1e6));
  ConditionReport report;
  report.n_samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const double h = margin_dist(rng);
    const double m = std::exp(log_income(rng));
    const double expected = wf.k * std::exp(wf.beta * h);
    const double rel = std::abs(marginal_gain(wf, h, m) - expected) / expected;
    report.max_abs_error_at_dh_zero = std::max(report.max_abs_error_at_dh_zero, rel);
    if (!(rel <= rel_tol)) {
      std::ostringstream os;
      os.precision(17);
      os << "identity h=" << h << " income=" << m;
      report.violations.push_back({os.str(), rel, 0});
    }
  }
  return report;
}

namespace {

Vector gaussian_vector(std::mt19937_64& rng, std::size_t dim, double sd) {
  std::normal_distribution<double> gauss(0.0, sd);
  Vector v(dim);
  for (double& x : v) x = gauss(rng);
  return v;
}

}  // namespace

GeometryCase random_geometry_case(std::mt19937_64& rng, std::size_t dim, double min_distance) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  LinearClassifier h{gaussian_vector(rng, dim, 1.0), 2.0 * gauss(rng)};
  LinearClassifier h_prime{gaussian_vector(rng, dim, 1.0), 2.0 * gauss(rng)};
  HyperplaneProjection source(h);
  RigidMotion motion = build_transform(h, h_prime);
  Vector x;
  do {
    x = gaussian_vector(rng, dim, 3.0);
  } while (!(transformed_distance(x, source, motion) > min_distance));
  return GeometryCase{std::move(h), std::move(h_prime), std::move(source), std::move(motion), std::move(x)};
}

Vector central_difference_gradient(std::span<const double> x, const HyperplaneProjection& hp,
                                   const RigidMotion& motion, double step) {
  Vector probe(x.begin(), x.end());
  Vector grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double saved = probe[j];
    probe[j] = saved + step;
    const double up = transformed_distance(probe, hp, motion);
    probe[j] = saved - step;
    const double down = transformed_distance(probe, hp, motion);
    probe[j] = saved;
    grad[j] = (up - down) / (2.0 * step);
  }
  return grad;
}

GradientCheck check_distance_gradients(std::size_t configurations, std::size_t min_dim, std::size_t max_dim,
                                       std::uint64_t seed, double step, double rel_tol, double closed_form_tol) {
  require(min_dim >= 2 && min_dim <= max_dim, "gradient check needs 2 <= min_dim <= max_dim");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim_dist(min_dim, max_dim);
  GradientCheck out;
  for (std::size_t c = 0; c < configurations; ++c) {
    const std::size_t dim = dim_dist(rng);
    const GeometryCase gc = random_geometry_case(rng, dim);
    const Vector analytic = distance_gradient(gc.x, gc.source, gc.motion);
    const Vector numeric = central_difference_gradient(gc.x, gc.source, gc.motion, step);
    double diff_sq = 0.0;
    double a_sq = 0.0;
    double n_sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      diff_sq += (analytic[j] - numeric[j]) * (analytic[j] - numeric[j]);
      a_sq += analytic[j] * analytic[j];
      n_sq += numeric[j] * numeric[j];
    }
    const double rel = std::sqrt(diff_sq) / std::max(std::sqrt(std::max(a_sq, n_sq)), 1e-300);
    out.max_relative_error = std::max(out.max_relative_error, rel);
    out.max_gradient_norm = std::max(out.max_gradient_norm, std::sqrt(a_sq));
    std::ostringstream where;
    where << "case " << c << " d=" << dim;
    if (!(rel <= rel_tol)) out.report.violations.push_back({"gradient " + where.str(), rel, 0});

    // Same hyperplane on both sides: D reduces to the point-plane distance.
    const HyperplaneProjection same(gc.h);
    const RigidMotion identity = build_transform(gc.h, gc.h);
    const double d_same = transformed_distance(gc.x, same, identity);
    const double expected = std::abs(margin(gc.h, gc.x)) / gc.h.norm();
    const double closed = std::abs(d_same - expected) / std::max(expected, 1e-300);
    out.max_closed_form_error = std::max(out.max_closed_form_error, closed);
    if (!(closed <= closed_form_tol)) out.report.violations.push_back({"closed-form " + where.str(), closed, 0});
    ++out.cases;
  }
  out.report.n_samples = out.cases;
  return out;
}

ConditionReport check_boundary_conditions_random(const WeightFunction& wf, std::size_t configurations, std::size_t min_dim,
                                 std::size_t max_dim, std::uint64_t seed, double step, double tol,
                                 std::size_t points_per_case) {
  require(min_dim >= 2 && min_dim <= max_dim, "boundary check needs 2 <= min_dim <= max_dim");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim_dist(min_dim, max_dim);
  ConditionReport total;
  for (std::size_t c = 0; c < configurations; ++c) {
    const std::size_t dim = dim_dist(rng);
    const GeometryCase gc = random_geometry_case(rng, dim);
    std::vector<Vector> points{gc.x};
    while (points.size() < points_per_case) points.push_back(gaussian_vector(rng, dim, 3.0));
    merge(total, check_boundary_conditions(wf, points, gc.source, gc.motion, step, tol, rng()));
  }
  return total;
}

void merge(ConditionReport& a, const ConditionReport& b) {
  a.n_samples += b.n_samples;
  a.violations.insert(a.violations.end(), b.violations.begin(), b.violations.end());
  a.max_abs_error_at_dh_zero = std::max(a.max_abs_error_at_dh_zero, b.max_abs_error_at_dh_zero);
}

}  // namespace welfare
