#include "welfare/geometry.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace welfare {

Eigen::VectorXd to_eigen(std::span<const double> x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out(static_cast<Eigen::Index>(i)) = x[i];
  return out;
}

Vector to_vector(const Eigen::VectorXd& x) { return Vector(x.data(), x.data() + x.size()); }

HyperplaneProjection::HyperplaneProjection(LinearClassifier classifier) : classifier_(std::move(classifier)) {
  require(classifier_.dim() >= 1, "degenerate hyperplane: empty theta");
  theta_norm_ = classifier_.norm();
  if (!(theta_norm_ > 0.0) || !std::isfinite(theta_norm_)) {
    throw ValidationError("degenerate hyperplane: theta must be a finite non-zero vector");
  }
  const Eigen::VectorXd theta = to_eigen(classifier_.theta);
  normal_ = theta / theta_norm_;
  anchor_ = (-classifier_.b / (theta_norm_ * theta_norm_)) * theta;
}

Eigen::MatrixXd HyperplaneProjection::linear_part() const {
  const auto d = static_cast<Eigen::Index>(dim());
  return Eigen::MatrixXd::Identity(d, d) - normal_ * normal_.transpose();
}

Eigen::VectorXd HyperplaneProjection::project(const Eigen::VectorXd& x) const {
  require(static_cast<std::size_t>(x.size()) == dim(), "dimension mismatch in projection");
  const Eigen::VectorXd theta = to_eigen(classifier_.theta);
  const double scale = (theta.dot(x) + classifier_.b) / (theta_norm_ * theta_norm_);
  return x - scale * theta;
}

double HyperplaneProjection::signed_distance(const Eigen::VectorXd& x) const {
  require(static_cast<std::size_t>(x.size()) == dim(), "dimension mismatch in signed distance");
  return (to_eigen(classifier_.theta).dot(x) + classifier_.b) / theta_norm_;
}

RigidMotion RigidMotion::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return {Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
}

Vector project(const HyperplaneProjection& hp, std::span<const double> x) {
  return to_vector(hp.project(to_eigen(x)));
}

namespace {

// Rotation by the angle between unit vectors u and v (v orthogonal to u)
// inside span{u, v}, with cos c and sin s.
Eigen::MatrixXd plane_rotation(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double c, double s) {
  const auto d = u.size();
  return Eigen::MatrixXd::Identity(d, d) + (c - 1.0) * (u * u.transpose() + v * v.transpose()) +
         s * (v * u.transpose() - u * v.transpose());
}

}  // namespace

RigidMotion build_transform(const LinearClassifier& h, const LinearClassifier& h_prime) {
  require(h.dim() == h_prime.dim(), "classifiers have different dimensions");
  const HyperplaneProjection src(h);
  const HyperplaneProjection dst(h_prime);
  const Eigen::VectorXd& n = src.normal();
  const Eigen::VectorXd& n2 = dst.normal();
  const auto d = n.size();

  const double c = n.dot(n2);
  Eigen::VectorXd ortho = n2 - c * n;
  const double s = ortho.norm();

  RigidMotion motion = RigidMotion::identity(static_cast<std::size_t>(d));
  constexpr double kParallel = 1e-15;
  if (n == n2 || (s <= kParallel && c > 0.0)) {
    // Already aligned.
  } else if (s <= kParallel) {
    if (d < 2) throw ValidationError("opposite normals in one dimension: no proper rotation exists");
    Eigen::Index axis = 0;
    n.cwiseAbs().minCoeff(&axis);
    Eigen::VectorXd aux = Eigen::VectorXd::Unit(d, axis);
    aux -= n.dot(aux) * n;
    aux.normalize();
    motion.rotation = plane_rotation(n, aux, -1.0, 0.0);
  } else {
    motion.rotation = plane_rotation(n, ortho / s, c, s);
  }
  motion.translation = dst.anchor() - motion.rotation * src.anchor();
  return motion;
}

HyperplaneProjection image_hyperplane(const HyperplaneProjection& hp, const RigidMotion& motion) {
  const Eigen::VectorXd normal = motion.rotation * hp.normal();
  const Eigen::VectorXd anchor = motion.apply(hp.anchor());
  return HyperplaneProjection(LinearClassifier{to_vector(normal), -normal.dot(anchor)});
}

namespace {

Eigen::VectorXd residual(const Eigen::VectorXd& x, const HyperplaneProjection& hp, const RigidMotion& motion) {
  require(static_cast<std::size_t>(x.size()) == hp.dim() && motion.dim() == hp.dim(),
          "dimension mismatch between point, hyperplane and motion");
  return x - motion.apply(hp.project(x));
}

Eigen::VectorXd gradient(const Eigen::VectorXd& x, const HyperplaneProjection& hp, const RigidMotion& motion) {
  const Eigen::VectorXd r = residual(x, hp, motion);
  const double dist = r.norm();
  if (!(dist > 0.0)) throw ValidationError("gradient undefined at zero distance");
  const auto d = x.size();
  const Eigen::MatrixXd jacobian = Eigen::MatrixXd::Identity(d, d) - motion.rotation * hp.linear_part();
  return jacobian.transpose() * r / dist;
}

}  // namespace

double transformed_distance(std::span<const double> x, const HyperplaneProjection& hp,
                            const RigidMotion& motion) {
  return residual(to_eigen(x), hp, motion).norm();
}

Vector distance_gradient(std::span<const double> x, const HyperplaneProjection& hp, const RigidMotion& motion) {
  return to_vector(gradient(to_eigen(x), hp, motion));
}

double distance_differential(std::span<const double> x, std::span<const double> dx,
                             const HyperplaneProjection& hp, const RigidMotion& motion) {
  require(dx.size() == x.size(), "dimension mismatch between x and dx");
  return gradient(to_eigen(x), hp, motion).dot(to_eigen(dx));
}

double signed_transformed_distance(std::span<const double> x, const HyperplaneProjection& hp,
                                   const RigidMotion& motion) {
  const Eigen::VectorXd p = to_eigen(x);
  const double dist = residual(p, hp, motion).norm();
  return image_hyperplane(hp, motion).signed_distance(p) < 0.0 ? -dist : dist;
}

ConditionReport check_boundary_conditions(const WeightSurface& surface, const UtilityModel& model,
                          const std::vector<Vector>& x_samples, const HyperplaneProjection& hp,
                          const RigidMotion& motion, double step, double tol, std::uint64_t seed) {
  require(step > 0.0 && tol > 0.0, "step and tol must be > 0");
  model.validate();
  const HyperplaneProjection image = image_hyperplane(hp, motion);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_income(std::log(10.0), std::log(1e6));

  ConditionReport report;
  for (const Vector& sample : x_samples) {
    const Eigen::VectorXd x = to_eigen(sample);
    const auto d = x.size();
    Eigen::VectorXd dir(d);
    for (Eigen::Index j = 0; j < d; ++j) dir(j) = normal(rng);
    const double m = std::exp(log_income(rng));
    const double other_m = std::exp(log_income(rng));

    const double side_gap = std::abs(image.signed_distance(x));
    const double dist = residual(x, hp, motion).norm();
    if (side_gap <= 10.0 * step || dist <= 10.0 * step) continue;
    ++report.n_samples;

    const double side = image.signed_distance(x) < 0.0 ? -1.0 : 1.0;
    const auto signed_d = [&](const Eigen::VectorXd& p) { return side * residual(p, hp, motion).norm(); };
    const auto w = [&](double sd, double inc) { return surface(sd, inc); };
    const auto wf = [&](double sd, double inc) { return surface(sd, inc) * delta_u(model, inc); };
    const Eigen::VectorXd grad = side * gradient(x, hp, motion);
    const double sd0 = signed_d(x);

    std::ostringstream where;
    where.precision(17);
    where << "D=" << sd0 << " income=" << m;

    // Generic perturbation at fixed income.
    const Eigen::VectorXd dx = step * dir.normalized();
    const double dD = grad.dot(dx);
    const double moved = wf(signed_d(x + dx), m) - wf(signed_d(x - dx), m);
    if (std::abs(dD) > 1e-3 * step) {
      const int expected = dD > 0.0 ? 1 : -1;
      if (!(moved * expected > 0.0)) {
        report.violations.push_back({"sign " + where.str() + " dD=" + std::to_string(dD), moved, expected});
      }
      // Strict inequality with a simultaneous income increase, oriented so dD > 0.
      const Eigen::VectorXd up = expected * dx;
      const double dm = step * m;
      const double lhs = w(signed_d(x + up), m + dm) - w(signed_d(x - up), m - dm);
      const double rhs = std::abs(w(sd0, m) / delta_u(model, m) * delta_u_slope(model, m) * 2.0 * dm);
      if (!(lhs > rhs)) {
        report.violations.push_back({"strict " + where.str(), lhs - rhs, 1});
      }
    }

    // Tangent to the level set of D.
    const double grad_sq = grad.squaredNorm();
    if (grad_sq > 0.0) {
      Eigen::VectorXd tangent = dir - (dir.dot(grad) / grad_sq) * grad;
      if (tangent.norm() > 0.0) {
        tangent = step * tangent.normalized();
        const double flat = wf(signed_d(x + tangent), m) - wf(signed_d(x - tangent), m);
        report.max_abs_error_at_dh_zero = std::max(report.max_abs_error_at_dh_zero, std::abs(flat));
        if (!(std::abs(flat) <= tol)) report.violations.push_back({"tangent " + where.str(), flat, 0});
      }
    }

    // Income-only perturbation and equal-D indifference.
    const double dm = step * m;
    const double flat_income = wf(sd0, m + dm) - wf(sd0, m - dm);
    report.max_abs_error_at_dh_zero = std::max(report.max_abs_error_at_dh_zero, std::abs(flat_income));
    if (!(std::abs(flat_income) <= tol)) {
      report.violations.push_back({"income-only " + where.str(), flat_income, 0});
    }
    const double g1 = wf(sd0, m);
    const double g2 = wf(sd0, other_m);
    const double rel = std::abs(g1 - g2) / std::max(std::abs(g1), std::abs(g2));
    if (!(rel <= 1e-12)) report.violations.push_back({"indifference " + where.str(), rel, 0});
  }
  return report;
}

ConditionReport check_boundary_conditions(const WeightFunction& wf, const std::vector<Vector>& x_samples,
                          const HyperplaneProjection& hp, const RigidMotion& motion, double step, double tol,
                          std::uint64_t seed) {
  wf.validate();
  return check_boundary_conditions(surface_of(wf), wf.utility, x_samples, hp, motion, step, tol, seed);
}

}  // namespace welfare
