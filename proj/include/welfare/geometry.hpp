#ifndef WELFARE_GEOMETRY_HPP_
#define WELFARE_GEOMETRY_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "welfare/core.hpp"
#include "welfare/welfare.hpp"

namespace welfare {

/// Orthogonal projection onto the hyperplane theta^T x + b = 0.
///
/// With b != 0 the projection is affine: P x + (I - P) p0, where
/// P = I - n n^T is its linear part, n the unit normal and p0 = -b theta/|theta|^2
/// the point of the hyperplane closest to the origin.
class HyperplaneProjection {
 public:
  /// Throws ValidationError "degenerate hyperplane" when theta is zero.
  explicit HyperplaneProjection(LinearClassifier classifier);

  const LinearClassifier& classifier() const { return classifier_; }
  std::size_t dim() const { return classifier_.dim(); }
  const Eigen::VectorXd& normal() const { return normal_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }
  double theta_norm() const { return theta_norm_; }

  Eigen::MatrixXd linear_part() const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  /// margin / |theta|: positive on the classifier's positive side.
  double signed_distance(const Eigen::VectorXd& x) const;

 private:
  LinearClassifier classifier_;
  Eigen::VectorXd normal_;
  Eigen::VectorXd anchor_;
  double theta_norm_ = 0.0;
};

/// T(p) = R p + t with R a proper rotation.
struct RigidMotion {
  Eigen::MatrixXd rotation;
  Eigen::VectorXd translation;

  static RigidMotion identity(std::size_t dim);
  std::size_t dim() const { return static_cast<std::size_t>(translation.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& p) const { return rotation * p + translation; }
};

Eigen::VectorXd to_eigen(std::span<const double> x);
Vector to_vector(const Eigen::VectorXd& x);

Vector project(const HyperplaneProjection& hp, std::span<const double> x);

/// Canonical rigid motion sending hyperplane h onto h_prime: the minimal
/// rotation taking n to n' (identity on the complement of span{n, n'}),
/// followed by the translation that maps anchor to anchor. Antipodal normals
/// rotate by pi in the plane of n and the standard basis axis least aligned
/// with n; that case has no proper rotation in one dimension.
RigidMotion build_transform(const LinearClassifier& h, const LinearClassifier& h_prime);

/// Normal and anchor of T(h), recovered from the motion alone.
HyperplaneProjection image_hyperplane(const HyperplaneProjection& hp, const RigidMotion& motion);

/// D(x) = |x - T(project(x))|.
double transformed_distance(std::span<const double> x, const HyperplaneProjection& hp,
                            const RigidMotion& motion);

/// Analytic gradient of D: with r = x - T(project(x)) and J = I - R P,
/// grad D = J^T r / |r|. Throws when D == 0.
Vector distance_gradient(std::span<const double> x, const HyperplaneProjection& hp, const RigidMotion& motion);

/// Total differential dD = grad D . dx.
double distance_differential(std::span<const double> x, std::span<const double> dx,
                             const HyperplaneProjection& hp, const RigidMotion& motion);

/// D signed by the side of the image hyperplane T(h) on which x lies.
double signed_transformed_distance(std::span<const double> x, const HyperplaneProjection& hp,
                                   const RigidMotion& motion);

/// Weight conditions transported to the transformed distance. The weight
/// surface is evaluated as w(signed D, income). For each sample:
///  - a random perturbation dx with dD != 0 must move w_f with the sign of dD,
///    and with an added income increase the weight change must strictly exceed
///    |w / du * d(du)/dx^m * dx^m|;
///  - a perturbation tangent to the level set of D must leave w_f unchanged to tol;
///  - an income-only perturbation must leave w_f unchanged to tol, and equal D
///    at two different incomes must give equal w_f to 1e-12 relative.
/// Samples within 10*step of either hyperplane's singular set are skipped.
ConditionReport check_boundary_conditions(const WeightSurface& surface, const UtilityModel& utility,
                          const std::vector<Vector>& x_samples, const HyperplaneProjection& hp,
                          const RigidMotion& motion, double step, double tol, std::uint64_t seed);
ConditionReport check_boundary_conditions(const WeightFunction& wf, const std::vector<Vector>& x_samples,
                          const HyperplaneProjection& hp, const RigidMotion& motion, double step, double tol,
                          std::uint64_t seed);

}  // namespace welfare

#endif  // WELFARE_GEOMETRY_HPP_
