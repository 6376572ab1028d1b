#include <cmath>
#include <random>

#include "doctest.h"
#include "welfare/checks.hpp"
#include "welfare/geometry.hpp"

using namespace welfare;

namespace {

Vector gaussian(std::mt19937_64& rng, std::size_t d, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Vector v(d);
  for (double& x : v) x = g(rng);
  return v;
}

double norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Vector move_point(const RigidMotion& t, const Vector& p) { return to_vector(t.apply(to_eigen(p))); }

// Central differences on D written against the public forward map only.
Vector numeric_gradient(const Vector& x, const HyperplaneProjection& hp, const RigidMotion& t, double step) {
  Vector grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    Vector up = x, down = x;
    up[j] += step;
    down[j] -= step;
    grad[j] = (transformed_distance(up, hp, t) - transformed_distance(down, hp, t)) / (2.0 * step);
  }
  return grad;
}

}  // namespace

TEST_CASE("projection onto a hyperplane") {
  const HyperplaneProjection axis({{1.0, 0.0}, 0.0});
  CHECK(project(axis, Vector{1.0, 5.0}) == Vector{0.0, 5.0});
  CHECK(project(axis, Vector{0.0, -2.0}) == Vector{0.0, -2.0});

  const LinearClassifier c{{3.0, 4.0}, -5.0};
  const Vector p = project(HyperplaneProjection(c), Vector{3.0, 4.0});
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(std::abs(margin(c, p)) <= 1e-12);
  // x - p parallel to theta: 2D cross product vanishes.
  CHECK(std::abs((3.0 - p[0]) * 4.0 - (4.0 - p[1]) * 3.0) <= 1e-12);

  CHECK_THROWS_WITH_AS(HyperplaneProjection({{0.0, 0.0}, 1.0}), doctest::Contains("degenerate hyperplane"),
                       ValidationError);
}

TEST_CASE("projection is idempotent and the anchor lies on the plane") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 2 + i % 8;
    const LinearClassifier c{gaussian(rng, d), 3.0 * gaussian(rng, 1)[0]};
    const HyperplaneProjection hp(c);
    CHECK(std::abs(margin(c, to_vector(hp.anchor()))) <= 1e-9 * c.norm());
    const Vector x = gaussian(rng, d, 4.0);
    const Vector once = project(hp, x);
    const Vector twice = project(hp, once);
    for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(once[j] - twice[j]) <= 1e-10);
  }
}

TEST_CASE("canonical transform between hyperplanes") {
  SUBCASE("same hyperplane gives the identity") {
    const LinearClassifier h{{0.3, -2.0, 1.0}, 0.7};
    const RigidMotion t = build_transform(h, h);
    CHECK(t.rotation.isIdentity(0.0));
    CHECK(t.translation.isZero(0.0));
  }
  SUBCASE("quarter turn in the plane") {
    const LinearClassifier h{{1.0, 0.0}, 0.0};
    const LinearClassifier h2{{0.0, 1.0}, 0.0};
    const RigidMotion t = build_transform(h, h2);
    const Vector image = move_point(t, {0.0, 5.0});
    CHECK(image[0] == doctest::Approx(-5.0).epsilon(1e-15));
    CHECK(std::abs(image[1]) <= 1e-15);
    CHECK(std::abs(margin(h2, image)) <= 1e-12);
    CHECK(norm(image) == doctest::Approx(5.0));
    CHECK(t.translation.norm() <= 1e-15);
  }
  SUBCASE("parallel planes translate along the normal") {
    const LinearClassifier h{{2.0, 0.0}, 0.0};
    const LinearClassifier h2{{2.0, 0.0}, -1.0};
    const RigidMotion t = build_transform(h, h2);
    CHECK(t.rotation.isIdentity(0.0));
    // anchor' - anchor = -b' theta / |theta|^2
    CHECK(t.translation(0) == doctest::Approx(0.5));
    CHECK(t.translation(1) == 0.0);
    CHECK(t.translation.norm() == doctest::Approx(1.0 / 2.0));
  }
  SUBCASE("opposite normals") {
    const LinearClassifier h{{1.0, 2.0, -0.5}, 1.0};
    const LinearClassifier h2{{-2.0, -4.0, 1.0}, 3.0};
    const RigidMotion t = build_transform(h, h2);
    CHECK(t.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    const Eigen::VectorXd n = to_eigen(h.theta).normalized();
    CHECK((t.rotation * n + n).norm() <= 1e-12);
    CHECK_THROWS_AS(build_transform({{1.0}, 0.0}, {{-1.0}, 0.0}), ValidationError);
  }
  CHECK_THROWS_AS(build_transform({{1.0, 0.0}, 0.0}, {{1.0, 0.0, 0.0}, 0.0}), ValidationError);
}

TEST_CASE("rigid motion invariants on random hyperplane pairs") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 9;
    const LinearClassifier h{gaussian(rng, d), 2.0 * gaussian(rng, 1)[0]};
    const LinearClassifier h2{gaussian(rng, d), 2.0 * gaussian(rng, 1)[0]};
    const RigidMotion t = build_transform(h, h2);
    const auto dd = static_cast<Eigen::Index>(d);
    const Eigen::MatrixXd gram = t.rotation.transpose() * t.rotation;
    CHECK((gram - Eigen::MatrixXd::Identity(dd, dd)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(t.rotation.determinant() - 1.0) <= 1e-10);

    const HyperplaneProjection hp(h);
    for (int k = 0; k < 100; ++k) {
      const Vector p = project(hp, gaussian(rng, d, 5.0));
      CHECK(std::abs(margin(h2, move_point(t, p))) <= 1e-8 * h2.norm());
    }
    const Vector p = gaussian(rng, d, 3.0);
    const Vector q = gaussian(rng, d, 3.0);
    Vector diff(d), image_diff(d);
    const Vector tp = move_point(t, p), tq = move_point(t, q);
    for (std::size_t j = 0; j < d; ++j) {
      diff[j] = p[j] - q[j];
      image_diff[j] = tp[j] - tq[j];
    }
    CHECK(std::abs(norm(image_diff) - norm(diff)) <= 1e-10 * norm(diff));
  }
}

TEST_CASE("transformed distance") {
  const LinearClassifier h{{1.0, 0.0}, 0.0};
  const HyperplaneProjection hp(h);
  const RigidMotion id = build_transform(h, h);
  CHECK(transformed_distance(Vector{2.0, 7.0}, hp, id) == 2.0);
  CHECK(transformed_distance(Vector{0.0, 7.0}, hp, id) == 0.0);

  const RigidMotion quarter = build_transform(h, {{0.0, 1.0}, 0.0});
  CHECK(transformed_distance(Vector{1.0, 5.0}, hp, quarter) == doctest::Approx(std::sqrt(61.0)).epsilon(1e-14));
  CHECK(transformed_distance(Vector{1.0, 5.0}, hp, quarter) == doctest::Approx(7.81025).epsilon(1e-6));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const LinearClassifier c{gaussian(rng, 4), gaussian(rng, 1)[0]};
    const Vector x = gaussian(rng, 4, 3.0);
    const double d = transformed_distance(x, HyperplaneProjection(c), build_transform(c, c));
    const double expected = std::abs(margin(c, x)) / c.norm();
    CHECK(std::abs(d - expected) <= 1e-10 * expected);
  }
}

TEST_CASE("distance gradient") {
  const LinearClassifier h{{1.0, 0.0}, 0.0};
  const HyperplaneProjection hp(h);
  const RigidMotion id = RigidMotion::identity(2);
  Vector g = distance_gradient(Vector{2.0, 0.0}, hp, id);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(std::abs(g[1]) <= 1e-15);
  g = distance_gradient(Vector{-2.0, 3.0}, hp, id);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(std::abs(g[1]) <= 1e-15);
  CHECK_THROWS_WITH_AS(distance_gradient(Vector{0.0, 3.0}, hp, id), doctest::Contains("zero distance"),
                       ValidationError);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = i == 0 ? 5 : 2 + i % 9;
    const GeometryCase gc = random_geometry_case(rng, d);
    const Vector analytic = distance_gradient(gc.x, gc.source, gc.motion);
    const Vector numeric = numeric_gradient(gc.x, gc.source, gc.motion, 1e-6);
    Vector diff(d);
    for (std::size_t j = 0; j < d; ++j) diff[j] = analytic[j] - numeric[j];
    CHECK(norm(diff) <= 1e-5 * std::max(norm(analytic), norm(numeric)));

    // dD = grad . dx
    const Vector dx = gaussian(rng, d, 1e-7);
    Vector moved = gc.x;
    for (std::size_t j = 0; j < d; ++j) moved[j] += dx[j];
    const double actual = transformed_distance(moved, gc.source, gc.motion) -
                          transformed_distance(gc.x, gc.source, gc.motion);
    CHECK(distance_differential(gc.x, dx, gc.source, gc.motion) == doctest::Approx(actual).epsilon(1e-4));

    // |grad D| is bounded by the spectral norm of I - R P, which is at most 2.
    const Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(d, d) - gc.motion.rotation * gc.source.linear_part();
    const double spectral = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues()(0);
    CHECK(norm(analytic) <= spectral + 1e-8);
    CHECK(spectral <= 2.0 + 1e-12);

    // Without a rotation D is 1-Lipschitz.
    const RigidMotion same = build_transform(gc.h, gc.h);
    if (transformed_distance(gc.x, gc.source, same) > 1e-6) {
      CHECK(norm(distance_gradient(gc.x, gc.source, same)) <= 1.0 + 1e-8);
    }

    // T(project(x)) lands on h'.
    const Vector image = move_point(gc.motion, project(gc.source, gc.x));
    CHECK(std::abs(margin(gc.h_prime, image)) <= 1e-8 * gc.h_prime.norm());
  }
}

TEST_CASE("signed distance follows the image hyperplane side") {
  const LinearClassifier h{{1.0, 0.0}, 0.0};
  const HyperplaneProjection hp(h);
  const RigidMotion id = build_transform(h, h);
  CHECK(signed_transformed_distance(Vector{2.0, 1.0}, hp, id) == 2.0);
  CHECK(signed_transformed_distance(Vector{-3.0, 1.0}, hp, id) == -3.0);
}

TEST_CASE("weight conditions transported to the transformed distance") {
  std::mt19937_64 rng(6);
  const WeightFunction matched_wf{1.0, 1.0, {UtilityFamily::ConcaveLog, 1.0, 100.0}};
  const GeometryCase gc = random_geometry_case(rng, 4);
  std::vector<Vector> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(gaussian(rng, 4, 3.0));

  const ConditionReport ok = check_boundary_conditions(matched_wf, xs, gc.source, gc.motion, 1e-6, 1e-8, 99);
  CHECK(ok.n_samples >= 90);
  CHECK(ok.passed());
  CHECK(ok.max_abs_error_at_dh_zero <= 1e-8);

  const WeightSurface broken = [](double d, double) { return std::exp(d); };
  const ConditionReport bad = check_boundary_conditions(broken, matched_wf.utility, xs, gc.source, gc.motion, 1e-6, 1e-8, 99);
  CHECK_FALSE(bad.passed());

  const ConditionReport random = check_boundary_conditions_random(matched_wf, 30, 2, 10, 5, 1e-6, 1e-8);
  CHECK(random.passed());
  CHECK(random.n_samples > 200);
}
