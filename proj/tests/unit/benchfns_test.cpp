#include <gtest/gtest.h>

#include <cmath>

#include "selfcma/benchfns.hpp"
#include "selfcma/error.hpp"

namespace selfcma {
namespace {

TEST(Sphere, Examples) {
  const Problem p = sphere(2, Vector{{1.0, -1.0}});
  EXPECT_EQ(p(Vector{{1.0, -1.0}}), 0.0);
  EXPECT_EQ(p(Vector{{4.0, 3.0}}), 25.0);
}

TEST(Sphere, GradientMatchesCentralDifferences) {
  RngStream rng(1);
  const Vector x_opt = uniform_vector(rng, 5, -4, 4);
  const Problem p = sphere(5, x_opt);
  const Vector x = uniform_vector(rng, 5, -4, 4);
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < 5; ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    EXPECT_NEAR((p(a) - p(b)) / (2 * h), 2.0 * (x(i) - x_opt(i)), 1e-6);
  }
}

TEST(Rosenbrock, Examples) {
  const Vector x_opt{{0.5, 2.0}};
  const Problem p = rosenbrock(2, x_opt);
  EXPECT_EQ(p(x_opt), 0.0);
  // z = x - x_opt + 1
  EXPECT_DOUBLE_EQ(p(x_opt - Vector::Ones(2)), 1.0);            // z = (0, 0)
  EXPECT_DOUBLE_EQ(p(x_opt + Vector{{0.0, 1.0}}), 100.0);      // z = (1, 2)
  EXPECT_THROW(rosenbrock(1, Vector::Zero(1)), Error);
}

TEST(RotatedEllipsoid, Examples) {
  const Problem p = rotated_ellipsoid(2, Vector::Zero(2), Matrix::Identity(2, 2));
  EXPECT_EQ(p(Vector::Zero(2)), 0.0);
  EXPECT_DOUBLE_EQ(p(Vector{{1.0, 1.0}}), 1.0 + 1e6);
}

TEST(RotatedEllipsoid, RotationComposition) {
  // f_{R}(x) with z = R(x − x_opt) equals f_{RQᵀ}(x_opt + Q(x − x_opt)).
  RngStream rng(2);
  const int n = 6;
  const Vector x_opt = uniform_vector(rng, n, -4, 4);
  const Matrix r = random_rotation(rng, n), q = random_rotation(rng, n);
  const Problem a = rotated_ellipsoid(n, x_opt, r);
  const Problem b = rotated_ellipsoid(n, x_opt, r * q.transpose());
  for (int t = 0; t < 20; ++t) {
    const Vector x = uniform_vector(rng, n, -5, 5);
    const Vector y = x_opt + q * (x - x_opt);
    EXPECT_NEAR(a(x), b(y), 1e-9 * std::max(1.0, a(x)));
  }
}

TEST(SharpRidge, Examples) {
  const Problem p = sharp_ridge(3, Vector::Zero(3), Matrix::Identity(3, 3));
  EXPECT_EQ(p(Vector::Zero(3)), 0.0);
  EXPECT_DOUBLE_EQ(p(Vector{{0.0, 3.0, 4.0}}), 500.0);
  EXPECT_DOUBLE_EQ(p(Vector{{2.0, 0.0, 0.0}}), 4.0);
}

TEST(Problems, OptimumIsTheMinimumOnSampledPoints) {
  RngStream rng(3);
  for (std::string_view name : problem_names()) {
    for (int n : {2, 10}) {
      const Problem p = make_problem(name, n, rng);
      EXPECT_EQ(p.name, name);
      EXPECT_NEAR(p(p.x_opt), p.f_opt, 1e-12);
      for (int t = 0; t < 500; ++t) {
        const Vector x = p.x_opt + std::pow(10.0, rng.uniform(-6, 1)) * standard_normal_vector(rng, n);
        EXPECT_GT(p(x), p.f_opt);
      }
    }
  }
}

TEST(Problems, RotatedProblemsCarryOrthonormalRotation) {
  RngStream rng(4);
  for (const char* name : {"ellipsoid", "sharpridge"}) {
    const Problem p = make_problem(name, 8, rng);
    ASSERT_TRUE(p.rotation);
    EXPECT_LT((p.rotation->transpose() * *p.rotation - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-10);
    for (int i = 0; i < 8; ++i) {
      EXPECT_GE(p.x_opt(i), -4.0);
      EXPECT_LT(p.x_opt(i), 4.0);
    }
  }
  EXPECT_FALSE(make_problem("sphere", 3, rng).rotation);
}

TEST(Problems, UnknownNameIsAConfigError) {
  RngStream rng(5);
  try {
    make_problem("rastrigin", 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

}  // namespace
}  // namespace selfcma
