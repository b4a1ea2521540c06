#include "subeik/domain.hpp"
#include "subeik/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace subeik;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector v3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

ImplicitDomain half_space() { return slab(v3(0, 0, 1), -1.0, 0.0, 1.0); }

}  // namespace

TEST(Domain, NormalExamples) {
  EXPECT_NEAR((outward_normal(ball(Vector::Zero(3), 1.0), v3(1, 0, 0)) - v3(1, 0, 0)).norm(),
              0.0, 1e-15);
  EXPECT_NEAR((outward_normal(half_space(), v3(0.3, -0.4, 0)) - v3(0, 0, 1)).norm(), 0.0,
              1e-15);
  EXPECT_NEAR((outward_normal(ellipsoid(Vector::Zero(2), v2(2, 1)), v2(0, 1)) - v2(0, 1)).norm(),
              0.0, 1e-15);
  EXPECT_THROW(outward_normal(ball(Vector::Zero(3), 1.0), v3(0.5, 0, 0)), NotOnBoundary);
}

TEST(Domain, ChartBasisIsOrthonormalAndTangent) {
  const auto dom = ellipsoid(Vector::Zero(3), v3(2, 1, 0.5));
  for (const auto& b : sample_boundary(dom, 20, 3)) {
    EXPECT_NEAR(b.normal.norm(), 1.0, 1e-14);
    ASSERT_EQ(b.chart_basis.cols(), 2);
    EXPECT_NEAR((b.chart_basis.transpose() * b.normal).norm(), 0.0, 1e-10);
    EXPECT_NEAR((b.chart_basis.transpose() * b.chart_basis - Matrix::Identity(2, 2)).norm(),
                0.0, 1e-12);
  }
}

TEST(Domain, CharacteristicExamples) {
  const auto hs = half_space();
  EXPECT_TRUE(is_characteristic_point(heisenberg(), hs, v3(0, 0, 0), 1e-12));
  EXPECT_FALSE(is_characteristic_point(heisenberg(), hs, v3(1, 0, 0), 1e-12));
  EXPECT_NEAR(normal_hamiltonian(heisenberg(), hs, v3(1, 0, 0)), 0.5, 1e-15);
  for (const auto& b : sample_boundary(ball(Vector::Zero(3), 1.0), 30, 1)) {
    EXPECT_FALSE(is_characteristic_point(euclidean(3), ball(Vector::Zero(3), 1.0), b.z, 1e-6));
  }
}

TEST(Domain, CharacteristicSetConsistency) {
  // H <= tol agrees with the largest inner product test up to the factor
  // sqrt(N) relating the 2-norm and the max-norm.
  const auto sys = heisenberg();
  const auto dom = ball(Vector::Zero(3), 1.0);
  const double tol = 0.05;
  for (const auto& b : sample_boundary(dom, 200, 2)) {
    const Vector ip = eval_fields(sys, b.z).transpose() * b.normal;
    const double m = ip.cwiseAbs().maxCoeff();
    const bool flagged = is_characteristic_point(sys, dom, b.z, tol);
    if (m * std::sqrt(2.0) <= tol) EXPECT_TRUE(flagged);
    if (m > tol) EXPECT_FALSE(flagged);
  }
}

TEST(Domain, SamplingCircle) {
  const auto dom = ball(Vector::Zero(2), 1.0);
  const auto pts = sample_boundary(dom, 4, 0);
  ASSERT_EQ(pts.size(), 4u);
  for (const auto& b : pts) EXPECT_LE(std::abs(b.z.norm() - 1.0), dom.proj_tol());
}

TEST(Domain, SamplingSphereSpacing) {
  const auto dom = ball(Vector::Zero(3), 1.0);
  const auto pts = sample_boundary(dom, 100, 0);
  ASSERT_EQ(pts.size(), 100u);
  // Uniform spacing on the unit sphere: sqrt(4 pi / N).
  const double uniform = std::sqrt(4 * M_PI / 100);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double nn = 1e9;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i != j) nn = std::min(nn, (pts[i].z - pts[j].z).norm());
    }
    EXPECT_GE(nn, uniform / 4);
    EXPECT_LE(nn, uniform * 4);
  }
}

TEST(Domain, SamplingRoundedBox) {
  const auto dom = superellipse(v2(1, 1), 8);
  for (const auto& b : sample_boundary(dom, 16, 9)) {
    EXPECT_LE(std::abs(dom.phi(b.z)), dom.proj_tol());
  }
}

TEST(Domain, SamplingIsSeeded) {
  const auto dom = ellipsoid(Vector::Zero(3), v3(1, 2, 1));
  const auto a = sample_boundary(dom, 12, 4), b = sample_boundary(dom, 12, 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].z, b[i].z);
}

TEST(Domain, EmptyBoundary) {
  auto dom = ball(Vector::Zero(2), 1.0);
  dom.bbox.lo = v2(5, 5);
  dom.bbox.hi = v2(6, 6);
  EXPECT_THROW(sample_boundary(dom, 4, 0), EmptyBoundary);
}

TEST(Domain, ProjectionIdempotentAndNormalsPointOut) {
  for (const auto& dom : {ball(v3(0.1, 0, -0.2), 0.8), ellipsoid(Vector::Zero(3), v3(1, 2, 1)),
                          superellipse(v3(1, 1, 1), 4)}) {
    for (const auto& b : sample_boundary(dom, 25, 1)) {
      EXPECT_LE((project_to_boundary(dom, b.z) - b.z).norm(), dom.proj_tol());
      const double eps = 1e-6;
      EXPECT_GT(dom.phi(b.z + eps * b.normal), 0.0);
      EXPECT_LT(dom.phi(b.z - eps * b.normal), 0.0);
    }
  }
}

TEST(Domain, BuiltinParams) {
  EXPECT_NO_THROW(builtin_domain("ball", {1.0}, 3));
  EXPECT_NO_THROW(builtin_domain("ball", {0, 0, 0.5}, 2));
  EXPECT_NO_THROW(builtin_domain("ellipsoid", {2, 1}, 2));
  EXPECT_NO_THROW(builtin_domain("slab", {0, 0, 1, -0.5, 0, 1}, 3));
  EXPECT_NO_THROW(builtin_domain("superellipse", {1, 1, 8}, 2));
  EXPECT_THROW(builtin_domain("ball", {1, 2}, 3), ConfigError);
  EXPECT_THROW(builtin_domain("superellipse", {1, 1, 7.5}, 2), ConfigError);
  EXPECT_THROW(builtin_domain("torus", {1}, 3), ConfigError);
}
