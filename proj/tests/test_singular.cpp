#include "subeik/error.hpp"
#include "subeik/singular.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace subeik;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector v3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

// Hand-built field on a lattice where every node counts as inside.
template <typename F>
ValueField sampled(const Grid& grid, F f) {
  ValueField out{grid, std::vector<double>(grid.size()), {}, 0, true, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.point(i));
  return out;
}

Grid line_grid(double h, int nodes) {
  return Grid((Vector(1) << -h * (nodes / 2)).finished(), h, {nodes});
}

ValueField disk_field(double h) {
  const auto dom = ball(Vector::Zero(2), 1.0);
  return solve(euclidean(2), dom, Grid::covering(dom.bbox, h, 2));
}

}  // namespace

TEST(Singular, ProximalExamples) {
  const double h = 0.1;
  const Grid grid = line_grid(h, 21);
  const std::size_t center = 10;
  ASSERT_NEAR(grid.point(center)[0], 0.0, 1e-15);
  const SingularThresholds th;

  const auto convex = sampled(grid, [](const Vector& x) { return std::abs(x[0]); });
  const auto a = proximal_test(convex, center, 3, th.prox_cap(h));
  EXPECT_TRUE(a.has_proximal);
  EXPECT_NEAR(a.c, 0.0, 1e-15);

  const auto concave = sampled(grid, [](const Vector& x) { return 1.0 - std::abs(x[0]); });
  EXPECT_FALSE(proximal_test(concave, center, 3, th.prox_cap(h)).has_proximal);

  const auto smooth = sampled(grid, [](const Vector& x) { return 1.0 - 0.5 * x[0] * x[0]; });
  for (std::size_t node : {std::size_t(5), center, std::size_t(14)}) {
    const auto r = proximal_test(smooth, node, 3, th.prox_cap(h));
    EXPECT_TRUE(r.has_proximal);
    EXPECT_NEAR(r.c, 0.5, 1e-9);
    EXPECT_NEAR(r.rho, 0.3, 1e-15);
  }
  EXPECT_THROW(proximal_test(smooth, 1, 3, th.prox_cap(h)), StencilClipped);
}

TEST(Singular, DiskFlagsConcentrateAtCenter) {
  double prev_fraction = 1.0;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto f = disk_field(h);
    const auto rep = make_report(f, semiconcavity_scan(f), {});
    ASSERT_FALSE(rep.flagged_c11.empty());
    std::size_t inside = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) inside += f.grid.inside(i);
    for (auto node : rep.flagged_c11) EXPECT_LE(f.grid.point(node).norm(), 4 * h + 1e-12);
    const double fraction = double(rep.flagged_c11.size()) / double(inside);
    EXPECT_LT(fraction, prev_fraction);
    prev_fraction = fraction;
    EXPECT_TRUE(rep.flagged_lip.empty());
  }
}

TEST(Singular, SquareFlagsHugMedialAxis) {
  const auto dom = superellipse(v2(1, 1), 8);
  const auto rows = refinement_study(euclidean(2), dom, {1.0 / 16, 1.0 / 32, 1.0 / 64});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].measure_c11, rows[i - 1].measure_c11);
  }
  // Slower than a point singularity in the plane.
  EXPECT_GT(rows.back().decay_exponent, 0.0);
  EXPECT_LT(rows.back().decay_exponent, 1.5);
  const auto& last = rows.back();
  const Grid grid = Grid::covering(dom.bbox, last.h, SweepOptions{}.ghost_cells);
  for (auto node : last.report.flagged_c11) {
    const Vector x = grid.point(node);
    // Near the diagonals, where the distance to the two nearest sides ties.
    EXPECT_LE(std::abs(std::abs(x[0]) - std::abs(x[1])), 0.2) << x.transpose();
  }
}

TEST(Singular, AffineFieldHasNoFlags) {
  Grid grid(v2(-1, -1), 0.1, {21, 21});
  const auto f = sampled(grid, [](const Vector& x) { return 2.0 + 0.6 * x[0] - 0.8 * x[1]; });
  const auto rep = make_report(f, semiconcavity_scan(f), {});
  EXPECT_TRUE(rep.flagged_c11.empty());
  EXPECT_TRUE(rep.flagged_lip.empty());
  EXPECT_TRUE(third_difference_flags(f).empty());
}

TEST(Singular, ClassifyDisk) {
  const auto f = disk_field(1.0 / 32);
  EXPECT_EQ(classify_point(f, f.grid.nearest(v2(0, 0))), PointClass::C11Singular);
  EXPECT_EQ(classify_point(f, f.grid.nearest(v2(0.5, 0))), PointClass::SmoothCandidate);
}

TEST(Singular, ClassifyHeisenbergAxisOnOracleField) {
  const auto dom = ball(Vector::Zero(3), 1.0);
  const auto f = dp_oracle(heisenberg(), dom, Grid::covering(dom.bbox, 1.0 / 32, 2));
  for (double z : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
    EXPECT_NE(classify_point(f, f.grid.nearest(v3(0, 0, z))), PointClass::SmoothCandidate)
        << "z = " << z;
  }
}

TEST(Singular, ClassifyHeisenbergAxisOnSweepField) {
  const auto dom = ball(Vector::Zero(3), 1.0);
  const auto f = solve(heisenberg(), dom, Grid::covering(dom.bbox, 1.0 / 32, 2));
  for (double z : {-0.5, 0.0, 0.5}) {
    EXPECT_NE(classify_point(f, f.grid.nearest(v3(0, 0, z))), PointClass::SmoothCandidate);
  }
  EXPECT_EQ(classify_point(f, f.grid.nearest(v3(0.5, 0, 0))), PointClass::SmoothCandidate);
}

TEST(Singular, LipschitzFlagsAreC11Flags) {
  // A jump along x = 0: the quotient 10 / h exceeds the 10 / sqrt(h) cut.
  Grid grid(v2(-1, -1), 1.0 / 16, {33, 33});
  const auto f = sampled(grid, [](const Vector& x) { return x[0] > 0 ? 10.0 + x[1] : x[1]; });
  const auto rep = make_report(f, semiconcavity_scan(f), {});
  ASSERT_FALSE(rep.flagged_lip.empty());
  for (auto node : rep.flagged_lip) {
    EXPECT_TRUE(std::binary_search(rep.flagged_c11.begin(), rep.flagged_c11.end(), node));
    EXPECT_EQ(classify_point(f, node), PointClass::LipschitzSingular);
  }
}

TEST(Singular, ClassificationInvariances) {
  const auto f = disk_field(1.0 / 16);
  auto shifted = f;
  for (auto& v : shifted.values) v += 3.25;
  // Grid-aligned quarter turn of the data. The lattice is symmetric about
  // the origin, so the rotated node exists.
  auto turned = f;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const Vector x = f.grid.point(i);
    turned.values[f.grid.nearest(v2(-x[1], x[0]))] = f.values[i];
  }
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (!f.grid.inside(i)) continue;
    PointClass c;
    try {
      c = classify_point(f, i);
    } catch (const StencilClipped&) {
      continue;
    }
    EXPECT_EQ(classify_point(shifted, i), c);
    const Vector x = f.grid.point(i);
    EXPECT_EQ(classify_point(turned, f.grid.nearest(v2(-x[1], x[0]))), c);
  }
}

TEST(Singular, ThirdDifferenceProxyMatchesUpToDilation) {
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto f = disk_field(h);
    const auto c11 = make_report(f, semiconcavity_scan(f), {}).flagged_c11;
    const auto third = third_difference_flags(f);
    const auto c11_wide = dilate(f.grid, c11), third_wide = dilate(f.grid, third);
    const std::set<std::size_t> a(c11_wide.begin(), c11_wide.end());
    const std::set<std::size_t> b(third_wide.begin(), third_wide.end());
    ASSERT_FALSE(third.empty());
    for (auto n : third) EXPECT_TRUE(a.count(n)) << "h = " << h;
    for (auto n : c11) EXPECT_TRUE(b.count(n)) << "h = " << h;
  }
  // On the rounded square the proxy also reacts to high boundary curvature,
  // so only the C11 set is required to lie next to third-difference flags.
  const auto dom = superellipse(v2(1, 1), 8);
  const auto f = solve(euclidean(2), dom, Grid::covering(dom.bbox, 1.0 / 32, 2));
  const auto c11 = make_report(f, semiconcavity_scan(f), {}).flagged_c11;
  const auto third_wide = dilate(f.grid, third_difference_flags(f));
  const std::set<std::size_t> b(third_wide.begin(), third_wide.end());
  for (auto n : c11) EXPECT_TRUE(b.count(n));
}

TEST(Singular, MeasuresAndSlope) {
  EXPECT_NEAR(loglog_slope({1, 0.5, 0.25}, {3, 0.75, 0.1875}), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope({1, 0.5}, {0, 0})));
  const auto f = disk_field(1.0 / 32);
  const auto rep = make_report(f, semiconcavity_scan(f), {});
  EXPECT_DOUBLE_EQ(rep.measure_c11, rep.flagged_c11.size() / 1024.0);
  EXPECT_GE(rep.measure_lip, 0.0);
}

TEST(Singular, StudyValidatesSpacings) {
  const auto dom = ball(Vector::Zero(2), 1.0);
  EXPECT_THROW(refinement_study(euclidean(2), dom, {0.1, 0.05}), ConfigError);
  EXPECT_THROW(refinement_study(euclidean(2), dom, {0.1, 0.1, 0.05}), ConfigError);
}

namespace {

struct Arc {
  std::vector<double> t;
  std::vector<Vector> y, p, u;
};

Arc martinet_line(int m) {
  Arc a;
  for (int i = 0; i < m; ++i) {
    const double t = 0.5 * i / (m - 1);
    a.t.push_back(t);
    a.y.push_back(v3(0, t, 0));
    a.p.push_back(v3(0, 0, 1));
    a.u.push_back(v2(0, 1));
  }
  return a;
}

ImplicitDomain below_plane(double z) { return slab(v3(0, 0, 1), z - 1.0, z, 1.0); }

}  // namespace

TEST(Singular, MartinetLineCertifies) {
  const auto a = martinet_line(101);
  const auto c = certify_singular_trajectory(martinet(), below_plane(0), a.t, a.y, a.p, a.u);
  EXPECT_TRUE(c.valid);
  EXPECT_LE(c.residual_costate, 1e-12);
  EXPECT_LE(c.residual_onchar, 1e-12);
  EXPECT_LE(c.angle_defect, 1e-12);
  EXPECT_NEAR(c.lambda, 1.0, 1e-12);
  EXPECT_NEAR(c.nonvanishing, 1.0, 1e-15);
}

TEST(Singular, EuclideanArcIsInvalid) {
  auto a = martinet_line(51);
  for (auto& u : a.u) u = v3(0, 1, 0);
  const auto c = certify_singular_trajectory(euclidean(3), below_plane(0), a.t, a.y, a.p, a.u);
  EXPECT_FALSE(c.valid);
  EXPECT_NEAR(c.residual_onchar, 1.0, 1e-15);
}

TEST(Singular, HeisenbergArcOffAxisIsInvalid) {
  // p = (0, 0, 1) annihilates both fields only on the z axis.
  Arc a;
  for (int i = 0; i < 41; ++i) {
    const double t = 0.4 * i / 40;
    a.t.push_back(t);
    a.y.push_back(v3(t, 0, 0));
    a.p.push_back(v3(0, 0, 1));
    a.u.push_back(v2(1, 0));
  }
  const auto c = certify_singular_trajectory(heisenberg(), below_plane(0), a.t, a.y, a.p, a.u);
  EXPECT_FALSE(c.valid);
  EXPECT_GT(c.residual_onchar, 0.1);
}

TEST(Singular, CertificateErrors) {
  auto a = martinet_line(11);
  auto p = a.p;
  p.pop_back();
  EXPECT_THROW(certify_singular_trajectory(martinet(), below_plane(0), a.t, a.y, p, a.u),
               MeshMismatch);
  EXPECT_THROW(certify_singular_trajectory(martinet(), below_plane(0.3), a.t, a.y, a.p, a.u),
               EndpointOffBoundary);
}

TEST(Singular, CostateResidualShrinksWithResolution) {
  // Martinet with x = a fixed and u_2 = cos t: y = (a, sin t, a^2 sin t / 2)
  // and the costate equation gives p = (a sin t, 0, 1).
  const double a = 0.3;
  double prev = 0.0;
  for (int m : {21, 41, 81}) {
    Arc arc;
    for (int i = 0; i < m; ++i) {
      const double t = 1.0 * i / (m - 1);
      arc.t.push_back(t);
      arc.y.push_back(v3(a, std::sin(t), 0.5 * a * a * std::sin(t)));
      arc.p.push_back(v3(a * std::sin(t), 0, 1));
      arc.u.push_back(v2(0, std::cos(t)));
    }
    const auto c = certify_singular_trajectory(martinet(), below_plane(arc.y.back()[2]), arc.t,
                                               arc.y, arc.p, arc.u);
    EXPECT_FALSE(c.valid);  // x != 0, so the fields are not annihilated
    if (prev > 0.0) EXPECT_LE(c.residual_costate, prev);
    prev = c.residual_costate;
  }
  EXPECT_LE(prev, 1e-4);
}
