#include "subeik/error.hpp"
#include "subeik/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace subeik;

namespace {

ImplicitDomain unit_disk() { return ball(Vector::Zero(2), 1.0); }

ValueField disk_solve(double h, const SweepOptions& opts = {}) {
  const auto dom = unit_disk();
  return solve(euclidean(2), dom, Grid::covering(dom.bbox, h, 2), opts);
}

double disk_error(const ValueField& f) {
  double err = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (f.grid.inside(i)) {
      err = std::max(err, std::abs(f.values[i] - (1.0 - f.grid.point(i).norm())));
    }
  }
  return err;
}

}  // namespace

TEST(Sweep, DiskMatchesDistance) {
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const auto f = disk_solve(h);
    EXPECT_TRUE(f.converged);
    EXPECT_LE(disk_error(f), 5 * h);
  }
}

TEST(Sweep, ValuesNonnegativeInside) {
  const auto f = disk_solve(1.0 / 32);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (f.grid.inside(i)) EXPECT_GE(f.values[i], 0.0);
  }
}

TEST(Sweep, MonotoneDecreaseAcrossSweeps) {
  SweepOptions opts;
  std::vector<double> prev;
  for (int budget : {1, 2, 4, 8, 16, 400}) {
    opts.max_sweeps = budget;
    const auto f = disk_solve(1.0 / 16, opts);
    if (!prev.empty()) {
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (std::isnan(prev[i])) continue;
        ASSERT_LE(f.values[i], prev[i]) << "node " << i << " budget " << budget;
      }
    }
    prev = f.values;
  }
}

TEST(Sweep, BoundaryBandIsOrderH) {
  const double h = 1.0 / 64;
  const auto f = disk_solve(h);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (f.grid.inside(i) && f.grid.kind(i) == NodeKind::Band) {
      worst = std::max(worst, f.values[i]);
    }
  }
  EXPECT_LE(worst, 2 * h) << "band constant " << worst / h;
}

TEST(Sweep, ResidualOfExactLinearField) {
  // T = 2 - x on a 1-D lattice with the single field d/dx.
  Grid grid((Vector(1) << -1.0).finished(), 0.1, {21});
  ValueField f{grid, std::vector<double>(grid.size()), {}, 0, true, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = 2.0 - grid.point(i)[0];
  compute_residual(euclidean(1), f);
  const auto stats = residual(f);
  EXPECT_GT(stats.count, 0u);
  EXPECT_LE(stats.max, 1e-14);
}

TEST(Sweep, DiskResidualAwayFromCenter) {
  const double h = 1.0 / 64;
  auto f = disk_solve(h);
  compute_residual(euclidean(2), f);
  const auto stats = residual(f, [&](std::size_t i) { return f.grid.point(i).norm() < 4 * h; });
  EXPECT_LE(stats.mean, 0.05);
}

TEST(Sweep, ResidualDecreasesUnderRefinement) {
  double prev = 0.0;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    auto f = disk_solve(h);
    compute_residual(euclidean(2), f);
    const double mean =
        residual(f, [&](std::size_t i) { return f.grid.point(i).norm() < 0.1; }).mean;
    if (prev > 0.0) EXPECT_GE(prev / mean, 1.5);
    prev = mean;
  }
}

TEST(Sweep, HeisenbergRotationSymmetry) {
  const auto dom = ball(Vector::Zero(3), 1.0);
  SweepOptions opts;
  opts.tol = 1e-13;
  opts.max_sweeps = 4000;
  const auto f = solve(heisenberg(), dom, Grid::covering(dom.bbox, 1.0 / 8, 2), opts);
  ASSERT_TRUE(f.converged);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (!f.grid.inside(i)) continue;
    const Vector x = f.grid.point(i);
    const Vector y = (Vector(3) << -x[1], x[0], x[2]).finished();
    const std::size_t j = f.grid.nearest(y);
    ASSERT_LE((f.grid.point(j) - y).norm(), 1e-12);
    worst = std::max(worst, std::abs(f.values[i] - f.values[j]));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Sweep, BudgetExhaustion) {
  SweepOptions opts;
  opts.max_sweeps = 2;
  const auto f = disk_solve(1.0 / 32, opts);
  EXPECT_FALSE(f.converged);
  const auto dom = unit_disk();
  EXPECT_THROW(solve_or_throw(euclidean(2), dom, Grid::covering(dom.bbox, 1.0 / 32, 2), opts),
               NotConverged);
}

TEST(Sweep, BoundaryTimeModel) {
  EXPECT_DOUBLE_EQ(boundary_time_model(0.1, 1.0, 1.0), 0.1);
  // Slow normal speed: the square-root cap takes over.
  EXPECT_DOUBLE_EQ(boundary_time_model(0.01, 1e-6, 1.0), 0.1);
}

TEST(Sweep, Interpolation) {
  const auto f = disk_solve(1.0 / 32);
  const Vector x = (Vector(2) << 0.31, -0.47).finished();
  EXPECT_NEAR(interpolate_value(f, x), 1.0 - x.norm(), 5.0 / 32);
  Vector g;
  ASSERT_TRUE(interpolate_gradient(f, x, g));
  EXPECT_NEAR((g + x.normalized()).norm(), 0.0, 0.1);
  EXPECT_TRUE(std::isnan(interpolate_value(f, (Vector(2) << 9.0, 0.0).finished())));
}
