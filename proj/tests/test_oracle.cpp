#include "subeik/error.hpp"
#include "subeik/singular.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace subeik;

TEST(Oracle, ControlMesh) {
  const auto two = control_mesh(2, 16);
  ASSERT_EQ(two.size(), 17u);
  int origin = 0;
  for (const auto& u : two) {
    if (u.norm() == 0.0) {
      ++origin;
    } else {
      EXPECT_NEAR(u.norm(), 1.0, 1e-15);
    }
  }
  EXPECT_EQ(origin, 1);
  for (const auto& u : control_mesh(3, 32)) {
    EXPECT_TRUE(u.norm() == 0.0 || std::abs(u.norm() - 1.0) < 1e-15);
  }
}

TEST(Oracle, DiskAgainstDistance) {
  const auto dom = ball(Vector::Zero(2), 1.0);
  OracleOptions opts;
  opts.controls = 16;
  const auto f = dp_oracle(euclidean(2), dom, Grid::covering(dom.bbox, 1.0 / 32, 2), opts);
  EXPECT_TRUE(f.converged);
  double err = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    if (f.grid.inside(i)) err = std::max(err, std::abs(f.values[i] - (1 - f.grid.point(i).norm())));
  }
  EXPECT_LE(err, 0.05);
}

TEST(Oracle, IteratesDecrease) {
  const auto dom = ball(Vector::Zero(2), 1.0);
  const Grid grid = Grid::covering(dom.bbox, 1.0 / 16, 2);
  OracleOptions opts;
  opts.controls = 16;
  std::vector<double> prev;
  for (double tol : {0.5, 0.1, 1e-3, 1e-8}) {
    opts.tol = tol;
    const auto f = dp_oracle(euclidean(2), dom, grid, opts);
    if (!prev.empty()) {
      for (std::size_t i = 0; i < prev.size(); ++i) {
        if (!std::isnan(prev[i])) ASSERT_LE(f.values[i], prev[i]);
      }
    }
    prev = f.values;
  }
}

TEST(Oracle, BudgetExhaustion) {
  const auto dom = ball(Vector::Zero(2), 1.0);
  OracleOptions opts;
  opts.max_iterations = 2;
  EXPECT_THROW(dp_oracle(euclidean(2), dom, Grid::covering(dom.bbox, 1.0 / 16, 2), opts),
               NotConverged);
}

TEST(Oracle, AgreesWithSweepOnGrushinDisk) {
  const double h = 1.0 / 32;
  const auto dom = ball(Vector::Zero(2), 1.0);
  const Grid grid = Grid::covering(dom.bbox, h, 2);
  const auto sweep = solve(grushin(), dom, grid);
  const auto dp = dp_oracle(grushin(), dom, grid);
  ASSERT_TRUE(sweep.converged);
  double diff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (sweep.grid.inside(i)) diff = std::max(diff, std::abs(sweep.values[i] - dp.values[i]));
  }
  EXPECT_LE(diff, 10 * h);
}
