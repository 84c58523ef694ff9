#include <gtest/gtest.h>

#include <cmath>

#include "c2g/planners.hpp"
#include "c2g/reeds_shepp.hpp"
#include "oracles/lattice_c2g.hpp"

using namespace c2g;
using oracle::lattice_c2g;
using oracle::LatticeCosts;

namespace {

constexpr double kRho = 25.0;

Workspace cluttered() {
  return Workspace("lat", 500.0, {Disc{250, 250, 40}, AxisAlignedBox{100, 320, 180, 400}});
}

}  // namespace

TEST(LatticeOracle, GoalIsZeroAndCostsBoundReedsSheppFromAbove) {
  const Workspace w("open", 500.0);
  const Configuration goal(250, 250, 0);
  const auto lc = lattice_c2g(goal, w, 25.0, kRho);
  EXPECT_EQ(lc.at_pose(250, 250, 0), 0.0);
  int reachable = 0;
  for (int i = 0; i < lc.n; ++i)
    for (int j = 0; j < lc.n; ++j)
      for (int k = 0; k < 4; ++k) {
        const double c = lc.at(i, j, k);
        if (!std::isfinite(c)) continue;
        ++reachable;
        const Configuration q(i * lc.h, j * lc.h, k * kPi / 2);
        EXPECT_GE(c, rs_length(q, goal, kRho) - 1e-9);
      }
  EXPECT_GT(reachable, lc.n * lc.n * 2);
}

TEST(LatticeOracle, StraightAndQuarterTurnAreExact) {
  const Workspace w("open", 500.0);
  const auto lc = lattice_c2g({250, 250, 0}, w, 25.0, kRho);
  EXPECT_DOUBLE_EQ(lc.at_pose(150, 250, 0), 100.0);
  EXPECT_DOUBLE_EQ(lc.at_pose(350, 250, 0), 100.0);
  EXPECT_NEAR(lc.at_pose(225, 225, kPi / 2), kRho * kPi / 2, 1e-12);
}

TEST(LatticeOracle, RefinementNeverIncreasesCost) {
  const Workspace w = cluttered();
  const Configuration goal(400, 100, kPi / 2);
  const auto coarse = lattice_c2g(goal, w, 25.0, kRho);
  const auto fine = lattice_c2g(goal, w, 12.5, kRho);
  int compared = 0;
  for (int i = 0; i < coarse.n; ++i)
    for (int j = 0; j < coarse.n; ++j)
      for (int k = 0; k < 4; ++k) {
        const double c = coarse.at(i, j, k);
        if (!std::isfinite(c)) continue;
        EXPECT_LE(fine.at(2 * i, 2 * j, k), c + 1e-9);
        ++compared;
      }
  EXPECT_GT(compared, 500);
}

TEST(LatticeOracle, ObstaclesOnlyRaiseCosts) {
  const Configuration goal(400, 100, kPi / 2);
  const auto open = lattice_c2g(goal, Workspace("open", 500.0), 25.0, kRho);
  const auto clut = lattice_c2g(goal, cluttered(), 25.0, kRho);
  for (std::size_t i = 0; i < open.cost.size(); ++i) EXPECT_GE(clut.cost[i], open.cost[i]);
}

TEST(LatticeOracle, RejectsBadInputs) {
  const Workspace w = cluttered();
  EXPECT_THROW(lattice_c2g({250, 250, 0}, w, 25.0, kRho), std::invalid_argument);
  EXPECT_THROW(lattice_c2g({410, 100, 0}, w, 25.0, kRho), std::invalid_argument);
  EXPECT_THROW(lattice_c2g({400, 100, 0.3}, w, 25.0, kRho), std::invalid_argument);
  EXPECT_THROW(lattice_c2g({400, 100, 0}, w, 30.0, kRho), std::invalid_argument);
}

// RRT* approaches the optimum from above and the lattice bounds it from
// above as well, so a long RRT* path would signal a planner defect.
TEST(LatticeOracle, RrtStarIsCompetitiveInClutter) {
  const Workspace w = cluttered();
  const Configuration goal(400, 100, kPi / 2);
  const auto lc = lattice_c2g(goal, w, 12.5, kRho);
  const Configuration starts[] = {{100, 100, 0}, {250, 450, kPi}, {50, 250, kPi / 2}, {400, 400, -kPi / 2}};
  for (const auto& s : starts) {
    const double lattice = lc.at_pose(s.x, s.y, s.theta);
    ASSERT_TRUE(std::isfinite(lattice));
    const auto path = rrt_star_plan(s, goal, w, PlannerParams::defaults(kRho, 5), 3000);
    ASSERT_TRUE(path.success);
    EXPECT_GE(path.length, rs_length(s, goal, kRho) - 1e-9);
    EXPECT_LE(path.length, 1.15 * lattice) << s.x << "," << s.y;
  }
}
