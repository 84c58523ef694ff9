#include <gtest/gtest.h>

#include "c2g/c2g_planner.hpp"

using namespace c2g;

namespace {

constexpr double kRho = 25.0;
constexpr double kL = 500.0;

struct Defaults {
  ControlSet cs = ControlSet::defaults(kRho);
  StopCriteria sc = StopCriteria::defaults(kRho, kL);
  PlanOptions opt = PlanOptions::defaults(kRho);
};

// Bowl centred on x = 100 along the x-axis: forward and backward steps tie and
// an unguarded planner dithers around the bottom forever.
struct BowlCost {
  std::vector<double> operator()(std::span<const Configuration> qs, const Configuration&) const {
    std::vector<double> out;
    for (const auto& q : qs) out.push_back(100.0 + (q.x - 100.0) * (q.x - 100.0) + std::abs(q.y - 250.0));
    return out;
  }
};

void expect_kinematically_valid(const Trajectory& t, const Workspace& w) {
  ASSERT_EQ(t.waypoints.size(), t.controls.size() + 1);
  for (std::size_t k = 0; k < t.controls.size(); ++k) {
    EXPECT_EQ(t.waypoints[k + 1], step(t.waypoints[k], t.controls[k]));
    EXPECT_LE(std::abs(t.controls[k].curvature), 1.0 / kRho + 1e-12);
    EXPECT_GT(t.controls[k].step_len, 0.0);
  }
  for (const auto& q : t.waypoints) EXPECT_FALSE(collides(q, Footprint{}, w));
}

}  // namespace

TEST(StopCriteriaTest, DefaultsAndValidation) {
  const auto sc = StopCriteria::defaults(kRho, kL);
  EXPECT_DOUBLE_EQ(sc.eps_cost, 25.0);
  EXPECT_DOUBLE_EQ(sc.eps_pos, 5.0);
  EXPECT_DOUBLE_EQ(sc.eps_theta, 0.1);
  EXPECT_EQ(sc.max_steps, 500);
  auto bad = sc;
  bad.eps_pos = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(AntiCycleGuard, Basics) {
  const StopCriteria sc = StopCriteria::defaults(kRho, kL);
  std::vector<Configuration> none;
  EXPECT_TRUE(anti_cycle_guard(none, {1, 2, 3}, sc));
  std::vector<Configuration> h = {{10, 10, 0}, {20, 20, 1}};
  EXPECT_FALSE(anti_cycle_guard(h, {20, 20, 1}, sc));
  EXPECT_FALSE(anti_cycle_guard(h, {21, 20, 1.02}, sc));
  EXPECT_TRUE(anti_cycle_guard(h, {23, 20, 1.0}, sc));
  EXPECT_TRUE(anti_cycle_guard(h, {20, 20, 1.06}, sc));
}

TEST(AntiCycleGuard, BreaksDitheringOnPlateau) {
  Defaults s;
  Workspace w("e", kL);
  s.sc.eps_cost = 0;
  s.sc.max_steps = 200;
  s.opt.docking = false;
  const Configuration start(100, 250, 0), goal(400, 400, 0);

  auto unguarded = s.opt;
  unguarded.history = 0;
  const auto dither = plan(start, goal, w, BowlCost{}, s.cs, s.sc, unguarded);
  EXPECT_EQ(dither.steps, 200);
  int revisits = 0;
  for (std::size_t k = 2; k < dither.waypoints.size(); ++k)
    revisits += position_distance(dither.waypoints[k], dither.waypoints[k - 2]) < 1e-9;
  EXPECT_GT(revisits, 150);

  const auto guarded = plan(start, goal, w, BowlCost{}, s.cs, s.sc, s.opt);
  EXPECT_LE(guarded.steps, 200);
  for (std::size_t k = 1; k < guarded.waypoints.size(); ++k)
    for (std::size_t j = k >= 20 ? k - 20 : 0; j < k; ++j)
      EXPECT_FALSE(within(guarded.waypoints[k], guarded.waypoints[j], 0.5 * s.sc.eps_pos, 0.5 * s.sc.eps_theta));
  expect_kinematically_valid(guarded, w);
}

TEST(TrajectoryLength, SumsControls) {
  Trajectory empty;
  EXPECT_EQ(trajectory_length(empty), 0.0);
  Trajectory straight;
  straight.waypoints.push_back({10, 10, 0});
  for (int i = 0; i < 7; ++i) {
    straight.controls.push_back({Gear::Forward, 0.0, 3.0});
    straight.waypoints.push_back(step(straight.waypoints.back(), straight.controls.back()));
  }
  EXPECT_DOUBLE_EQ(trajectory_length(straight), 21.0);
}

TEST(TrajectoryLength, MatchesReintegratedPolyline) {
  Rng rng(61);
  const auto cs = ControlSet::defaults(kRho);
  for (int t = 0; t < 100; ++t) {
    Trajectory tr;
    tr.waypoints.push_back({250, 250, uniform(rng, -kPi, kPi)});
    const int n = 5 + static_cast<int>(uniform_index(rng, 40));
    for (int k = 0; k < n; ++k) {
      tr.controls.push_back(cs.controls()[uniform_index(rng, cs.size())]);
      tr.waypoints.push_back(step(tr.waypoints.back(), tr.controls.back()));
    }
    double poly = 0;
    for (std::size_t k = 1; k < tr.waypoints.size(); ++k) poly += position_distance(tr.waypoints[k - 1], tr.waypoints[k]);
    const double len = trajectory_length(tr);
    EXPECT_LE(std::abs(len - poly), n * cs.step_len() * cs.step_len() / kRho);
  }
}

TEST(Plan, StartAtGoalSucceedsImmediately) {
  Defaults s;
  Workspace w("e", kL);
  const auto t = plan({200, 200, 0.5}, {201, 200, 0.52}, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt);
  EXPECT_TRUE(t.success);
  EXPECT_TRUE(t.reached);
  EXPECT_TRUE(t.controls.empty());
  EXPECT_EQ(t.length, 0.0);
}

TEST(Plan, EndpointErrors) {
  Defaults s;
  Workspace w("d", kL, {Obstacle(Disc{250, 250, 20})});
  EXPECT_THROW(plan({250, 250, 0}, {100, 100, 0}, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt), Error);
  EXPECT_THROW(plan({100, 100, 0}, {250, 250, 0}, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt), Error);
}

TEST(Plan, StallsWhenBoxedIn) {
  Defaults s;
  // Boxes just ahead of the front bumper and just behind the rear one.
  Workspace w("box", kL, {Obstacle(AxisAlignedBox{266, 200, 280, 300}), Obstacle(AxisAlignedBox{230, 200, 244, 300})});
  const auto t = plan({250, 250, 0}, {100, 100, 0}, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt);
  EXPECT_FALSE(t.success);
  EXPECT_TRUE(t.stalled);
  EXPECT_TRUE(t.controls.empty());
}

TEST(Plan, StraightAheadGoalWithExactCost) {
  Defaults s;
  s.opt.docking = false;
  s.sc.eps_cost = 0;
  Workspace w("e", kL);
  const Configuration a(100, 250, 0), b(400, 250, 0);
  const auto t = plan(a, b, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt);
  EXPECT_TRUE(t.reached);
  EXPECT_LE(t.length, 1.15 * rs_length(a, b, kRho));
}

TEST(Plan, ExactCostInOpenSpace) {
  Defaults s;
  Workspace w("e", kL);
  Rng rng(62);
  int good = 0;
  for (int i = 0; i < 100; ++i) {
    Configuration a(uniform(rng, 50, 450), uniform(rng, 50, 450), uniform(rng, -kPi, kPi));
    Configuration b(uniform(rng, 50, 450), uniform(rng, 50, 450), uniform(rng, -kPi, kPi));
    const auto t = plan(a, b, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt);
    good += t.reached && t.length <= 1.10 * rs_length(a, b, kRho);
    expect_kinematically_valid(t, w);
    EXPECT_NEAR(t.length, trajectory_length(t), 1e-12);
    const auto& end = t.waypoints.back();
    EXPECT_LT(position_distance(end, b), 1e-6);
  }
  EXPECT_GE(good, 95);
}

TEST(Plan, ClutterValidAndDeterministic) {
  Defaults s;
  const Workspace w = random_workspace(7, 5, kL, {}, kRho);
  Rng rng(63);
  for (int i = 0; i < 20; ++i) {
    Configuration a, b;
    do a = Configuration(uniform(rng, 20, 480), uniform(rng, 20, 480), uniform(rng, -kPi, kPi));
    while (collides(a, Footprint{}, w));
    do b = Configuration(uniform(rng, 20, 480), uniform(rng, 20, 480), uniform(rng, -kPi, kPi));
    while (collides(b, Footprint{}, w));
    const auto t1 = plan(a, b, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt);
    const auto t2 = plan(a, b, w, ReedsSheppCost{kRho}, s.cs, s.sc, s.opt);
    expect_kinematically_valid(t1, w);
    EXPECT_EQ(t1.waypoints, t2.waypoints);
    EXPECT_EQ(t1.length, t2.length);
  }
}
