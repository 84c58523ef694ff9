#include <gtest/gtest.h>

#include "c2g/planners.hpp"
#include "oracles/dense_collision.hpp"

using namespace c2g;

namespace {

constexpr double kRho = 25.0;

PlannerParams params(std::uint64_t seed = 1) { return PlannerParams::defaults(kRho, seed); }

const Workspace& cluttered() {
  static const Workspace w = random_workspace(7, 5, 500, {}, kRho);
  return w;
}

// Cost to reach p through the best tree node within 2 rho, ignoring obstacles
// on the final connection. Negative if no node is close enough.
double reach_cost(const Tree& t, const Configuration& p) {
  double best = -1.0;
  for (const auto& n : t.nodes) {
    if (position_distance(n.config, p) > 2 * kRho) continue;
    const double c = n.cost_from_root + rs_length(n.config, p, kRho);
    if (best < 0 || c < best) best = c;
  }
  return best;
}

}  // namespace

TEST(PlannerParamsTest, DefaultsAndValidation) {
  const auto p = params();
  EXPECT_DOUBLE_EQ(p.eta, 50.0);
  EXPECT_DOUBLE_EQ(p.delta_col, 1.25);
  EXPECT_DOUBLE_EQ(p.goal_bias, 0.03);
  const double r1000 = p.rewire_radius_scale * 500 * std::cbrt(std::log(1000.0) / 1000.0);
  EXPECT_NEAR(r1000, 3 * kRho, 1e-9);
  auto bad = p;
  bad.goal_bias = 1.5;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.eta = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(RrtStarBuild, BudgetOneIsRootOnly) {
  const auto t = rrt_star_build({250, 250, 0}, Workspace("e", 500), params(), 1);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.nodes[0].cost_from_root, 0.0);
  EXPECT_FALSE(t.nodes[0].parent.has_value());
}

TEST(RrtStarBuild, CollidingSeedRejected) {
  Workspace w("d", 500, {Obstacle(Disc{250, 250, 30})});
  EXPECT_THROW(rrt_star_build({250, 250, 0}, w, params(), 10), Error);
  EXPECT_THROW(two_phase_build({250, 250, 0}, w, params(), 5, 10), Error);
  EXPECT_THROW(two_phase_build({100, 100, 0}, w, params(), 11, 10), Error);
}

TEST(RrtStarBuild, NearOptimalInOpenSpace) {
  const Configuration seed(250, 250, 0.3);
  const auto t = rrt_star_build(seed, Workspace("e", 500), params(3), 2000);
  ASSERT_EQ(t.size(), 2000u);
  double sum = 0;
  int within = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double opt = rs_length(seed, t.nodes[i].config, kRho);
    const double r = t.nodes[i].cost_from_root / opt;
    EXPECT_GE(r, 1.0 - 1e-9);
    sum += r;
    within += r <= 1.05;
  }
  EXPECT_LE(sum / double(t.size() - 1), 1.05);
  EXPECT_GE(double(within) / double(t.size() - 1), 0.85);
}

// The 2000-node run passes through the 500-node tree, so costs of the shared
// nodes can only drop.
TEST(RrtStarBuild, CostsNonIncreasingWithBudget) {
  const Configuration seed(100, 100, 0);
  const auto small = rrt_star_build(seed, cluttered(), params(4), 500);
  const auto large = rrt_star_build(seed, cluttered(), params(4), 2000);
  ASSERT_EQ(small.size(), 500u);
  for (std::size_t i = 0; i < small.size(); ++i) {
    EXPECT_EQ(small.nodes[i].config, large.nodes[i].config);
    EXPECT_LE(large.nodes[i].cost_from_root, small.nodes[i].cost_from_root + 1e-9);
  }
}

TEST(TreeInvariants, EdgesFreeCostsConsistentDeterministic) {
  const Configuration seed(60, 440, -1.0);
  const auto p = params(5);
  const auto t = two_phase_build(seed, cluttered(), p, 300, 1200);
  const auto again = two_phase_build(seed, cluttered(), p, 300, 1200);
  ASSERT_EQ(t.size(), again.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& n = t.nodes[i];
    EXPECT_EQ(n.config, again.nodes[i].config);
    EXPECT_EQ(n.cost_from_root, again.nodes[i].cost_from_root);
    EXPECT_GE(n.cost_from_root + 1e-9, rs_length(seed, n.config, kRho));
    if (!n.parent) continue;
    const auto& parent = t.nodes[*n.parent];
    EXPECT_NEAR(n.cost_from_root, parent.cost_from_root + n.edge->total_length, 1e-9);
    for (const auto& q : rs_sample(*n.edge, parent.config, p.delta_col / 2))
      ASSERT_FALSE(oracle::dense_collides(q, p.footprint, cluttered(), 20));
  }
}

TEST(TwoPhaseBuild, InitialNodesExact) {
  const Configuration seed(250, 250, 1.0);
  const auto t = two_phase_build(seed, Workspace("e", 500), params(6), 400, 800);
  int initial = 0;
  for (const auto& n : t.nodes) {
    if (n.phase != Phase::Initial) continue;
    ++initial;
    EXPECT_EQ(*n.parent, 0u);
    EXPECT_EQ(n.cost_from_root, rs_length(seed, n.config, kRho));
  }
  // Samples whose footprint leaves the extent are skipped.
  EXPECT_GT(initial, 300);
  EXPECT_LE(initial, 400);
}

TEST(TwoPhaseBuild, ZeroInitialMatchesPlainRrtStar) {
  const Configuration seed(100, 100, 0.5);
  const auto a = two_phase_build(seed, cluttered(), params(8), 0, 600);
  const auto b = rrt_star_build(seed, cluttered(), params(8), 600);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.nodes[i].config, b.nodes[i].config);
    EXPECT_EQ(a.nodes[i].cost_from_root, b.nodes[i].cost_from_root);
  }
}

TEST(TwoPhaseBuild, CheaperThanPlainRrtStarOnEvaluationGrid) {
  std::vector<Configuration> grid;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (double th : {0.0, kPi / 2, -kPi / 2, kPi}) {
        Configuration q(40 + i * 60, 40 + j * 60, th);
        if (!collides(q, Footprint{}, cluttered())) grid.push_back(q);
      }
  double sum_two = 0, sum_plain = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Configuration seed(25, 25, 0.25 * double(s));
    const auto two = two_phase_build(seed, cluttered(), params(100 + s), 500, 1000);
    const auto plain = rrt_star_build(seed, cluttered(), params(100 + s), 1000);
    for (const auto& q : grid) {
      const double a = reach_cost(two, q), b = reach_cost(plain, q);
      if (a < 0 || b < 0) continue;
      sum_two += a;
      sum_plain += b;
    }
  }
  EXPECT_GT(sum_plain, 0.0);
  EXPECT_LE(sum_two, sum_plain);
}

TEST(ExtractPath, RootDepthOneAndDeep) {
  const Configuration seed(250, 250, 0);
  const auto p = params(9);
  const auto t = two_phase_build(seed, Workspace("e", 500), p, 100, 600);
  const auto root = extract_path(t, 0, p.delta_col);
  EXPECT_EQ(root.length, 0.0);
  EXPECT_EQ(root.waypoints.size(), 1u);

  const auto one = extract_path(t, 1, p.delta_col);
  const auto edge_pts = rs_sample(*t.nodes[1].edge, seed, p.delta_col);
  ASSERT_EQ(one.waypoints.size(), edge_pts.size());
  for (std::size_t i = 0; i < edge_pts.size(); ++i) EXPECT_EQ(one.waypoints[i], edge_pts[i]);

  std::size_t deepest = 0, best_depth = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::size_t d = 0;
    for (auto id = t.nodes[i].parent; id; id = t.nodes[*id].parent) ++d;
    if (d > best_depth) best_depth = d, deepest = i;
  }
  EXPECT_GE(best_depth, 2u);
  const auto deep = extract_path(t, deepest, p.delta_col);
  EXPECT_NEAR(deep.length, t.nodes[deepest].cost_from_root, 1e-6);
  // Polyline through the samples never exceeds the arc length.
  double poly = 0;
  for (std::size_t i = 1; i < deep.waypoints.size(); ++i) poly += position_distance(deep.waypoints[i - 1], deep.waypoints[i]);
  EXPECT_LE(poly, deep.length + 1e-9);
  EXPECT_GT(poly, 0.95 * deep.length);
  EXPECT_THROW(extract_path(t, t.size(), p.delta_col), Error);
}

TEST(RrtPlan, TrivialAndLowerBound) {
  Workspace e("e", 500);
  const Configuration a(100, 100, 0);
  const auto same = rrt_plan(a, a, e, params());
  EXPECT_TRUE(same.success);
  EXPECT_EQ(same.length, 0.0);
  Rng rng(31);
  for (int i = 0; i < 5; ++i) {
    Configuration s(uniform(rng, 50, 450), uniform(rng, 50, 450), uniform(rng, -kPi, kPi));
    Configuration g(uniform(rng, 50, 450), uniform(rng, 50, 450), uniform(rng, -kPi, kPi));
    const auto r = rrt_plan(s, g, e, params(40 + i));
    ASSERT_TRUE(r.success);
    EXPECT_GE(r.length + 1e-9, rs_length(s, g, kRho));
    EXPECT_EQ(r.waypoints.front(), s);
    EXPECT_LT(position_distance(r.waypoints.back(), g), 1e-6);
  }
  Workspace d("d", 500, {Obstacle(Disc{250, 250, 30})});
  EXPECT_THROW(rrt_plan(a, {250, 250, 0}, d, params()), Error);
}

TEST(RrtStarPlan, BeatsRrtInClutter) {
  const Configuration s(25, 25, 0), g(475, 475, kPi / 2);
  const auto star = rrt_star_plan(s, g, cluttered(), params(50), 1500);
  const auto plain = rrt_plan(s, g, cluttered(), params(50));
  ASSERT_TRUE(star.success);
  ASSERT_TRUE(plain.success);
  EXPECT_GE(star.length + 1e-9, rs_length(s, g, kRho));
  EXPECT_LT(star.length, plain.length);
  for (const auto& q : star.waypoints) ASSERT_FALSE(collides(q, Footprint{}, cluttered()));
}
