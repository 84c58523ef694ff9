#pragma once

// Sampling-based planners with Reeds-Shepp steering: RRT, RRT*, and the
// two-phase RRT* used to generate ground-truth cost-to-go trees.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "c2g/common.hpp"
#include "c2g/geometry.hpp"
#include "c2g/reeds_shepp.hpp"

namespace c2g {

enum class Phase { Initial, Explored };

struct TreeNode {
  Configuration config;
  std::optional<std::size_t> parent;
  std::optional<RSPath> edge;  // parent -> this
  double cost_from_root = 0.0;
  Phase phase = Phase::Explored;
  std::vector<std::size_t> children;
};

struct Tree {
  Configuration root;
  std::vector<TreeNode> nodes;
  std::string workspace_id;
  double rho = 1.0;

  std::size_t size() const { return nodes.size(); }
};

struct PlannerParams {
  int max_iters = 20000;
  double goal_bias = 0.03;
  double eta = 50.0;
  double rewire_radius_scale = 0.788;
  double delta_col = 1.25;
  std::uint64_t seed = 1;
  double rho = 25.0;
  Footprint footprint{};

  /// eta = 2 rho, delta_col = rho / 20, and a rewire scale giving r(1000) = 3 rho
  /// on a 500-unit workspace.
  static PlannerParams defaults(double rho, std::uint64_t seed = 1) {
    PlannerParams p;
    p.rho = rho;
    p.eta = 2.0 * rho;
    p.delta_col = rho / 20.0;
    p.rewire_radius_scale = 3.0 * rho / (500.0 * std::cbrt(std::log(1000.0) / 1000.0));
    p.seed = seed;
    return p;
  }

  void validate() const {
    if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw Error("goal_bias must lie in [0, 1]");
    if (!(eta > 0.0)) throw Error("eta must be positive");
    if (!(delta_col > 0.0) || !(rho > 0.0)) throw Error("delta_col and rho must be positive");
    footprint.validate();
  }
};

/// Waypoint path produced by a tree planner.
struct PlannedPath {
  bool success = false;
  std::vector<Configuration> waypoints;
  double length = 0.0;
  int iterations = 0;
};

/// True iff every pose along the curve is collision-free. Poses are checked at
/// delta_col spacing with a footprint inflated to cover the motion in between.
inline bool rs_edge_free(const RSPath& path, const Configuration& from, const Workspace& w,
                         const Footprint& fp, double delta_col) {
  const Footprint grown = inflated(fp, sweep_margin(fp, delta_col, path.rho));
  const int n = std::max(1, static_cast<int>(std::ceil(path.total_length / delta_col)));
  for (int i = 0; i <= n; ++i) {
    const double s = path.total_length * i / n;
    if (collides(rs_interpolate(path, s, from), grown, w)) return false;
  }
  return true;
}

inline bool goal_reached(const Configuration& q, const Configuration& goal, double rho) {
  return position_distance(q, goal) <= rho / 5.0 && heading_error(q, goal) <= 0.1;
}

namespace planner_detail {

class TreeBuilder {
 public:
  TreeBuilder(Tree& tree, const Workspace& w, const PlannerParams& p, Rng& rng)
      : tree_(tree), w_(w), p_(p), rng_(rng) {}

  Configuration sample(const std::optional<Configuration>& goal) {
    if (goal && uniform(rng_, 0.0, 1.0) < p_.goal_bias) return *goal;
    const double L = w_.extent();
    return {uniform(rng_, 0.0, L), uniform(rng_, 0.0, L), uniform(rng_, -kPi, kPi)};
  }

  // Nearest by Reeds-Shepp length; Euclidean distance is a lower bound and prunes.
  std::size_t nearest(const Configuration& q) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree_.nodes.size(); ++i) {
      const auto& c = tree_.nodes[i].config;
      if (position_distance(c, q) >= best_d) continue;
      const double d = rs_length(c, q, p_.rho);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  double radius() const {
    const double n = static_cast<double>(tree_.nodes.size()) + 1.0;
    return p_.rewire_radius_scale * w_.extent() * std::cbrt(std::log(n) / n);
  }

  struct Near {
    std::size_t id;
    RSPath to_new;  // node -> q
  };

  std::vector<Near> near(const Configuration& q, double r) const {
    std::vector<Near> out;
    for (std::size_t i = 0; i < tree_.nodes.size(); ++i) {
      const auto& c = tree_.nodes[i].config;
      if (position_distance(c, q) > r) continue;
      auto path = rs_shortest(c, q, p_.rho);
      if (path.total_length <= r) out.push_back({i, std::move(path)});
    }
    return out;
  }

  bool edge_free(const RSPath& path, const Configuration& from) const {
    return rs_edge_free(path, from, w_, p_.footprint, p_.delta_col);
  }

  std::size_t add(const Configuration& q, std::size_t parent, RSPath edge, Phase phase) {
    TreeNode node;
    node.config = q;
    node.parent = parent;
    node.cost_from_root = tree_.nodes[parent].cost_from_root + edge.total_length;
    node.edge = std::move(edge);
    node.phase = phase;
    tree_.nodes.push_back(std::move(node));
    const std::size_t id = tree_.nodes.size() - 1;
    tree_.nodes[parent].children.push_back(id);
    return id;
  }

  // One plain RRT extension. Returns the new node id.
  std::optional<std::size_t> extend(const Configuration& target) {
    const std::size_t from = nearest(target);
    const auto& base = tree_.nodes[from].config;
    auto path = rs_truncate(rs_shortest(base, target, p_.rho), p_.eta);
    if (path.total_length <= 0.0) return std::nullopt;
    const auto q = rs_interpolate(path, path.total_length, base);
    if (!edge_free(path, base)) return std::nullopt;
    return add(q, from, std::move(path), Phase::Explored);
  }

  // One RRT* extension with choose-parent and rewiring. Initial-phase nodes are
  // never re-parented.
  std::optional<std::size_t> extend_star(const Configuration& target) {
    const std::size_t from = nearest(target);
    const auto base = tree_.nodes[from].config;
    auto steer = rs_truncate(rs_shortest(base, target, p_.rho), p_.eta);
    if (steer.total_length <= 0.0) return std::nullopt;
    const auto q = rs_interpolate(steer, steer.total_length, base);
    if (collides(q, p_.footprint, w_)) return std::nullopt;

    auto candidates = near(q, std::max(radius(), steer.total_length));
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    auto total = [&](std::size_t k) {
      return tree_.nodes[candidates[k].id].cost_from_root + candidates[k].to_new.total_length;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return total(a) < total(b); });

    std::optional<std::size_t> parent_k;
    for (std::size_t k : order) {
      const auto& c = candidates[k];
      if (edge_free(c.to_new, tree_.nodes[c.id].config)) {
        parent_k = k;
        break;
      }
    }
    if (!parent_k) return std::nullopt;
    const std::size_t id =
        add(q, candidates[*parent_k].id, candidates[*parent_k].to_new, Phase::Explored);

    for (const auto& c : candidates) {
      if (c.id == candidates[*parent_k].id) continue;
      TreeNode& other = tree_.nodes[c.id];
      if (!other.parent || other.phase == Phase::Initial) continue;
      auto back = rs_shortest(q, other.config, p_.rho);
      const double new_cost = tree_.nodes[id].cost_from_root + back.total_length;
      if (new_cost >= other.cost_from_root - 1e-9) continue;
      if (!edge_free(back, q)) continue;
      reparent(c.id, id, std::move(back));
    }
    return id;
  }

  void reparent(std::size_t node, std::size_t new_parent, RSPath edge) {
    auto& old_children = tree_.nodes[*tree_.nodes[node].parent].children;
    old_children.erase(std::find(old_children.begin(), old_children.end(), node));
    tree_.nodes[node].parent = new_parent;
    tree_.nodes[node].edge = std::move(edge);
    tree_.nodes[new_parent].children.push_back(node);
    propagate(node);
  }

  void propagate(std::size_t node) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t id = stack.back();
      stack.pop_back();
      auto& n = tree_.nodes[id];
      n.cost_from_root = tree_.nodes[*n.parent].cost_from_root + n.edge->total_length;
      for (std::size_t ch : n.children) stack.push_back(ch);
    }
  }

 private:
  Tree& tree_;
  const Workspace& w_;
  const PlannerParams& p_;
  Rng& rng_;
};

inline Tree make_tree(const Configuration& seed, const Workspace& w, const PlannerParams& p) {
  Tree tree;
  tree.root = seed;
  tree.workspace_id = w.id();
  tree.rho = p.rho;
  TreeNode root;
  root.config = seed;
  tree.nodes.push_back(root);
  return tree;
}

inline void grow_star(Tree& tree, const Workspace& w, const PlannerParams& p, Rng& rng,
                      std::size_t budget_nodes, const std::optional<Configuration>& goal) {
  TreeBuilder b(tree, w, p, rng);
  for (int it = 0; it < p.max_iters && tree.size() < budget_nodes; ++it)
    b.extend_star(b.sample(goal));
}

}  // namespace planner_detail

/// Root-to-node waypoints sampled at delta_col along the tree edges.
inline PlannedPath extract_path(const Tree& tree, std::size_t node_id, double delta_col) {
  if (node_id >= tree.size()) throw Error("extract_path: invalid node id");
  std::vector<std::size_t> chain;
  for (std::optional<std::size_t> id = node_id; id; id = tree.nodes[*id].parent) chain.push_back(*id);
  std::reverse(chain.begin(), chain.end());

  PlannedPath out;
  out.success = true;
  out.waypoints.push_back(tree.root);
  for (std::size_t k = 1; k < chain.size(); ++k) {
    const auto& node = tree.nodes[chain[k]];
    const auto& from = tree.nodes[chain[k - 1]].config;
    auto pts = rs_sample(*node.edge, from, delta_col);
    out.waypoints.insert(out.waypoints.end(), pts.begin() + 1, pts.end());
    out.length += node.edge->total_length;
  }
  return out;
}

/// Plain RRT* from `seed_config` until the tree holds `budget_nodes` nodes or
/// `max_iters` samples were drawn.
inline Tree rrt_star_build(const Configuration& seed_config, const Workspace& w,
                           const PlannerParams& p, std::size_t budget_nodes) {
  p.validate();
  if (collides(seed_config, p.footprint, w)) throw Error("rrt_star_build: seed configuration collides");
  Tree tree = planner_detail::make_tree(seed_config, w, p);
  Rng rng(p.seed);
  planner_detail::grow_star(tree, w, p, rng, budget_nodes, std::nullopt);
  return tree;
}

/// Phase 1 attaches up to m1 random configurations directly to the seed by
/// collision-free Reeds-Shepp curves (exact costs). Phase 2 continues RRT* up
/// to the node budget without ever re-parenting phase-1 nodes.
inline Tree two_phase_build(const Configuration& seed_config, const Workspace& w,
                            const PlannerParams& p, std::size_t m1, std::size_t budget_nodes) {
  p.validate();
  if (m1 > budget_nodes) throw Error("two_phase_build: m1 exceeds node budget");
  if (collides(seed_config, p.footprint, w)) throw Error("two_phase_build: seed configuration collides");
  Tree tree = planner_detail::make_tree(seed_config, w, p);
  Rng rng(p.seed);
  planner_detail::TreeBuilder b(tree, w, p, rng);
  for (std::size_t i = 0; i < m1 && tree.size() < budget_nodes; ++i) {
    const auto q = b.sample(std::nullopt);
    if (collides(q, p.footprint, w)) continue;
    auto path = rs_shortest(seed_config, q, p.rho);
    if (path.total_length <= 0.0 || !b.edge_free(path, seed_config)) continue;
    b.add(q, 0, std::move(path), Phase::Initial);
  }
  planner_detail::grow_star(tree, w, p, rng, budget_nodes, std::nullopt);
  return tree;
}

namespace planner_detail {

inline void check_endpoints(const Configuration& start, const Configuration& goal,
                            const Workspace& w, const PlannerParams& p) {
  p.validate();
  if (collides(start, p.footprint, w)) throw Error("start configuration collides");
  if (collides(goal, p.footprint, w)) throw Error("goal configuration collides");
}

inline PlannedPath with_goal_curve(const Tree& tree, std::size_t id, const RSPath& to_goal,
                                   const PlannerParams& p) {
  auto out = extract_path(tree, id, p.delta_col);
  auto pts = rs_sample(to_goal, tree.nodes[id].config, p.delta_col);
  out.waypoints.insert(out.waypoints.end(), pts.begin() + 1, pts.end());
  out.length += to_goal.total_length;
  return out;
}

}  // namespace planner_detail

/// Goal-biased RRT. Succeeds once a node lands in the goal tolerance region and
/// the exact curve from it to the goal is collision-free.
inline PlannedPath rrt_plan(const Configuration& start, const Configuration& goal, const Workspace& w,
                            const PlannerParams& p) {
  planner_detail::check_endpoints(start, goal, w, p);
  Tree tree = planner_detail::make_tree(start, w, p);
  if (start == goal) {
    PlannedPath out;
    out.success = true;
    out.waypoints = {start};
    return out;
  }
  Rng rng(p.seed);
  planner_detail::TreeBuilder b(tree, w, p, rng);
  for (int it = 0; it < p.max_iters; ++it) {
    auto id = b.extend(b.sample(goal));
    if (!id) continue;
    const auto& q = tree.nodes[*id].config;
    if (!goal_reached(q, goal, p.rho)) continue;
    auto to_goal = rs_shortest(q, goal, p.rho);
    if (!b.edge_free(to_goal, q)) continue;
    auto out = planner_detail::with_goal_curve(tree, *id, to_goal, p);
    out.iterations = it + 1;
    return out;
  }
  PlannedPath fail;
  fail.iterations = p.max_iters;
  return fail;
}

/// RRT* query: grows a goal-biased tree to `budget_nodes`, then connects the
/// goal through the node minimizing cost-from-root plus a collision-free exact
/// curve to the goal.
inline PlannedPath rrt_star_plan(const Configuration& start, const Configuration& goal,
                                 const Workspace& w, const PlannerParams& p, std::size_t budget_nodes) {
  planner_detail::check_endpoints(start, goal, w, p);
  Tree tree = planner_detail::make_tree(start, w, p);
  Rng rng(p.seed);
  planner_detail::grow_star(tree, w, p, rng, budget_nodes, goal);

  std::vector<std::pair<double, std::size_t>> order;
  std::vector<RSPath> curves(tree.size());
  order.reserve(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    curves[i] = rs_shortest(tree.nodes[i].config, goal, p.rho);
    order.emplace_back(tree.nodes[i].cost_from_root + curves[i].total_length, i);
  }
  std::sort(order.begin(), order.end());
  planner_detail::TreeBuilder b(tree, w, p, rng);
  for (const auto& [cost, id] : order) {
    if (!b.edge_free(curves[id], tree.nodes[id].config)) continue;
    auto out = planner_detail::with_goal_curve(tree, id, curves[id], p);
    out.iterations = static_cast<int>(tree.size());
    return out;
  }
  return {};
}

}  // namespace c2g
