#pragma once

// Greedy one-step descent on a cost-to-go function.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "c2g/c2g_model.hpp"
#include "c2g/geometry.hpp"
#include "c2g/kinematics.hpp"
#include "c2g/reeds_shepp.hpp"

namespace c2g {

struct StopCriteria {
  double eps_cost = 25.0;
  double eps_pos = 5.0;
  double eps_theta = 0.1;
  int max_steps = 500;

  /// eps_cost = 0.05 L, eps_pos = rho / 5.
  static StopCriteria defaults(double rho, double extent) { return {0.05 * extent, rho / 5.0, 0.1, 500}; }

  void validate() const {
    if (!(eps_cost >= 0.0 && eps_pos > 0.0 && eps_theta > 0.0 && max_steps > 0))
      throw Error("StopCriteria: thresholds must be positive");
  }
};

struct PlanOptions {
  bool docking = true;
  double docking_radius = 50.0;  // 2 rho
  double delta_col = 1.25;       // rho / 20
  Footprint footprint{};
  int history = 20;

  static PlanOptions defaults(double rho) {
    PlanOptions o;
    o.docking_radius = 2.0 * rho;
    o.delta_col = rho / 20.0;
    return o;
  }
};

struct Trajectory {
  std::vector<Configuration> waypoints;
  // Greedy steps first; a docking curve, if any, follows as one control per segment.
  std::vector<ControlInput> controls;
  double length = 0.0;
  bool success = false;  // a stop criterion fired
  bool reached = false;  // final pose within eps_pos / eps_theta of the goal
  bool stalled = false;  // no admissible successor
  bool docked = false;
  int steps = 0;  // greedy steps, excluding docking
  double wall_time = 0.0;
};

inline double trajectory_length(const Trajectory& t) {
  double len = 0.0;
  for (const auto& u : t.controls) len += u.step_len;
  return len;
}

inline bool within(const Configuration& a, const Configuration& b, double eps_pos, double eps_theta) {
  return position_distance(a, b) < eps_pos && heading_error(a, b) < eps_theta;
}

/// Denies q_new if it lies within half the stop tolerances of a recent pose.
inline bool anti_cycle_guard(std::span<const Configuration> history, const Configuration& q_new,
                             const StopCriteria& sc) {
  for (const auto& h : history)
    if (within(h, q_new, 0.5 * sc.eps_pos, 0.5 * sc.eps_theta)) return false;
  return true;
}

/// Cost-to-go from the trained network.
struct LearnedCost {
  const C2GModel& model;

  std::vector<double> operator()(std::span<const Configuration> qs, const Configuration& goal) const {
    std::vector<NormalizedConfig> s, t(qs.size(), normalize(goal, model.extent));
    s.reserve(qs.size());
    for (const auto& q : qs) s.push_back(normalize(q, model.extent));
    return predict_batch(model, s, t);
  }
};

/// Exact free-space cost-to-go, for isolating planner behaviour from model error.
struct ReedsSheppCost {
  double rho;

  std::vector<double> operator()(std::span<const Configuration> qs, const Configuration& goal) const {
    std::vector<double> out;
    out.reserve(qs.size());
    for (const auto& q : qs) out.push_back(rs_length(q, goal, rho));
    return out;
  }
};

namespace c2g_detail {

inline bool step_free(const Configuration& q, const ControlInput& u, const Workspace& w,
                      const Footprint& grown, double delta_col) {
  for (const auto& p : step_samples(q, u, delta_col))
    if (collides(p, grown, w)) return false;
  return true;
}

inline void append_docking(Trajectory& tr, const RSPath& path) {
  for (const auto& seg : path.segments) {
    const double k = seg.steer == Steer::Left ? 1.0 / path.rho : seg.steer == Steer::Right ? -1.0 / path.rho : 0.0;
    ControlInput u{seg.gear, k, seg.param * path.rho};
    if (!(u.step_len > 0.0)) continue;
    tr.controls.push_back(u);
    tr.waypoints.push_back(step(tr.waypoints.back(), u));
  }
  tr.docked = true;
}

}  // namespace c2g_detail

/// Greedy descent: roll out every control, drop colliding or recently visited
/// successors, and move to the one with the lowest predicted cost-to-go.
template <typename CostModel>
Trajectory plan(const Configuration& start, const Configuration& goal, const Workspace& w,
                const CostModel& cost, const ControlSet& cs, const StopCriteria& sc,
                const PlanOptions& opt) {
  sc.validate();
  if (collides(start, opt.footprint, w)) throw Error("plan: start configuration collides");
  if (collides(goal, opt.footprint, w)) throw Error("plan: goal configuration collides");
  const auto t0 = std::chrono::steady_clock::now();
  const double rho = cs.rho();
  const Footprint grown = inflated(opt.footprint, sweep_margin(opt.footprint, opt.delta_col, rho));

  Trajectory tr;
  tr.waypoints.push_back(start);
  std::deque<Configuration> history;
  std::vector<Configuration> batch;
  std::vector<std::size_t> which;

  while (true) {
    const Configuration q = tr.waypoints.back();
    if (within(q, goal, sc.eps_pos, sc.eps_theta)) {
      tr.success = true;
      break;
    }
    if (opt.docking && position_distance(q, goal) <= opt.docking_radius) {
      const RSPath path = rs_shortest(q, goal, rho);
      if (rs_edge_free(path, q, w, opt.footprint, opt.delta_col)) {
        c2g_detail::append_docking(tr, path);
        tr.success = true;
        break;
      }
    }
    if (tr.steps >= sc.max_steps) break;

    // Current pose first, then admissible successors in enumeration order.
    batch.assign(1, q);
    which.clear();
    history.push_back(q);
    if (static_cast<int>(history.size()) > opt.history) history.pop_front();
    const std::vector<Configuration> recent(history.begin(), history.end());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const auto& u = cs.controls()[i];
      const Configuration next = step(q, u);
      if (!c2g_detail::step_free(q, u, w, grown, opt.delta_col)) continue;
      if (!anti_cycle_guard(recent, next, sc)) continue;
      batch.push_back(next);
      which.push_back(i);
    }
    const auto costs = cost(std::span<const Configuration>(batch), goal);
    if (costs[0] < sc.eps_cost) {
      tr.success = true;
      break;
    }
    if (which.empty()) {
      tr.stalled = true;
      break;
    }
    std::size_t best = 1;
    for (std::size_t k = 2; k < batch.size(); ++k)
      if (costs[k] < costs[best]) best = k;
    tr.controls.push_back(cs.controls()[which[best - 1]]);
    tr.waypoints.push_back(batch[best]);
    ++tr.steps;
  }

  tr.length = trajectory_length(tr);
  tr.reached = within(tr.waypoints.back(), goal, sc.eps_pos, sc.eps_theta) || tr.docked;
  tr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return tr;
}

}  // namespace c2g
