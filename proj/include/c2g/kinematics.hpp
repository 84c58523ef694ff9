#pragma once

#include <cmath>
#include <vector>

#include "c2g/geometry.hpp"
#include "c2g/reeds_shepp.hpp"

namespace c2g {

struct ControlInput {
  Gear gear = Gear::Forward;
  double curvature = 0.0;  // signed, positive turns left
  double step_len = 1.0;

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

/// Exact constant-curvature motion: no integration error, so the result always
/// moves parallel to the heading.
inline Configuration step(const Configuration& q, const ControlInput& u) {
  const double s = sign(u.gear) * u.step_len;
  if (u.curvature == 0.0) return {q.x + s * std::cos(q.theta), q.y + s * std::sin(q.theta), q.theta};
  const double r = 1.0 / u.curvature;
  const double cx = q.x - r * std::sin(q.theta), cy = q.y + r * std::cos(q.theta);
  const double th = q.theta + u.curvature * s;
  return {cx + r * std::sin(th), cy - r * std::cos(th), th};
}

inline ControlInput flipped(ControlInput u) {
  u.gear = u.gear == Gear::Forward ? Gear::Backward : Gear::Forward;
  return u;
}

/// Discrete control grid: both gears times n_steer curvatures evenly spaced in
/// [-1/rho, 1/rho]. Enumeration order is forward gear first, curvature ascending.
class ControlSet {
 public:
  ControlSet(int n_steer, double step_len, double rho) : n_steer_(n_steer), step_len_(step_len), rho_(rho) {
    if (n_steer < 3 || n_steer % 2 == 0) throw Error("ControlSet: n_steer must be odd and >= 3");
    if (!(step_len > 0.0) || !(rho > 0.0)) throw Error("ControlSet: step_len and rho must be positive");
    for (Gear g : {Gear::Forward, Gear::Backward}) {
      for (int i = 0; i < n_steer; ++i) {
        double k = (2.0 * i / (n_steer - 1) - 1.0) / rho;
        if (2 * i == n_steer - 1) k = 0.0;
        controls_.push_back({g, k, step_len});
      }
    }
  }

  static ControlSet defaults(double rho) { return {11, rho / 4.0, rho}; }

  int n_steer() const { return n_steer_; }
  double step_len() const { return step_len_; }
  double rho() const { return rho_; }
  const std::vector<ControlInput>& controls() const { return controls_; }
  std::size_t size() const { return controls_.size(); }

 private:
  int n_steer_;
  double step_len_;
  double rho_;
  std::vector<ControlInput> controls_;
};

inline std::vector<Configuration> rollout(const Configuration& q, const std::vector<ControlInput>& controls) {
  if (controls.empty()) throw Error("rollout: empty control set");
  std::vector<Configuration> out;
  out.reserve(controls.size());
  for (const auto& u : controls) out.push_back(step(q, u));
  return out;
}

inline std::vector<Configuration> rollout(const Configuration& q, const ControlSet& cs) {
  return rollout(q, cs.controls());
}

/// Lateral-slip residual of one step, measured against the chord-mean heading.
inline double constraint_residual(const Configuration& prev, const Configuration& next) {
  const double mid = prev.theta + 0.5 * wrap_angle(next.theta - prev.theta);
  const double dx = next.x - prev.x, dy = next.y - prev.y;
  return std::abs(dx * std::sin(mid) - dy * std::cos(mid));
}

/// Poses along a single control step at spacing <= `spacing`, excluding the start.
inline std::vector<Configuration> step_samples(const Configuration& q, const ControlInput& u, double spacing) {
  const int n = std::max(1, static_cast<int>(std::ceil(u.step_len / spacing)));
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    ControlInput part = u;
    part.step_len = u.step_len * i / n;
    out.push_back(step(q, part));
  }
  return out;
}

}  // namespace c2g
