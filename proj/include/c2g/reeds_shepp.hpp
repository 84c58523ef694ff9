#pragma once

// Shortest Reeds-Shepp curves via the closed-form word families
// (CSC, CCC, CCCC, CCSC, CCSCC in both gears, with time-flip and reflection).
// Solved in a canonical frame: start at the origin with heading 0 and rho = 1.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "c2g/common.hpp"
#include "c2g/geometry.hpp"

namespace c2g {

enum class Steer { Left, Straight, Right };
enum class Gear { Forward = 1, Backward = -1 };

inline int sign(Gear g) { return static_cast<int>(g); }
inline int sign(Steer s) { return s == Steer::Left ? 1 : (s == Steer::Right ? -1 : 0); }

struct RSSegment {
  Steer steer = Steer::Straight;
  Gear gear = Gear::Forward;
  double param = 0.0;  // arc angle for turns, length / rho for straights

  friend bool operator==(const RSSegment&, const RSSegment&) = default;
};

struct RSPath {
  std::vector<RSSegment> segments;
  double rho = 1.0;
  double total_length = 0.0;

  // Family index in the fixed enumeration order; -1 for the empty path.
  int family = -1;
};

namespace rs_detail {

inline constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();
inline constexpr double kHalfPi = 0.5 * kPi;

using Word = std::array<Steer, 5>;
constexpr Steer L = Steer::Left, S = Steer::Straight, R = Steer::Right;
// Unused trailing slots are S with zero parameter and get dropped.
inline constexpr std::array<Word, 18> kWords = {{
    {L, R, L, S, S}, {R, L, R, S, S}, {L, R, L, R, S}, {R, L, R, L, S}, {L, R, S, L, S},
    {R, L, S, R, S}, {L, S, R, L, S}, {R, S, L, R, S}, {L, R, S, R, S}, {R, L, S, L, S},
    {R, S, R, L, S}, {L, S, L, R, S}, {L, S, R, S, S}, {R, S, L, S, S}, {L, S, L, S, S},
    {R, S, R, S, S}, {L, R, S, L, R}, {R, L, S, R, L},
}};
inline constexpr std::array<int, 18> kWordSize = {3, 3, 4, 4, 4, 4, 4, 4, 4,
                                                  4, 4, 4, 3, 3, 3, 3, 5, 5};

// Principal value in [-pi, pi].
inline double mod2pi(double x) {
  double v = std::fmod(x, kTwoPi);
  if (v < -kPi)
    v += kTwoPi;
  else if (v > kPi)
    v -= kTwoPi;
  return v;
}

inline void polar(double x, double y, double& r, double& theta) {
  r = std::hypot(x, y);
  theta = std::atan2(y, x);
}

inline void tau_omega(double u, double v, double xi, double eta, double phi, double& tau,
                      double& omega) {
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0.0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

// Candidate with signed parameters: negative means backward gear.
struct Candidate {
  int family = -1;
  std::array<double, 5> p{};
  double length = std::numeric_limits<double>::infinity();

  void offer(int fam, std::array<double, 5> q) {
    double len = 0.0;
    for (double v : q) len += std::abs(v);
    if (len < length) {  // strict: earlier family wins ties
      family = fam;
      p = q;
      length = len;
    }
  }
};

inline bool lp_sp_lp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) return true;
  }
  return false;
}

inline bool lp_sp_rp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1, u1;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

inline bool lp_rm_l(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi), eta = y - 1.0 + std::cos(phi);
  double u1, theta;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

inline bool lp_rup_lum_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::hypot(xi, eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

inline bool lp_rum_lum_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -kHalfPi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

inline bool lp_rm_sm_lm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi), eta = y - 1.0 + std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - kHalfPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

inline bool lp_rm_sm_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + kHalfPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

inline bool lp_rm_slm_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

using Solver = bool (*)(double, double, double, double&, double&, double&);

// The four symmetric variants of a solver: identity, time-flip, reflection, both.
// `fam` maps to the word used for the identity/time-flip and reflected variants.
template <typename Emit>
inline void four_ways(Solver f, double x, double y, double phi, int fam, int fam_reflected,
                      Emit emit) {
  double t, u, v;
  if (f(x, y, phi, t, u, v)) emit(fam, t, u, v, 1.0);
  if (f(-x, y, -phi, t, u, v)) emit(fam, t, u, v, -1.0);
  if (f(x, -y, -phi, t, u, v)) emit(fam_reflected, t, u, v, 1.0);
  if (f(-x, -y, phi, t, u, v)) emit(fam_reflected, t, u, v, -1.0);
}

inline void csc(double x, double y, double phi, Candidate& best) {
  auto emit = [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * t, s * u, s * v, 0.0, 0.0});
  };
  four_ways(lp_sp_lp, x, y, phi, 14, 15, emit);
  four_ways(lp_sp_rp, x, y, phi, 12, 13, emit);
}

inline void ccc(double x, double y, double phi, Candidate& best) {
  auto emit = [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * t, s * u, s * v, 0.0, 0.0});
  };
  four_ways(lp_rm_l, x, y, phi, 0, 1, emit);
  // backwards
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  auto emit_b = [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * v, s * u, s * t, 0.0, 0.0});
  };
  four_ways(lp_rm_l, xb, yb, phi, 0, 1, emit_b);
}

inline void cccc(double x, double y, double phi, Candidate& best) {
  four_ways(lp_rup_lum_rm, x, y, phi, 2, 3, [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * t, s * u, -s * u, s * v, 0.0});
  });
  four_ways(lp_rum_lum_rp, x, y, phi, 2, 3, [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * t, s * u, s * u, s * v, 0.0});
  });
}

inline void ccsc(double x, double y, double phi, Candidate& best) {
  auto emit = [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * t, -s * kHalfPi, s * u, s * v, 0.0});
  };
  four_ways(lp_rm_sm_lm, x, y, phi, 4, 5, emit);
  four_ways(lp_rm_sm_rm, x, y, phi, 8, 9, emit);
  // backwards
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  auto emit_b = [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * v, s * u, -s * kHalfPi, s * t, 0.0});
  };
  four_ways(lp_rm_sm_lm, xb, yb, phi, 6, 7, emit_b);
  four_ways(lp_rm_sm_rm, xb, yb, phi, 10, 11, emit_b);
}

inline void ccscc(double x, double y, double phi, Candidate& best) {
  four_ways(lp_rm_slm_rp, x, y, phi, 16, 17, [&](int fam, double t, double u, double v, double s) {
    best.offer(fam, {s * t, -s * kHalfPi, s * u, -s * kHalfPi, s * v});
  });
}

// Canonical-frame search; (x, y) already divided by rho and rotated into the start frame.
inline Candidate solve(double x, double y, double phi) {
  Candidate best;
  csc(x, y, phi, best);
  ccc(x, y, phi, best);
  cccc(x, y, phi, best);
  ccsc(x, y, phi, best);
  ccscc(x, y, phi, best);
  return best;
}

// Exact pose after moving along one segment from (x, y, phi), unit radius,
// with a signed parameter.
inline void advance(Steer steer, double v, double& x, double& y, double& phi) {
  switch (steer) {
    case Steer::Left:
      x += std::sin(phi + v) - std::sin(phi);
      y += -std::cos(phi + v) + std::cos(phi);
      phi += v;
      break;
    case Steer::Right:
      x += -std::sin(phi - v) + std::sin(phi);
      y += std::cos(phi - v) - std::cos(phi);
      phi -= v;
      break;
    case Steer::Straight:
      x += v * std::cos(phi);
      y += v * std::sin(phi);
      break;
  }
}

}  // namespace rs_detail

/// Shortest Reeds-Shepp curve from s to t with turning radius rho. Ties between
/// families of equal length resolve to the first family in enumeration order
/// (CSC, CCC, CCCC, CCSC, CCSCC).
inline RSPath rs_shortest(const Configuration& s, const Configuration& t, double rho) {
  if (!(rho > 0.0)) throw Error("rs_shortest: rho must be positive");
  const double dx = t.x - s.x, dy = t.y - s.y;
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  const double x = (c * dx + sn * dy) / rho;
  const double y = (-sn * dx + c * dy) / rho;
  const double phi = t.theta - s.theta;

  RSPath path;
  path.rho = rho;
  if (x == 0.0 && y == 0.0 && rs_detail::mod2pi(phi) == 0.0) return path;

  const auto best = rs_detail::solve(x, y, phi);
  path.family = best.family;
  const auto& word = rs_detail::kWords[static_cast<std::size_t>(best.family)];
  double sum = 0.0;
  for (int i = 0; i < rs_detail::kWordSize[static_cast<std::size_t>(best.family)]; ++i) {
    const double v = best.p[static_cast<std::size_t>(i)];
    if (std::abs(v) <= 0.0) continue;
    path.segments.push_back(
        {word[static_cast<std::size_t>(i)], v < 0.0 ? Gear::Backward : Gear::Forward, std::abs(v)});
    sum += std::abs(v);
  }
  path.total_length = rho * sum;
  return path;
}

inline double rs_length(const Configuration& s, const Configuration& t, double rho) {
  return rs_shortest(s, t, rho).total_length;
}

/// Exact pose at arc length s_arc along `p` started from `start`.
inline Configuration rs_interpolate(const RSPath& p, double s_arc, const Configuration& start) {
  if (!(s_arc >= 0.0 && s_arc <= p.total_length * (1.0 + 1e-12) + 1e-12))
    throw Error("rs_interpolate: arc length outside [0, total_length]");
  double remaining = std::min(s_arc, p.total_length) / p.rho;
  double x = 0.0, y = 0.0, phi = start.theta;
  for (const auto& seg : p.segments) {
    if (remaining <= 0.0) break;
    const double step = std::min(seg.param, remaining);
    remaining -= step;
    rs_detail::advance(seg.steer, sign(seg.gear) * step, x, y, phi);
  }
  return {start.x + p.rho * x, start.y + p.rho * y, phi};
}

/// Prefix of `p` of length min(total_length, max_len).
inline RSPath rs_truncate(const RSPath& p, double max_len) {
  if (!(max_len > 0.0)) throw Error("rs_truncate: max_len must be positive");
  if (max_len >= p.total_length) return p;
  RSPath out;
  out.rho = p.rho;
  out.family = p.family;
  double remaining = max_len / p.rho;
  for (const auto& seg : p.segments) {
    if (remaining <= 0.0) break;
    RSSegment cut = seg;
    cut.param = std::min(seg.param, remaining);
    remaining -= cut.param;
    out.segments.push_back(cut);
  }
  out.total_length = max_len;
  return out;
}

/// Poses along `p` at spacing no larger than `spacing`, including both endpoints.
inline std::vector<Configuration> rs_sample(const RSPath& p, const Configuration& start,
                                            double spacing) {
  if (!(spacing > 0.0)) throw Error("rs_sample: spacing must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(p.total_length / spacing)));
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(start);
  if (p.total_length == 0.0) return out;
  for (int i = 1; i <= n; ++i) out.push_back(rs_interpolate(p, p.total_length * i / n, start));
  return out;
}

inline const char* to_string(Steer s) {
  switch (s) {
    case Steer::Left: return "L";
    case Steer::Right: return "R";
    default: return "S";
  }
}

inline const char* to_string(Gear g) { return g == Gear::Forward ? "forward" : "backward"; }

}  // namespace c2g
