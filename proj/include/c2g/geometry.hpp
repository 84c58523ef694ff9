#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "c2g/common.hpp"

namespace c2g {

/// Wraps an angle into [-pi, pi). Throws on non-finite input.
inline double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw Error("wrap_angle: non-finite angle");
  double r = std::fmod(theta + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r - kPi;
}

/// SE(2) pose of the car reference point. The heading is kept in [-pi, pi).
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Configuration() = default;
  Configuration(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline double position_distance(const Configuration& a, const Configuration& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double heading_error(const Configuration& a, const Configuration& b) {
  return std::abs(wrap_angle(a.theta - b.theta));
}

struct NormalizedConfig {
  double xn = 0.0;
  double yn = 0.0;
  double cos_t = 1.0;
  double sin_t = 0.0;
};

inline NormalizedConfig normalize(const Configuration& c, double extent) {
  if (!(extent > 0.0)) throw Error("normalize: extent must be positive");
  if (!(c.x >= 0.0 && c.x <= extent && c.y >= 0.0 && c.y <= extent))
    throw Error("normalize: configuration outside workspace extent");
  return {c.x / extent, c.y / extent, std::cos(c.theta), std::sin(c.theta)};
}

inline Configuration denormalize(const NormalizedConfig& n, double extent) {
  return {n.xn * extent, n.yn * extent, std::atan2(n.sin_t, n.cos_t)};
}

struct Disc {
  double cx, cy, radius;
};

struct AxisAlignedBox {
  double xmin, ymin, xmax, ymax;
};

class Obstacle {
 public:
  using Shape = std::variant<Disc, AxisAlignedBox>;

  Obstacle(Disc d) : shape_(d) {
    if (!(d.radius > 0.0)) throw Error("disc obstacle needs a positive radius");
  }
  Obstacle(AxisAlignedBox b) : shape_(b) {
    if (!(b.xmin < b.xmax && b.ymin < b.ymax)) throw Error("box obstacle has empty extent");
  }

  const Shape& shape() const { return shape_; }
  bool is_disc() const { return std::holds_alternative<Disc>(shape_); }
  const Disc& disc() const { return std::get<Disc>(shape_); }
  const AxisAlignedBox& box() const { return std::get<AxisAlignedBox>(shape_); }

  AxisAlignedBox bounds() const {
    if (is_disc()) {
      const auto& d = disc();
      return {d.cx - d.radius, d.cy - d.radius, d.cx + d.radius, d.cy + d.radius};
    }
    return box();
  }

  bool contains(double px, double py) const {
    if (is_disc()) {
      const auto& d = disc();
      return std::hypot(px - d.cx, py - d.cy) <= d.radius;
    }
    const auto& b = box();
    return px >= b.xmin && px <= b.xmax && py >= b.ymin && py <= b.ymax;
  }

 private:
  Shape shape_;
};

class Workspace {
 public:
  Workspace(std::string id, double extent, std::vector<Obstacle> obstacles = {})
      : id_(std::move(id)), extent_(extent), obstacles_(std::move(obstacles)) {
    if (!(extent_ > 0.0)) throw Error("workspace extent must be positive");
    for (const auto& o : obstacles_) {
      auto b = o.bounds();
      if (b.xmax < 0.0 || b.ymax < 0.0 || b.xmin > extent_ || b.ymin > extent_)
        throw Error("obstacle does not intersect the workspace extent");
    }
  }

  const std::string& id() const { return id_; }
  double extent() const { return extent_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

  bool inside(double px, double py) const {
    return px >= 0.0 && px <= extent_ && py >= 0.0 && py <= extent_;
  }

 private:
  std::string id_;
  double extent_;
  std::vector<Obstacle> obstacles_;
};

/// Car rectangle relative to the reference point. rear_offset is the distance
/// from the reference point back to the rear edge.
struct Footprint {
  double length = 20.0;
  double width = 10.0;
  double rear_offset = 5.0;

  static Footprint point() { return {0.0, 0.0, 0.0}; }

  void validate() const {
    bool point_mode = length == 0.0 && width == 0.0 && rear_offset == 0.0;
    if (point_mode) return;
    if (!(length > 0.0 && width > 0.0 && rear_offset >= 0.0 && rear_offset <= length))
      throw Error("invalid footprint dimensions");
  }
};

/// Footprint grown by `margin` on every side.
inline Footprint inflated(const Footprint& fp, double margin) {
  return {fp.length + 2.0 * margin, fp.width + 2.0 * margin, fp.rear_offset + margin};
}

/// Largest distance any footprint point can travel between two poses sampled
/// `spacing` apart along a path of curvature <= 1/rho, halved. Inflating by this
/// makes discretely sampled checks conservative for the whole path.
inline double sweep_margin(const Footprint& fp, double spacing, double rho) {
  const double far_x = std::max(fp.rear_offset, fp.length - fp.rear_offset);
  const double reach = std::hypot(far_x, 0.5 * fp.width);
  return 0.5 * spacing * (1.0 + reach / rho);
}

namespace detail {

struct Vec2 {
  double x, y;
};

// Corners in counter-clockwise order: rear-right, front-right, front-left, rear-left.
inline std::array<Vec2, 4> footprint_corners(const Configuration& c, const Footprint& fp) {
  const double ct = std::cos(c.theta), st = std::sin(c.theta);
  const double xs[2] = {-fp.rear_offset, fp.length - fp.rear_offset};
  const double ys[2] = {-0.5 * fp.width, 0.5 * fp.width};
  auto at = [&](double lx, double ly) {
    return Vec2{c.x + ct * lx - st * ly, c.y + st * lx + ct * ly};
  };
  return {at(xs[0], ys[0]), at(xs[1], ys[0]), at(xs[1], ys[1]), at(xs[0], ys[1])};
}

inline bool rect_hits_disc(const Configuration& c, const Footprint& fp, const Disc& d) {
  const double ct = std::cos(c.theta), st = std::sin(c.theta);
  const double dx = d.cx - c.x, dy = d.cy - c.y;
  const double lx = ct * dx + st * dy;
  const double ly = -st * dx + ct * dy;
  const double qx = std::clamp(lx, -fp.rear_offset, fp.length - fp.rear_offset);
  const double qy = std::clamp(ly, -0.5 * fp.width, 0.5 * fp.width);
  return std::hypot(lx - qx, ly - qy) <= d.radius;
}

// Separating-axis test; touching counts as overlap.
inline bool rect_hits_box(const std::array<Vec2, 4>& corners, const Configuration& c,
                          const AxisAlignedBox& b) {
  double minx = corners[0].x, maxx = corners[0].x, miny = corners[0].y, maxy = corners[0].y;
  for (const auto& p : corners) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  if (maxx < b.xmin || minx > b.xmax || maxy < b.ymin || miny > b.ymax) return false;

  const std::array<Vec2, 4> box_pts = {
      Vec2{b.xmin, b.ymin}, Vec2{b.xmax, b.ymin}, Vec2{b.xmax, b.ymax}, Vec2{b.xmin, b.ymax}};
  const Vec2 axes[2] = {{std::cos(c.theta), std::sin(c.theta)},
                        {-std::sin(c.theta), std::cos(c.theta)}};
  for (const auto& ax : axes) {
    double rmin = 1e300, rmax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto& p : corners) {
      double v = p.x * ax.x + p.y * ax.y;
      rmin = std::min(rmin, v);
      rmax = std::max(rmax, v);
    }
    for (const auto& p : box_pts) {
      double v = p.x * ax.x + p.y * ax.y;
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    }
    if (rmax < bmin || bmax < rmin) return false;
  }
  return true;
}

}  // namespace detail

/// True iff the footprint posed at `c` overlaps an obstacle or leaves [0, L]^2.
inline bool collides(const Configuration& c, const Footprint& fp, const Workspace& w) {
  const auto corners = detail::footprint_corners(c, fp);
  for (const auto& p : corners)
    if (!w.inside(p.x, p.y)) return true;
  for (const auto& o : w.obstacles()) {
    if (o.is_disc()) {
      if (detail::rect_hits_disc(c, fp, o.disc())) return true;
    } else if (detail::rect_hits_box(corners, c, o.box())) {
      return true;
    }
  }
  return false;
}

inline bool path_collides(std::span<const Configuration> path_points, const Footprint& fp,
                          const Workspace& w) {
  if (path_points.empty()) throw Error("path_collides: empty path");
  return std::any_of(path_points.begin(), path_points.end(),
                     [&](const Configuration& c) { return collides(c, fp, w); });
}

struct SizeRange {
  double min = 30.0;
  double max = 90.0;
};

/// Deterministic random workspace of discs and boxes. Obstacles never touch the
/// 2*rho squares at the four corners of the extent, so corner seeds stay free.
inline Workspace random_workspace(std::uint64_t seed, int n_obstacles, double extent,
                                  SizeRange size, double rho) {
  if (n_obstacles < 0) throw Error("random_workspace: negative obstacle count");
  if (!(size.min > 0.0 && size.min <= size.max)) throw Error("random_workspace: bad size range");
  Rng rng(mix64(seed));
  const double margin = 2.0 * rho;
  const std::array<AxisAlignedBox, 4> corners = {
      AxisAlignedBox{0.0, 0.0, margin, margin},
      AxisAlignedBox{extent - margin, 0.0, extent, margin},
      AxisAlignedBox{0.0, extent - margin, margin, extent},
      AxisAlignedBox{extent - margin, extent - margin, extent, extent}};
  auto clear_of_corners = [&](const Obstacle& o) {
    for (const auto& cb : corners) {
      if (o.is_disc()) {
        const auto& d = o.disc();
        double qx = std::clamp(d.cx, cb.xmin, cb.xmax), qy = std::clamp(d.cy, cb.ymin, cb.ymax);
        if (std::hypot(d.cx - qx, d.cy - qy) <= d.radius) return false;
      } else {
        const auto& b = o.box();
        if (!(b.xmax < cb.xmin || b.xmin > cb.xmax || b.ymax < cb.ymin || b.ymin > cb.ymax))
          return false;
      }
    }
    return true;
  };

  std::vector<Obstacle> obstacles;
  obstacles.reserve(static_cast<std::size_t>(n_obstacles));
  while (static_cast<int>(obstacles.size()) < n_obstacles) {
    const bool disc = uniform(rng, 0.0, 1.0) < 0.5;
    const double cx = uniform(rng, 0.0, extent), cy = uniform(rng, 0.0, extent);
    const double s1 = uniform(rng, size.min, size.max);
    if (disc) {
      Obstacle o(Disc{cx, cy, 0.5 * s1});
      if (clear_of_corners(o)) obstacles.push_back(o);
    } else {
      const double s2 = uniform(rng, size.min, size.max);
      Obstacle o(AxisAlignedBox{cx - 0.5 * s1, cy - 0.5 * s2, cx + 0.5 * s1, cy + 0.5 * s2});
      if (clear_of_corners(o)) obstacles.push_back(o);
    }
  }
  return Workspace("ws-" + std::to_string(seed), extent, std::move(obstacles));
}

/// Obstacle boundary points at roughly `spacing` apart, clipped to the extent.
inline std::vector<std::pair<double, double>> obstacle_point_cloud(const Workspace& w,
                                                                   double spacing) {
  std::vector<std::pair<double, double>> pts;
  auto push = [&](double x, double y) {
    if (w.inside(x, y)) pts.emplace_back(x, y);
  };
  for (const auto& o : w.obstacles()) {
    if (o.is_disc()) {
      const auto& d = o.disc();
      int n = std::max(8, static_cast<int>(std::ceil(kTwoPi * d.radius / spacing)));
      for (int i = 0; i < n; ++i) {
        double a = kTwoPi * i / n;
        push(d.cx + d.radius * std::cos(a), d.cy + d.radius * std::sin(a));
      }
    } else {
      const auto& b = o.box();
      const std::array<detail::Vec2, 5> loop = {detail::Vec2{b.xmin, b.ymin}, {b.xmax, b.ymin},
                                                {b.xmax, b.ymax}, {b.xmin, b.ymax},
                                                {b.xmin, b.ymin}};
      for (int e = 0; e < 4; ++e) {
        double len = std::hypot(loop[e + 1].x - loop[e].x, loop[e + 1].y - loop[e].y);
        int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int i = 0; i < n; ++i) {
          double f = static_cast<double>(i) / n;
          push(loop[e].x + f * (loop[e + 1].x - loop[e].x),
               loop[e].y + f * (loop[e + 1].y - loop[e].y));
        }
      }
    }
  }
  return pts;
}

}  // namespace c2g
