#pragma once

// File formats: workspace JSON, dataset CSV + meta JSON, histograms, trees,
// trajectories, train reports, and SVG renders.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "c2g/c2g_model.hpp"
#include "c2g/c2g_planner.hpp"
#include "c2g/dataset.hpp"
#include "c2g/geometry.hpp"
#include "c2g/planners.hpp"
#include "c2g/reeds_shepp.hpp"

namespace c2g {

using nlohmann::json;

namespace io_detail {

// Shortest decimal that round-trips the double exactly.
inline std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline double parse_num(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw FormatError(where + ": bad number '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto k = line.find(sep, pos);
    out.push_back(line.substr(pos, k == std::string_view::npos ? std::string_view::npos : k - pos));
    if (k == std::string_view::npos) break;
    pos = k + 1;
  }
  return out;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error("failed writing: " + path);
}

}  // namespace io_detail

// ---- workspace --------------------------------------------------------------

inline json to_json(const Workspace& w) {
  json obs = json::array();
  for (const auto& o : w.obstacles()) {
    if (o.is_disc()) {
      const auto& d = o.disc();
      obs.push_back({{"kind", "disc"}, {"cx", d.cx}, {"cy", d.cy}, {"r", d.radius}});
    } else {
      const auto& b = o.box();
      obs.push_back({{"kind", "box"}, {"xmin", b.xmin}, {"ymin", b.ymin}, {"xmax", b.xmax}, {"ymax", b.ymax}});
    }
  }
  return {{"id", w.id()}, {"extent", w.extent()}, {"obstacles", obs}};
}

inline Workspace workspace_from_json(const json& j) {
  try {
    std::vector<Obstacle> obs;
    for (const auto& o : j.at("obstacles")) {
      const auto kind = o.at("kind").get<std::string>();
      if (kind == "disc")
        obs.emplace_back(Disc{o.at("cx").get<double>(), o.at("cy").get<double>(), o.at("r").get<double>()});
      else if (kind == "box")
        obs.emplace_back(AxisAlignedBox{o.at("xmin").get<double>(), o.at("ymin").get<double>(),
                                        o.at("xmax").get<double>(), o.at("ymax").get<double>()});
      else
        throw FormatError("unknown obstacle kind '" + kind + "'");
    }
    return Workspace(j.at("id").get<std::string>(), j.at("extent").get<double>(), std::move(obs));
  } catch (const json::exception& e) {
    throw FormatError(std::string("workspace JSON: ") + e.what());
  }
}

inline void save_workspace(const Workspace& w, const std::string& path) {
  io_detail::write_file(path, to_json(w).dump(2) + "\n");
}

inline Workspace load_workspace(const std::string& path) {
  json j;
  try {
    j = json::parse(io_detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("workspace JSON " + path + ": " + e.what());
  }
  return workspace_from_json(j);
}

inline void save_point_cloud(const Workspace& w, double spacing, const std::string& path) {
  auto out = io_detail::open_out(path);
  out << "x,y\n";
  for (const auto& [x, y] : obstacle_point_cloud(w, spacing)) out << io_detail::num(x) << ',' << io_detail::num(y) << '\n';
}

// ---- Reeds-Shepp paths and trees ----------------------------------------------

inline json to_json(const RSPath& p) {
  json segs = json::array();
  for (const auto& s : p.segments) segs.push_back({{"steer", to_string(s.steer)}, {"gear", to_string(s.gear)}, {"param", s.param}});
  return segs;
}

inline json to_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({{"x", n.config.x},
                     {"y", n.config.y},
                     {"theta", n.config.theta},
                     {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                     {"cost", n.cost_from_root},
                     {"phase", n.phase == Phase::Initial ? "initial" : "explored"}});
  }
  return {{"root", {{"x", t.root.x}, {"y", t.root.y}, {"theta", t.root.theta}}},
          {"workspace_id", t.workspace_id},
          {"rho", t.rho},
          {"nodes", nodes}};
}

// ---- datasets ----------------------------------------------------------------

inline constexpr const char* kDatasetHeader = "s_x,s_y,s_theta,t_x,t_y,t_theta,cost,origin";

inline json to_json(const DatasetMeta& m) {
  return {{"workspace_id", m.workspace_id},
          {"rho", m.rho},
          {"extent", m.extent},
          {"seeds", m.seeds},
          {"mode", to_string(m.mode)},
          {"counts", {{"same_branch", m.same_branch}, {"cross_vertex", m.cross_vertex}}}};
}

inline DatasetMeta meta_from_json(const json& j) {
  try {
    DatasetMeta m;
    m.workspace_id = j.at("workspace_id").get<std::string>();
    m.rho = j.at("rho").get<double>();
    m.extent = j.at("extent").get<double>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "uniform" && mode != "adaptive") throw FormatError("unknown sampling mode '" + mode + "'");
    m.mode = mode == "uniform" ? SamplingMode::Uniform : SamplingMode::Adaptive;
    if (j.contains("counts")) {
      m.same_branch = j["counts"].value("same_branch", std::size_t{0});
      m.cross_vertex = j["counts"].value("cross_vertex", std::size_t{0});
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset meta JSON: ") + e.what());
  }
}

/// Meta sidecar path for a dataset CSV: foo.csv -> foo.meta.json.
inline std::string meta_path_for(const std::string& csv_path) {
  const auto dot = csv_path.rfind(".csv");
  return (dot != std::string::npos && dot + 4 == csv_path.size() ? csv_path.substr(0, dot) : csv_path) + ".meta.json";
}

inline void save_dataset(const Dataset& d, const std::string& csv_path) {
  using io_detail::num;
  auto out = io_detail::open_out(csv_path);
  out << kDatasetHeader << '\n';
  for (const auto& s : d.samples) {
    out << num(s.s.x) << ',' << num(s.s.y) << ',' << num(s.s.theta) << ',' << num(s.t.x) << ',' << num(s.t.y) << ','
        << num(s.t.theta) << ',' << num(s.cost) << ',' << to_string(s.origin) << '\n';
  }
  if (!out) throw Error("failed writing: " + csv_path);
  io_detail::write_file(meta_path_for(csv_path), to_json(d.meta).dump(2) + "\n");
}

inline Dataset load_dataset(const std::string& csv_path) {
  Dataset d;
  try {
    d.meta = meta_from_json(json::parse(io_detail::read_file(meta_path_for(csv_path))));
  } catch (const json::parse_error& e) {
    throw FormatError("dataset meta JSON: " + std::string(e.what()));
  }
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open: " + csv_path);
  std::string line;
  if (!std::getline(in, line) || line != kDatasetHeader) throw FormatError(csv_path + ": unexpected header");
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto f = io_detail::split(line, ',');
    const std::string where = csv_path + ":" + std::to_string(row);
    if (f.size() != 8) throw FormatError(where + ": expected 8 fields");
    double v[7];
    for (int i = 0; i < 7; ++i) v[i] = io_detail::parse_num(f[static_cast<std::size_t>(i)], where);
    SampleOrigin o;
    if (f[7] == "same_branch")
      o = SampleOrigin::SameBranch;
    else if (f[7] == "cross_vertex")
      o = SampleOrigin::CrossVertex;
    else
      throw FormatError(where + ": unknown origin");
    d.samples.push_back({Configuration(v[0], v[1], v[2]), Configuration(v[3], v[4], v[5]), v[6], o});
  }
  return d;
}

inline void save_histogram(const RatioHistogram& h, const std::string& path) {
  auto out = io_detail::open_out(path);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const bool last = i + 1 == h.counts.size();
    out << io_detail::num(h.bin_edges[i]) << ',' << (last ? std::string("inf") : io_detail::num(h.bin_edges[i + 1]))
        << ',' << h.counts[i] << '\n';
  }
}

// ---- training and planning outputs --------------------------------------------

inline void save_train_report(const TrainReport& r, const std::string& path) {
  auto out = io_detail::open_out(path);
  out << "epoch,train_mse,val_mse\n";
  for (std::size_t i = 0; i < r.train_mse.size(); ++i)
    out << i + 1 << ',' << io_detail::num(r.train_mse[i]) << ',' << io_detail::num(r.val_mse[i]) << '\n';
}

inline json summary_json(const Trajectory& t) {
  return {{"success", t.success}, {"reached", t.reached}, {"stalled", t.stalled}, {"docked", t.docked},
          {"length", t.length},   {"wall_time", t.wall_time}, {"steps", t.steps}};
}

inline void save_trajectory_csv(const Trajectory& t, const std::string& path) {
  auto out = io_detail::open_out(path);
  out << "x,y,theta\n";
  for (const auto& q : t.waypoints)
    out << io_detail::num(q.x) << ',' << io_detail::num(q.y) << ',' << io_detail::num(q.theta) << '\n';
}

inline Configuration parse_configuration(const std::string& text) {
  const auto f = io_detail::split(text, ',');
  if (f.size() != 3) throw FormatError("configuration must be x,y,theta: '" + text + "'");
  return {io_detail::parse_num(f[0], "configuration"), io_detail::parse_num(f[1], "configuration"),
          io_detail::parse_num(f[2], "configuration")};
}

// ---- SVG ------------------------------------------------------------------------

/// Top-down render: obstacles grey, start footprint blue, goal red, each with a
/// heading tick, and any number of polylines.
class SvgCanvas {
 public:
  SvgCanvas(const Workspace& w, double scale = 1.0) : extent_(w.extent()), scale_(scale) {
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << px(extent_) << "\" height=\"" << px(extent_)
          << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (const auto& o : w.obstacles()) {
      if (o.is_disc()) {
        const auto& d = o.disc();
        body_ << "<circle cx=\"" << px(d.cx) << "\" cy=\"" << py(d.cy) << "\" r=\"" << px(d.radius)
              << "\" fill=\"#888\"/>\n";
      } else {
        const auto& b = o.box();
        body_ << "<rect x=\"" << px(b.xmin) << "\" y=\"" << py(b.ymax) << "\" width=\"" << px(b.xmax - b.xmin)
              << "\" height=\"" << px(b.ymax - b.ymin) << "\" fill=\"#888\"/>\n";
      }
    }
  }

  void footprint(const Configuration& q, const Footprint& fp, const std::string& color) {
    const auto c = detail::footprint_corners(q, fp);
    body_ << "<polygon points=\"";
    for (const auto& v : c) body_ << px(v.x) << ',' << py(v.y) << ' ';
    body_ << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double tick = std::max(fp.length - fp.rear_offset, 10.0);
    line(q.x, q.y, q.x + tick * std::cos(q.theta), q.y + tick * std::sin(q.theta), color);
  }

  void polyline(const std::vector<Configuration>& pts, const std::string& color) {
    if (pts.empty()) return;
    body_ << "<polyline points=\"";
    for (const auto& q : pts) body_ << px(q.x) << ',' << py(q.y) << ' ';
    body_ << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
  }

  std::string str() const {
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(extent_) << "\" height=\"" << px(extent_)
      << "\" viewBox=\"0 0 " << px(extent_) << ' ' << px(extent_) << "\">\n"
      << body_.str() << "</svg>\n";
    return s.str();
  }

  void save(const std::string& path) const { io_detail::write_file(path, str()); }

 private:
  std::string px(double v) const { return io_detail::num(std::round(v * scale_ * 100.0) / 100.0); }
  std::string py(double v) const { return px(extent_ - v); }
  void line(double x0, double y0, double x1, double y1, const std::string& color) {
    body_ << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(y1)
          << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
  }

  double extent_;
  double scale_;
  std::ostringstream body_;
};

}  // namespace c2g
