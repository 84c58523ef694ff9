#pragma once

// Benchmark harness: runs several planners on one seeded query set and
// summarizes success, length and wall time.

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "c2g/c2g_model.hpp"
#include "c2g/c2g_planner.hpp"
#include "c2g/io.hpp"
#include "c2g/planners.hpp"
#include "c2g/reeds_shepp.hpp"

namespace c2g {

enum class PlannerKind { RRT, RRTStar, C2G, C2G_Uniform, RS_Optimal };

inline const char* to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::RRT: return "RRT";
    case PlannerKind::RRTStar: return "RRTStar";
    case PlannerKind::C2G: return "C2G";
    case PlannerKind::C2G_Uniform: return "C2G_Uniform";
    case PlannerKind::RS_Optimal: return "RS_Optimal";
  }
  return "?";
}

inline PlannerKind parse_planner(std::string_view name) {
  for (auto k : {PlannerKind::RRT, PlannerKind::RRTStar, PlannerKind::C2G, PlannerKind::C2G_Uniform,
                 PlannerKind::RS_Optimal})
    if (name == to_string(k)) return k;
  throw Error("unknown planner '" + std::string(name) + "'");
}

struct BenchQuery {
  int id = 0;
  Configuration start;
  Configuration goal;
};

struct BenchRecord {
  PlannerKind planner = PlannerKind::RRT;
  std::string workspace_id;
  int query_id = 0;
  bool success = false;
  std::optional<double> length;  // present iff success
  double wall_time = 0.0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// Collision-free start/goal pairs with positions at least `margin` from the
/// boundary and at least `min_separation` apart.
inline std::vector<BenchQuery> make_queries(const Workspace& w, int n, std::uint64_t seed, double margin,
                                            double min_separation, const Footprint& fp = Footprint{}) {
  const double L = w.extent();
  if (!(2.0 * margin < L)) throw Error("make_queries: margin leaves no room");
  Rng rng(stream_seed(seed, w.id(), "queries"));
  auto draw = [&] {
    for (int tries = 0; tries < 100000; ++tries) {
      Configuration q(uniform(rng, margin, L - margin), uniform(rng, margin, L - margin), uniform(rng, -kPi, kPi));
      if (!collides(q, fp, w)) return q;
    }
    throw Error("make_queries: workspace has no free configuration");
  };
  std::vector<BenchQuery> out;
  for (int i = 0; i < n; ++i) {
    const auto s = draw();
    auto g = draw();
    for (int tries = 0; position_distance(s, g) < min_separation; ++tries) {
      if (tries > 10000) throw Error("make_queries: cannot separate start and goal");
      g = draw();
    }
    out.push_back({i, s, g});
  }
  return out;
}

struct BenchConfig {
  double rho = 25.0;
  PlannerParams rrt = PlannerParams::defaults(25.0);
  std::size_t rrt_star_nodes = 5000;
  ControlSet controls = ControlSet::defaults(25.0);
  StopCriteria stop = StopCriteria::defaults(25.0, 500.0);
  PlanOptions plan = PlanOptions::defaults(25.0);

  static BenchConfig defaults(double rho, double extent, std::uint64_t seed = 1) {
    BenchConfig c;
    c.rho = rho;
    c.rrt = PlannerParams::defaults(rho, seed);
    c.controls = ControlSet::defaults(rho);
    c.stop = StopCriteria::defaults(rho, extent);
    c.plan = PlanOptions::defaults(rho);
    return c;
  }
};

/// Models for the learned planners; either may be absent if not benchmarked.
struct BenchModels {
  const C2GModel* adaptive = nullptr;
  const C2GModel* uniform = nullptr;
};

inline BenchRecord run_planner(PlannerKind kind, const BenchQuery& q, const Workspace& w, const BenchConfig& cfg,
                               const BenchModels& models) {
  BenchRecord r;
  r.planner = kind;
  r.workspace_id = w.id();
  r.query_id = q.id;
  // Per-query RNG stream so results do not depend on which queries ran before.
  PlannerParams p = cfg.rrt;
  p.seed = mix64(cfg.rrt.seed ^ mix64(static_cast<std::uint64_t>(q.id) + 1));
  const auto t0 = std::chrono::steady_clock::now();
  double length = 0.0;
  switch (kind) {
    case PlannerKind::RRT: {
      const auto path = rrt_plan(q.start, q.goal, w, p);
      r.success = path.success;
      length = path.length;
      break;
    }
    case PlannerKind::RRTStar: {
      const auto path = rrt_star_plan(q.start, q.goal, w, p, cfg.rrt_star_nodes);
      r.success = path.success;
      length = path.length;
      break;
    }
    case PlannerKind::C2G:
    case PlannerKind::C2G_Uniform: {
      const C2GModel* m = kind == PlannerKind::C2G ? models.adaptive : models.uniform;
      if (!m) throw Error(std::string("no model loaded for planner ") + to_string(kind));
      const auto tr = plan(q.start, q.goal, w, LearnedCost{*m}, cfg.controls, cfg.stop, cfg.plan);
      r.success = tr.reached;
      length = tr.length;
      break;
    }
    case PlannerKind::RS_Optimal: {
      const auto path = rs_shortest(q.start, q.goal, cfg.rho);
      r.success = rs_edge_free(path, q.start, w, p.footprint, p.delta_col);
      length = path.total_length;
      break;
    }
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.success) r.length = length;
  return r;
}

// ---- records CSV --------------------------------------------------------------

inline constexpr const char* kBenchHeader = "planner,workspace,query,success,length,wall_time";

inline std::string to_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << kBenchHeader << '\n';
  for (const auto& r : records)
    out << to_string(r.planner) << ',' << r.workspace_id << ',' << r.query_id << ',' << (r.success ? 1 : 0) << ','
        << (r.length ? io_detail::num(*r.length) : std::string()) << ',' << io_detail::num(r.wall_time) << '\n';
  return out.str();
}

inline std::vector<BenchRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBenchHeader) throw FormatError("bench CSV: unexpected header");
  std::vector<BenchRecord> out;
  for (int row = 2; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto f = io_detail::split(line, ',');
    const std::string where = "bench CSV row " + std::to_string(row);
    if (f.size() != 6) throw FormatError(where + ": expected 6 fields");
    BenchRecord r;
    r.planner = parse_planner(f[0]);
    r.workspace_id = std::string(f[1]);
    r.query_id = static_cast<int>(io_detail::parse_num(f[2], where));
    if (f[3] != "0" && f[3] != "1") throw FormatError(where + ": success must be 0 or 1");
    r.success = f[3] == "1";
    if (r.success != !f[4].empty()) throw FormatError(where + ": length must be present iff success");
    if (r.success) r.length = io_detail::parse_num(f[4], where);
    r.wall_time = io_detail::parse_num(f[5], where);
    out.push_back(std::move(r));
  }
  return out;
}

// ---- aggregate ------------------------------------------------------------------

struct BenchSummary {
  PlannerKind planner = PlannerKind::RRT;
  int queries = 0;
  int successes = 0;
  double mean_length = 0.0;  // over successful queries
  // Ratio of mean lengths against the reference planner, over queries both solved.
  std::optional<double> normalized_length;
  double mean_wall_time = 0.0;
  double median_wall_time = 0.0;
};

/// Reference is RS_Optimal when every workspace is obstacle-free, RRTStar otherwise.
inline PlannerKind reference_planner(bool open_space) {
  return open_space ? PlannerKind::RS_Optimal : PlannerKind::RRTStar;
}

inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records, PlannerKind reference) {
  using Key = std::pair<std::string, int>;
  std::map<Key, double> ref;
  for (const auto& r : records)
    if (r.planner == reference && r.success) ref[{r.workspace_id, r.query_id}] = *r.length;

  std::map<PlannerKind, std::vector<const BenchRecord*>> by;
  for (const auto& r : records) by[r.planner].push_back(&r);
  std::vector<BenchSummary> out;
  for (const auto& [kind, rs] : by) {
    BenchSummary s;
    s.planner = kind;
    s.queries = static_cast<int>(rs.size());
    double len = 0.0, num = 0.0, den = 0.0;
    std::vector<double> times;
    for (const auto* r : rs) {
      times.push_back(r->wall_time);
      s.mean_wall_time += r->wall_time;
      if (!r->success) continue;
      ++s.successes;
      len += *r->length;
      if (auto it = ref.find({r->workspace_id, r->query_id}); it != ref.end()) {
        num += *r->length;
        den += it->second;
      }
    }
    s.mean_length = s.successes ? len / s.successes : 0.0;
    if (den > 0.0) s.normalized_length = num / den;
    s.mean_wall_time /= std::max(1, s.queries);
    std::sort(times.begin(), times.end());
    if (!times.empty())
      s.median_wall_time = times.size() % 2 ? times[times.size() / 2]
                                            : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
    out.push_back(s);
  }
  return out;
}

inline std::string format_table(const std::vector<BenchSummary>& rows, PlannerKind reference) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %7s %8s %11s %13s %12s %12s\n", "planner", "queries", "success",
                "mean_len", (std::string("len/") + to_string(reference)).c_str(), "mean_time_s", "median_time_s");
  out << buf;
  for (const auto& s : rows) {
    const std::string norm = s.normalized_length ? io_detail::num(std::round(*s.normalized_length * 1e4) / 1e4) : "-";
    std::snprintf(buf, sizeof buf, "%-12s %7d %7.1f%% %11.2f %13s %12.4f %12.4f\n", to_string(s.planner), s.queries,
                  100.0 * s.successes / std::max(1, s.queries), s.mean_length, norm.c_str(), s.mean_wall_time,
                  s.median_wall_time);
    out << buf;
  }
  return out.str();
}

}  // namespace c2g
