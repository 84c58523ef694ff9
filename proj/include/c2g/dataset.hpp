#pragma once

// Cost-to-go training data: same-branch and cross-vertex samples drawn from
// two-phase trees, ratio histograms, and the stratified adaptive filter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "c2g/common.hpp"
#include "c2g/geometry.hpp"
#include "c2g/planners.hpp"
#include "c2g/reeds_shepp.hpp"

namespace c2g {

enum class SampleOrigin { SameBranch, CrossVertex };

struct Sample {
  Configuration s;
  Configuration t;
  double cost = 0.0;
  SampleOrigin origin = SampleOrigin::SameBranch;

  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class SamplingMode { Uniform, Adaptive };

struct DatasetMeta {
  std::string workspace_id;
  double rho = 25.0;
  double extent = 500.0;
  std::vector<std::uint64_t> seeds;
  SamplingMode mode = SamplingMode::Adaptive;
  std::size_t same_branch = 0;
  std::size_t cross_vertex = 0;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Sample> samples;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Geometric bins over the cost / Euclidean ratio. The last bin is open-ended.
struct RatioBins {
  std::vector<double> edges;

  static RatioBins geometric(int n_bins = 12, double lo = 1.0, double hi = 8.0) {
    if (n_bins < 1 || !(hi > lo) || !(lo > 0.0)) throw Error("RatioBins: bad bin specification");
    RatioBins b;
    for (int i = 0; i <= n_bins; ++i) b.edges.push_back(lo * std::pow(hi / lo, double(i) / n_bins));
    return b;
  }

  std::size_t n_bins() const { return edges.size() - 1; }

  std::size_t bin_of(double ratio) const {
    auto it = std::upper_bound(edges.begin(), edges.end(), ratio);
    std::size_t k = static_cast<std::size_t>(it - edges.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, n_bins() - 1);
  }
};

struct RatioHistogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;

  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }

  /// max / min over nonempty bins.
  double spread() const {
    std::size_t mx = 0, mn = SIZE_MAX;
    for (auto c : counts) {
      if (c == 0) continue;
      mx = std::max(mx, c);
      mn = std::min(mn, c);
    }
    return mn == SIZE_MAX ? 0.0 : double(mx) / double(mn);
  }
};

/// cost / max(Euclidean position distance, 1e-6 * extent), clamped below at 1.
inline double compute_ratio(const Sample& sample, double extent) {
  const double d = std::max(position_distance(sample.s, sample.t), 1e-6 * extent);
  return std::max(1.0, sample.cost / d);
}

inline RatioHistogram ratio_histogram(const std::vector<Sample>& samples, const RatioBins& bins,
                                      double extent) {
  RatioHistogram h{bins.edges, std::vector<std::size_t>(bins.n_bins(), 0)};
  for (const auto& s : samples) ++h.counts[bins.bin_of(compute_ratio(s, extent))];
  return h;
}

inline double fraction_above(const std::vector<Sample>& samples, double ratio, double extent) {
  if (samples.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) n += compute_ratio(s, extent) > ratio;
  return double(n) / double(samples.size());
}

namespace dataset_detail {

// Pose at arc length `arc` from the root along the branch ending at `node`.
inline Configuration pose_on_branch(const Tree& tree, std::size_t node, double arc) {
  std::size_t id = node;
  while (tree.nodes[id].parent && tree.nodes[*tree.nodes[id].parent].cost_from_root > arc)
    id = *tree.nodes[id].parent;
  const auto& n = tree.nodes[id];
  if (!n.parent) return n.config;
  const auto& from = tree.nodes[*n.parent];
  const double along = std::clamp(arc - from.cost_from_root, 0.0, n.edge->total_length);
  return rs_interpolate(*n.edge, along, from.config);
}

}  // namespace dataset_detail

/// Pairs on one root-to-node branch. With `mid_edge`, both endpoints are
/// continuous arc-length positions on the branch instead of vertices; the cost
/// is the arc-length difference. `s` is always the endpoint nearer the root.
inline std::vector<Sample> sample_same_branch(const Tree& tree, std::size_t k, Rng& rng,
                                              bool mid_edge = true) {
  if (tree.size() < 2) throw Error("sample_same_branch: tree has no edges");
  std::vector<Sample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t t_node = 1 + uniform_index(rng, tree.size() - 1);
    const double t_cost = tree.nodes[t_node].cost_from_root;
    double s_arc, t_arc = t_cost;
    Configuration s, t = tree.nodes[t_node].config;
    if (mid_edge) {
      const double a = uniform(rng, 0.0, t_cost), b = uniform(rng, 0.0, t_cost);
      s_arc = std::min(a, b);
      t_arc = std::max(a, b);
      s = dataset_detail::pose_on_branch(tree, t_node, s_arc);
      t = dataset_detail::pose_on_branch(tree, t_node, t_arc);
    } else {
      std::vector<std::size_t> chain;
      for (std::optional<std::size_t> id = t_node; id; id = tree.nodes[*id].parent) chain.push_back(*id);
      const std::size_t anc = chain[uniform_index(rng, chain.size())];
      s = tree.nodes[anc].config;
      s_arc = tree.nodes[anc].cost_from_root;
    }
    out.push_back({s, t, t_arc - s_arc, SampleOrigin::SameBranch});
  }
  return out;
}

/// Vertex pairs of the tree within alpha * rho of each other (position), whose
/// direct Reeds-Shepp curve is collision-free; cost is that curve's length.
/// Returns up to k samples drawn uniformly from the candidate pairs.
inline std::vector<Sample> sample_cross_vertex(const Tree& tree, const Workspace& w, double alpha,
                                               double rho, std::size_t k, Rng& rng,
                                               const Footprint& fp, double delta_col) {
  if (!(alpha > 0.0)) throw Error("sample_cross_vertex: alpha must be positive");
  const double r = alpha * rho;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < tree.size(); ++i)
    for (std::size_t j = i + 1; j < tree.size(); ++j)
      if (position_distance(tree.nodes[i].config, tree.nodes[j].config) <= r) pairs.emplace_back(i, j);
  std::shuffle(pairs.begin(), pairs.end(), rng);

  std::vector<Sample> out;
  for (const auto& [i, j] : pairs) {
    if (out.size() >= k) break;
    const auto& a = tree.nodes[i].config;
    const auto& b = tree.nodes[j].config;
    auto path = rs_shortest(a, b, rho);
    if (!rs_edge_free(path, a, w, fp, delta_col)) continue;
    out.push_back({a, b, path.total_length, SampleOrigin::CrossVertex});
  }
  return out;
}

/// Stratified flattening: at most quota_per_bin samples survive in each ratio
/// bin, chosen uniformly at random; the output order is shuffled.
inline std::vector<Sample> adaptive_filter(const std::vector<Sample>& samples, const RatioBins& bins,
                                           std::size_t quota_per_bin, double extent, Rng& rng) {
  if (quota_per_bin == 0) throw Error("adaptive_filter: quota must be positive");
  std::vector<std::vector<std::size_t>> members(bins.n_bins());
  for (std::size_t i = 0; i < samples.size(); ++i)
    members[bins.bin_of(compute_ratio(samples[i], extent))].push_back(i);
  std::vector<Sample> out;
  for (auto& m : members) {
    std::shuffle(m.begin(), m.end(), rng);
    for (std::size_t i = 0; i < std::min(quota_per_bin, m.size()); ++i) out.push_back(samples[m[i]]);
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// Smallest per-bin quota whose filtered output reaches `target` samples (or
/// keeps everything if the pool is too small).
inline std::size_t quota_for_target(const RatioHistogram& h, std::size_t target) {
  std::size_t lo = 1, hi = std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
  auto kept = [&](std::size_t q) {
    std::size_t n = 0;
    for (auto c : h.counts) n += std::min(c, q);
    return n;
  };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (kept(mid) >= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

enum class LaplacianPlane { XY, XTheta };

struct GridSpec {
  LaplacianPlane plane = LaplacianPlane::XY;
  double fixed = 0.0;  // theta for XY, y for XTheta
  double a_min = 0.0, a_max = 500.0;  // x range
  double b_min = 0.0, b_max = 500.0;  // y or theta range
  int na = 101, nb = 101;
};

/// Row-major field over the grid; `value(i, j)` is at a_i, b_j.
struct ScalarField {
  int na = 0, nb = 0;
  double a0 = 0.0, da = 0.0, b0 = 0.0, db = 0.0;
  std::vector<double> values;

  double value(int i, int j) const { return values[static_cast<std::size_t>(i * nb + j)]; }
  double& value(int i, int j) { return values[static_cast<std::size_t>(i * nb + j)]; }
};

/// Free-space cost-to-go rs_length(q, goal) over a 2-D cross-section of C-space.
inline ScalarField cost_grid(const Configuration& goal, double rho, const GridSpec& g) {
  if (g.na < 3 || g.nb < 3) throw Error("cost grid needs at least 3 points per axis");
  ScalarField f{g.na, g.nb, g.a_min, (g.a_max - g.a_min) / (g.na - 1), g.b_min,
                (g.b_max - g.b_min) / (g.nb - 1), {}};
  f.values.resize(static_cast<std::size_t>(g.na * g.nb));
  for (int i = 0; i < g.na; ++i) {
    for (int j = 0; j < g.nb; ++j) {
      const double a = f.a0 + i * f.da, b = f.b0 + j * f.db;
      const Configuration q = g.plane == LaplacianPlane::XY ? Configuration(a, b, g.fixed)
                                                            : Configuration(a, g.fixed, b);
      f.value(i, j) = rs_length(q, goal, rho);
    }
  }
  return f;
}

/// Five-point discrete Laplacian of the free-space cost-to-go on the interior of
/// the grid (size (na-2) x (nb-2)).
inline ScalarField laplacian_grid(const Configuration& goal, double rho, const GridSpec& g) {
  const ScalarField c = cost_grid(goal, rho, g);
  ScalarField lap{g.na - 2, g.nb - 2, c.a0 + c.da, c.da, c.b0 + c.db, c.db, {}};
  lap.values.resize(static_cast<std::size_t>(lap.na * lap.nb));
  for (int i = 1; i + 1 < g.na; ++i)
    for (int j = 1; j + 1 < g.nb; ++j)
      lap.value(i - 1, j - 1) =
          (c.value(i + 1, j) - 2.0 * c.value(i, j) + c.value(i - 1, j)) / (c.da * c.da) +
          (c.value(i, j + 1) - 2.0 * c.value(i, j) + c.value(i, j - 1)) / (c.db * c.db);
  return lap;
}

struct DatasetConfig {
  SamplingMode mode = SamplingMode::Adaptive;
  double rho = 25.0;
  std::uint64_t master_seed = 1;
  std::size_t target_size = 20000;
  std::size_t n_trees = 4;
  std::size_t tree_nodes = 2000;
  std::size_t phase1_samples = 1000;
  double alpha = 1.5;
  // Candidate pool drawn before adaptive filtering, as a multiple of target_size.
  double pool_factor = 4.0;
  // Fraction of the pool drawn from cross-vertex pairs.
  double cross_fraction = 0.3;
  int n_bins = 12;
  double bin_max = 8.0;
  Footprint footprint{};
};

/// Seed configurations: the four quarter-extent positions first, then uniform
/// random positions; headings are random. Colliding seeds are redrawn.
inline std::vector<Configuration> tree_seeds(const Workspace& w, const DatasetConfig& cfg) {
  Rng rng(stream_seed(cfg.master_seed, w.id(), "seeds"));
  const double L = w.extent();
  const double pos[4][2] = {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  std::vector<Configuration> seeds;
  for (std::size_t i = 0; i < cfg.n_trees; ++i) {
    Configuration q = i < 4 ? Configuration(pos[i][0] * L, pos[i][1] * L, uniform(rng, -kPi, kPi))
                            : Configuration(uniform(rng, 0.0, L), uniform(rng, 0.0, L), uniform(rng, -kPi, kPi));
    for (int tries = 0; collides(q, cfg.footprint, w); ++tries) {
      if (tries > 10000) throw Error("tree_seeds: no collision-free seed found");
      q = Configuration(uniform(rng, 0.0, L), uniform(rng, 0.0, L), uniform(rng, -kPi, kPi));
    }
    seeds.push_back(q);
  }
  return seeds;
}

inline std::vector<Tree> build_trees(const Workspace& w, const DatasetConfig& cfg) {
  std::vector<Tree> trees;
  const auto seeds = tree_seeds(w, cfg);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    auto p = PlannerParams::defaults(cfg.rho, stream_seed(cfg.master_seed, w.id(), "tree" + std::to_string(i)));
    p.footprint = cfg.footprint;
    p.max_iters = static_cast<int>(cfg.tree_nodes * 20);
    trees.push_back(two_phase_build(seeds[i], w, p, cfg.phase1_samples, cfg.tree_nodes));
  }
  return trees;
}

/// Whole pipeline for one workspace. Uniform mode keeps same-branch samples
/// only and skips filtering; adaptive mode draws a larger pool of same-branch
/// and cross-vertex samples and flattens its ratio histogram down to the target.
inline Dataset build_dataset_from_trees(const Workspace& w, const std::vector<Tree>& trees,
                                        const DatasetConfig& cfg) {
  Dataset ds;
  ds.meta.workspace_id = w.id();
  ds.meta.rho = cfg.rho;
  ds.meta.extent = w.extent();
  ds.meta.mode = cfg.mode;
  ds.meta.seeds = {cfg.master_seed};
  const std::size_t n_trees = trees.size();
  if (n_trees == 0) throw Error("build_dataset: no trees");
  const double delta_col = cfg.rho / 20.0;

  // A seed boxed in by obstacles can leave its tree without edges; quotas go to the others.
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < n_trees; ++i)
    if (trees[i].size() >= 2) usable.push_back(i);
  if (usable.empty()) throw Error("build_dataset: no tree has edges");
  auto split = [&](std::size_t total, std::size_t rank) {
    return total / usable.size() + (rank < total % usable.size() ? 1 : 0);
  };

  if (cfg.mode == SamplingMode::Uniform) {
    for (std::size_t r = 0; r < usable.size(); ++r) {
      const std::size_t i = usable[r];
      Rng rng(stream_seed(cfg.master_seed, w.id(), "same-branch" + std::to_string(i)));
      auto part = sample_same_branch(trees[i], split(cfg.target_size, r), rng);
      ds.samples.insert(ds.samples.end(), part.begin(), part.end());
    }
  } else {
    const auto pool_size = static_cast<std::size_t>(cfg.pool_factor * double(cfg.target_size));
    const auto cross_size = static_cast<std::size_t>(cfg.cross_fraction * double(pool_size));
    std::vector<Sample> pool;
    for (std::size_t r = 0; r < usable.size(); ++r) {
      const std::size_t i = usable[r];
      Rng rng(stream_seed(cfg.master_seed, w.id(), "same-branch" + std::to_string(i)));
      auto part = sample_same_branch(trees[i], split(pool_size - cross_size, r), rng);
      pool.insert(pool.end(), part.begin(), part.end());
      Rng xrng(stream_seed(cfg.master_seed, w.id(), "cross-vertex" + std::to_string(i)));
      auto cross = sample_cross_vertex(trees[i], w, cfg.alpha, cfg.rho, split(cross_size, r), xrng,
                                       cfg.footprint, delta_col);
      pool.insert(pool.end(), cross.begin(), cross.end());
    }
    const auto bins = RatioBins::geometric(cfg.n_bins, 1.0, cfg.bin_max);
    const auto hist = ratio_histogram(pool, bins, w.extent());
    Rng frng(stream_seed(cfg.master_seed, w.id(), "filter"));
    ds.samples = adaptive_filter(pool, bins, quota_for_target(hist, cfg.target_size), w.extent(), frng);
  }
  // Paths are reversible, so either endpoint order carries the same cost.
  Rng orng(stream_seed(cfg.master_seed, w.id(), "order"));
  for (auto& s : ds.samples)
    if (uniform(orng, 0.0, 1.0) < 0.5) std::swap(s.s, s.t);
  for (const auto& s : ds.samples)
    (s.origin == SampleOrigin::SameBranch ? ds.meta.same_branch : ds.meta.cross_vertex)++;
  return ds;
}

inline Dataset build_dataset(const Workspace& w, const DatasetConfig& cfg) {
  return build_dataset_from_trees(w, build_trees(w, cfg), cfg);
}

inline const char* to_string(SampleOrigin o) {
  return o == SampleOrigin::SameBranch ? "same_branch" : "cross_vertex";
}
inline const char* to_string(SamplingMode m) { return m == SamplingMode::Uniform ? "uniform" : "adaptive"; }

}  // namespace c2g
