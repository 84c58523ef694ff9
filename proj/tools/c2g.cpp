// c2g command-line driver: workspace generation, dataset generation, training,
// single-query planning and the planner benchmark.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "c2g/bench.hpp"
#include "c2g/io.hpp"

namespace fs = std::filesystem;
using namespace c2g;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : Error {
  using Error::Error;
};

// C2G_SEED replaces the built-in default; an explicit --seed still wins.
std::uint64_t default_seed() {
  if (const char* env = std::getenv("C2G_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (!*env || *end) throw UsageError("C2G_SEED must be a non-negative integer");
    return v;
  }
  return 1;
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string strip_ext(const std::string& path, const std::string& ext) {
  return path.size() > ext.size() && path.ends_with(ext) ? path.substr(0, path.size() - ext.size()) : path;
}

// ---- gen-workspaces -------------------------------------------------------------

struct GenWorkspacesArgs {
  std::uint64_t seed = 1;
  int count = 1;
  int obstacles = 5;
  double extent = 500.0;
  double rho = 25.0;
  double min_size = 30.0;
  double max_size = 90.0;
  double cloud_spacing = 0.0;
  std::string out = "workspaces";
};

void gen_workspaces(const GenWorkspacesArgs& a) {
  if (a.count < 0 || a.obstacles < 0) throw UsageError("--count and --obstacles must be non-negative");
  fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    const auto w = random_workspace(a.seed + static_cast<std::uint64_t>(i), a.obstacles, a.extent,
                                    {a.min_size, a.max_size}, a.rho);
    const auto base = (fs::path(a.out) / w.id()).string();
    save_workspace(w, base + ".json");
    if (a.cloud_spacing > 0.0) save_point_cloud(w, a.cloud_spacing, base + ".cloud.csv");
    std::cout << base << ".json\n";
  }
}

// ---- gen-dataset ------------------------------------------------------------------

struct GenDatasetArgs {
  std::string workspace;
  std::string mode = "adaptive";
  double rho = 25.0;
  std::uint64_t seed = 1;
  std::size_t target = 20000;
  std::size_t trees = DatasetConfig{}.n_trees;
  std::size_t tree_nodes = DatasetConfig{}.tree_nodes;
  std::string tree_dump;
  std::string out = "dataset.csv";
};

void gen_dataset(const GenDatasetArgs& a) {
  const auto w = load_workspace(a.workspace);
  DatasetConfig cfg;
  cfg.mode = a.mode == "uniform" ? SamplingMode::Uniform : SamplingMode::Adaptive;
  cfg.rho = a.rho;
  cfg.master_seed = a.seed;
  cfg.target_size = a.target;
  cfg.n_trees = a.trees;
  cfg.tree_nodes = a.tree_nodes;
  cfg.phase1_samples = a.tree_nodes / 2;
  const auto trees = build_trees(w, cfg);
  const auto ds = build_dataset_from_trees(w, trees, cfg);
  ensure_parent(a.out);
  save_dataset(ds, a.out);
  const auto hist = ratio_histogram(ds.samples, RatioBins::geometric(cfg.n_bins, 1.0, cfg.bin_max), w.extent());
  save_histogram(hist, strip_ext(a.out, ".csv") + ".hist.csv");
  if (!a.tree_dump.empty()) {
    json all = json::array();
    for (const auto& t : trees) all.push_back(to_json(t));
    ensure_parent(a.tree_dump);
    io_detail::write_file(a.tree_dump, all.dump() + "\n");
  }
  std::cout << json{{"samples", ds.samples.size()},
                    {"same_branch", ds.meta.same_branch},
                    {"cross_vertex", ds.meta.cross_vertex},
                    {"histogram_spread", hist.spread()}}
                   .dump()
            << '\n';
}

// ---- train ---------------------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string out_model = "model.c2g";
  std::string report;
  TrainConfig cfg;
};

void train_cmd(TrainArgs a) {
  const auto ds = load_dataset(a.dataset);
  const auto [model, report] = train(ds, a.cfg);
  ensure_parent(a.out_model);
  save_model(model, a.out_model);
  save_train_report(report, a.report.empty() ? a.out_model + ".report.csv" : a.report);
  std::cout << json{{"best_epoch", report.best_epoch},
                    {"val_rmse", report.final_rmse},
                    {"train_mse", report.train_mse.empty() ? 0.0 : report.train_mse.back()}}
                   .dump()
            << '\n';
}

// ---- plan ------------------------------------------------------------------------------

struct PlanArgs {
  std::string model;
  std::string workspace;
  std::string start;
  std::string goal;
  std::string svg;
  std::string csv;
  bool no_docking = false;
};

void plan_cmd(const PlanArgs& a) {
  const auto model = load_model(a.model);
  const auto w = load_workspace(a.workspace);
  Configuration s, g;
  try {
    s = parse_configuration(a.start);
    g = parse_configuration(a.goal);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
  const double rho = model.rho;
  auto opt = PlanOptions::defaults(rho);
  opt.docking = !a.no_docking;
  const auto tr = plan(s, g, w, LearnedCost{model}, ControlSet::defaults(rho), StopCriteria::defaults(rho, w.extent()),
                       opt);
  if (!a.csv.empty()) {
    ensure_parent(a.csv);
    save_trajectory_csv(tr, a.csv);
  }
  if (!a.svg.empty()) {
    SvgCanvas svg(w);
    svg.polyline(tr.waypoints, "black");
    svg.footprint(s, opt.footprint, "blue");
    svg.footprint(g, opt.footprint, "red");
    ensure_parent(a.svg);
    svg.save(a.svg);
  }
  std::cout << summary_json(tr).dump() << '\n';
}

// ---- bench ---------------------------------------------------------------------------------

struct BenchArgs {
  std::string workspaces;
  int queries = 10;
  std::vector<std::string> planners = {"RRT", "RRTStar", "C2G", "RS_Optimal"};
  std::uint64_t seed = 1;
  std::string out = "bench.csv";
  std::size_t rrt_star_nodes = 5000;
  double rho = 25.0;
};

void bench_cmd(const BenchArgs& a) {
  std::vector<PlannerKind> kinds;
  for (const auto& p : a.planners) {
    try {
      kinds.push_back(parse_planner(p));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.workspaces))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no workspace JSON files in " + a.workspaces);

  std::vector<BenchRecord> records;
  bool open_space = true;
  for (const auto& f : files) {
    const auto w = load_workspace(f.string());
    open_space = open_space && w.obstacles().empty();
    // Models sit next to the workspace: <id>.model and <id>.uniform.model.
    std::optional<C2GModel> adaptive, uniform;
    const auto stem = (f.parent_path() / w.id()).string();
    for (auto k : kinds) {
      if (k == PlannerKind::C2G && !adaptive) adaptive = load_model(stem + ".model");
      if (k == PlannerKind::C2G_Uniform && !uniform) uniform = load_model(stem + ".uniform.model");
    }
    const BenchModels models{adaptive ? &*adaptive : nullptr, uniform ? &*uniform : nullptr};
    const auto cfg = BenchConfig::defaults(a.rho, w.extent(), a.seed);
    auto run_cfg = cfg;
    run_cfg.rrt_star_nodes = a.rrt_star_nodes;
    for (const auto& q : make_queries(w, a.queries, a.seed, 2.0 * a.rho, 2.0 * a.rho)) {
      for (auto k : kinds) {
        records.push_back(run_planner(k, q, w, run_cfg, models));
        std::fprintf(stderr, "%s q%d %s %s\n", w.id().c_str(), q.id, to_string(k),
                     records.back().success ? "ok" : "fail");
      }
    }
  }
  ensure_parent(a.out);
  io_detail::write_file(a.out, to_csv(records));
  const auto ref = reference_planner(open_space);
  const auto table = format_table(summarize(records, ref), ref);
  io_detail::write_file(strip_ext(a.out, ".csv") + ".summary.txt", table);
  std::cout << table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned cost-to-go motion planning for car-like robots"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  try {
    seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  GenWorkspacesArgs gw;
  gw.seed = seed;
  auto* c_gw = app.add_subcommand("gen-workspaces", "Write random workspace JSON files");
  c_gw->add_option("--seed", gw.seed, "Master seed")->capture_default_str();
  c_gw->add_option("--count", gw.count, "Number of workspaces")->capture_default_str();
  c_gw->add_option("--obstacles", gw.obstacles, "Obstacles per workspace")->capture_default_str();
  c_gw->add_option("--extent", gw.extent, "Side length L")->capture_default_str()->check(CLI::PositiveNumber);
  c_gw->add_option("--rho", gw.rho, "Turning radius; corner squares of 2 rho stay free")->capture_default_str();
  c_gw->add_option("--min-size", gw.min_size, "Smallest obstacle size")->capture_default_str();
  c_gw->add_option("--max-size", gw.max_size, "Largest obstacle size")->capture_default_str();
  c_gw->add_option("--cloud-spacing", gw.cloud_spacing, "Also write an obstacle point cloud CSV at this spacing");
  c_gw->add_option("--out", gw.out, "Output directory")->capture_default_str();

  GenDatasetArgs gd;
  gd.seed = seed;
  auto* c_gd = app.add_subcommand("gen-dataset", "Build a cost-to-go dataset for one workspace");
  c_gd->add_option("--workspace", gd.workspace, "Workspace JSON")->required();
  c_gd->add_option("--mode", gd.mode, "Sampling mode")->check(CLI::IsMember({"uniform", "adaptive"}))->capture_default_str();
  c_gd->add_option("--rho", gd.rho, "Turning radius")->capture_default_str()->check(CLI::PositiveNumber);
  c_gd->add_option("--seed", gd.seed, "Master seed")->capture_default_str();
  c_gd->add_option("--target-size", gd.target, "Number of samples")->capture_default_str();
  c_gd->add_option("--trees", gd.trees, "Number of RRT* trees")->capture_default_str()->check(CLI::PositiveNumber);
  c_gd->add_option("--tree-nodes", gd.tree_nodes, "Nodes per tree")->capture_default_str()->check(CLI::PositiveNumber);
  c_gd->add_option("--tree-dump", gd.tree_dump, "Write the trees as JSON");
  c_gd->add_option("--out", gd.out, "Dataset CSV; meta and histogram are written alongside")->capture_default_str();

  TrainArgs tr;
  tr.cfg.seed = seed;
  auto* c_tr = app.add_subcommand("train", "Train a cost-to-go network");
  c_tr->add_option("--dataset", tr.dataset, "Dataset CSV")->required();
  c_tr->add_option("--out-model", tr.out_model, "Model file")->capture_default_str();
  c_tr->add_option("--report", tr.report, "Per-epoch report CSV (default: <model>.report.csv)");
  c_tr->add_option("--lr", tr.cfg.learning_rate, "Initial learning rate")->capture_default_str();
  c_tr->add_option("--batch", tr.cfg.batch_size, "Minibatch size")->capture_default_str();
  c_tr->add_option("--epochs", tr.cfg.epochs, "Epochs")->capture_default_str();
  c_tr->add_option("--seed", tr.cfg.seed, "Seed")->capture_default_str();

  PlanArgs pl;
  auto* c_pl = app.add_subcommand("plan", "Plan one query with a trained model");
  c_pl->add_option("--model", pl.model, "Model file")->required();
  c_pl->add_option("--workspace", pl.workspace, "Workspace JSON")->required();
  c_pl->add_option("--start", pl.start, "x,y,theta")->required();
  c_pl->add_option("--goal", pl.goal, "x,y,theta")->required();
  c_pl->add_option("--svg", pl.svg, "Render the result as SVG");
  c_pl->add_option("--csv", pl.csv, "Write waypoints as CSV");
  c_pl->add_flag("--no-docking", pl.no_docking, "Disable the terminal Reeds-Shepp connection");

  BenchArgs bn;
  bn.seed = seed;
  auto* c_bn = app.add_subcommand("bench", "Compare planners on seeded queries");
  c_bn->add_option("--workspaces", bn.workspaces, "Directory of workspace JSON files and models")->required();
  c_bn->add_option("--queries", bn.queries, "Queries per workspace")->capture_default_str();
  c_bn->add_option("--planners", bn.planners, "RRT, RRTStar, C2G, C2G_Uniform, RS_Optimal")->delimiter(',');
  c_bn->add_option("--seed", bn.seed, "Query and planner seed")->capture_default_str();
  c_bn->add_option("--out", bn.out, "Record CSV; the summary table goes next to it")->capture_default_str();
  c_bn->add_option("--rrt-star-nodes", bn.rrt_star_nodes, "RRT* node budget")->capture_default_str();
  c_bn->add_option("--rho", bn.rho, "Turning radius")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_gw->parsed()) gen_workspaces(gw);
    if (c_gd->parsed()) gen_dataset(gd);
    if (c_tr->parsed()) train_cmd(tr);
    if (c_pl->parsed()) plan_cmd(pl);
    if (c_bn->parsed()) bench_cmd(bn);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
