#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "c2g/io.hpp"

using namespace c2g;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("c2g_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<std::string> lines(const std::string& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  fs::path dir_;
};

Workspace sample_workspace() {
  return Workspace("ws_7", 500.0, {Disc{120.5, 300.25, 33.0}, AxisAlignedBox{10, 20, 60.125, 90}});
}

}  // namespace

TEST_F(IoTest, WorkspaceRoundTrip) {
  const auto w = sample_workspace();
  save_workspace(w, path("w.json"));
  const auto back = load_workspace(path("w.json"));
  EXPECT_EQ(back.id(), "ws_7");
  EXPECT_EQ(back.extent(), 500.0);
  ASSERT_EQ(back.obstacles().size(), 2u);
  EXPECT_TRUE(back.obstacles()[0].is_disc());
  EXPECT_EQ(back.obstacles()[0].disc().cx, 120.5);
  EXPECT_EQ(back.obstacles()[0].disc().radius, 33.0);
  EXPECT_EQ(back.obstacles()[1].box().xmax, 60.125);
  const auto j = json::parse(slurp(path("w.json")));
  EXPECT_EQ(j["obstacles"][0]["kind"], "disc");
  EXPECT_EQ(j["obstacles"][1]["kind"], "box");
}

TEST_F(IoTest, WorkspaceRejectsMalformedInput) {
  io_detail::write_file(path("a.json"), "{\"id\": \"x\", \"extent\": 500");
  EXPECT_THROW(load_workspace(path("a.json")), FormatError);
  io_detail::write_file(path("b.json"),
                        R"({"id":"x","extent":500,"obstacles":[{"kind":"star","cx":1,"cy":1,"r":1}]})");
  EXPECT_THROW(load_workspace(path("b.json")), FormatError);
  io_detail::write_file(path("c.json"), R"({"id":"x","obstacles":[]})");
  EXPECT_THROW(load_workspace(path("c.json")), FormatError);
  EXPECT_THROW(load_workspace(path("missing.json")), Error);
}

TEST_F(IoTest, DatasetRoundTripIsBitIdentical) {
  Dataset d;
  d.meta.workspace_id = "ws_7";
  d.meta.seeds = {1, 2, 18446744073709551615ull};
  d.meta.mode = SamplingMode::Uniform;
  d.meta.same_branch = 2;
  d.meta.cross_vertex = 1;
  d.samples = {{{0.1, 0.2, 0.3}, {499.99999999999994, 1e-300, -3.141592653589793}, 1.0 / 3.0, SampleOrigin::SameBranch},
               {{250, 250, 0}, {260, 250, 0}, 10.000000000000002, SampleOrigin::SameBranch},
               {{1, 2, 3}, {4, 5, 6}, 123.456, SampleOrigin::CrossVertex}};
  save_dataset(d, path("d.csv"));
  EXPECT_TRUE(fs::exists(path("d.meta.json")));
  EXPECT_EQ(lines(path("d.csv")).front(), "s_x,s_y,s_theta,t_x,t_y,t_theta,cost,origin");
  const auto back = load_dataset(path("d.csv"));
  EXPECT_EQ(back, d);
  save_dataset(back, path("e.csv"));
  EXPECT_EQ(slurp(path("d.csv")), slurp(path("e.csv")));
  const auto meta = json::parse(slurp(path("d.meta.json")));
  EXPECT_EQ(meta["mode"], "uniform");
  EXPECT_EQ(meta["rho"], 25.0);
}

TEST_F(IoTest, DatasetRejectsMalformedRows) {
  Dataset d;
  d.meta.workspace_id = "w";
  d.samples = {{{1, 2, 0}, {3, 4, 0}, 5, SampleOrigin::SameBranch}};
  save_dataset(d, path("d.csv"));
  auto csv = slurp(path("d.csv"));
  io_detail::write_file(path("d.csv"), csv + "1,2,3,4,5,6,x7,same_branch\n");
  EXPECT_THROW(load_dataset(path("d.csv")), FormatError);
  io_detail::write_file(path("d.csv"), csv + "1,2,3,4,5,6,7,elsewhere\n");
  EXPECT_THROW(load_dataset(path("d.csv")), FormatError);
  io_detail::write_file(path("d.csv"), csv + "1,2,3\n");
  EXPECT_THROW(load_dataset(path("d.csv")), FormatError);
  io_detail::write_file(path("d.csv"), "x,y\n");
  EXPECT_THROW(load_dataset(path("d.csv")), FormatError);
}

TEST_F(IoTest, HistogramCsv) {
  const auto bins = RatioBins::geometric();
  std::vector<Sample> s = {{{0, 0, 0}, {100, 0, 0}, 100, SampleOrigin::SameBranch},
                           {{0, 0, 0}, {10, 0, 0}, 200, SampleOrigin::SameBranch}};
  save_histogram(ratio_histogram(s, bins, 500.0), path("h.csv"));
  const auto l = lines(path("h.csv"));
  ASSERT_EQ(l.size(), 13u);
  EXPECT_EQ(l[0], "bin_lo,bin_hi,count");
  EXPECT_EQ(l[1].substr(0, 2), "1,");
  EXPECT_EQ(l[1].substr(l[1].rfind(',') + 1), "1");
  EXPECT_EQ(l[12].substr(l[12].find(',') + 1), "inf,1");
}

TEST_F(IoTest, TrainReportCsv) {
  TrainReport r;
  r.train_mse = {0.5, 0.25};
  r.val_mse = {0.75, 0.125};
  save_train_report(r, path("r.csv"));
  EXPECT_EQ(lines(path("r.csv")), (std::vector<std::string>{"epoch,train_mse,val_mse", "1,0.5,0.75", "2,0.25,0.125"}));
}

TEST_F(IoTest, PathAndTreeJson) {
  const auto p = rs_shortest({0, 0, 0}, {0, 10, kPi}, 25.0);
  const auto jp = to_json(p);
  ASSERT_TRUE(jp.is_array());
  ASSERT_EQ(jp.size(), p.segments.size());
  for (const auto& seg : jp) {
    EXPECT_TRUE(seg.contains("steer"));
    EXPECT_TRUE(seg["gear"] == "forward" || seg["gear"] == "backward");
    EXPECT_GE(seg["param"].get<double>(), 0.0);
  }
  const Workspace w("open", 500.0);
  const auto tree = two_phase_build({250, 250, 0}, w, PlannerParams::defaults(25.0, 3), 20, 40);
  const auto jt = to_json(tree);
  ASSERT_EQ(jt["nodes"].size(), tree.size());
  EXPECT_TRUE(jt["nodes"][0]["parent"].is_null());
  EXPECT_EQ(jt["nodes"][1]["parent"], 0);
  EXPECT_EQ(jt["nodes"][1]["phase"], "initial");
  EXPECT_EQ(jt["root"]["x"], 250.0);
}

TEST_F(IoTest, TrajectoryOutputs) {
  Trajectory t;
  t.waypoints = {{0, 0, 0}, {1.5, 0, 0}};
  t.controls = {{Gear::Forward, 0.0, 1.5}};
  t.length = 1.5;
  t.success = t.reached = true;
  t.steps = 1;
  save_trajectory_csv(t, path("t.csv"));
  EXPECT_EQ(lines(path("t.csv")), (std::vector<std::string>{"x,y,theta", "0,0,0", "1.5,0,0"}));
  const auto s = summary_json(t);
  EXPECT_EQ(s["success"], true);
  EXPECT_EQ(s["length"], 1.5);
  EXPECT_EQ(s["steps"], 1);
  EXPECT_TRUE(s.contains("wall_time"));
}

TEST(ParseConfiguration, AcceptsTriplesOnly) {
  const auto q = parse_configuration("10,20.5,-1.25");
  EXPECT_EQ(q.x, 10.0);
  EXPECT_EQ(q.y, 20.5);
  EXPECT_EQ(q.theta, -1.25);
  EXPECT_THROW(parse_configuration("10,20"), FormatError);
  EXPECT_THROW(parse_configuration("10,20,a"), FormatError);
  EXPECT_THROW(parse_configuration("10, 20, 1"), FormatError);
}

TEST(Svg, WellFormedWithColouredEndpoints) {
  SvgCanvas svg(sample_workspace());
  svg.footprint({100, 100, 0.5}, Footprint{}, "blue");
  svg.footprint({400, 400, -2.0}, Footprint{}, "red");
  svg.polyline({{100, 100, 0.5}, {200, 150, 0.2}, {400, 400, -2.0}}, "black");
  const auto text = svg.str();
  EXPECT_EQ(text.rfind("<?xml", 0), 0u);
  EXPECT_NE(text.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(text.find("stroke=\"blue\""), std::string::npos);
  EXPECT_NE(text.find("stroke=\"red\""), std::string::npos);
  EXPECT_NE(text.find("<polyline"), std::string::npos);
  EXPECT_NE(text.find("<circle"), std::string::npos);
  // Every element is self-closing except the root.
  std::size_t open = 0, self_closed = 0;
  for (std::size_t k = text.find('<'); k != std::string::npos; k = text.find('<', k + 1)) {
    if (text.compare(k, 2, "<?") == 0 || text.compare(k, 2, "</") == 0) continue;
    ++open;
    if (text[text.find('>', k) - 1] == '/') ++self_closed;
  }
  EXPECT_EQ(open, self_closed + 1);
  EXPECT_NE(text.find("</svg>\n"), std::string::npos);
  // Footprint polygons carry four vertices each.
  const auto poly = text.find("<polygon points=\"");
  ASSERT_NE(poly, std::string::npos);
  const auto pts = text.substr(poly + 17, text.find('"', poly + 17) - poly - 17);
  EXPECT_EQ(std::count(pts.begin(), pts.end(), ','), 4);
}
