#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "alefem/bench/experiments.hpp"

using namespace alefem;
using namespace alefem::bench;

namespace {
ExperimentConfig tiny(Experiment e) {
  ExperimentConfig c = default_config(e);
  c.nx = c.ny = 4;
  c.degree = 1;
  return c;
}
long vertices(const std::string& points) { return std::count(points.begin(), points.end(), ','); }
std::string csv_text(const CsvTable& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}
}  // namespace

TEST(Config, DefaultsPerExperiment) {
  const auto conv = default_config(Experiment::convergence);
  EXPECT_EQ(conv.degree, 2);
  EXPECT_EQ(conv.dts, (std::vector<double>{0.05, 0.01, 0.005, 0.001}));
  EXPECT_DOUBLE_EQ(conv.final_time, 0.3);
  const auto stab = default_config(Experiment::stability);
  EXPECT_EQ(stab.nx, 40u);
  EXPECT_EQ(stab.degree, 1);
  EXPECT_DOUBLE_EQ(stab.final_time, 0.4);
  EXPECT_EQ(stab.schemes.size(), 4u);
  EXPECT_NO_THROW(default_config(Experiment::accuracy).validate());
  EXPECT_NO_THROW(default_config(Experiment::scl_check).validate());
}

TEST(Config, ParsesFileAndAppliesSettings) {
  std::istringstream in("# comment\nexperiment = convergence\nscheme = mIE, mBDF2  # trailing\n\ndt=0.1,0.05,0.025\nnx = 8\n");
  const auto pairs = parse_config(in);
  ASSERT_EQ(pairs.size(), 4u);
  EXPECT_EQ(pairs[1].second, "mIE, mBDF2");
  ExperimentConfig c = default_config(Experiment::convergence);
  apply_settings(c, pairs);
  EXPECT_EQ(c.schemes, (std::vector<Scheme>{Scheme::mIE, Scheme::mBDF2}));
  EXPECT_EQ(c.dts.size(), 3u);
  EXPECT_EQ(c.nx, 8u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsBadInput) {
  ExperimentConfig c;
  EXPECT_THROW(apply_setting(c, "colour", "red"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "dt", "0.1,abc"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "nx", "2.5"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "scheme", "RK4"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "startup", "bdf"), std::invalid_argument);
  std::istringstream bad("nx 4\n");
  EXPECT_THROW(parse_config(bad), std::invalid_argument);
  EXPECT_THROW(parse_config_file("/nonexistent/run.cfg"), std::runtime_error);
  EXPECT_THROW(parse_experiment("speed"), std::invalid_argument);
  c.dts.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  ExperimentConfig conv = default_config(Experiment::convergence);
  conv.dts = {0.1, 0.05};
  EXPECT_THROW(conv.validate(), std::invalid_argument);
  ExperimentConfig acc = default_config(Experiment::accuracy);
  acc.maps = {"C"};
  EXPECT_THROW(acc.validate(), std::invalid_argument);
}

TEST(Csv, RoundTripsExactly) {
  CsvTable t({"name", "value"});
  t.add_row({"a", format_number(0.1)});
  t.add_row({"b", format_number(1.0 / 3.0)});
  const CsvTable back = parse_csv_string(csv_text(t));
  EXPECT_EQ(back.header(), t.header());
  EXPECT_EQ(back.rows(), t.rows());
  EXPECT_EQ(std::stod(back.rows()[1][1]), 1.0 / 3.0);
  EXPECT_EQ(back.column("value"), 1u);
  EXPECT_THROW(back.column("missing"), std::out_of_range);
}

TEST(Csv, RejectsMalformedInput) {
  CsvTable t({"a", "b"});
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
  EXPECT_THROW(t.add_row({"1", "2,3"}), std::invalid_argument);
  EXPECT_THROW(parse_csv_string(""), std::runtime_error);
  EXPECT_THROW(parse_csv_string("a,b\n1,2,3\n"), std::runtime_error);
  EXPECT_NO_THROW(parse_csv_string("a,b\n"));
}

TEST(Svg, EmptyAndTwoPointPlots) {
  const std::string empty = render_svg({}, {"empty", "x", "y"});
  EXPECT_NE(empty.find("<svg"), std::string::npos);
  EXPECT_NE(empty.find("</svg>"), std::string::npos);
  EXPECT_EQ(empty.find("<polyline"), std::string::npos);

  const std::string two = render_svg({{"s", {{0.0, 1.0}, {1.0, 2.0}}}}, {"two", "x", "y"});
  const std::regex poly("points=\"([^\"]*)\"");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(two, m, poly));
  EXPECT_EQ(vertices(m[1].str()), 2);

  PlotSpec log{"log", "dt", "err", true};
  const std::string dropped = render_svg({{"s", {{0.0, 1.0}, {0.1, 1e-3}, {0.01, 1e-5}}}}, log);
  ASSERT_TRUE(std::regex_search(dropped, m, poly));
  EXPECT_EQ(vertices(m[1].str()), 2);
}

TEST(Svg, SeriesFromCsvGroupsAndValidates) {
  const CsvTable t = parse_csv_string("scheme,dt,error\nmIE,0.1,1\nmIE,0.05,0.5\nmCN,0.1,0.1\n");
  const auto s = series_from_csv(t, "dt", "error", {"scheme"});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label, "mIE");
  EXPECT_EQ(s[0].points.size(), 2u);
  EXPECT_THROW(series_from_csv(parse_csv_string("dt,error\nx,1\n"), "dt", "error", {}), std::runtime_error);
}

TEST(Experiments, ConvergenceAnnotationMatchesFittedSlope) {
  ExperimentConfig c = tiny(Experiment::convergence);
  c.schemes = {Scheme::mIE};
  c.strategies = {VelocityStrategy::piecewise_constant};
  c.dts = {0.1, 0.05, 0.025};
  c.final_time = 0.2;
  c.svg = true;
  const auto res = run_experiment(c);
  ASSERT_EQ(res.tables.size(), 2u);
  const CsvTable& errors = res.tables[0].second;
  std::vector<double> e, d;
  for (const auto& row : errors.rows()) {
    d.push_back(std::stod(row[errors.column("dt")]));
    e.push_back(std::stod(row[errors.column("error")]));
  }
  const double slope = verify::convergence_rate(e, d).slope;
  ASSERT_EQ(res.svgs.size(), 1u);
  std::smatch m;
  const std::string svg = res.svgs[0].second;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex("class=\"annotation\"[^>]*>mIE dc slope ([-0-9.e+]+)<")));
  EXPECT_EQ(std::stod(m[1].str()), slope);
  EXPECT_EQ(std::stod(res.tables[1].second.rows()[0][2]), slope);
}

TEST(Experiments, RepeatedRunsGiveIdenticalCsv) {
  ExperimentConfig c = tiny(Experiment::stability);
  c.dts = {0.01};
  c.final_time = 0.05;
  const auto a = run_experiment(c), b = run_experiment(c);
  ASSERT_EQ(a.tables.size(), 1u);
  EXPECT_EQ(csv_text(a.tables[0].second), csv_text(b.tables[0].second));
  EXPECT_TRUE(a.failures.empty());
}

TEST(Experiments, SclCheckAndVerifyPassOnSmallMeshes) {
  ExperimentConfig scl = tiny(Experiment::scl_check);
  scl.mesh_sizes = {4};
  scl.dts = {0.05};
  EXPECT_TRUE(run_experiment(scl).passed);

  ExperimentConfig ver = tiny(Experiment::verify);
  ver.final_time = 0.5;
  const auto res = run_experiment(ver);
  EXPECT_TRUE(res.passed);
  ASSERT_EQ(res.tables.size(), 1u);
  EXPECT_EQ(res.tables[0].first, "verify.csv");
}

TEST(Experiments, WritesOutputFiles) {
  ExperimentConfig c = tiny(Experiment::stability);
  c.schemes = {Scheme::mIE};
  c.dts = {0.01};
  c.final_time = 0.02;
  c.svg = true;
  const auto dir = std::filesystem::temp_directory_path() / "alefem_bench_test";
  std::filesystem::remove_all(dir);
  const auto files = write_outputs(run_experiment(c), dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_TRUE(run_experiment(c).failures.empty());
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f));
  std::ifstream in(dir / "stability.csv");
  const CsvTable t = parse_csv(in);
  EXPECT_EQ(t.size(), 2u * 3u);  // 2 strategies x (t = 0, 0.01, 0.02)
  std::filesystem::remove_all(dir);
}
