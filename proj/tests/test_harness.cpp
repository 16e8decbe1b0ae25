#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sconv/harness/run.hpp"

using namespace sconv;
using namespace sconv::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sconv_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, SectionsCommentsAndLists) {
  const auto c = Config::from_string("top = 1\n[a]\n# note\nx = 2.5\ny = 2^3:5, 7\nz = 1:3\nflag = yes\n");
  EXPECT_EQ(c.integer("top"), 1);
  EXPECT_DOUBLE_EQ(c.num("a.x"), 2.5);
  EXPECT_EQ(c.list("a.y"), (std::vector<double>{8, 16, 32, 7}));
  EXPECT_EQ(c.int_list("a.z"), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_TRUE(c.flag("a.flag", false));
  EXPECT_EQ(c.str("a.missing", "d"), "d");
  EXPECT_THROW(c.str("a.missing"), ConfigError);
  EXPECT_THROW(c.integer("a.x"), ConfigError);
}

TEST(Config, Malformed) {
  EXPECT_THROW(Config::from_string("[a\n"), ConfigError);
  EXPECT_THROW(Config::from_string("[a]\nx = 1\n[a]\ny = 2\n"), ConfigError);
  EXPECT_THROW(Config::from_string("novalue\n"), ConfigError);
  EXPECT_THROW(Config::from_string("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(Config::from_string("x = 5:3\n").list("x"), ConfigError);
}

TEST(ExperimentConfig, Invariants) {
  EXPECT_NO_THROW(ExperimentConfig::from(Config::from_string("[run]\nkind = lemcon\n")));
  EXPECT_THROW(ExperimentConfig::from(Config::from_string("[run]\nkind = x\ntheta = 1/8\n")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from(Config::from_string("[run]\nkind = x\n[grid]\nX = 32, 128\n")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from(Config::from_string("[run]\nkind = x\n[a]\ntol = 0\n")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from(Config::from_string("[run]\nkind = x\nworkers = 0\n")), ConfigError);
  const auto e = ExperimentConfig::from(Config::from_string("[run]\nkind = lemcon\ntheta = 1/4\nseed = 9\n"));
  EXPECT_EQ(e.theta, Theta::weil);
  EXPECT_EQ(e.seed, 9u);
  EXPECT_EQ(e.output_dir, "out/lemcon");
}

TEST(Output, SeventeenDigits) {
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(fmt17(1.0), "1");
  for (double v : {1.0 / 3.0, 2.0e-300, -12345.678901234567}) EXPECT_EQ(std::stod(fmt17(v)), v);
  CsvTable t("n,value");
  t.row({std::int64_t{3}, 0.1});
  EXPECT_EQ(t.text(), "n,value\n3,0.10000000000000001\n");
  EXPECT_THROW(t.row({1.0}), std::logic_error);
}

TEST(Output, JsonRecord) {
  JsonRecord j;
  j.add("a", std::string("x\"y")).add("b", 0.5).add("c", std::int64_t{2}).add("d", true).add_null("e");
  EXPECT_EQ(j.text(), "{\"a\":\"x\\\"y\",\"b\":0.5,\"c\":2,\"d\":true,\"e\":null}");
  const auto m = harness::detail::parse_flat_json(j.text());
  EXPECT_EQ(m.at("a"), "x\"y");
  EXPECT_EQ(m.at("b"), "0.5");
}

TEST(Parallel, OrderedAndWorkerIndependent) {
  auto f = [](std::size_t i) { return std::sqrt(static_cast<double>(i)) * 1.1; };
  const auto a = ordered_map<double>(1000, 1, f), b = ordered_map<double>(1000, 4, f);
  EXPECT_EQ(a, b);
  EXPECT_THROW(ordered_map<double>(10, 3,
                                   [](std::size_t i) -> double {
                                     if (i == 7) throw std::runtime_error("boom");
                                     return 0.0;
                                   }),
               std::runtime_error);
}

TEST(Report, EmptyDirectoryIsAllSkipped) {
  const auto d = scratch("empty");
  const auto s = report_render(d);
  EXPECT_EQ(s.skipped, 12);
  EXPECT_EQ(s.pass + s.fail + s.report, 0);
}

TEST(Report, SinglePassingCriterion) {
  const auto d = scratch("single");
  JsonLines l;
  l.add(CriterionResult{4, "hyperbola", 1e-15, 1e-9, Status::pass, ""}.json());
  l.write(d / "summary.jsonl");
  const auto s = report_render(d);
  EXPECT_EQ(s.pass, 1);
  EXPECT_EQ(s.skipped, 11);
  EXPECT_NE(s.text.find("PASS"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "report.csv"));
}

TEST(Report, MixedRunAggregates) {
  const auto d = scratch("mixed");
  JsonLines a, b;
  a.add(CriterionResult{1, "delta", 0, 1e-8, Status::pass, ""}.json());
  a.add(CriterionResult{9, "envelope", 0.3, 0.92, Status::pass, ""}.json());
  a.add(CriterionResult{9, "alpha", 0.7, 0.61, Status::report, ""}.json());
  b.add(CriterionResult{8, "tail", 40, 1e-3, Status::fail, "lower bound"}.json());
  a.write(d / "one" / "summary.jsonl");
  b.write(d / "two" / "summary.jsonl");
  const auto s = report_render(d);
  EXPECT_EQ(s.pass, 2);
  EXPECT_EQ(s.report, 1);
  EXPECT_EQ(s.fail, 1);
  EXPECT_EQ(s.skipped, 9);
}

TEST(Run, ConfigErrorsExitTwoWithJson) {
  const auto d = scratch("run");
  std::ofstream(d / "bad.cfg") << "[run]\nkind = nope\n";
  std::ostringstream out, err;
  EXPECT_EQ(run((d / "bad.cfg").string(), out, err, (d / "o").string()), 2);
  EXPECT_NE(err.str().find("\"error\":\"config\""), std::string::npos);
  EXPECT_EQ(run((d / "missing.cfg").string(), out, err), 2);
  std::ofstream(d / "lemcon.cfg") << "[run]\nkind = lemcon\n[lemcon]\nlimit = 80\nh = 1, 5\n";
  EXPECT_EQ(run((d / "lemcon.cfg").string(), out, err, (d / "o").string()), 0);
  EXPECT_TRUE(fs::exists(d / "o" / "lemcon.csv"));
  EXPECT_TRUE(fs::exists(d / "o" / "summary.jsonl"));
}

TEST(Run, HardFailureExitsOne) {
  const auto d = scratch("fail");
  std::ofstream(d / "p.cfg") << "[run]\nkind = partition-unity\n[partition]\npoints = 50\ntol = 1e-300\n";
  std::ostringstream out, err;
  EXPECT_EQ(run((d / "p.cfg").string(), out, err, (d / "o").string()), 1);
  EXPECT_NE(out.str().find("FAIL"), std::string::npos);
}

TEST(Determinism, CsvGap) {
  EXPECT_EQ(harness::detail::csv_numeric_gap("a,b\n1,2\n", "a,b\n1,2\n"), 0.0);
  EXPECT_NEAR(harness::detail::csv_numeric_gap("a\n1\n", "a\n1.000001\n"), 1e-6, 1e-9);
  EXPECT_TRUE(std::isinf(harness::detail::csv_numeric_gap("a\n1\n", "a\n1\n2\n")));
}

TEST(Workers, EnvironmentDefault) {
  setenv(kWorkersEnv, "3", 1);
  EXPECT_EQ(default_workers(), 3);
  setenv(kWorkersEnv, "zero", 1);
  EXPECT_THROW(default_workers(), ConfigError);
  unsetenv(kWorkersEnv);
  EXPECT_EQ(default_workers(), 1);
}
