#include "iideval/cli.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

namespace iideval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("iideval_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    // 100 points, 12 attack points in three scenarios.
    std::string labels = "timestamp,label\n";
    for (int i = 0; i < 100; ++i) {
      const bool attack = (i >= 10 && i < 14) || (i >= 40 && i < 44) || (i >= 70 && i < 74);
      labels += std::to_string(1000 + i) + "," + (attack ? "intrusion" : "benign") + "\n";
    }
    write("labels.csv", labels);
    write("swat.json", R"({"name": "swat", "labels": "labels.csv", "tick_duration_s": 1})");
    write_alerts("early.jsonl", [](int i) { return i >= 10 && i < 12; });
    write_alerts("late.jsonl", [](int i) { return (i >= 42 && i < 44) || i == 90; });
    write_alerts("noisy.jsonl", [](int i) { return i % 3 == 0; });
    std::string scored;
    for (int i = 0; i < 100; ++i) {
      scored += "{\"timestamp\":" + std::to_string(1000 + i) + ",\"score\":" +
                std::to_string((i * 37) % 100 / 100.0 + ((i >= 10 && i < 14) ? 0.5 : 0.0)) +
                "}\n";
    }
    write("scored.jsonl", scored);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }

  template <typename Pred>
  void write_alerts(const std::string& name, Pred alert) {
    std::string text;
    for (int i = 0; i < 100; ++i) {
      text += "{\"timestamp\":" + std::to_string(1000 + i) +
              ",\"alert\":" + (alert(i) ? "true" : "false") + "}\n";
    }
    write(name, text);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliRun run(std::vector<std::string> args, std::optional<std::string> env = std::nullopt) {
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(args, out, err, env);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  fs::path dir_;
};

// Exactly one error line with the machine-parsable prefix.
void expect_single_error_line(const CliRun& r) {
  static const std::regex prefix(R"(^iideval: error\[[a-z]+\]: .+\n$)");
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(std::regex_match(r.err, prefix)) << r.err;
}

TEST_F(CliTest, EvaluateTwoMetricsJson) {
  const auto r = run({"evaluate", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
                      "--metrics", "accuracy,f1", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(dir_ / "out" / "early.report.json"));
  EXPECT_EQ(j["dataset"], "swat");
  EXPECT_EQ(j["detector"], "early");
  ASSERT_EQ(j["metrics"].size(), 2u);
  EXPECT_FALSE(j["metrics"][0]["value"].is_null());
  EXPECT_FALSE(j["metrics"][1]["value"].is_null());
  EXPECT_EQ(r.out, (dir_ / "out" / "early.report.json").string() + "\n");
}

TEST_F(CliTest, NeverBaselineAccuracy) {
  const auto r = run({"evaluate", "--config", path("swat.json"), "--detector",
                      "baseline:never", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(dir_ / "out" / "baseline_never.report.json"));
  bool found = false;
  for (const auto& m : j["metrics"]) {
    if (m["key"] == "accuracy") {
      EXPECT_EQ(m["value"].get<double>(), 0.88);
      found = true;
    }
    if (m["key"] == "ppv") EXPECT_TRUE(m["value"].is_null());
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, UnknownMetricExitsTwoAndListsCatalog) {
  const auto r = run({"evaluate", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
                      "--metrics", "foo", "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
  EXPECT_NE(r.err.find("unknown metric 'foo'"), std::string::npos);
  EXPECT_NE(r.err.find("accuracy"), std::string::npos);
  EXPECT_NE(r.err.find("affiliation"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, EvaluateCopiesRawAlerts) {
  const auto r = run({"evaluate", "--config", path("swat.json"), "--alerts",
                      "ids=" + path("late.jsonl"), "--detector", "baseline:random:p=0.5:seed=3",
                      "--metrics", "f1", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "out" / "alerts" / "ids.jsonl"), slurp(dir_ / "late.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "alerts" / "baseline_random_p_0.5_seed_3.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "ids.report.json"));
}

TEST_F(CliTest, EvaluateTableFormats) {
  auto r = run({"evaluate", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
                "--metrics", "accuracy,ppv", "--format", "md", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "out" / "early.report.md"),
            "| detector | accuracy | ppv |\n|---|---:|---:|\n| early | 0.900 | 1.000 |\n");
  r = run({"evaluate", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
           "--format", "svg", "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
}

TEST_F(CliTest, CompareThreeDetectorsAndBaseline) {
  const std::vector<std::string> base{"compare", "--config", path("swat.json"),
                                      "--alerts", path("early.jsonl"),
                                      "--alerts", path("late.jsonl"),
                                      "--alerts", path("noisy.jsonl"),
                                      "--format", "csv"};
  auto args = base;
  args.insert(args.end(), {"--out", path("three")});
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  auto csv = slurp(dir_ / "three" / "comparison.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);

  args = base;
  args.insert(args.end(), {"--detector", "baseline:random:p=0.5:seed=1", "--out", path("a")});
  ASSERT_EQ(run(args).code, 0);
  args.back() = path("b");
  ASSERT_EQ(run(args).code, 0);
  csv = slurp(dir_ / "a" / "comparison.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("baseline:random:p=0.5:seed=1"), std::string::npos);
  EXPECT_EQ(csv, slurp(dir_ / "b" / "comparison.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "alerts" / "baseline_random_p_0.5_seed_1.jsonl"),
            slurp(dir_ / "b" / "alerts" / "baseline_random_p_0.5_seed_1.jsonl"));
}

TEST_F(CliTest, CompareRankBy) {
  const auto r = run({"compare", "--config", path("swat.json"), "--detector", "baseline:never",
                      "--alerts", path("noisy.jsonl"), "--alerts", path("early.jsonl"),
                      "--metrics", "etapr", "--rank-by", "etaf1", "--format", "json",
                      "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(dir_ / "out" / "comparison.json"));
  ASSERT_EQ(j["rows"].size(), 3u);
  const double first = j["rows"][0]["values"]["etaf1"].get<double>();
  const double second = j["rows"][1]["values"]["etaf1"].get<double>();
  EXPECT_GE(first, second);
  EXPECT_EQ(j["rows"][2]["detector"], "baseline:never");
  EXPECT_TRUE(j["rows"][2]["values"]["etaf1"].is_null());
}

TEST_F(CliTest, CompareNeedsTwoDetectors) {
  const auto r = run({"compare", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
                      "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
}

TEST_F(CliTest, CompareRejectsUnknownRankColumn) {
  const auto r = run({"compare", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
                      "--alerts", path("late.jsonl"), "--metrics", "f1", "--rank-by", "etaf1",
                      "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
}

TEST_F(CliTest, TimelineMinWidthAndExempt) {
  const std::vector<std::string> args{
      "timeline", "--config", path("swat.json"), "--alerts", path("late.jsonl"),
      "--detector", "baseline:random:p=0.5:seed=2", "--min-width", "60s",
      "--exempt", "baseline:random:p=0.5:seed=2"};
  auto a = args;
  a.insert(a.end(), {"--out", path("a")});
  auto r = run(a);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto svg = slurp(dir_ / "a" / "timeline.svg");
  // The lone alert at point 90 (tick 1090) is drawn 60 ticks wide.
  EXPECT_NE(svg.find("data-start=\"1090\" data-end=\"1091\" data-rendered-end=\"1150\" "
                     "data-widened=\"true\""),
            std::string::npos);
  const auto exempt_lane = svg.find("data-exempt=\"true\"");
  ASSERT_NE(exempt_lane, std::string::npos);
  EXPECT_EQ(svg.find("data-widened=\"true\"", exempt_lane), std::string::npos);
  a.back() = path("b");
  ASSERT_EQ(run(a).code, 0);
  EXPECT_EQ(svg, slurp(dir_ / "b" / "timeline.svg"));

  r = run({"timeline", "--config", path("swat.json"), "--alerts", path("late.jsonl"),
           "--exempt", "nobody", "--out", path("c")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
}

TEST_F(CliTest, RocAuto) {
  const auto r = run({"roc", "--config", path("swat.json"), "--alerts", path("scored.jsonl"),
                      "--auto", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir_ / "out" / "roc-scored.csv");
  EXPECT_EQ(csv.rfind("threshold,fpr,tpr\n+inf,0,0\n", 0), 0u);
  EXPECT_NE(csv.find("-inf,1,1\n"), std::string::npos);
  EXPECT_NE(r.out.find("auc scored "), std::string::npos);
}

TEST_F(CliTest, RocThresholdList) {
  const auto r = run({"roc", "--config", path("swat.json"), "--alerts", path("scored.jsonl"),
                      "--thresholds", "0.5,0.9", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir_ / "out" / "roc-scored.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(CliTest, RocRejectsBooleanAlerts) {
  const auto r = run({"roc", "--config", path("swat.json"), "--alerts", path("early.jsonl"),
                      "--auto", "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
  EXPECT_NE(r.err.find("evaluate"), std::string::npos);
}

TEST_F(CliTest, ScoredAlertsNeedThresholdInEvaluate) {
  auto r = run({"evaluate", "--config", path("swat.json"), "--alerts", path("scored.jsonl"),
                "--out", path("out")});
  EXPECT_EQ(r.code, 2);
  expect_single_error_line(r);
  r = run({"evaluate", "--config", path("swat.json"), "--alerts", path("scored.jsonl"),
           "--threshold", "0.9", "--metrics", "tpr", "--out", path("out")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, BaselineVerbWritesAlertFiles) {
  const auto r = run({"baseline", "--config", path("swat.json"), "--detector",
                      "baseline:random:p=0.2", "--seed", "9", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto file = dir_ / "out" / "alerts" / "baseline_random_p_0.2_seed_9.jsonl";
  ASSERT_TRUE(fs::exists(file));
  const auto text = slurp(file);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);
  EXPECT_EQ(text.rfind("{\"timestamp\":1000,", 0), 0u);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  auto r = run({"evaluate", "--config", path("swat.json"), "--detector", "baseline:never",
                "--metrics", "f1"},
               path("from-env"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "from-env" / "baseline_never.report.json"));
  r = run({"evaluate", "--config", path("swat.json"), "--detector", "baseline:never",
           "--metrics", "f1", "--out", path("flag")},
          path("ignored"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "flag" / "baseline_never.report.json"));
  EXPECT_FALSE(fs::exists(dir_ / "ignored"));
}

TEST_F(CliTest, InputFailuresExitThree) {
  write("bad.csv", "timestamp,label\n1,A\n1,A\n");
  write("bad.json", R"({"labels": "bad.csv"})");
  write("short.jsonl", "{\"timestamp\":1000,\"alert\":true}\n");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"evaluate", "--config", path("missing.json"), "--detector", "baseline:never"},
           {"evaluate", "--config", path("bad.json"), "--detector", "baseline:never"},
           {"evaluate", "--config", path("swat.json"), "--alerts", path("short.jsonl")},
           {"evaluate", "--config", path("swat.json"), "--alerts", path("absent.jsonl")}}) {
    auto a = args;
    a.insert(a.end(), {"--out", path("out")});
    const auto r = run(a);
    EXPECT_EQ(r.code, 3) << r.err;
    expect_single_error_line(r);
  }
}

TEST_F(CliTest, UsageFailuresExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"evaluate"},
           {"evaluate", "--config", path("swat.json")},
           {"evaluate", "--config", path("swat.json"), "--detector", "random"},
           {"evaluate", "--config", path("swat.json"), "--detector", "baseline:random:p=2"},
           {"evaluate", "--config", path("swat.json"), "--detector", "baseline:never",
            "--gap-tolerance", "-1"},
           {"evaluate", "--config", path("swat.json"), "--detector", "baseline:never",
            "--detector", "baseline:never"},
           {"evaluate", "--config", path("swat.json"), "--detector", "baseline:never",
            "--format", "png"},
           {"roc", "--config", path("swat.json"), "--alerts", path("scored.jsonl")},
           {"timeline", "--config", path("swat.json"), "--detector", "baseline:never",
            "--min-width", "1d"}}) {
    auto a = args;
    if (!a.empty() && a.size() > 1) a.insert(a.end(), {"--out", path("out")});
    const auto r = run(a);
    EXPECT_EQ(r.code, 2) << r.err;
    expect_single_error_line(r);
  }
}

TEST_F(CliTest, HelpAndListing) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("evaluate"), std::string::npos);
  r = run({"--list-metrics"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("etapr"), std::string::npos);
}

TEST_F(CliTest, EndToEndDeterminism) {
  const std::vector<std::string> args{"evaluate", "--config", path("swat.json"),
                                      "--alerts", path("noisy.jsonl"),
                                      "--detector", "baseline:random:p=0.5:seed=7"};
  auto a = args;
  a.insert(a.end(), {"--out", path("a")});
  ASSERT_EQ(run(a).code, 0);
  a.back() = path("b");
  ASSERT_EQ(run(a).code, 0);
  for (const auto& entry : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir_ / "a");
    EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / rel)) << rel;
  }
}

}  // namespace
}  // namespace iideval
