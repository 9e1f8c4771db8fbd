#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "segeval/cli.hpp"
#include "segeval/dataset.hpp"
#include "segeval/io.hpp"
#include "segeval/synthgen.hpp"
#include "test_util.hpp"

namespace segeval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json strip_timestamps(json j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [k, v] : j.items()) v = strip_timestamps(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timestamps(v);
  }
  return j;
}

std::map<std::string, json> load_dir(const fs::path& dir) {
  std::map<std::string, json> out;
  for (const auto& e : fs::directory_iterator(dir))
    out[e.path().filename().string()] = strip_timestamps(read_json_file(e.path()));
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write_dataset(dir / "data", make_demo_dataset(5, 17));
    const auto* e = load_dataset(dir / "data").find("demo01");
    write_segmentation(dir / "seg.json",
                       SegmentationResult("demo01", {10, 50.5, e->ground_truth.times().back()}));
  }
  std::vector<std::string> evaluate_args() const {
    return {"evaluate", "--recording", (dir / "data" / "demo01.rec.json").string(),
            "--gt", (dir / "data" / "demo01.gt.json").string(), "--seg", (dir / "seg.json").string()};
  }
  test::TempDir dir;
};

TEST_F(CliTest, EvaluatePrintsReport) {
  const auto r = run_cli(evaluate_args());
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["recording"], "demo01");
  EXPECT_EQ(j["config"]["margin_ms"], 200.0);
  EXPECT_FALSE(j["generated_at"].get<std::string>().empty());
}

TEST_F(CliTest, EvaluateWritesCsvAndPlotData) {
  auto args = evaluate_args();
  args.insert(args.begin(), {"--format", "csv", "--out", (dir / "out").string()});
  args.insert(args.end(), {"--emit-plotdata", (dir / "plot.csv").string(), "--plot-step", "1"});
  const auto r = run_cli(args);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::ifstream csv(dir / "out" / "demo01.report.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kReportCsvHeader);
  std::ifstream plot(dir / "plot.csv");
  std::getline(plot, header);
  EXPECT_EQ(header, "t,f_s,f_gt,e_c");
}

TEST_F(CliTest, EvaluateMissingGroundTruthIsInvalidInput) {
  auto args = evaluate_args();
  args[4] = (dir / "missing.gt.json").string();
  const auto r = run_cli(args);
  EXPECT_EQ(r.code, cli::kExitInvalidInput);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, DiracKernelEqualsConventional) {
  auto args = evaluate_args();
  args.insert(args.begin(), {"--kernel", "dirac"});
  const auto r = run_cli(args);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = json::parse(r.out);
  for (const char* g : {"rough", "medium", "fine"})
    EXPECT_EQ(j["cells"][g]["ink"], j["cells"][g]["conventional"]) << g;
}

TEST_F(CliTest, BadFlagsAreInvalidInput) {
  EXPECT_EQ(run_cli({"--kernel", "box", "scenarios"}).code, cli::kExitInvalidInput);
  EXPECT_EQ(run_cli({"--margin-ms", "-3", "scenarios"}).code, cli::kExitInvalidInput);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitInvalidInput);
  EXPECT_EQ(run_cli({}).code, cli::kExitInvalidInput);
}

TEST_F(CliTest, Scenarios) {
  const auto r = run_cli({"scenarios"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("a)        1.00   1.00   1.00"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("b)        0.00   1.00   0.76"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("g)        0.00   0.00   0.00"), std::string::npos) << r.out;
  const auto csv = run_cli({"--format", "csv", "scenarios"});
  EXPECT_EQ(csv.out.rfind("scenario,f1,f1_margin,f1_ink,reconstructed\n", 0), 0u);
}

TEST_F(CliTest, RunIsDeterministic) {
  for (const char* algo : {"zvc", "ssav", "pca"}) {
    const auto a = run_cli({"--out", (dir / "a" / algo).string(), "run", "--algo", algo, "--data",
                            (dir / "data").string()});
    const auto b = run_cli({"--out", (dir / "b" / algo).string(), "run", "--algo", algo, "--data",
                            (dir / "data").string()});
    ASSERT_EQ(a.code, cli::kExitOk) << a.err;
    ASSERT_EQ(b.code, cli::kExitOk) << b.err;
    const auto ra = load_dir(dir / "a" / algo);
    EXPECT_EQ(ra.size(), 6u);
    EXPECT_EQ(ra, load_dir(dir / "b" / algo));
    EXPECT_EQ(ra.at("demo00.report.json")["provenance"]["algorithm"], algo);
  }
}

TEST_F(CliTest, RunRejectsUnknownAlgorithm) {
  const auto r = run_cli({"run", "--algo", "hmm", "--data", (dir / "data").string()});
  EXPECT_EQ(r.code, cli::kExitInvalidInput);
}

TEST_F(CliTest, RunAcceptsParameterFile) {
  write_text_file(dir / "p.json", R"({"refractory": 25})");
  const auto r = run_cli({"--out", (dir / "p").string(), "run", "--algo", "zvc", "--data",
                          (dir / "data").string(), "--params", (dir / "p.json").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rep = read_json_file(dir / "p" / "demo00.report.json");
  EXPECT_EQ(rep["provenance"]["algorithm_params"]["refractory"], 25);
}

TEST_F(CliTest, GenerateAndReport) {
  write_text_file(dir / "gen.json", R"({"name":"g","version":"1","seed":3,"recordings":[
    {"name":"jw","activities":[{"kind":"jump","frames":100,"amplitudes":[0.5]},
                               {"kind":"walk","frames":300,"repetitions":3,"amplitudes":[0.3]}]}]})");
  auto r = run_cli({"generate", "--spec", (dir / "gen.json").string()});
  EXPECT_EQ(r.code, cli::kExitInvalidInput);  // --out is required
  r = run_cli({"--out", (dir / "gen").string(), "generate", "--spec", (dir / "gen.json").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "gen" / "jw.gt.json"));

  r = run_cli({"--out", (dir / "rep").string(), "evaluate", "--recording",
               (dir / "gen" / "jw.rec.json").string(), "--gt", (dir / "gen" / "jw.gt.json").string(),
               "--seg", (dir / "seg.json").string()});
  EXPECT_EQ(r.code, cli::kExitInvalidInput);  // segmentation names another recording

  const auto report = run_cli({"--out", (dir / "rep").string(), "run", "--algo", "zvc", "--data",
                               (dir / "gen").string()});
  ASSERT_EQ(report.code, cli::kExitOk) << report.err;
  r = run_cli({"--format", "csv", "report", "--in", (dir / "rep" / "jw.report.json").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind(kReportCsvHeader, 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 10);
}

}  // namespace
}  // namespace segeval
