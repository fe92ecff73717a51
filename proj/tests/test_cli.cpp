#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct outcome {
  int status = -1;
  std::string out;
};

outcome cli(std::string const& args) {
  std::string const cmd = std::string(TEMOF_CLI_PATH) + " " + args + " 2>&1";
  outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    return o;
  }
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) {
    o.out += buf.data();
  }
  int const raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

fs::path scratch(std::string const& name) {
  auto const dir = fs::temp_directory_path() / ("temof_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST(Cli, BenchList) {
  auto const r = cli("bench list");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("DTLZ2"), std::string::npos);
  EXPECT_NE(r.out.find("ZDT6"), std::string::npos);
}

TEST(Cli, MetricHvAndIgd) {
  auto const dir = scratch("metric");
  std::ofstream(dir / "front.csv") << "0.25,0.75\n0.75,0.25\n";
  std::ofstream(dir / "ref.csv") << "1,1\n";
  std::ofstream(dir / "truth.csv") << "0,1\n1,0\n";
  auto const hv = cli("metric hv --front " + (dir / "front.csv").string() + " --ref " + (dir / "ref.csv").string());
  EXPECT_EQ(hv.status, 0);
  EXPECT_EQ(hv.out, "HV,0.3125,exact\n");
  std::ofstream(dir / "one.csv") << "0,1\n";
  auto const igd = cli("metric igd --front " + (dir / "one.csv").string() + " --ref " + (dir / "truth.csv").string());
  EXPECT_EQ(igd.status, 0);
  EXPECT_EQ(igd.out.rfind("IGD,0.7071067811865", 0), 0U) << igd.out;
  fs::remove_all(dir);
}

TEST(Cli, RunSummarizeRanks) {
  auto const dir = scratch("run");
  auto const run = cli("run --problem ZDT1,DTLZ2 --algo nsga3,temof-nsga3 --seeds 3 --max-fes 300 --n 20 "
                       "--front-samples 100 --workers 1 --out " + dir.string());
  ASSERT_EQ(run.status, 0) << run.out;
  EXPECT_NE(run.out.find("executed 12 runs"), std::string::npos) << run.out;
  EXPECT_TRUE(fs::exists(dir / "runs.csv"));
  EXPECT_TRUE(fs::exists(dir / "metadata.json"));

  auto const again = cli("run --problem ZDT1,DTLZ2 --algo nsga3,temof-nsga3 --seeds 3 --max-fes 300 --n 20 "
                         "--front-samples 100 --workers 1 --out " + dir.string());
  EXPECT_NE(again.out.find("executed 0 runs, skipped 12"), std::string::npos) << again.out;

  auto const sum = cli("report summarize --dir " + dir.string() + " --base nsga3 --metric IGD");
  ASSERT_EQ(sum.status, 0) << sum.out;
  EXPECT_NE(sum.out.find("| Problem | temof-nsga3 | nsga3 |"), std::string::npos) << sum.out;
  EXPECT_NE(sum.out.find("+/-/="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "summary_IGD.md"));
  EXPECT_TRUE(fs::exists(dir / "summary_IGD.csv"));

  auto const ranks = cli("report ranks --dir " + dir.string());
  ASSERT_EQ(ranks.status, 0) << ranks.out;
  EXPECT_NE(ranks.out.find("metric,algorithm,mean_rank"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "ranks.csv"));
  fs::remove_all(dir);
}

TEST(Cli, ConfigFile) {
  auto const dir = scratch("config");
  std::ofstream(dir / "exp.json") << R"({"problems": ["ZDT2"], "algorithms": ["nsga3"],
    "seeds": [1, 2], "n": 12, "max_fes": 120, "metrics": ["GD"], "front_samples": 50,
    "output": ")" << (dir / "out").string() << "\"}";
  auto const r = cli("run --workers 1 --config " + (dir / "exp.json").string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("executed 2 runs"), std::string::npos) << r.out;
  fs::remove_all(dir);
}

TEST(Cli, BadArgumentsFail) {
  EXPECT_NE(cli("").status, 0);
  EXPECT_NE(cli("run --problem NOPE --seeds 1 --out /tmp/temof_cli_nope").status, 0);
  auto const r = cli("run --problem DTLZ2 --p 1.5 --seeds 1 --out /tmp/temof_cli_nope");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("error:"), std::string::npos);
  EXPECT_NE(cli("report summarize --dir /nonexistent_dir_temof").status, 0);
  EXPECT_NE(cli("metric r2 --front /etc/hostname --ref /etc/hostname").status, 0);
  fs::remove_all("/tmp/temof_cli_nope");
}
