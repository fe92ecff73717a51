#include <temof/harness.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace temof;
using namespace temof::harness;

namespace {

fs::path scratch(std::string const& name) {
  auto const dir = fs::temp_directory_path() / ("temof_test_" + name);
  fs::remove_all(dir);
  return dir;
}

experiment_config tiny(fs::path const& out) {
  experiment_config c;
  c.problems = {{"ZDT1", 0, 0}, {"DTLZ2", 0, 0}};
  c.algorithms.resize(2);
  c.algorithms[0].kind = "nsga3";
  c.algorithms[1].kind = "temof-nsga3";
  c.runs = 5;
  c.n = 20;
  c.max_fes = 400;
  c.front_samples = 200;
  c.output = out;
  return c;
}

std::string read_all(fs::path const& f) {
  std::ifstream in(f);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// runs.csv without the wall_ms column.
std::string indicator_columns(fs::path const& dir) {
  std::istringstream in(read_all(dir / runs_file));
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    out += line.substr(0, line.rfind(',')) + '\n';
  }
  return out;
}

run_record rec(std::string p, std::string a, std::uint64_t seed, double v) {
  run_record r;
  r.fingerprint = p + a + std::to_string(seed);
  r.problem = std::move(p);
  r.algorithm = std::move(a);
  r.seed = seed;
  r.values = {{"IGD", v}};
  return r;
}

} // namespace

TEST(FormatSci, TwoSignificantDigits) {
  EXPECT_EQ(format_sci(14.3), "1.4e+1");
  EXPECT_EQ(format_sci(0.76), "7.6e-1");
  EXPECT_EQ(format_sci(0.0), "0.0e+0");
  EXPECT_EQ(format_sci(-2.5e-7), "-2.5e-7");
}

TEST(Matrix, RunsEveryCombinationAndResumes) {
  auto const dir = scratch("resume");
  auto const c = tiny(dir);
  auto const first = run_matrix(c, 1);
  EXPECT_EQ(first.executed, 20U);
  EXPECT_EQ(first.records.size(), 20U);
  EXPECT_TRUE(first.failures.empty());
  EXPECT_EQ(load_records(dir).size(), 20U);
  for (auto const& r : first.records) {
    EXPECT_TRUE(r.value_of("IGD").has_value());
    EXPECT_TRUE(r.value_of("HV").has_value());
    EXPECT_EQ(r.fes, 420U);
  }
  auto const second = run_matrix(c, 1);
  EXPECT_EQ(second.executed, 0U);
  EXPECT_EQ(second.skipped, 20U);
  EXPECT_EQ(load_records(dir).size(), 20U);
  EXPECT_TRUE(fs::exists(dir / metadata_file));
  auto const meta = json::parse(read_all(dir / metadata_file));
  EXPECT_EQ(meta["config"]["seeds"].size(), 5U);
  fs::remove_all(dir);
}

TEST(Matrix, DeterministicAcrossDirectoriesAndWorkerCounts) {
  auto const d1 = scratch("det1");
  auto const d2 = scratch("det2");
  run_matrix(tiny(d1), 1);
  run_matrix(tiny(d2), 3);
  EXPECT_EQ(indicator_columns(d1), indicator_columns(d2));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Matrix, ChangedParameterGetsNewFingerprint) {
  auto const c = tiny("unused");
  auto c2 = c;
  c2.max_fes = 800;
  EXPECT_NE(fingerprint(c, c.problems[0], c.algorithms[0], 1), fingerprint(c2, c2.problems[0], c2.algorithms[0], 1));
  EXPECT_EQ(fingerprint(c, c.problems[0], c.algorithms[0], 1), fingerprint(c, c.problems[0], c.algorithms[0], 1));
}

TEST(Matrix, FailedRunIsRecordedAndMatrixContinues) {
  auto const dir = scratch("fail");
  auto c = tiny(dir);
  c.problems = {{"ZDT1", 0, 0}};
  c.runs = 2;
  auto const res = run_matrix(c, 1, [](auto const& cfg, auto const& ctx, auto const& a, std::uint64_t seed) {
    if (a.kind == "temof-nsga3") {
      throw evaluation_error("objective 0 is not finite");
    }
    return execute_run(cfg, ctx, a, seed);
  });
  EXPECT_EQ(res.records.size() + res.failures.size(), 4U);
  EXPECT_EQ(res.records.size(), 2U);
  EXPECT_FALSE(res.failures.empty());
  EXPECT_EQ(res.failures.size(), 2U);
  EXPECT_NE(read_all(dir / failures_file).find("not finite"), std::string::npos);
  // failed runs are retried on resume
  EXPECT_EQ(run_matrix(c, 1).executed, 2U);
  fs::remove_all(dir);
}

TEST(Matrix, UnwritableDirectory) {
  auto c = tiny("/proc/temof_cannot_write_here");
  EXPECT_THROW(run_matrix(c, 1), io_error);
}

TEST(Config, ParsesJson) {
  auto const j = json::parse(R"({
    "problems": ["DTLZ2", {"name": "ZDT1", "n_var": 12}],
    "algorithms": ["nsga3", {"name": "temof-nsga3", "label": "temof-p0.3", "p": 0.3}],
    "seeds": {"master_seed": 7, "runs": 3},
    "n": 40, "max_fes": 2000, "metrics": ["igd", "GD"], "target": "archive",
    "output": "out_dir"
  })");
  auto const c = config_from_json(j);
  ASSERT_EQ(c.problems.size(), 2U);
  EXPECT_EQ(c.problems[1].n_var, 12U);
  EXPECT_EQ(c.algorithms[1].display(), "temof-p0.3");
  EXPECT_EQ(c.framework_for(c.algorithms[1]).p, 0.3);
  EXPECT_EQ(c.framework_for(c.algorithms[0]).p, 0.5);
  EXPECT_EQ(c.seed_list().size(), 3U);
  EXPECT_EQ(c.metrics.size(), 2U);
  EXPECT_EQ(c.target, indicator_target::archive);
  EXPECT_EQ(c.output, fs::path("out_dir"));
  EXPECT_NO_THROW(c.validate());

  EXPECT_THROW(config_from_json(json::parse(R"({"problems": ["DTLZ2"]})")), config_error);
  auto bad = c;
  bad.algorithms[0].kind = "moead";
  EXPECT_THROW(bad.validate(), config_error);
  auto dup = c;
  dup.algorithms[1].label = "nsga3";
  EXPECT_THROW(dup.validate(), config_error);
}

TEST(Summary, TableMarksFooterAndSignedRank) {
  std::vector<run_record> records;
  for (std::uint64_t s = 0; s < 10; ++s) {
    records.push_back(rec("P1", "base", s, 10.0 + static_cast<double>(s)));
    records.push_back(rec("P1", "alt", s, 1.0 + 0.1 * static_cast<double>(s)));
    records.push_back(rec("P2", "base", s, 1.0 + 0.1 * static_cast<double>(s)));
    records.push_back(rec("P2", "alt", s, 10.0 + static_cast<double>(s)));
    records.push_back(rec("P3", "base", s, static_cast<double>(s)));
    records.push_back(rec("P3", "alt", s, static_cast<double>(9 - s)));
  }
  auto const t = summarize(records, "base", "IGD", 0.05);
  ASSERT_EQ(t.algorithms, (std::vector<std::string>{"alt", "base"}));
  EXPECT_EQ(t.cells[0][0].vs_base->result, stats::mark::better);
  EXPECT_EQ(t.cells[1][0].vs_base->result, stats::mark::worse);
  EXPECT_EQ(t.cells[2][0].vs_base->result, stats::mark::equal);
  EXPECT_FALSE(t.cells[0][1].vs_base.has_value());
  EXPECT_TRUE(t.cells[0][0].best);
  EXPECT_TRUE(t.cells[1][1].best);
  auto const& f = t.footer[0];
  EXPECT_EQ(f.better + f.worse + f.equal, 3U);
  EXPECT_EQ(f.better, 1U);
  EXPECT_EQ(f.worse, 1U);
  ASSERT_TRUE(t.signed_ranks[0].has_value());
  EXPECT_NEAR(t.signed_ranks[0]->r_plus + t.signed_ranks[0]->r_minus, 3.0, 1e-12);
  EXPECT_EQ(t.cells[0][1].text(), "1.4e+1 (3.0e+0)");
  auto const md = render_markdown(t);
  EXPECT_NE(md.find("**1.5e+0 (3.0e-1) +**"), std::string::npos) << md;
  EXPECT_NE(md.find("| +/-/= | 1/1/1 |"), std::string::npos);
  EXPECT_NE(md.find("R+"), std::string::npos);
}

TEST(Summary, MissingCellShowsDash) {
  std::vector<run_record> records;
  for (std::uint64_t s = 0; s < 3; ++s) {
    records.push_back(rec("P1", "base", s, 1.0 + static_cast<double>(s)));
    records.push_back(rec("P1", "alt", s, 2.0 + static_cast<double>(s)));
    records.push_back(rec("P2", "base", s, 1.0 + static_cast<double>(s)));
  }
  auto const t = summarize(records, "base", "IGD", 0.05);
  EXPECT_FALSE(t.cells[1][0].present);
  EXPECT_EQ(t.cells[1][0].text(), "—");
  EXPECT_THROW(summarize(records, "nobody", "IGD", 0.05), usage_error);
}

TEST(Ranks, FriedmanRowsAreConsistent) {
  std::vector<run_record> records;
  for (std::uint64_t s = 0; s < 3; ++s) {
    for (std::string p : {"P1", "P2", "P3"}) {
      records.push_back(rec(p, "a", s, 1.0));
      records.push_back(rec(p, "b", s, 2.0));
      records.push_back(rec(p, "c", s, 3.0));
    }
  }
  auto const rows = rank_report(records, {"IGD"});
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[0].algorithm, "a");
  EXPECT_EQ(rows[0].mean_rank, 1.0);
  EXPECT_EQ(rows[2].mean_rank, 3.0);
  EXPECT_EQ(rows[0].n_problems, 3U);
  double total = 0;
  for (auto const& r : rows) {
    total += r.mean_rank;
  }
  EXPECT_NEAR(total / 3.0, 2.0, 1e-12);
  EXPECT_NE(render_ranks_csv(rows).find("IGD,a,1,"), std::string::npos);
}

TEST(PointsCsv, ReadsRows) {
  auto const dir = scratch("points");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "f.csv");
    out << "0.5,0.5\n0.25, 0.75\n\n";
  }
  auto const pts = read_points_csv(dir / "f.csv");
  ASSERT_EQ(pts.size(), 2U);
  EXPECT_EQ(pts[1], (objective_vector{0.25, 0.75}));
  EXPECT_THROW(read_points_csv(dir / "missing.csv"), io_error);
  fs::remove_all(dir);
}
