// temof command-line front end: benchmark listing, experiment runs, reports
// and standalone indicator evaluation.

#include <temof/temof.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace temof;

void write_file(fs::path const& path, std::string const& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw harness::io_error("cannot write " + path.string());
  }
  out << content;
}

std::vector<std::string> split_list(std::vector<std::string> const& items) {
  std::vector<std::string> out;
  for (auto const& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) {
        out.push_back(tok);
      }
    }
  }
  return out;
}

struct run_options {
  std::string config_file;
  std::vector<std::string> problems;
  std::vector<std::string> algorithms{"temof-nsga3"};
  std::size_t seeds = 20;
  std::uint64_t master_seed = 2024;
  std::size_t max_fes = 100'000;
  std::size_t n = 100;
  double p = 0.5;
  double stage_fraction = 0.5;
  std::size_t n_obj = 0;
  std::size_t n_var = 0;
  std::vector<std::string> metrics{"IGD", "HV"};
  std::string out = "results";
  std::size_t front_samples = 10'000;
  std::size_t hv_samples = metrics::default_hv_samples;
  std::string target = "population";
  std::size_t workers = 0;
};

int do_run(run_options const& o) {
  harness::experiment_config cfg;
  if (!o.config_file.empty()) {
    cfg = harness::load_config(o.config_file);
  } else {
    if (o.problems.empty()) {
      throw config_error("run needs --config or at least one --problem");
    }
    for (auto const& name : split_list(o.problems)) {
      cfg.problems.push_back({name, o.n_var, o.n_obj});
    }
    for (auto const& kind : split_list(o.algorithms)) {
      harness::algorithm_entry a;
      a.kind = kind;
      if (kind == "temof-nsga3") {
        a.p = o.p;
        a.stage_fraction = o.stage_fraction;
      }
      cfg.algorithms.push_back(std::move(a));
    }
    cfg.runs = o.seeds;
    cfg.master_seed = o.master_seed;
    cfg.max_fes = o.max_fes;
    cfg.n = o.n;
    cfg.metrics.clear();
    for (auto const& m : split_list(o.metrics)) {
      cfg.metrics.push_back(metrics::parse_indicator(m));
    }
    cfg.front_samples = o.front_samples;
    cfg.hv_samples = o.hv_samples;
    if (o.target != "population" && o.target != "archive") {
      throw config_error("--target must be population or archive");
    }
    cfg.target = o.target == "archive" ? harness::indicator_target::archive
                                       : harness::indicator_target::population;
    cfg.output = o.out;
  }
  auto const res = harness::run_matrix(cfg, o.workers);
  std::cout << "executed " << res.executed << " runs, skipped " << res.skipped
            << " completed runs, " << res.failures.size() << " failures; results in "
            << cfg.output.string() << "\n";
  for (auto const& f : res.failures) {
    std::cerr << "failed: " << f.problem << " / " << f.algorithm << " / seed " << f.seed << ": "
              << f.error << "\n";
  }
  return res.failures.empty() ? 0 : 3;
}

int do_summarize(std::string const& dir, std::string const& base, std::string const& metric,
                 double alpha, std::string const& agg) {
  auto const records = harness::load_records(dir);
  if (records.empty()) {
    throw harness::io_error("no run records in " + dir);
  }
  if (agg != "mean" && agg != "median") {
    throw config_error("--aggregate must be mean or median");
  }
  auto const table = harness::summarize(records, base, metric, alpha, harness::algorithm_order(dir),
                                        agg == "mean" ? harness::aggregate::mean : harness::aggregate::median);
  auto const md = harness::render_markdown(table);
  write_file(fs::path(dir) / ("summary_" + table.metric + ".md"), md);
  write_file(fs::path(dir) / ("summary_" + table.metric + ".csv"), harness::render_csv(table));
  std::cout << md;
  return 0;
}

int do_ranks(std::string const& dir, std::vector<std::string> metric_list) {
  auto const records = harness::load_records(dir);
  if (records.empty()) {
    throw harness::io_error("no run records in " + dir);
  }
  if (metric_list.empty()) {
    metric_list = harness::metric_names(records);
  }
  auto const rows = harness::rank_report(records, split_list(metric_list), harness::algorithm_order(dir));
  auto const csv = harness::render_ranks_csv(rows);
  write_file(fs::path(dir) / "ranks.csv", csv);
  std::cout << csv;
  return 0;
}

int do_metric(std::string const& which, std::string const& front_file, std::string const& ref_file,
              std::size_t samples, std::uint64_t seed) {
  auto const front = harness::read_points_csv(front_file);
  auto const ref = harness::read_points_csv(ref_file);
  auto const ind = metrics::parse_indicator(which);
  metrics::indicator_result r;
  switch (ind) {
  case metrics::indicator::igd:
    r = metrics::igd(front, ref);
    break;
  case metrics::indicator::gd:
    r = metrics::gd(front, ref);
    break;
  case metrics::indicator::hv:
    if (ref.size() != 1) {
      throw usage_error("hv expects --ref to hold exactly one reference point");
    }
    r = metrics::hv(front, ref.front(), samples, seed);
    break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", r.value);
  std::cout << metrics::to_string(ind) << ',' << buf << ','
            << (r.mode == metrics::hv_mode::exact ? "exact" : "monte_carlo");
  if (r.mode == metrics::hv_mode::monte_carlo) {
    std::cout << ',' << r.samples;
  }
  std::cout << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"temof: two-stage evolutionary multi-objective framework and experiment harness"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "benchmark registry");
  bench->require_subcommand(1);
  auto* bench_list = bench->add_subcommand("list", "list available problems");

  run_options ro;
  auto* run = app.add_subcommand("run", "run an experiment matrix");
  run->add_option("--config", ro.config_file, "JSON experiment config")->check(CLI::ExistingFile);
  run->add_option("--problem", ro.problems, "problem name(s), comma separated or repeated");
  run->add_option("--algo", ro.algorithms, "nsga3 and/or temof-nsga3")->capture_default_str();
  run->add_option("--seeds", ro.seeds, "number of independent runs")->capture_default_str();
  run->add_option("--master-seed", ro.master_seed, "seed the per-run seeds derive from")->capture_default_str();
  run->add_option("--max-fes", ro.max_fes, "evaluation budget per run")->capture_default_str();
  run->add_option("--n", ro.n, "population size")->capture_default_str();
  run->add_option("--p", ro.p, "archive mating probability")->capture_default_str();
  run->add_option("--stage-fraction", ro.stage_fraction, "budget fraction where stage two starts")
      ->capture_default_str();
  run->add_option("--n-obj", ro.n_obj, "objectives (0: family default)")->capture_default_str();
  run->add_option("--n-var", ro.n_var, "decision variables (0: family default)")->capture_default_str();
  run->add_option("--metrics", ro.metrics, "IGD, GD, HV")->capture_default_str();
  run->add_option("--out", ro.out, "output directory")->capture_default_str();
  run->add_option("--front-samples", ro.front_samples, "true-front reference points")->capture_default_str();
  run->add_option("--hv-samples", ro.hv_samples, "Monte Carlo HV samples (4+ objectives)")
      ->capture_default_str();
  run->add_option("--target", ro.target, "indicator target: population or archive")->capture_default_str();
  run->add_option("--workers", ro.workers, "worker threads (default: $TEMOF_WORKERS or all cores)");

  auto* report = app.add_subcommand("report", "tables and rankings from a result directory");
  report->require_subcommand(1);
  std::string dir = "results";
  std::string base = "nsga3";
  std::string metric = "IGD";
  double alpha = 0.05;
  std::string agg = "mean";
  auto* summarize = report->add_subcommand("summarize", "mean (std) table with rank-sum marks");
  summarize->add_option("--dir", dir, "result directory")->capture_default_str();
  summarize->add_option("--base", base, "base algorithm label")->capture_default_str();
  summarize->add_option("--metric", metric, "IGD, GD or HV")->capture_default_str();
  summarize->add_option("--alpha", alpha, "significance level")->capture_default_str();
  summarize->add_option("--aggregate", agg, "per-problem score for signed-rank: mean or median")
      ->capture_default_str();
  std::vector<std::string> rank_metrics;
  auto* ranks = report->add_subcommand("ranks", "Friedman mean ranks");
  ranks->add_option("--dir", dir, "result directory")->capture_default_str();
  ranks->add_option("--metrics", rank_metrics, "metrics to rank (default: all recorded)");

  auto* metric_cmd = app.add_subcommand("metric", "evaluate an indicator on external CSV files");
  std::string which;
  std::string front_file;
  std::string ref_file;
  std::size_t samples = metrics::default_hv_samples;
  std::uint64_t seed = 0;
  metric_cmd->add_option("indicator", which, "hv, igd or gd")->required();
  metric_cmd->add_option("--front", front_file, "solution set, one objective vector per row")
      ->required()
      ->check(CLI::ExistingFile);
  metric_cmd->add_option("--ref", ref_file, "reference front (igd/gd) or reference point (hv)")
      ->required()
      ->check(CLI::ExistingFile);
  metric_cmd->add_option("--samples", samples, "Monte Carlo samples for HV with 4+ objectives")
      ->capture_default_str();
  metric_cmd->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench_list->parsed()) {
      for (auto const& e : bench::registry()) {
        std::cout << e.name << "\t" << e.description << "\n";
      }
      return 0;
    }
    if (run->parsed()) {
      return do_run(ro);
    }
    if (summarize->parsed()) {
      return do_summarize(dir, base, metric, alpha, agg);
    }
    if (ranks->parsed()) {
      return do_ranks(dir, rank_metrics);
    }
    if (metric_cmd->parsed()) {
      return do_metric(which, front_file, ref_file, samples, seed);
    }
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
