#pragma once

#include "benchmarks.hpp"
#include "core.hpp"
#include "framework.hpp"
#include "metrics.hpp"
#include "nsga3.hpp"
#include "stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace temof::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr char const* software_version = "0.1.0";
inline constexpr char const* workers_env = "TEMOF_WORKERS";
inline constexpr char const* runs_file = "runs.csv";
inline constexpr char const* failures_file = "failures.csv";
inline constexpr char const* metadata_file = "metadata.json";

/// Harness-level I/O failure (unwritable output directory, unreadable file).
class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Configuration ---------------------------------------------------------------

struct problem_entry {
  std::string name;
  std::size_t n_var = 0; // 0: family default
  std::size_t n_obj = 0; // 0: family default
};

struct algorithm_entry {
  std::string kind; // "nsga3" or "temof-nsga3"
  std::string label;
  std::optional<std::size_t> n;
  std::optional<double> p;
  std::optional<double> stage_fraction;
  std::optional<bool> use_archive;
  std::optional<variation_params> variation;

  [[nodiscard]] std::string const& display() const noexcept { return label.empty() ? kind : label; }
};

enum class indicator_target { population, archive };

struct experiment_config {
  std::vector<problem_entry> problems;
  std::vector<algorithm_entry> algorithms;
  std::vector<std::uint64_t> seeds; // explicit seeds win over master_seed / runs
  std::uint64_t master_seed = 2024;
  std::size_t runs = 20;
  std::size_t n = 100;
  std::size_t max_fes = 100'000;
  variation_params variation{};
  std::vector<metrics::indicator> metrics{metrics::indicator::igd, metrics::indicator::hv};
  std::size_t front_samples = 10'000;
  std::size_t hv_samples = metrics::default_hv_samples;
  double hv_scale = 1.1;
  indicator_target target = indicator_target::population;
  fs::path output = "results";

  [[nodiscard]] std::vector<std::uint64_t> seed_list() const {
    if (!seeds.empty()) {
      return seeds;
    }
    std::vector<std::uint64_t> out(runs);
    for (std::size_t i = 0; i < runs; ++i) {
      out[i] = run_seed(master_seed, i);
    }
    return out;
  }

  [[nodiscard]] framework_config framework_for(algorithm_entry const& a) const {
    framework_config fc;
    fc.n = a.n.value_or(n);
    fc.max_fes = max_fes;
    fc.p = a.p.value_or(0.5);
    fc.stage_fraction = a.stage_fraction.value_or(0.5);
    fc.use_archive = a.use_archive.value_or(true);
    fc.variation = a.variation.value_or(variation);
    return fc;
  }

  void validate() const {
    if (problems.empty()) {
      throw config_error("experiment needs at least one problem");
    }
    if (algorithms.empty()) {
      throw config_error("experiment needs at least one algorithm");
    }
    if (seed_list().empty()) {
      throw config_error("experiment needs at least one seed");
    }
    if (metrics.empty()) {
      throw config_error("experiment needs at least one metric");
    }
    std::set<std::string> labels;
    for (auto const& a : algorithms) {
      if (a.kind != "nsga3" && a.kind != "temof-nsga3") {
        throw config_error("unknown algorithm '" + a.kind + "'; valid options: nsga3, temof-nsga3");
      }
      if (!labels.insert(a.display()).second) {
        throw config_error("duplicate algorithm label '" + a.display() + "'");
      }
      framework_for(a).validate();
    }
    for (auto const& p : problems) {
      (void)bench::make_problem(p.name, p.n_var, p.n_obj);
    }
  }
};

namespace detail {

  inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
  }

  inline variation_params variation_from_json(json const& j, variation_params base) {
    base.pc = j.value("pc", base.pc);
    base.eta_c = j.value("eta_c", base.eta_c);
    base.pm = j.value("pm", base.pm);
    base.eta_m = j.value("eta_m", base.eta_m);
    return base;
  }

  inline json variation_to_json(variation_params const& v) {
    return {{"pc", v.pc}, {"eta_c", v.eta_c}, {"pm", v.pm}, {"eta_m", v.eta_m}};
  }

} // namespace detail

/// Parses the JSON experiment schema (see README).
inline experiment_config config_from_json(json const& j) {
  experiment_config c;
  try {
    for (auto const& p : j.at("problems")) {
      if (p.is_string()) {
        c.problems.push_back({p.get<std::string>(), 0, 0});
      } else {
        c.problems.push_back({p.at("name").get<std::string>(), p.value("n_var", std::size_t{0}),
                              p.value("n_obj", std::size_t{0})});
      }
    }
    c.n = j.value("n", c.n);
    c.max_fes = j.value("max_fes", c.max_fes);
    if (j.contains("variation")) {
      c.variation = detail::variation_from_json(j.at("variation"), c.variation);
    }
    for (auto const& a : j.at("algorithms")) {
      algorithm_entry e;
      if (a.is_string()) {
        e.kind = a.get<std::string>();
      } else {
        e.kind = a.at("name").get<std::string>();
        e.label = a.value("label", std::string{});
        if (a.contains("n")) {
          e.n = a.at("n").get<std::size_t>();
        }
        if (a.contains("p")) {
          e.p = a.at("p").get<double>();
        }
        if (a.contains("stage_fraction")) {
          e.stage_fraction = a.at("stage_fraction").get<double>();
        }
        if (a.contains("archive")) {
          e.use_archive = a.at("archive").get<bool>();
        }
        if (a.contains("variation")) {
          e.variation = detail::variation_from_json(a.at("variation"), c.variation);
        }
      }
      c.algorithms.push_back(std::move(e));
    }
    if (j.contains("seeds")) {
      auto const& s = j.at("seeds");
      if (s.is_array()) {
        c.seeds = s.get<std::vector<std::uint64_t>>();
      } else {
        c.master_seed = s.value("master_seed", c.master_seed);
        c.runs = s.value("runs", c.runs);
      }
    }
    if (j.contains("metrics")) {
      c.metrics.clear();
      for (auto const& m : j.at("metrics")) {
        c.metrics.push_back(metrics::parse_indicator(m.get<std::string>()));
      }
    }
    c.front_samples = j.value("front_samples", c.front_samples);
    c.hv_samples = j.value("hv_samples", c.hv_samples);
    c.hv_scale = j.value("hv_scale", c.hv_scale);
    auto const target = j.value("target", std::string{"population"});
    if (target != "population" && target != "archive") {
      throw config_error("target must be 'population' or 'archive'");
    }
    c.target = target == "archive" ? indicator_target::archive : indicator_target::population;
    c.output = j.value("output", c.output.string());
  } catch (json::exception const& e) {
    throw config_error(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

inline experiment_config load_config(fs::path const& file) {
  std::ifstream in(file);
  if (!in) {
    throw io_error("cannot open config file " + file.string());
  }
  json j;
  try {
    in >> j;
  } catch (json::exception const& e) {
    throw config_error("config file " + file.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline json config_to_json(experiment_config const& c) {
  json j;
  for (auto const& p : c.problems) {
    j["problems"].push_back({{"name", p.name}, {"n_var", p.n_var}, {"n_obj", p.n_obj}});
  }
  for (auto const& a : c.algorithms) {
    auto const fc = c.framework_for(a);
    j["algorithms"].push_back({{"name", a.kind},
                               {"label", a.display()},
                               {"n", fc.n},
                               {"p", fc.p},
                               {"stage_fraction", fc.stage_fraction},
                               {"archive", fc.use_archive},
                               {"variation", detail::variation_to_json(fc.variation)}});
  }
  j["seeds"] = c.seed_list();
  j["n"] = c.n;
  j["max_fes"] = c.max_fes;
  j["variation"] = detail::variation_to_json(c.variation);
  for (auto m : c.metrics) {
    j["metrics"].push_back(std::string(metrics::to_string(m)));
  }
  j["front_samples"] = c.front_samples;
  j["hv_samples"] = c.hv_samples;
  j["hv_scale"] = c.hv_scale;
  j["target"] = c.target == indicator_target::archive ? "archive" : "population";
  j["output"] = c.output.string();
  return j;
}

// Records ---------------------------------------------------------------------

struct run_record {
  std::string fingerprint;
  std::string problem;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t fes = 0;
  std::vector<std::pair<std::string, double>> values; // (metric, value)
  double wall_ms = 0.0;
  std::size_t generations = 0;
  std::size_t archive_matings = 0;
  std::string error; // non-empty for failed runs

  [[nodiscard]] std::optional<double> value_of(std::string_view metric) const {
    for (auto const& [m, v] : values) {
      if (m == metric) {
        return v;
      }
    }
    return std::nullopt;
  }
};

/// Stable identity of one (problem, algorithm, seed) run under a configuration.
inline std::string fingerprint(experiment_config const& c, problem_entry const& p,
                               algorithm_entry const& a, std::uint64_t seed) {
  auto const fc = c.framework_for(a);
  std::ostringstream os;
  os << "problem=" << p.name << ";n_var=" << p.n_var << ";n_obj=" << p.n_obj << ";algo=" << a.kind
     << ";label=" << a.display() << ";n=" << fc.n << ";max_fes=" << fc.max_fes
     << ";p=" << detail::fmt_double(fc.p) << ";stage=" << detail::fmt_double(fc.stage_fraction)
     << ";archive=" << fc.use_archive << ";pc=" << detail::fmt_double(fc.variation.pc)
     << ";eta_c=" << detail::fmt_double(fc.variation.eta_c)
     << ";pm=" << detail::fmt_double(fc.variation.pm)
     << ";eta_m=" << detail::fmt_double(fc.variation.eta_m) << ";seed=" << seed << ";metrics=";
  for (auto m : c.metrics) {
    os << metrics::to_string(m) << ',';
  }
  os << ";front=" << c.front_samples << ";hv_samples=" << c.hv_samples
     << ";hv_scale=" << detail::fmt_double(c.hv_scale)
     << ";target=" << (c.target == indicator_target::archive ? "archive" : "population");
  return detail::hex64(detail::fnv1a(os.str()));
}

/// Reference data shared by every run on one problem.
struct problem_context {
  problem_spec spec;
  std::vector<objective_vector> front;
  objective_vector hv_ref;
};

inline problem_context make_context(experiment_config const& c, problem_entry const& p) {
  problem_context ctx;
  ctx.spec = bench::make_problem(p.name, p.n_var, p.n_obj);
  ctx.front = bench::sample_true_front(ctx.spec, c.front_samples);
  ctx.hv_ref = metrics::hv_reference_point(ctx.front, c.hv_scale);
  return ctx;
}

/// Executes one run and computes its indicators.
inline run_record execute_run(experiment_config const& c, problem_context const& ctx,
                              algorithm_entry const& a, std::uint64_t seed) {
  run_record rec;
  rec.problem = ctx.spec.name;
  rec.algorithm = a.display();
  rec.seed = seed;
  auto const start = std::chrono::steady_clock::now();

  auto const fc = c.framework_for(a);
  rng_seed const rs{seed};
  nsga3_selector base(ctx.spec.n_obj, fc.n, rs);
  auto const result = a.kind == "nsga3" ? base_run(ctx.spec, fc, base, rs)
                                        : temof_run(ctx.spec, fc, base, rs);
  rec.fes = result.trace.final_fes();
  rec.generations = result.trace.generations.size();
  rec.archive_matings = result.trace.archive_matings();

  auto const& target = c.target == indicator_target::archive && !result.archive.empty()
                           ? result.archive
                           : result.final_population;
  auto const objs = objectives_of(target);
  for (auto m : c.metrics) {
    double v = 0.0;
    switch (m) {
    case metrics::indicator::igd:
      v = metrics::igd(objs, ctx.front).value;
      break;
    case metrics::indicator::gd:
      v = metrics::gd(objs, ctx.front).value;
      break;
    case metrics::indicator::hv:
      v = metrics::hv(objs, ctx.hv_ref, c.hv_samples, rs.derive(stream_purpose::monte_carlo)).value;
      break;
    }
    rec.values.emplace_back(std::string(metrics::to_string(m)), v);
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// Persistence -----------------------------------------------------------------

inline constexpr char const* runs_header = "fingerprint,problem,algorithm,seed,metric,value,fes,wall_ms";

inline std::vector<std::string> split_csv(std::string const& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

inline void append_record_rows(std::ostream& os, run_record const& r) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.1f", r.wall_ms);
  for (auto const& [m, v] : r.values) {
    os << r.fingerprint << ',' << r.problem << ',' << r.algorithm << ',' << r.seed << ',' << m << ','
       << detail::fmt_double(v) << ',' << r.fes << ',' << wall << '\n';
  }
}

/// Reads `runs.csv`, grouping metric rows back into records (file order).
inline std::vector<run_record> load_records(fs::path const& dir) {
  std::vector<run_record> out;
  std::ifstream in(dir / runs_file);
  if (!in) {
    return out;
  }
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line_no == 1) {
      continue;
    }
    auto const cells = split_csv(line);
    if (cells.size() != 8) {
      throw io_error((dir / runs_file).string() + ":" + std::to_string(line_no) + ": expected 8 columns");
    }
    auto [it, fresh] = index.try_emplace(cells[0], out.size());
    if (fresh) {
      run_record r;
      r.fingerprint = cells[0];
      r.problem = cells[1];
      r.algorithm = cells[2];
      r.seed = std::stoull(cells[3]);
      r.fes = std::stoull(cells[6]);
      r.wall_ms = std::stod(cells[7]);
      out.push_back(std::move(r));
    }
    out[it->second].values.emplace_back(cells[4], std::stod(cells[5]));
  }
  return out;
}

/// Rewrites `runs.csv` sorted by (problem, algorithm, seed, metric), so the
/// file content does not depend on run completion order.
inline void canonicalize_runs(fs::path const& dir) {
  auto records = load_records(dir);
  std::sort(records.begin(), records.end(), [](auto const& a, auto const& b) {
    return std::tie(a.problem, a.algorithm, a.seed) < std::tie(b.problem, b.algorithm, b.seed);
  });
  auto const tmp = dir / (std::string(runs_file) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << runs_header << '\n';
    for (auto& r : records) {
      std::sort(r.values.begin(), r.values.end());
      append_record_rows(out, r);
    }
  }
  fs::rename(tmp, dir / runs_file);
}

// Run matrix ------------------------------------------------------------------

struct matrix_result {
  std::vector<run_record> records; // completed records of this configuration
  std::vector<run_record> failures;
  std::size_t executed = 0;
  std::size_t skipped = 0;
};

inline std::size_t worker_count() {
  if (char const* env = std::getenv(workers_env)) {
    try {
      auto const n = std::stoul(env);
      if (n > 0) {
        return n;
      }
    } catch (std::exception const&) {
    }
    throw config_error(std::string(workers_env) + " must be a positive integer");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline void write_metadata(experiment_config const& c, std::vector<problem_context> const& contexts,
                           matrix_result const& res) {
  json meta;
  meta["software"] = {{"name", "temof"}, {"version", software_version}};
  meta["config"] = config_to_json(c);
  meta["stats"] = {{"ranksum_exact_max_total", stats::ranksum_exact_max_total},
                   {"signed_rank_exact_max_n", stats::signed_rank_exact_max_n},
                   {"aggregate", "mean"}};
  for (auto const& ctx : contexts) {
    meta["problems"].push_back({{"name", ctx.spec.name},
                                {"n_var", ctx.spec.n_var},
                                {"n_obj", ctx.spec.n_obj},
                                {"front_points", ctx.front.size()},
                                {"hv_reference", ctx.hv_ref},
                                {"hv_mode", ctx.spec.n_obj <= metrics::max_exact_hv_objectives
                                                ? "exact"
                                                : "monte_carlo"}});
  }
  meta["records"] = res.records.size();
  meta["failures"] = res.failures.size();
  std::ofstream out(c.output / metadata_file, std::ios::trunc);
  out << meta.dump(2) << '\n';
}

/// Runs every (problem, algorithm, seed) combination not already present in
/// the output directory. Records are appended as runs finish; failed runs
/// go to failures.csv and the matrix continues.
using run_executor = std::function<run_record(experiment_config const&, problem_context const&,
                                              algorithm_entry const&, std::uint64_t)>;

inline matrix_result run_matrix(experiment_config const& c, std::size_t workers = 0,
                                run_executor const& execute = execute_run) {
  c.validate();
  std::error_code ec;
  fs::create_directories(c.output, ec);
  {
    std::ofstream probe(c.output / ".write_probe");
    if (ec || !probe) {
      throw io_error("output directory " + c.output.string() + " is not writable");
    }
  }
  fs::remove(c.output / ".write_probe", ec);

  auto const existing = load_records(c.output);
  std::map<std::string, run_record const*> done;
  for (auto const& r : existing) {
    done[r.fingerprint] = &r;
  }

  std::vector<problem_context> contexts;
  contexts.reserve(c.problems.size());
  for (auto const& p : c.problems) {
    contexts.push_back(make_context(c, p));
  }

  struct task {
    std::size_t problem;
    std::size_t algorithm;
    std::uint64_t seed;
    std::string fp;
  };
  std::vector<task> todo;
  matrix_result res;
  auto const seeds = c.seed_list();
  for (std::size_t pi = 0; pi < c.problems.size(); ++pi) {
    for (std::size_t ai = 0; ai < c.algorithms.size(); ++ai) {
      for (auto s : seeds) {
        auto fp = fingerprint(c, c.problems[pi], c.algorithms[ai], s);
        if (auto it = done.find(fp); it != done.end()) {
          res.records.push_back(*it->second);
          ++res.skipped;
        } else {
          todo.push_back({pi, ai, s, std::move(fp)});
        }
      }
    }
  }

  bool const fresh_file = !fs::exists(c.output / runs_file);
  std::ofstream runs_out(c.output / runs_file, std::ios::app);
  std::ofstream fail_out(c.output / failures_file, std::ios::app);
  if (!runs_out || !fail_out) {
    throw io_error("cannot open result files in " + c.output.string());
  }
  if (fresh_file) {
    runs_out << runs_header << '\n';
  }

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      auto const& t = todo[i];
      run_record rec;
      try {
        rec = execute(c, contexts[t.problem], c.algorithms[t.algorithm], t.seed);
      } catch (std::exception const& e) {
        rec.problem = contexts[t.problem].spec.name;
        rec.algorithm = c.algorithms[t.algorithm].display();
        rec.seed = t.seed;
        rec.error = e.what();
      }
      rec.fingerprint = t.fp;
      std::lock_guard lock(writer);
      if (rec.error.empty()) {
        append_record_rows(runs_out, rec);
        runs_out.flush();
        res.records.push_back(std::move(rec));
        ++res.executed;
      } else {
        std::string msg = rec.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        fail_out << rec.fingerprint << ',' << rec.problem << ',' << rec.algorithm << ',' << rec.seed
                 << ',' << msg << '\n';
        fail_out.flush();
        res.failures.push_back(std::move(rec));
      }
    }
  };
  std::size_t const n_workers = std::max<std::size_t>(1, std::min(workers ? workers : worker_count(), todo.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  runs_out.close();
  fail_out.close();
  canonicalize_runs(c.output);

  std::sort(res.records.begin(), res.records.end(), [](auto const& a, auto const& b) {
    return std::tie(a.problem, a.algorithm, a.seed) < std::tie(b.problem, b.algorithm, b.seed);
  });
  write_metadata(c, contexts, res);
  return res;
}

// Reports ---------------------------------------------------------------------

/// Two significant digits in the compact form "1.4e+1".
inline std::string format_sci(double v) {
  if (!std::isfinite(v)) {
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  std::string s(buf);
  auto const e = s.find('e');
  int const exponent = std::stoi(s.substr(e + 1));
  return s.substr(0, e) + (exponent < 0 ? "e-" : "e+") + std::to_string(std::abs(exponent));
}

enum class aggregate { mean, median };

struct sample_summary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0; // sample standard deviation
  double median = 0.0;
};

inline sample_summary summarize_sample(std::vector<double> v) {
  sample_summary s;
  s.n = v.size();
  if (v.empty()) {
    return s;
  }
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    ss += (x - s.mean) * (x - s.mean);
  }
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  auto const mid = v.size() / 2;
  s.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return s;
}

struct summary_cell {
  bool present = false;
  sample_summary sample;
  std::optional<stats::comparison_mark> vs_base; // absent for the base column
  bool best = false;

  [[nodiscard]] std::string text() const {
    if (!present) {
      return "—";
    }
    std::string t = format_sci(sample.mean) + " (" + format_sci(sample.std) + ")";
    if (vs_base) {
      t += " " + std::string(stats::symbol(vs_base->result));
    }
    return t;
  }
};

struct tally {
  std::size_t better = 0;
  std::size_t worse = 0;
  std::size_t equal = 0;
};

struct summary_table {
  std::string metric;
  std::string base;
  double alpha = 0.05;
  stats::orientation direction = stats::orientation::lower_is_better;
  aggregate agg = aggregate::mean;
  std::vector<std::string> problems;
  std::vector<std::string> algorithms; // compared algorithms first, base last
  std::vector<std::vector<summary_cell>> cells; // [problem][algorithm]
  std::vector<tally> footer;                    // per compared algorithm
  std::vector<std::optional<stats::signed_rank_result>> signed_ranks; // base vs each compared

  [[nodiscard]] char const* agg_label() const noexcept { return agg == aggregate::mean ? "mean" : "median"; }

  [[nodiscard]] double score(std::size_t p, std::size_t a) const {
    auto const& s = cells[p][a].sample;
    return agg == aggregate::mean ? s.mean : s.median;
  }
};

namespace detail {
  inline std::vector<std::string> ordered_unique(std::vector<std::string> const& items) {
    std::vector<std::string> out;
    for (auto const& s : items) {
      if (std::find(out.begin(), out.end(), s) == out.end()) {
        out.push_back(s);
      }
    }
    return out;
  }
} // namespace detail

/// Per-problem mean (std) table of one metric with rank-sum marks of every
/// algorithm against `base`, a +/-/= footer and base-vs-algorithm
/// signed-rank tests over the per-problem aggregates. R+ sums the ranks of
/// problems where the base is better.
inline summary_table summarize(std::vector<run_record> const& records, std::string const& base,
                               std::string const& metric, double alpha,
                               std::vector<std::string> algorithm_order = {},
                               aggregate agg = aggregate::mean) {
  auto const ind = metrics::parse_indicator(metric);
  summary_table t;
  t.metric = std::string(metrics::to_string(ind));
  t.base = base;
  t.alpha = alpha;
  t.agg = agg;
  t.direction = metrics::lower_is_better(ind) ? stats::orientation::lower_is_better
                                              : stats::orientation::higher_is_better;

  std::vector<std::string> probs;
  std::vector<std::string> algs = std::move(algorithm_order);
  for (auto const& r : records) {
    probs.push_back(r.problem);
    algs.push_back(r.algorithm);
  }
  t.problems = detail::ordered_unique(probs);
  algs = detail::ordered_unique(algs);
  if (std::find(algs.begin(), algs.end(), base) == algs.end()) {
    throw usage_error("base algorithm '" + base + "' has no records");
  }
  if (algs.size() < 2) {
    throw usage_error("summarize needs at least two algorithms");
  }
  for (auto const& a : algs) {
    if (a != base) {
      t.algorithms.push_back(a);
    }
  }
  t.algorithms.push_back(base);
  std::size_t const base_col = t.algorithms.size() - 1;

  std::vector<std::vector<std::vector<double>>> samples(
      t.problems.size(), std::vector<std::vector<double>>(t.algorithms.size()));
  for (auto const& r : records) {
    auto const v = r.value_of(t.metric);
    if (!v || !r.error.empty()) {
      continue;
    }
    auto const pi = static_cast<std::size_t>(
        std::find(t.problems.begin(), t.problems.end(), r.problem) - t.problems.begin());
    auto const ai = static_cast<std::size_t>(
        std::find(t.algorithms.begin(), t.algorithms.end(), r.algorithm) - t.algorithms.begin());
    samples[pi][ai].push_back(*v);
  }

  t.cells.assign(t.problems.size(), std::vector<summary_cell>(t.algorithms.size()));
  t.footer.assign(base_col, tally{});
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
      auto& cell = t.cells[p][a];
      cell.present = !samples[p][a].empty();
      if (cell.present) {
        cell.sample = summarize_sample(samples[p][a]);
      }
    }
    auto const& base_sample = samples[p][base_col];
    for (std::size_t a = 0; a < base_col; ++a) {
      auto& cell = t.cells[p][a];
      if (!cell.present || base_sample.size() < 2 || samples[p][a].size() < 2) {
        continue;
      }
      cell.vs_base = stats::ranksum_mark(samples[p][a], base_sample, alpha, t.direction);
      switch (cell.vs_base->result) {
      case stats::mark::better:
        ++t.footer[a].better;
        break;
      case stats::mark::worse:
        ++t.footer[a].worse;
        break;
      case stats::mark::equal:
        ++t.footer[a].equal;
        break;
      }
    }
    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
      if (!t.cells[p][a].present) {
        continue;
      }
      bool const lower = t.direction == stats::orientation::lower_is_better;
      if (!best || (lower ? t.score(p, a) < t.score(p, *best) : t.score(p, a) > t.score(p, *best))) {
        best = a;
      }
    }
    if (best) {
      t.cells[p][*best].best = true;
    }
  }

  t.signed_ranks.assign(base_col, std::nullopt);
  for (std::size_t a = 0; a < base_col; ++a) {
    std::vector<double> base_scores;
    std::vector<double> other_scores;
    for (std::size_t p = 0; p < t.problems.size(); ++p) {
      if (t.cells[p][a].present && t.cells[p][base_col].present) {
        base_scores.push_back(t.score(p, base_col));
        other_scores.push_back(t.score(p, a));
      }
    }
    if (base_scores.size() < 2) {
      continue;
    }
    t.signed_ranks[a] = t.direction == stats::orientation::lower_is_better
                            ? stats::signed_rank(other_scores, base_scores)
                            : stats::signed_rank(base_scores, other_scores);
  }
  return t;
}

inline std::string render_markdown(summary_table const& t) {
  std::ostringstream os;
  os << "### " << t.metric << " (" << t.agg_label() << ", base " << t.base << ", alpha " << t.alpha
     << ")\n\n";
  os << "| Problem |";
  for (auto const& a : t.algorithms) {
    os << ' ' << a << " |";
  }
  os << "\n|---|";
  for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
    os << "---|";
  }
  os << '\n';
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    os << "| " << t.problems[p] << " |";
    for (auto const& cell : t.cells[p]) {
      os << ' ' << (cell.best ? "**" + cell.text() + "**" : cell.text()) << " |";
    }
    os << '\n';
  }
  os << "| +/-/= |";
  for (auto const& f : t.footer) {
    os << ' ' << f.better << '/' << f.worse << '/' << f.equal << " |";
  }
  os << "  |\n\n";
  os << "| " << t.base << " vs. | R+ | R- | p-value | alpha <= " << t.alpha << " |\n|---|---|---|---|---|\n";
  for (std::size_t a = 0; a + 1 < t.algorithms.size(); ++a) {
    os << "| " << t.algorithms[a] << " |";
    if (auto const& sr = t.signed_ranks[a]) {
      char buf[128];
      std::snprintf(buf, sizeof buf, " %.1f | %.1f | %.6f | %s |", sr->r_plus, sr->r_minus, sr->p_value,
                    sr->p_value <= t.alpha ? "Yes" : "No");
      os << buf;
    } else {
      os << " — | — | — | — |";
    }
    os << '\n';
  }
  return os.str();
}

inline std::string render_csv(summary_table const& t) {
  std::ostringstream os;
  os << "problem,algorithm,n,mean,std,median,cell,mark,p_value,best\n";
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
      auto const& c = t.cells[p][a];
      os << t.problems[p] << ',' << t.algorithms[a] << ',' << c.sample.n << ',';
      if (c.present) {
        os << detail::fmt_double(c.sample.mean) << ',' << detail::fmt_double(c.sample.std) << ','
           << detail::fmt_double(c.sample.median);
      } else {
        os << ",,";
      }
      os << ',' << c.text() << ',';
      if (c.vs_base) {
        os << stats::symbol(c.vs_base->result) << ',' << detail::fmt_double(c.vs_base->p_value);
      } else {
        os << ',';
      }
      os << ',' << (c.best ? 1 : 0) << '\n';
    }
  }
  for (std::size_t a = 0; a + 1 < t.algorithms.size(); ++a) {
    auto const& f = t.footer[a];
    os << "+/-/=," << t.algorithms[a] << ",,,,," << f.better << '/' << f.worse << '/' << f.equal << ",,,\n";
  }
  for (std::size_t a = 0; a + 1 < t.algorithms.size(); ++a) {
    if (auto const& sr = t.signed_ranks[a]) {
      os << "signed-rank," << t.algorithms[a] << ',' << sr->n_effective << ','
         << detail::fmt_double(sr->r_plus) << ',' << detail::fmt_double(sr->r_minus) << ",,,,"
         << detail::fmt_double(sr->p_value) << ",\n";
    }
  }
  return os.str();
}

struct rank_row {
  std::string metric;
  std::string algorithm;
  double mean_rank = 0.0;
  double chi_square = 0.0;
  std::size_t n_problems = 0;
};

/// Friedman mean ranks per metric over the per-problem mean scores. Problems
/// missing any algorithm are left out.
inline std::vector<rank_row> rank_report(std::vector<run_record> const& records,
                                         std::vector<std::string> const& metric_names,
                                         std::vector<std::string> algorithm_order = {}) {
  std::vector<rank_row> rows;
  for (auto const& name : metric_names) {
    auto const ind = metrics::parse_indicator(name);
    std::vector<std::string> algs = algorithm_order;
    std::vector<std::string> probs;
    for (auto const& r : records) {
      if (r.value_of(metrics::to_string(ind))) {
        algs.push_back(r.algorithm);
        probs.push_back(r.problem);
      }
    }
    algs = detail::ordered_unique(algs);
    probs = detail::ordered_unique(probs);
    std::vector<std::vector<double>> matrix;
    for (auto const& p : probs) {
      std::vector<double> row;
      for (auto const& a : algs) {
        std::vector<double> vals;
        for (auto const& r : records) {
          if (r.problem == p && r.algorithm == a) {
            if (auto v = r.value_of(metrics::to_string(ind))) {
              vals.push_back(*v);
            }
          }
        }
        if (vals.empty()) {
          break;
        }
        row.push_back(summarize_sample(vals).mean);
      }
      if (row.size() == algs.size()) {
        matrix.push_back(std::move(row));
      }
    }
    auto const fr = stats::friedman_ranks(matrix, metrics::lower_is_better(ind)
                                                      ? stats::orientation::lower_is_better
                                                      : stats::orientation::higher_is_better);
    for (std::size_t a = 0; a < algs.size(); ++a) {
      rows.push_back({std::string(metrics::to_string(ind)), algs[a], fr.mean_ranks[a], fr.chi_square,
                      fr.n_problems});
    }
  }
  return rows;
}

inline std::string render_ranks_csv(std::vector<rank_row> const& rows) {
  std::ostringstream os;
  os << "metric,algorithm,mean_rank,chi_square,n_problems\n";
  for (auto const& r : rows) {
    os << r.metric << ',' << r.algorithm << ',' << detail::fmt_double(r.mean_rank) << ','
       << detail::fmt_double(r.chi_square) << ',' << r.n_problems << '\n';
  }
  return os.str();
}

/// Algorithm labels in configuration order, read from a result directory's metadata.
inline std::vector<std::string> algorithm_order(fs::path const& dir) {
  std::vector<std::string> out;
  std::ifstream in(dir / metadata_file);
  if (!in) {
    return out;
  }
  try {
    json meta;
    in >> meta;
    for (auto const& a : meta.at("config").at("algorithms")) {
      out.push_back(a.at("label").get<std::string>());
    }
  } catch (json::exception const&) {
    out.clear();
  }
  return out;
}

inline std::vector<std::string> metric_names(std::vector<run_record> const& records) {
  std::vector<std::string> names;
  for (auto const& r : records) {
    for (auto const& [m, v] : r.values) {
      names.push_back(m);
    }
  }
  return detail::ordered_unique(names);
}

// Standalone indicator input --------------------------------------------------

/// One point per row; commas, semicolons or whitespace separate values. Blank
/// lines, '#' comments and a non-numeric header row are skipped.
inline std::vector<objective_vector> read_points_csv(fs::path const& file) {
  std::ifstream in(file);
  if (!in) {
    throw io_error("cannot open " + file.string());
  }
  std::vector<objective_vector> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::replace(line.begin(), line.end(), ';', ' ');
    auto const first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream is(line);
    objective_vector row;
    std::string tok;
    bool numeric = true;
    while (is >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        numeric = numeric && used == tok.size();
      } catch (std::exception const&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (out.empty()) {
        continue; // header
      }
      throw io_error(file.string() + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    if (!out.empty() && row.size() != out.front().size()) {
      throw io_error(file.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    out.push_back(std::move(row));
  }
  if (out.empty()) {
    throw io_error(file.string() + " contains no points");
  }
  return out;
}

} // namespace temof::harness
