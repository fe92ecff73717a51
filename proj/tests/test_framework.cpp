#include <temof/benchmarks.hpp>
#include <temof/framework.hpp>

#include <gtest/gtest.h>

using namespace temof;

namespace {

framework_config small_config(std::size_t max_fes = 6'000) {
  framework_config c;
  c.n = 40;
  c.max_fes = max_fes;
  return c;
}

} // namespace

TEST(StageGate, Cases) {
  EXPECT_EQ(stage_gate(1'000, 100'000, 0.5, 0.0), mating_source::population);
  EXPECT_EQ(stage_gate(1'000, 100'000, 1.0, 0.3), mating_source::population);
  EXPECT_EQ(stage_gate(60'000, 100'000, 0.5, 0.3), mating_source::archive);
  EXPECT_EQ(stage_gate(60'000, 100'000, 0.5, 0.7), mating_source::population);
  EXPECT_EQ(stage_gate(50'000, 100'000, 0.5, 0.0), mating_source::archive);
  EXPECT_EQ(stage_gate(49'999, 100'000, 0.5, 0.0), mating_source::population);
  EXPECT_EQ(stage_gate(60'000, 100'000, 0.0, 0.0), mating_source::population);
  EXPECT_EQ(stage_gate(30'000, 100'000, 0.5, 0.1, 0.25), mating_source::archive);
}

TEST(FrameworkConfig, Validation) {
  framework_config c;
  c.max_fes = 50;
  EXPECT_THROW(c.validate(), config_error);
  c = {};
  c.p = 1.5;
  EXPECT_THROW(c.validate(), config_error);
  c = {};
  c.stage_fraction = 1.0;
  EXPECT_THROW(c.validate(), config_error);
  c = {};
  c.n = 1;
  EXPECT_THROW(c.validate(), config_error);
}

TEST(TemofRun, BudgetSmallerThanPopulationRejected) {
  auto const problem = bench::make_problem("DTLZ2", 0, 3);
  framework_config c;
  c.max_fes = 99;
  nsga3_selector base(3, c.n, rng_seed{1});
  EXPECT_THROW(temof_run(problem, c, base, rng_seed{1}), config_error);
}

TEST(TemofRun, GenerationCountFollowsLoopRule) {
  auto const problem = bench::make_problem("ZDT1", 0, 2);
  framework_config c;
  c.n = 100;
  c.max_fes = 100'000;
  nsga3_selector base(2, c.n, rng_seed{3});
  auto const res = temof_run(problem, c, base, rng_seed{3});
  EXPECT_EQ(res.trace.generations.size(), 1000U);
  EXPECT_EQ(res.trace.final_fes(), 100'100U);
  EXPECT_EQ(res.trace.generations.back().fes_before, 100'000U);
}

TEST(TemofRun, TraceAndBudgetAccounting) {
  auto const problem = bench::make_problem("DTLZ2", 0, 3);
  auto const c = small_config(6'010);
  nsga3_selector base(3, c.n, rng_seed{5});
  auto const res = temof_run(problem, c, base, rng_seed{5});
  auto const& g = res.trace.generations;
  ASSERT_FALSE(g.empty());
  EXPECT_EQ(g.front().fes_before, c.n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g[i].fes_after, g[i].fes_before + c.n);
    if (i > 0) {
      EXPECT_GT(g[i].fes_before, g[i - 1].fes_before);
    }
  }
  EXPECT_EQ(res.trace.final_fes(), c.n + g.size() * c.n);
  EXPECT_GT(res.trace.final_fes(), c.max_fes);
  EXPECT_LE(res.trace.final_fes(), c.max_fes + c.n);
}

TEST(TemofRun, ZeroProbabilityNeverMatesFromArchive) {
  auto const problem = bench::make_problem("DTLZ2", 0, 3);
  auto c = small_config();
  c.p = 0.0;
  nsga3_selector base(3, c.n, rng_seed{9});
  auto const res = temof_run(problem, c, base, rng_seed{9});
  EXPECT_EQ(res.trace.archive_matings(), 0U);
}

TEST(TemofRun, ArchiveMatingOnlyInStageTwo) {
  auto const problem = bench::make_problem("DTLZ1", 0, 3);
  auto c = small_config(8'000);
  nsga3_selector base(3, c.n, rng_seed{11});
  auto const res = temof_run(problem, c, base, rng_seed{11});
  EXPECT_GT(res.trace.archive_matings(), 0U);
  for (auto const& g : res.trace.generations) {
    if (g.source == mating_source::archive) {
      EXPECT_GE(g.fes_before, 4'000U);
    }
  }
}

TEST(TemofRun, PerGenerationInvariants) {
  for (auto const* name : {"DTLZ2", "DTLZ1", "ZDT1", "ZDT4"}) {
    auto const problem = bench::make_problem(name, 0, 0);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto c = small_config();
      c.p = 0.8;
      nsga3_selector base(problem.n_obj, c.n, rng_seed{seed});
      std::size_t calls = 0;
      auto const res = temof_run(
          problem, c, base, rng_seed{seed}, [&](generation_record const& rec, population const& pop, population const& arc) {
            ++calls;
            ASSERT_EQ(pop.size(), c.n) << name << " seed " << seed << " generation " << rec.generation;
            EXPECT_EQ(rec.population_size, c.n);
            EXPECT_LE(arc.size(), c.n);
            EXPECT_FALSE(arc.empty());
            EXPECT_TRUE(mutually_nondominated(objectives_of(arc)));
            for (auto const& ind : pop) {
              EXPECT_TRUE(problem.within_bounds(ind.decision));
            }
          });
      EXPECT_EQ(calls, res.trace.generations.size());
    }
  }
}

TEST(TemofRun, DeterministicUnderSeed) {
  auto const problem = bench::make_problem("DTLZ2", 0, 3);
  auto const c = small_config(3'000);
  nsga3_selector b1(3, c.n, rng_seed{21});
  nsga3_selector b2(3, c.n, rng_seed{21});
  auto const r1 = temof_run(problem, c, b1, rng_seed{21});
  auto const r2 = temof_run(problem, c, b2, rng_seed{21});
  ASSERT_EQ(r1.final_population.size(), r2.final_population.size());
  for (std::size_t i = 0; i < r1.final_population.size(); ++i) {
    EXPECT_EQ(r1.final_population[i].decision, r2.final_population[i].decision);
    EXPECT_EQ(r1.final_population[i].f(), r2.final_population[i].f());
  }
  ASSERT_EQ(r1.archive.size(), r2.archive.size());
  for (std::size_t i = 0; i < r1.archive.size(); ++i) {
    EXPECT_EQ(r1.archive[i].decision, r2.archive[i].decision);
  }
}

TEST(TemofRun, WithoutArchiveMatchesPlainBase) {
  auto const problem = bench::make_problem("DTLZ2", 0, 3);
  auto c = small_config(4'000);
  c.p = 0.0;
  c.use_archive = false;
  std::vector<population> temof_gens;
  std::vector<population> base_gens;
  nsga3_selector b1(3, c.n, rng_seed{33});
  nsga3_selector b2(3, c.n, rng_seed{33});
  temof_run(problem, c, b1, rng_seed{33},
            [&](auto const&, population const& pop, population const&) { temof_gens.push_back(pop); });
  base_run(problem, c, b2, rng_seed{33},
           [&](auto const&, population const& pop, population const&) { base_gens.push_back(pop); });
  ASSERT_EQ(temof_gens.size(), base_gens.size());
  for (std::size_t g = 0; g < temof_gens.size(); ++g) {
    ASSERT_EQ(temof_gens[g].size(), base_gens[g].size());
    for (std::size_t i = 0; i < temof_gens[g].size(); ++i) {
      ASSERT_EQ(temof_gens[g][i].decision, base_gens[g][i].decision) << "generation " << g;
    }
  }
}

namespace {

/// NSGA-III pair whose archive selection keeps the whole first front.
struct untruncated_archive {
  nsga3_selector inner;

  population environmental_selection(population const& pop, std::size_t n) {
    return inner.environmental_selection(pop, n);
  }
  population first_front_selection(population const& pop, std::size_t /*n*/) {
    return inner.first_front_selection(pop, pop.size());
  }
};

} // namespace

// With a capacity-N archive the property can break: truncation may drop a
// point that survives in the population and later dominates a new archive
// entry. Without truncation it must hold.
TEST(TemofRun, FinalArchiveNondominatedAgainstPopulationWithoutTruncation) {
  for (auto const* name : {"DTLZ5", "DTLZ7", "ZDT3"}) {
    auto const problem = bench::make_problem(name, 0, 0);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto c = small_config(8'000);
      untruncated_archive base{nsga3_selector(problem.n_obj, c.n, rng_seed{seed})};
      auto const res = temof_run(problem, c, base, rng_seed{seed});
      EXPECT_TRUE(mutually_nondominated(objectives_of(res.archive)));
      auto const pop_objs = objectives_of(res.final_population);
      for (auto const& a : res.archive) {
        for (auto const& f : pop_objs) {
          EXPECT_FALSE(dominates(f, a.f())) << name << " seed " << seed;
        }
      }
    }
  }
}

TEST(BaseRun, KeepsPopulationSize) {
  auto const problem = bench::make_problem("ZDT2", 0, 2);
  auto const c = small_config(2'000);
  nsga3_selector base(2, c.n, rng_seed{2});
  std::size_t gens = 0;
  auto const res = base_run(problem, c, base, rng_seed{2}, [&](auto const&, population const& pop, auto const&) {
    ++gens;
    EXPECT_EQ(pop.size(), c.n);
  });
  EXPECT_EQ(gens, res.trace.generations.size());
  EXPECT_TRUE(res.archive.empty());
  EXPECT_EQ(res.trace.archive_matings(), 0U);
}
