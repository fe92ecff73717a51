#pragma once

#include "core.hpp"
#include "dominance.hpp"
#include "nsga3.hpp"
#include "variation.hpp"

#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace temof {

/// A base MOEA plugs into the framework through its two survival operators.
template<typename Base>
concept base_moea = requires(Base& base, population const& pop, std::size_t n) {
  { base.environmental_selection(pop, n) } -> std::same_as<population>;
  { base.first_front_selection(pop, n) } -> std::same_as<population>;
};

static_assert(base_moea<nsga3_selector>);

struct framework_config {
  std::size_t n = 100;
  std::size_t max_fes = 100'000;
  double p = 0.5;              // probability of mating from the archive in stage two
  double stage_fraction = 0.5; // stage two starts at stage_fraction * max_fes
  bool use_archive = true;     // false: ablation that drops the archive entirely
  variation_params variation{};

  void validate() const {
    if (n < 2) {
      throw config_error("population size must be at least 2");
    }
    if (max_fes < n) {
      throw config_error("evaluation budget " + std::to_string(max_fes) +
                         " is smaller than the population size " + std::to_string(n));
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw config_error("archive mating probability p must lie in [0, 1]");
    }
    if (!(stage_fraction > 0.0 && stage_fraction < 1.0)) {
      throw config_error("stage fraction must lie in (0, 1)");
    }
    variation.validate();
  }
};

enum class mating_source { population, archive };

inline char const* to_string(mating_source s) noexcept {
  return s == mating_source::archive ? "archive" : "population";
}

/// Parents come from the archive only once `fes` has reached the stage-two
/// threshold and the per-generation draw `u` falls below `p`.
inline mating_source stage_gate(std::size_t fes, std::size_t max_fes, double p, double u,
                                double stage_fraction = 0.5) noexcept {
  bool const second_stage = static_cast<double>(fes) >= stage_fraction * static_cast<double>(max_fes);
  return second_stage && u < p ? mating_source::archive : mating_source::population;
}

struct generation_record {
  std::size_t generation = 0;
  std::size_t fes_before = 0; // value seen by the stage gate
  std::size_t fes_after = 0;
  mating_source source = mating_source::population;
  std::size_t population_size = 0;
  std::size_t archive_size = 0;
};

struct run_trace {
  std::vector<generation_record> generations;

  [[nodiscard]] std::size_t archive_matings() const noexcept {
    std::size_t count = 0;
    for (auto const& g : generations) {
      count += g.source == mating_source::archive ? 1 : 0;
    }
    return count;
  }

  [[nodiscard]] std::size_t final_fes() const noexcept {
    return generations.empty() ? 0 : generations.back().fes_after;
  }
};

struct run_result {
  population final_population;
  population archive;
  run_trace trace;
};

/// Called after each generation with the record and the current sets.
using generation_observer =
    std::function<void(generation_record const&, population const&, population const&)>;

namespace detail {
  inline population concat(population const& a, population const& b) {
    population out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
} // namespace detail

/// Two-stage co-evolution around a base MOEA. Each generation: pick the
/// mating source, breed N offspring, select the next population from
/// population + offspring, keep the first front of archive + offspring, then
/// reselect the population from the deduplicated union of both.
/// The loop runs while fes <= max_fes, so the last generation may overshoot
/// the budget by up to N evaluations; the trace records the true count.
template<base_moea Base>
run_result temof_run(problem_spec const& problem, framework_config const& config, Base& base,
                     rng_seed const& seed, generation_observer const& observer = {}) {
  config.validate();
  problem.validate();

  run_budget budget{config.max_fes, 0};
  auto init_rng = seed.stream(stream_purpose::initialization);
  auto mating_rng = seed.stream(stream_purpose::mating);
  auto gate_rng = seed.stream(stream_purpose::stage_gate);

  run_result result;
  result.final_population = initialize_population(problem, config.n, init_rng, budget);
  result.archive = result.final_population;
  auto& pop = result.final_population;
  auto& archive = result.archive;

  std::size_t generation = 0;
  while (budget.fes <= budget.max_fes) {
    generation_record rec;
    rec.generation = generation++;
    rec.fes_before = budget.fes;
    double const u = gate_rng.uniform();
    rec.source = config.use_archive
                     ? stage_gate(budget.fes, budget.max_fes, config.p, u, config.stage_fraction)
                     : mating_source::population;

    auto const& parents = rec.source == mating_source::archive ? archive : pop;
    auto offspring = generate_offspring(parents, config.n, config.variation, problem, budget, mating_rng);
    auto next = base.environmental_selection(detail::concat(pop, offspring), config.n);
    if (config.use_archive) {
      archive = base.first_front_selection(detail::concat(archive, offspring), config.n);
      pop = base.environmental_selection(merge_dedupe(next, archive), config.n);
    } else {
      pop = std::move(next);
    }

    rec.fes_after = budget.fes;
    rec.population_size = pop.size();
    rec.archive_size = config.use_archive ? archive.size() : 0;
    result.trace.generations.push_back(rec);
    if (observer) {
      observer(rec, pop, archive);
    }
  }
  if (!config.use_archive) {
    archive.clear();
  }
  return result;
}

/// The base MOEA on its own: breed from the population, then environmental
/// selection over population + offspring, under the same loop rule.
template<base_moea Base>
run_result base_run(problem_spec const& problem, framework_config const& config, Base& base,
                    rng_seed const& seed, generation_observer const& observer = {}) {
  config.validate();
  problem.validate();

  run_budget budget{config.max_fes, 0};
  auto init_rng = seed.stream(stream_purpose::initialization);
  auto mating_rng = seed.stream(stream_purpose::mating);

  run_result result;
  auto& pop = result.final_population;
  pop = initialize_population(problem, config.n, init_rng, budget);
  std::size_t generation = 0;
  while (budget.fes <= budget.max_fes) {
    generation_record rec;
    rec.generation = generation++;
    rec.fes_before = budget.fes;
    auto offspring = generate_offspring(pop, config.n, config.variation, problem, budget, mating_rng);
    pop = base.environmental_selection(detail::concat(pop, offspring), config.n);
    rec.fes_after = budget.fes;
    rec.population_size = pop.size();
    result.trace.generations.push_back(rec);
    if (observer) {
      observer(rec, pop, result.archive);
    }
  }
  return result;
}

} // namespace temof
