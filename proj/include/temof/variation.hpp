#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace temof {

/// Real-coded operator settings. A non-positive `pm` means 1 / n_var.
struct variation_params {
  double pc = 1.0;
  double eta_c = 20.0;
  double pm = -1.0;
  double eta_m = 20.0;

  void validate() const {
    if (!(pc >= 0.0 && pc <= 1.0)) {
      throw config_error("crossover probability must lie in [0, 1]");
    }
    if (!(pm <= 1.0)) {
      throw config_error("mutation probability must lie in [0, 1]");
    }
    if (!(eta_c > 0.0) || !(eta_m > 0.0)) {
      throw config_error("distribution indices must be positive");
    }
  }

  [[nodiscard]] double mutation_probability(std::size_t n_var) const noexcept {
    return pm >= 0.0 ? pm : 1.0 / static_cast<double>(n_var);
  }
};

struct bounds_view {
  std::span<double const> lower;
  std::span<double const> upper;
};

inline bounds_view bounds_of(problem_spec const& problem) noexcept {
  return {problem.lower, problem.upper};
}

using parent_pair = std::pair<std::size_t, std::size_t>;

/// ceil(n / 2) index pairs drawn uniformly with replacement from [0, source_size).
/// The two members of a pair differ unless the source has a single member.
inline std::vector<parent_pair> mating_pool(std::size_t source_size, std::size_t n, rng_stream& rng) {
  if (source_size == 0) {
    throw usage_error("mating_pool: empty source");
  }
  std::vector<parent_pair> pairs((n + 1) / 2);
  for (auto& pr : pairs) {
    pr.first = rng.index(source_size);
    if (source_size == 1) {
      pr.second = 0;
      continue;
    }
    // a self-pair breeds bit-copies whenever mutation skips, which the
    // deduplicating merge then removes, shrinking the population
    pr.second = rng.index(source_size - 1);
    pr.second += pr.second >= pr.first ? 1 : 0;
  }
  return pairs;
}

/// SBX spread applied to one variable for a given uniform draw `u`, before
/// any clamping. The two children always sum to `x1 + x2`.
inline std::pair<double, double> sbx_spread(double x1, double x2, double u, double eta_c) noexcept {
  double const beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta_c + 1.0))
                               : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta_c + 1.0));
  return {0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
          0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)};
}

inline std::pair<decision_vector, decision_vector> sbx_crossover(std::span<double const> p1,
                                                                 std::span<double const> p2,
                                                                 variation_params const& params,
                                                                 bounds_view bounds, rng_stream& rng) {
  if (p1.size() != p2.size() || p1.size() != bounds.lower.size()) {
    throw config_error("sbx_crossover: dimension mismatch");
  }
  decision_vector c1(p1.begin(), p1.end());
  decision_vector c2(p2.begin(), p2.end());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (rng.uniform() >= params.pc) {
      continue;
    }
    double const u = rng.uniform();
    bool const exchange = rng.uniform() < 0.5;
    if (p1[i] == p2[i]) {
      continue;
    }
    auto [y1, y2] = sbx_spread(p1[i], p2[i], u, params.eta_c);
    if (exchange) {
      std::swap(y1, y2); // without it each child only perturbs one parent
    }
    c1[i] = std::clamp(y1, bounds.lower[i], bounds.upper[i]);
    c2[i] = std::clamp(y2, bounds.lower[i], bounds.upper[i]);
  }
  return {std::move(c1), std::move(c2)};
}

/// Bounded polynomial mutation (Deb & Goyal); each variable mutates with
/// probability `pm`.
inline decision_vector polynomial_mutation(std::span<double const> x, variation_params const& params,
                                           bounds_view bounds, rng_stream& rng) {
  if (x.size() != bounds.lower.size()) {
    throw config_error("polynomial_mutation: dimension mismatch");
  }
  decision_vector y(x.begin(), x.end());
  double const pm = params.mutation_probability(x.size());
  double const expo = 1.0 / (params.eta_m + 1.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (rng.uniform() >= pm) {
      continue;
    }
    double const lo = bounds.lower[i];
    double const hi = bounds.upper[i];
    double const span = hi - lo;
    double const d1 = (y[i] - lo) / span;
    double const d2 = (hi - y[i]) / span;
    double const r = rng.uniform();
    double dq = 0.0;
    if (r < 0.5) {
      double const v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, params.eta_m + 1.0);
      dq = std::pow(v, expo) - 1.0;
    } else {
      double const v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, params.eta_m + 1.0);
      dq = 1.0 - std::pow(v, expo);
    }
    y[i] = std::clamp(y[i] + dq * span, lo, hi);
  }
  return y;
}

/// Exactly `n` evaluated offspring bred from `source`; `budget.fes` grows by `n`.
inline population generate_offspring(population const& source, std::size_t n,
                                     variation_params const& params, problem_spec const& problem,
                                     run_budget& budget, rng_stream& rng) {
  if (source.empty()) {
    throw usage_error("generate_offspring: empty source");
  }
  auto const bounds = bounds_of(problem);
  auto const pairs = mating_pool(source.size(), n, rng);
  population offspring;
  offspring.reserve(2 * pairs.size());
  for (auto const& [i, j] : pairs) {
    auto [c1, c2] = sbx_crossover(source[i].decision, source[j].decision, params, bounds, rng);
    offspring.push_back({polynomial_mutation(c1, params, bounds, rng), std::nullopt});
    offspring.push_back({polynomial_mutation(c2, params, bounds, rng), std::nullopt});
  }
  offspring.resize(n);
  evaluate_all(offspring, problem, budget);
  return offspring;
}

} // namespace temof
