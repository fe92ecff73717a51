#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace temof {

// Errors ----------------------------------------------------------------------

/// Invalid configuration: bad bounds, mismatched dimensions, unknown names.
class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Operation called outside its preconditions (empty input, unevaluated member).
class usage_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// The evaluator produced a non-finite objective.
class evaluation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Requested capability does not exist for this problem (e.g. no analytic front).
class unsupported_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Domain types ----------------------------------------------------------------

using decision_vector = std::vector<double>;
using objective_vector = std::vector<double>;

struct individual {
  decision_vector decision;
  std::optional<objective_vector> objectives;

  [[nodiscard]] bool evaluated() const noexcept { return objectives.has_value(); }

  [[nodiscard]] objective_vector const& f() const {
    if (!objectives) {
      throw usage_error("individual has not been evaluated");
    }
    return *objectives;
  }
};

using population = std::vector<individual>;

struct problem_spec {
  using evaluator = std::function<objective_vector(std::span<double const>)>;
  using front_sampler = std::function<std::vector<objective_vector>(std::size_t)>;

  std::string name;
  std::size_t n_var = 0;
  std::size_t n_obj = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  evaluator evaluate;
  front_sampler sample_front; // empty when the family has no analytic front

  void validate() const {
    if (n_var == 0 || n_obj == 0) {
      throw config_error(name + ": n_var and n_obj must be positive");
    }
    if (lower.size() != n_var || upper.size() != n_var) {
      throw config_error(name + ": bound vectors must have length n_var");
    }
    for (std::size_t i = 0; i < n_var; ++i) {
      if (!(lower[i] < upper[i])) {
        std::ostringstream os;
        os << name << ": invalid bounds at variable " << i << " (lower " << lower[i]
           << " >= upper " << upper[i] << ")";
        throw config_error(os.str());
      }
    }
    if (!evaluate) {
      throw config_error(name + ": missing evaluator");
    }
  }

  [[nodiscard]] bool within_bounds(std::span<double const> x) const noexcept {
    if (x.size() != n_var) {
      return false;
    }
    for (std::size_t i = 0; i < n_var; ++i) {
      if (!(x[i] >= lower[i] && x[i] <= upper[i])) {
        return false;
      }
    }
    return true;
  }
};

/// Evaluation counter. `fes` only grows; the driver compares it against `max_fes`.
struct run_budget {
  std::size_t max_fes = 0;
  std::size_t fes = 0;
};

// Random streams --------------------------------------------------------------

enum class stream_purpose : std::uint64_t {
  initialization = 1,
  mating = 2,
  niching = 3,
  stage_gate = 4,
  monte_carlo = 5,
  seeding = 6,
};

namespace detail {
  constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
  }
} // namespace detail

/// Random source with platform-independent draws. The distributions are
/// written out by hand so that results do not depend on the standard
/// library's distribution implementations.
class rng_stream {
public:
  using engine_type = std::mt19937_64;

  explicit rng_stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0, rejection-sampled to avoid modulo bias.
  std::size_t index(std::size_t n) noexcept {
    auto const bound = static_cast<std::uint64_t>(n);
    auto const limit = std::numeric_limits<std::uint64_t>::max() -
                       std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = engine_();
    while (r >= limit) {
      r = engine_();
    }
    return static_cast<std::size_t>(r % bound);
  }

  std::uint64_t next_u64() noexcept { return engine_(); }

private:
  engine_type engine_;
};

/// Master seed of one run; substreams are keyed by purpose, so the order in
/// which different parts of a run consume randomness never interacts.
struct rng_seed {
  std::uint64_t master_seed = 0;

  [[nodiscard]] std::uint64_t derive(stream_purpose purpose, std::uint64_t salt = 0) const noexcept {
    std::uint64_t h = detail::splitmix64(master_seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return detail::splitmix64(h ^ salt);
  }

  [[nodiscard]] rng_stream stream(stream_purpose purpose, std::uint64_t salt = 0) const {
    return rng_stream(derive(purpose, salt));
  }
};

/// Seed of the i-th run of an experiment whose seeds come from one master seed.
inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) noexcept {
  return rng_seed{master_seed}.derive(stream_purpose::seeding, run_index);
}

// Population utilities --------------------------------------------------------

namespace detail {
  inline void require_dimensions(individual const& ind, std::size_t n_var, std::string_view what) {
    if (ind.decision.size() != n_var) {
      std::ostringstream os;
      os << what << ": decision length " << ind.decision.size() << " does not match " << n_var;
      throw config_error(os.str());
    }
  }
} // namespace detail

/// Evaluates every unevaluated member in place; `budget.fes` grows by the
/// number of fresh evaluations. The budget is not enforced here.
inline void evaluate_all(population& pop, problem_spec const& problem, run_budget& budget) {
  for (auto& ind : pop) {
    if (ind.evaluated()) {
      continue;
    }
    detail::require_dimensions(ind, problem.n_var, problem.name);
    objective_vector f = problem.evaluate(ind.decision);
    bool ok = f.size() == problem.n_obj;
    for (double v : f) {
      ok = ok && std::isfinite(v);
    }
    if (!ok) {
      std::ostringstream os;
      os << problem.name << ": evaluator returned an invalid objective vector for x = (";
      for (std::size_t i = 0; i < ind.decision.size(); ++i) {
        os << (i ? ", " : "") << ind.decision[i];
      }
      os << ")";
      throw evaluation_error(os.str());
    }
    ind.objectives = std::move(f);
    ++budget.fes;
  }
}

inline population initialize_population(problem_spec const& problem, std::size_t n,
                                        rng_stream& rng, run_budget& budget) {
  if (n == 0) {
    throw config_error("population size must be at least 1");
  }
  problem.validate();
  population pop(n);
  for (auto& ind : pop) {
    ind.decision.resize(problem.n_var);
    for (std::size_t i = 0; i < problem.n_var; ++i) {
      ind.decision[i] = rng.uniform(problem.lower[i], problem.upper[i]);
    }
  }
  evaluate_all(pop, problem, budget);
  return pop;
}

/// Union of `a` and `b` keeping the first occurrence of each decision vector.
/// Duplicates are exact component-wise equality.
inline population merge_dedupe(population const& a, population const& b) {
  population out;
  out.reserve(a.size() + b.size());
  std::size_t const n_var = !a.empty() ? a.front().decision.size()
                            : !b.empty() ? b.front().decision.size()
                                         : 0;
  auto seen = [&out](decision_vector const& x) {
    for (auto const& kept : out) {
      if (kept.decision == x) {
        return true;
      }
    }
    return false;
  };
  for (auto const* src : {&a, &b}) {
    for (auto const& ind : *src) {
      detail::require_dimensions(ind, n_var, "merge_dedupe");
      if (!seen(ind.decision)) {
        out.push_back(ind);
      }
    }
  }
  return out;
}

inline std::vector<objective_vector> objectives_of(population const& pop) {
  std::vector<objective_vector> out;
  out.reserve(pop.size());
  for (auto const& ind : pop) {
    out.push_back(ind.f());
  }
  return out;
}

} // namespace temof
