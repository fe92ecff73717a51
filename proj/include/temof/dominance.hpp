#pragma once

#include "core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace temof {

enum class dominance { first_dominates, second_dominates, incomparable, equal };

/// Pareto comparison of two objective vectors under minimization.
inline dominance compare(std::span<double const> a, std::span<double const> b) {
  if (a.size() != b.size()) {
    throw config_error("dominance comparison of vectors with different lengths");
  }
  bool a_better = false;
  bool b_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) {
      a_better = true;
    } else if (b[i] < a[i]) {
      b_better = true;
    }
    if (a_better && b_better) {
      return dominance::incomparable;
    }
  }
  if (a_better) {
    return dominance::first_dominates;
  }
  if (b_better) {
    return dominance::second_dominates;
  }
  return dominance::equal;
}

inline bool dominates(std::span<double const> a, std::span<double const> b) {
  return compare(a, b) == dominance::first_dominates;
}

inline dominance mirror(dominance d) noexcept {
  switch (d) {
  case dominance::first_dominates:
    return dominance::second_dominates;
  case dominance::second_dominates:
    return dominance::first_dominates;
  default:
    return d;
  }
}

/// Fronts as index lists, best front first. Indices within a front keep
/// the input order.
using front_partition = std::vector<std::vector<std::size_t>>;

/// Fast non-dominated sort (Deb et al.): one O(n^2 M) pass building
/// domination counts, then front peeling through the dominated-by lists.
inline front_partition nondominated_sort(std::span<objective_vector const> objs) {
  std::size_t const n = objs.size();
  if (n == 0) {
    throw usage_error("nondominated_sort of an empty set");
  }
  std::vector<std::size_t> dominated_count(n, 0);
  std::vector<std::vector<std::size_t>> dominated_by(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      switch (compare(objs[i], objs[j])) {
      case dominance::first_dominates:
        dominated_by[i].push_back(j);
        ++dominated_count[j];
        break;
      case dominance::second_dominates:
        dominated_by[j].push_back(i);
        ++dominated_count[i];
        break;
      default:
        break;
      }
    }
  }

  front_partition fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominated_count[i] == 0) {
      current.push_back(i);
    }
  }
  std::vector<char> in_next(n, 0);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto i : current) {
      for (auto j : dominated_by[i]) {
        if (--dominated_count[j] == 0) {
          in_next[j] = 1;
        }
      }
    }
    // collect in index order to keep the sort stable
    for (std::size_t j = 0; j < n; ++j) {
      if (in_next[j]) {
        next.push_back(j);
        in_next[j] = 0;
      }
    }
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

inline front_partition nondominated_sort(population const& pop) {
  if (pop.empty()) {
    throw usage_error("nondominated_sort of an empty population");
  }
  for (auto const& ind : pop) {
    if (!ind.evaluated()) {
      throw usage_error("nondominated_sort: population contains an unevaluated member");
    }
  }
  auto const objs = objectives_of(pop);
  return nondominated_sort(std::span<objective_vector const>(objs));
}

/// True when no member dominates another.
inline bool mutually_nondominated(std::span<objective_vector const> objs) {
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      auto const d = compare(objs[i], objs[j]);
      if (d == dominance::first_dominates || d == dominance::second_dominates) {
        return false;
      }
    }
  }
  return true;
}

/// Indices of the non-dominated members, in input order.
inline std::vector<std::size_t> nondominated_indices(std::span<objective_vector const> objs) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < objs.size() && !dominated; ++j) {
      dominated = j != i && dominates(objs[j], objs[i]);
    }
    if (!dominated) {
      out.push_back(i);
    }
  }
  return out;
}

} // namespace temof
