#pragma once

#include "core.hpp"
#include "dominance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace temof {

/// Structured reference directions on the unit simplex.
struct reference_set {
  std::vector<std::vector<double>> points;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept {
    return points.empty() ? 0 : points.front().size();
  }
};

inline constexpr std::uint64_t max_reference_points = 10'000'000;

/// C(n, k) saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(r);
}

/// Simplex lattice with denominator `divisions`: every vector of
/// non-negative multiples of 1/divisions summing to one.
inline reference_set das_dennis(std::size_t n_obj, std::size_t divisions) {
  if (n_obj < 2 || divisions < 1) {
    throw config_error("das_dennis requires n_obj >= 2 and divisions >= 1");
  }
  auto const count = binomial(divisions + n_obj - 1, n_obj - 1);
  if (count > max_reference_points) {
    throw config_error("das_dennis: " + std::to_string(count) +
                       " reference points exceed the limit of " + std::to_string(max_reference_points));
  }
  reference_set refs;
  refs.points.reserve(count);
  std::vector<std::size_t> parts(n_obj, 0);
  auto const h = static_cast<double>(divisions);
  // enumerate compositions of `divisions` into n_obj parts, first component ascending
  auto recurse = [&](auto&& self, std::size_t dim, std::size_t left) -> void {
    if (dim + 1 == n_obj) {
      parts[dim] = left;
      std::vector<double> w(n_obj);
      for (std::size_t i = 0; i < n_obj; ++i) {
        w[i] = static_cast<double>(parts[i]) / h;
      }
      refs.points.push_back(std::move(w));
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      parts[dim] = k;
      self(self, dim + 1, left - k);
    }
  };
  recurse(recurse, 0, divisions);
  return refs;
}

/// Largest lattice denominator whose point count does not exceed `n`
/// (at least 1).
inline std::size_t reference_divisions_for(std::size_t n_obj, std::size_t n) {
  if (n_obj < 2) {
    throw config_error("reference points need at least two objectives");
  }
  std::size_t h = 1;
  while (binomial(h + n_obj, n_obj - 1) <= n) {
    ++h;
  }
  return h;
}

// Normalization ---------------------------------------------------------------

struct normalization_state {
  objective_vector ideal;      // running component-wise minimum; empty before first use
  std::vector<double> intercepts;
  bool used_fallback = false;
};

inline constexpr double intercept_floor = 1e-12;
inline constexpr double asf_off_axis_weight = 1e-6;

/// Translates by the running ideal point and scales by the intercepts of the
/// hyperplane through the per-axis extreme points. A singular or degenerate
/// hyperplane falls back to (max - ideal), floored at 1e-12.
inline std::vector<std::vector<double>> normalize(std::span<objective_vector const> objs,
                                                  normalization_state& state) {
  if (objs.empty()) {
    throw usage_error("normalize of an empty set");
  }
  std::size_t const m = objs.front().size();
  if (state.ideal.size() != m) {
    state.ideal.assign(m, std::numeric_limits<double>::infinity());
  }
  for (auto const& f : objs) {
    for (std::size_t i = 0; i < m; ++i) {
      state.ideal[i] = std::min(state.ideal[i], f[i]);
    }
  }

  std::vector<std::size_t> extremes(m, 0);
  for (std::size_t axis = 0; axis < m; ++axis) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < objs.size(); ++p) {
      double asf = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        double const w = i == axis ? 1.0 : asf_off_axis_weight;
        asf = std::max(asf, (objs[p][i] - state.ideal[i]) / w);
      }
      if (asf < best) {
        best = asf;
        extremes[axis] = p;
      }
    }
  }

  Eigen::MatrixXd e(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          objs[extremes[r]][c] - state.ideal[c];
    }
  }
  state.intercepts.assign(m, 0.0);
  bool ok = false;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
  if (lu.isInvertible()) {
    Eigen::VectorXd const b = lu.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
    ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      double const a = 1.0 / b(static_cast<Eigen::Index>(i));
      ok = ok && std::isfinite(a) && a > 1e-6;
      state.intercepts[i] = a;
    }
  }
  state.used_fallback = !ok;
  if (!ok) {
    for (std::size_t i = 0; i < m; ++i) {
      double worst = -std::numeric_limits<double>::infinity();
      for (auto const& f : objs) {
        worst = std::max(worst, f[i]);
      }
      state.intercepts[i] = std::max(worst - state.ideal[i], intercept_floor);
    }
  }

  std::vector<std::vector<double>> out(objs.size(), std::vector<double>(m));
  for (std::size_t p = 0; p < objs.size(); ++p) {
    for (std::size_t i = 0; i < m; ++i) {
      out[p][i] = (objs[p][i] - state.ideal[i]) / state.intercepts[i];
    }
  }
  return out;
}

// Association -----------------------------------------------------------------

struct association {
  std::size_t ref = 0;
  double distance = 0.0;
};

/// Perpendicular distance from `p` to the ray through the origin along `w`.
inline double perpendicular_distance(std::span<double const> p, std::span<double const> w) noexcept {
  double dot = 0.0;
  double ww = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * w[i];
    ww += w[i] * w[i];
  }
  double const t = ww > 0.0 ? dot / ww : 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double const r = p[i] - t * w[i];
    d2 += r * r;
  }
  return std::sqrt(d2);
}

/// Nearest reference ray per point; ties go to the lowest reference index.
inline std::vector<association> associate(std::span<std::vector<double> const> normalized,
                                          reference_set const& refs) {
  if (refs.points.empty()) {
    throw usage_error("associate: empty reference set");
  }
  std::vector<association> out(normalized.size());
  for (std::size_t p = 0; p < normalized.size(); ++p) {
    association best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t r = 0; r < refs.size(); ++r) {
      double const d = perpendicular_distance(normalized[p], refs.points[r]);
      if (d < best.distance) {
        best = {r, d};
      }
    }
    out[p] = best;
  }
  return out;
}

// Selection -------------------------------------------------------------------

namespace detail {

  /// Chooses `k` members of `critical` to join `chosen` by reference-point
  /// niching over the candidate set `chosen ∪ critical`. Returns the picks.
  inline std::vector<std::size_t> niche_fill(std::span<objective_vector const> objs,
                                             std::vector<std::size_t> const& chosen,
                                             std::vector<std::size_t> const& critical, std::size_t k,
                                             reference_set const& refs, normalization_state& state,
                                             rng_stream& rng) {
    std::vector<std::size_t> candidates = chosen;
    candidates.insert(candidates.end(), critical.begin(), critical.end());
    std::vector<objective_vector> cand_objs;
    cand_objs.reserve(candidates.size());
    for (auto i : candidates) {
      cand_objs.push_back(objs[i]);
    }
    auto const normalized = normalize(cand_objs, state);
    auto const assoc = associate(normalized, refs);

    std::vector<std::size_t> niche_count(refs.size(), 0);
    for (std::size_t c = 0; c < chosen.size(); ++c) {
      ++niche_count[assoc[c].ref];
    }
    // critical-front members still available, grouped per reference
    std::vector<std::vector<std::size_t>> pending(refs.size());
    for (std::size_t c = 0; c < critical.size(); ++c) {
      pending[assoc[chosen.size() + c].ref].push_back(c);
    }
    std::vector<char> active(refs.size(), 1);
    std::vector<std::size_t> picks;
    picks.reserve(k);
    std::vector<std::size_t> ties;
    while (picks.size() < k) {
      std::size_t min_count = std::numeric_limits<std::size_t>::max();
      ties.clear();
      for (std::size_t r = 0; r < refs.size(); ++r) {
        if (!active[r]) {
          continue;
        }
        if (niche_count[r] < min_count) {
          min_count = niche_count[r];
          ties.assign(1, r);
        } else if (niche_count[r] == min_count) {
          ties.push_back(r);
        }
      }
      if (ties.empty()) {
        break; // unreachable while k <= |critical|
      }
      std::size_t const r = ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
      auto& members = pending[r];
      if (members.empty()) {
        active[r] = 0;
        continue;
      }
      std::size_t slot = 0;
      if (niche_count[r] == 0) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < members.size(); ++s) {
          double const d = assoc[chosen.size() + members[s]].distance;
          if (d < best) {
            best = d;
            slot = s;
          }
        }
      } else {
        slot = rng.index(members.size());
      }
      picks.push_back(critical[members[slot]]);
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(slot));
      ++niche_count[r];
    }
    return picks;
  }

  inline population gather(population const& pop, std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    population out;
    out.reserve(indices.size());
    for (auto i : indices) {
      out.push_back(pop[i]);
    }
    return out;
  }

} // namespace detail

/// NSGA-III survival: whole fronts while they fit, then niching on the
/// critical front. Output keeps the input order and has size min(n, |pop|).
inline population environmental_selection(population const& pop, std::size_t n,
                                          reference_set const& refs, normalization_state& state,
                                          rng_stream& rng) {
  if (pop.size() <= n) {
    return pop;
  }
  auto const objs = objectives_of(pop);
  auto const fronts = nondominated_sort(std::span<objective_vector const>(objs));
  std::vector<std::size_t> chosen;
  std::size_t level = 0;
  while (chosen.size() + fronts[level].size() <= n) {
    chosen.insert(chosen.end(), fronts[level].begin(), fronts[level].end());
    ++level;
  }
  if (chosen.size() < n) {
    auto picks = detail::niche_fill(objs, chosen, fronts[level], n - chosen.size(), refs, state, rng);
    chosen.insert(chosen.end(), picks.begin(), picks.end());
  }
  return detail::gather(pop, std::move(chosen));
}

/// Keeps only the first non-dominated front, niching it down to `n` members
/// when it is larger. The result may be smaller than `n`.
inline population first_front_selection(population const& pop, std::size_t n,
                                        reference_set const& refs, normalization_state& state,
                                        rng_stream& rng) {
  if (pop.empty()) {
    return pop;
  }
  auto const objs = objectives_of(pop);
  auto const fronts = nondominated_sort(std::span<objective_vector const>(objs));
  auto const& first = fronts.front();
  if (first.size() <= n) {
    return detail::gather(pop, first);
  }
  auto picks = detail::niche_fill(objs, {}, first, n, refs, state, rng);
  return detail::gather(pop, std::move(picks));
}

/// NSGA-III as a pluggable base: owns its reference set, normalization state
/// and niching stream.
class nsga3_selector {
public:
  nsga3_selector(reference_set refs, rng_stream niching_rng)
      : refs_(std::move(refs)), rng_(niching_rng) {}

  nsga3_selector(std::size_t n_obj, std::size_t population_size, rng_seed const& seed)
      : nsga3_selector(das_dennis(n_obj, reference_divisions_for(n_obj, population_size)),
                       seed.stream(stream_purpose::niching)) {}

  population environmental_selection(population const& pop, std::size_t n) {
    return temof::environmental_selection(pop, n, refs_, state_, rng_);
  }

  population first_front_selection(population const& pop, std::size_t n) {
    return temof::first_front_selection(pop, n, refs_, state_, rng_);
  }

  [[nodiscard]] reference_set const& references() const noexcept { return refs_; }
  [[nodiscard]] normalization_state const& state() const noexcept { return state_; }

private:
  reference_set refs_;
  normalization_state state_;
  rng_stream rng_;
};

} // namespace temof
