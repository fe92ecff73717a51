#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

namespace temof::stats {

enum class orientation { lower_is_better, higher_is_better };

enum class mark { better, worse, equal };

inline std::string_view symbol(mark m) noexcept {
  switch (m) {
  case mark::better:
    return "+";
  case mark::worse:
    return "-";
  default:
    return "=";
  }
}

/// Exact-distribution switchover points. Larger problems use the normal
/// approximation with tie and continuity corrections.
inline constexpr std::size_t ranksum_exact_max_total = 20;
inline constexpr std::size_t signed_rank_exact_max_n = 25;

struct comparison_mark {
  mark result = mark::equal;
  double p_value = 1.0;
  orientation direction = orientation::lower_is_better;
  bool exact = false;
  double rank_sum = 0.0; // rank sum of the first sample
};

struct signed_rank_result {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double p_value = 1.0;
  std::size_t n_effective = 0;
  bool exact = false;
};

struct friedman_result {
  std::vector<double> mean_ranks;
  std::size_t n_problems = 0;
  double chi_square = 0.0;
};

/// Midranks (1-based) of `values`; tied values share the average rank.
inline std::vector<double> midranks(std::span<double const> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    double const r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = r;
    }
    i = j + 1;
  }
  return ranks;
}

namespace detail {

  /// Sum over tie groups of t^3 - t.
  inline double tie_term(std::span<double const> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
      std::size_t j = i;
      while (j + 1 < v.size() && v[j + 1] == v[i]) {
        ++j;
      }
      auto const t = static_cast<double>(j - i + 1);
      total += t * t * t - t;
      i = j + 1;
    }
    return total;
  }

  inline double normal_two_sided(double deviation, double variance) {
    if (!(variance > 0.0)) {
      return 1.0;
    }
    double const z = std::max(0.0, std::abs(deviation) - 0.5) / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }

  inline double two_sided_from_counts(std::vector<double> const& counts, std::size_t observed) {
    double const total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (s <= observed) {
        lower += counts[s];
      }
      if (s >= observed) {
        upper += counts[s];
      }
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
  }

} // namespace detail

/// Number of m-subsets of {1..n} for every possible rank sum (index = sum).
inline std::vector<double> ranksum_distribution(std::size_t m, std::size_t n) {
  std::size_t const max_sum = n * (n + 1) / 2;
  // ways[j][s]: j ranks chosen so far summing to s
  std::vector<std::vector<double>> ways(m + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t j = std::min(r, m); j >= 1; --j) {
      for (std::size_t s = max_sum; s >= r; --s) {
        ways[j][s] += ways[j - 1][s - r];
      }
    }
  }
  return ways[m];
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) comparison of `a` against `b`.
/// The mark describes `a`: better when its values are significantly on the
/// good side for `dir`.
inline comparison_mark ranksum_mark(std::span<double const> a, std::span<double const> b, double alpha,
                                    orientation dir) {
  if (a.size() < 2 || b.size() < 2) {
    throw usage_error("ranksum_mark requires at least two values per sample");
  }
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  auto const ranks = midranks(pooled);
  double const w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  auto const m = static_cast<double>(a.size());
  auto const nb = static_cast<double>(b.size());
  double const total = m + nb;
  double const ties = detail::tie_term(pooled);

  comparison_mark out;
  out.direction = dir;
  out.rank_sum = w;
  if (ties == total * total * total - total) {
    return out; // every value identical
  }
  if (pooled.size() <= ranksum_exact_max_total && ties == 0.0) {
    auto const counts = ranksum_distribution(a.size(), pooled.size());
    out.p_value = detail::two_sided_from_counts(counts, static_cast<std::size_t>(std::lround(w)));
    out.exact = true;
  } else {
    double const mean = m * (total + 1.0) / 2.0;
    double const var = m * nb / 12.0 * ((total + 1.0) - ties / (total * (total - 1.0)));
    out.p_value = detail::normal_two_sided(w - mean, var);
  }
  if (out.p_value < alpha) {
    bool const a_lower = w < m * (total + 1.0) / 2.0;
    bool const a_wins = dir == orientation::lower_is_better ? a_lower : !a_lower;
    out.result = a_wins ? mark::better : mark::worse;
  }
  return out;
}

/// Distribution of the doubled positive-rank sum for the given doubled
/// ranks, as counts over all 2^n sign patterns (index = 2 * R+).
inline std::vector<double> signed_rank_distribution(std::span<std::size_t const> doubled_ranks) {
  std::size_t const max_sum = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), std::size_t{0});
  std::vector<double> counts(max_sum + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (auto r : doubled_ranks) {
    reach += r;
    for (std::size_t s = reach; s >= r; --s) {
      counts[s] += counts[s - r];
      if (s == r) {
        break;
      }
    }
  }
  return counts;
}

/// Wilcoxon signed-rank test on the paired differences a - b. R+ collects
/// the ranks of positive differences. Zero differences are dropped; tied
/// magnitudes share midranks.
inline signed_rank_result signed_rank(std::span<double const> a, std::span<double const> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw usage_error("signed_rank requires two paired samples of equal length >= 2");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double const d = a[i] - b[i];
    if (d != 0.0) {
      diffs.push_back(d);
    }
  }
  signed_rank_result out;
  out.n_effective = diffs.size();
  if (diffs.empty()) {
    return out;
  }
  std::vector<double> mags(diffs.size());
  std::transform(diffs.begin(), diffs.end(), mags.begin(), [](double d) { return std::abs(d); });
  auto const ranks = midranks(mags);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    (diffs[i] > 0.0 ? out.r_plus : out.r_minus) += ranks[i];
  }
  auto const n = static_cast<double>(diffs.size());
  if (diffs.size() <= signed_rank_exact_max_n) {
    std::vector<std::size_t> doubled(ranks.size());
    std::transform(ranks.begin(), ranks.end(), doubled.begin(),
                   [](double r) { return static_cast<std::size_t>(std::lround(2.0 * r)); });
    auto const counts = signed_rank_distribution(doubled);
    out.p_value = detail::two_sided_from_counts(counts, static_cast<std::size_t>(std::lround(2.0 * out.r_plus)));
    out.exact = true;
  } else {
    double const mean = n * (n + 1.0) / 4.0;
    double const var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - detail::tie_term(mags) / 48.0;
    out.p_value = detail::normal_two_sided(out.r_plus - mean, var);
  }
  return out;
}

/// Friedman mean ranks over a problems x algorithms score matrix (rank 1 is
/// best for `dir`), with the Friedman chi-square statistic.
inline friedman_result friedman_ranks(std::vector<std::vector<double>> const& matrix, orientation dir) {
  if (matrix.size() < 2) {
    throw usage_error("friedman_ranks requires at least two problems");
  }
  std::size_t const k = matrix.front().size();
  if (k < 2) {
    throw usage_error("friedman_ranks requires at least two algorithms");
  }
  friedman_result out;
  out.n_problems = matrix.size();
  out.mean_ranks.assign(k, 0.0);
  for (auto const& row : matrix) {
    if (row.size() != k) {
      throw usage_error("friedman_ranks: ragged score matrix");
    }
    std::vector<double> keyed(row);
    if (dir == orientation::higher_is_better) {
      for (auto& v : keyed) {
        v = -v;
      }
    }
    auto const r = midranks(keyed);
    for (std::size_t j = 0; j < k; ++j) {
      out.mean_ranks[j] += r[j];
    }
  }
  auto const n = static_cast<double>(matrix.size());
  auto const kk = static_cast<double>(k);
  double sum_sq = 0.0;
  for (auto& r : out.mean_ranks) {
    r /= n;
    sum_sq += r * r;
  }
  out.chi_square = 12.0 * n / (kk * (kk + 1.0)) * (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
  return out;
}

} // namespace temof::stats
