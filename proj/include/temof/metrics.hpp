#pragma once

#include "core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace temof::metrics {

enum class indicator { igd, gd, hv };
enum class hv_mode { exact, monte_carlo };

inline std::string_view to_string(indicator i) noexcept {
  switch (i) {
  case indicator::igd:
    return "IGD";
  case indicator::gd:
    return "GD";
  default:
    return "HV";
  }
}

inline indicator parse_indicator(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "IGD") {
    return indicator::igd;
  }
  if (up == "GD") {
    return indicator::gd;
  }
  if (up == "HV") {
    return indicator::hv;
  }
  throw config_error("unknown indicator '" + std::string(name) + "'; valid options: IGD, GD, HV");
}

/// Lower values are better for distance indicators, higher for HV.
inline bool lower_is_better(indicator i) noexcept { return i != indicator::hv; }

struct indicator_result {
  indicator name = indicator::igd;
  double value = 0.0;
  hv_mode mode = hv_mode::exact;
  std::size_t samples = 0; // Monte Carlo only
};

namespace detail {

  inline void check_sets(std::span<objective_vector const> a, std::span<objective_vector const> b,
                         std::string_view what) {
    if (a.empty() || b.empty()) {
      throw usage_error(std::string(what) + ": both point sets must be non-empty");
    }
    std::size_t const m = a.front().size();
    for (auto const* set : {&a, &b}) {
      for (auto const& p : *set) {
        if (p.size() != m) {
          throw config_error(std::string(what) + ": point dimensions differ");
        }
      }
    }
  }

  /// Mean over `from` of the Euclidean distance to the nearest point of `to`.
  inline double mean_nearest_distance(std::span<objective_vector const> from,
                                      std::span<objective_vector const> to) {
    double total = 0.0;
    for (auto const& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (auto const& q : to) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
          double const d = p[i] - q[i];
          d2 += d * d;
        }
        best = std::min(best, d2);
      }
      total += std::sqrt(best);
    }
    return total / static_cast<double>(from.size());
  }

  /// Points strictly better than `ref` in every objective.
  inline std::vector<objective_vector> effective_points(std::span<objective_vector const> points,
                                                        std::span<double const> ref) {
    std::vector<objective_vector> out;
    for (auto const& p : points) {
      if (p.size() != ref.size()) {
        throw config_error("hv: point dimension does not match the reference point");
      }
      bool inside = true;
      for (std::size_t i = 0; i < p.size() && inside; ++i) {
        inside = p[i] < ref[i];
      }
      if (inside) {
        out.push_back(p);
      }
    }
    return out;
  }

  /// Area dominated by 2-D points bounded by (ref_x, ref_y); points sorted by x.
  inline double area_2d(std::vector<std::pair<double, double>> pts, double ref_x, double ref_y) {
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double floor_y = ref_y;
    for (auto const& [x, y] : pts) {
      if (y < floor_y) {
        area += (ref_x - x) * (floor_y - y);
        floor_y = y;
      }
    }
    return area;
  }

  inline double hv_exact(std::vector<objective_vector> pts, std::span<double const> ref) {
    std::size_t const m = ref.size();
    if (pts.empty()) {
      return 0.0;
    }
    if (m == 1) {
      double best = ref[0];
      for (auto const& p : pts) {
        best = std::min(best, p[0]);
      }
      return ref[0] - best;
    }
    if (m == 2) {
      std::vector<std::pair<double, double>> xy;
      xy.reserve(pts.size());
      for (auto const& p : pts) {
        xy.emplace_back(p[0], p[1]);
      }
      return area_2d(std::move(xy), ref[0], ref[1]);
    }
    // m == 3: sweep along the third objective, one 2-D slab per distinct level
    std::sort(pts.begin(), pts.end(), [](auto const& a, auto const& b) { return a[2] < b[2]; });
    double volume = 0.0;
    std::vector<std::pair<double, double>> slice;
    slice.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      slice.emplace_back(pts[i][0], pts[i][1]);
      double const top = i + 1 < pts.size() ? pts[i + 1][2] : ref[2];
      double const depth = top - pts[i][2];
      if (depth > 0.0) {
        volume += depth * area_2d(slice, ref[0], ref[1]);
      }
    }
    return volume;
  }

} // namespace detail

inline indicator_result igd(std::span<objective_vector const> solution,
                            std::span<objective_vector const> reference) {
  detail::check_sets(solution, reference, "igd");
  return {indicator::igd, detail::mean_nearest_distance(reference, solution), hv_mode::exact, 0};
}

inline indicator_result gd(std::span<objective_vector const> solution,
                           std::span<objective_vector const> reference) {
  detail::check_sets(solution, reference, "gd");
  return {indicator::gd, detail::mean_nearest_distance(solution, reference), hv_mode::exact, 0};
}

inline constexpr std::size_t max_exact_hv_objectives = 3;
inline constexpr std::size_t default_hv_samples = 1'000'000;

/// Monte Carlo hypervolume: uniform samples in the box spanned by the
/// component-wise minimum of the effective points and `ref`.
inline indicator_result hv_monte_carlo(std::span<objective_vector const> solution,
                                       std::span<double const> ref, std::size_t samples,
                                       rng_stream& rng) {
  auto const pts = detail::effective_points(solution, ref);
  indicator_result r{indicator::hv, 0.0, hv_mode::monte_carlo, samples};
  if (pts.empty() || samples == 0) {
    return r;
  }
  std::size_t const m = ref.size();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  for (auto const& p : pts) {
    for (std::size_t i = 0; i < m; ++i) {
      lo[i] = std::min(lo[i], p[i]);
    }
  }
  double box = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    box *= ref[i] - lo[i];
  }
  std::vector<double> s(m);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      s[i] = rng.uniform(lo[i], ref[i]);
    }
    for (auto const& p : pts) {
      bool covered = true;
      for (std::size_t i = 0; i < m && covered; ++i) {
        covered = p[i] <= s[i];
      }
      if (covered) {
        ++hits;
        break;
      }
    }
  }
  r.value = box * static_cast<double>(hits) / static_cast<double>(samples);
  return r;
}

/// Hypervolume of the region dominated by `solution` and bounded by `ref`.
/// Exact up to three objectives, Monte Carlo beyond.
inline indicator_result hv(std::span<objective_vector const> solution, std::span<double const> ref,
                           std::size_t mc_samples = default_hv_samples, std::uint64_t mc_seed = 0) {
  if (ref.size() <= max_exact_hv_objectives) {
    return {indicator::hv, detail::hv_exact(detail::effective_points(solution, ref), ref),
            hv_mode::exact, 0};
  }
  auto rng = rng_seed{mc_seed}.stream(stream_purpose::monte_carlo);
  return hv_monte_carlo(solution, ref, mc_samples, rng);
}

/// HV reference point: `scale` times the component-wise maximum of a front sample.
inline objective_vector hv_reference_point(std::span<objective_vector const> front, double scale = 1.1) {
  if (front.empty()) {
    throw usage_error("hv_reference_point: empty front");
  }
  objective_vector nadir = front.front();
  for (auto const& p : front) {
    for (std::size_t i = 0; i < nadir.size(); ++i) {
      nadir[i] = std::max(nadir[i], p[i]);
    }
  }
  for (auto& v : nadir) {
    v *= scale;
  }
  return nadir;
}

} // namespace temof::metrics
