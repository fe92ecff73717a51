#pragma once

#include "core.hpp"
#include "dominance.hpp"
#include "nsga3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace temof::bench {

using std::numbers::pi;

// DTLZ ------------------------------------------------------------------------

namespace detail {

  inline double g_rastrigin(std::span<double const> tail) {
    double s = 0.0;
    for (double x : tail) {
      s += (x - 0.5) * (x - 0.5) - std::cos(20.0 * pi * (x - 0.5));
    }
    return 100.0 * (static_cast<double>(tail.size()) + s);
  }

  inline double g_sphere(std::span<double const> tail) {
    double s = 0.0;
    for (double x : tail) {
      s += (x - 0.5) * (x - 0.5);
    }
    return s;
  }

  /// Spherical front shape over angles theta (already scaled to [0, pi/2]).
  inline objective_vector spherical(std::span<double const> theta, std::size_t m, double radius) {
    objective_vector f(m, radius);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j + 1 < m - i; ++j) {
        f[i] *= std::cos(theta[j]);
      }
      if (i > 0) {
        f[i] *= std::sin(theta[m - i - 1]);
      }
    }
    return f;
  }

  inline objective_vector dtlz1(std::span<double const> x, std::size_t m) {
    double const g = g_rastrigin(x.subspan(m - 1));
    objective_vector f(m, 0.5 * (1.0 + g));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j + 1 < m - i; ++j) {
        f[i] *= x[j];
      }
      if (i > 0) {
        f[i] *= 1.0 - x[m - i - 1];
      }
    }
    return f;
  }

  inline objective_vector dtlz_sphere(std::span<double const> x, std::size_t m, double g,
                                      double alpha) {
    std::vector<double> theta(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      theta[j] = std::pow(x[j], alpha) * pi / 2.0;
    }
    return spherical(theta, m, 1.0 + g);
  }

  inline objective_vector dtlz_degenerate(std::span<double const> x, std::size_t m, double g) {
    std::vector<double> theta(m - 1);
    theta[0] = x[0] * pi / 2.0;
    for (std::size_t j = 1; j + 1 < m; ++j) {
      theta[j] = pi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[j]);
    }
    return spherical(theta, m, 1.0 + g);
  }

  inline objective_vector dtlz7(std::span<double const> x, std::size_t m) {
    auto const tail = x.subspan(m - 1);
    double s = 0.0;
    for (double v : tail) {
      s += v;
    }
    double const g = 1.0 + 9.0 * s / static_cast<double>(tail.size());
    objective_vector f(m);
    double h = static_cast<double>(m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      f[i] = x[i];
      h -= f[i] / (1.0 + g) * (1.0 + std::sin(3.0 * pi * f[i]));
    }
    f[m - 1] = (1.0 + g) * h;
    return f;
  }

  /// Simplex lattice with at most `count` points (exactly `count` for two objectives).
  inline std::vector<std::vector<double>> simplex_sample(std::size_t m, std::size_t count) {
    if (m == 2) {
      std::vector<std::vector<double>> pts(count);
      for (std::size_t i = 0; i < count; ++i) {
        double const t = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
        pts[i] = {t, 1.0 - t};
      }
      return pts;
    }
    return das_dennis(m, reference_divisions_for(m, count)).points;
  }

  /// Grid over [0, 1]^d with the largest per-axis resolution whose size fits in `count`.
  inline std::vector<std::vector<double>> unit_grid(std::size_t d, std::size_t count) {
    std::size_t per_axis = 1;
    auto fits = [&](std::size_t k) {
      double total = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        total *= static_cast<double>(k);
      }
      return total <= static_cast<double>(count);
    };
    while (fits(per_axis + 1)) {
      ++per_axis;
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
      total *= per_axis;
    }
    std::vector<std::vector<double>> pts(total, std::vector<double>(d));
    for (std::size_t p = 0; p < total; ++p) {
      std::size_t rest = p;
      for (std::size_t i = 0; i < d; ++i) {
        std::size_t const k = rest % per_axis;
        rest /= per_axis;
        pts[p][i] = per_axis == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(per_axis - 1);
      }
    }
    return pts;
  }

  inline std::vector<objective_vector> keep_nondominated(std::vector<objective_vector> pts) {
    auto const keep = nondominated_indices(pts);
    std::vector<objective_vector> out;
    out.reserve(keep.size());
    for (auto i : keep) {
      out.push_back(std::move(pts[i]));
    }
    return out;
  }

  /// Evenly spaced values over a union of disjoint intervals, spacing shared
  /// in proportion to interval length.
  inline std::vector<double> spread_over(std::span<std::array<double, 2> const> intervals,
                                         std::size_t count) {
    double total = 0.0;
    for (auto const& iv : intervals) {
      total += iv[1] - iv[0];
    }
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      double t = count == 1 ? 0.0 : total * static_cast<double>(i) / static_cast<double>(count - 1);
      for (auto const& iv : intervals) {
        double const len = iv[1] - iv[0];
        if (t <= len || &iv == &intervals.back()) {
          out.push_back(iv[0] + std::min(t, len));
          break;
        }
        t -= len;
      }
    }
    return out;
  }

} // namespace detail

/// Default distance-variable counts k per DTLZ family (n_var = n_obj + k - 1).
inline std::size_t dtlz_default_k(int family) noexcept {
  switch (family) {
  case 1:
    return 5;
  case 7:
    return 20;
  default:
    return 10;
  }
}

inline problem_spec make_dtlz(int family, std::size_t n_var, std::size_t n_obj) {
  if (family < 1 || family > 7) {
    throw config_error("unknown DTLZ family " + std::to_string(family));
  }
  std::string const name = "DTLZ" + std::to_string(family);
  if (n_obj < 2) {
    throw config_error(name + " requires n_obj >= 2");
  }
  if (n_var == 0) {
    n_var = n_obj + dtlz_default_k(family) - 1;
  }
  if (n_var < n_obj) {
    throw config_error(name + " requires n_var >= n_obj (got n_var = " + std::to_string(n_var) +
                       ", n_obj = " + std::to_string(n_obj) + ")");
  }
  problem_spec p;
  p.name = name;
  p.n_var = n_var;
  p.n_obj = n_obj;
  p.lower.assign(n_var, 0.0);
  p.upper.assign(n_var, 1.0);
  std::size_t const m = n_obj;
  switch (family) {
  case 1:
    p.evaluate = [m](std::span<double const> x) { return detail::dtlz1(x, m); };
    p.sample_front = [m](std::size_t count) {
      auto pts = detail::simplex_sample(m, count);
      for (auto& w : pts) {
        for (auto& v : w) {
          v *= 0.5;
        }
      }
      return pts;
    };
    break;
  case 2:
  case 3:
  case 4: {
    double const alpha = family == 4 ? 100.0 : 1.0;
    bool const multimodal = family == 3;
    p.evaluate = [m, alpha, multimodal](std::span<double const> x) {
      auto const tail = x.subspan(m - 1);
      double const g = multimodal ? detail::g_rastrigin(tail) : detail::g_sphere(tail);
      return detail::dtlz_sphere(x, m, g, alpha);
    };
    p.sample_front = [m](std::size_t count) {
      auto pts = detail::simplex_sample(m, count);
      for (auto& w : pts) {
        double norm = 0.0;
        for (double v : w) {
          norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : w) {
          v /= norm;
        }
      }
      return pts;
    };
    break;
  }
  case 5:
  case 6: {
    bool const powered = family == 6;
    p.evaluate = [m, powered](std::span<double const> x) {
      auto const tail = x.subspan(m - 1);
      double g = 0.0;
      if (powered) {
        for (double v : tail) {
          g += std::pow(v, 0.1);
        }
      } else {
        g = detail::g_sphere(tail);
      }
      return detail::dtlz_degenerate(x, m, g);
    };
    // degenerate curve: theta_1 free, every other angle pi/4
    p.sample_front = [m](std::size_t count) {
      std::vector<objective_vector> pts(count);
      std::vector<double> theta(m - 1, pi / 4.0);
      for (std::size_t i = 0; i < count; ++i) {
        theta[0] = count == 1 ? pi / 4.0
                              : pi / 2.0 * static_cast<double>(i) / static_cast<double>(count - 1);
        pts[i] = detail::spherical(theta, m, 1.0);
      }
      return pts;
    };
    break;
  }
  case 7:
    p.evaluate = [m](std::span<double const> x) { return detail::dtlz7(x, m); };
    p.sample_front = [m](std::size_t count) {
      // each x_i restricted to the two intervals where h stays non-dominated
      constexpr std::array<std::array<double, 2>, 2> pieces{{{0.0, 0.251412}, {0.631627, 0.859401}}};
      auto grid = detail::unit_grid(m - 1, count);
      std::vector<objective_vector> pts;
      pts.reserve(grid.size());
      double const total = (pieces[0][1] - pieces[0][0]) + (pieces[1][1] - pieces[1][0]);
      double const split = (pieces[0][1] - pieces[0][0]) / total;
      for (auto const& u : grid) {
        objective_vector f(m);
        double h = static_cast<double>(m);
        for (std::size_t i = 0; i + 1 < m; ++i) {
          f[i] = u[i] <= split
                     ? pieces[0][0] + u[i] / split * (pieces[0][1] - pieces[0][0])
                     : pieces[1][0] + (u[i] - split) / (1.0 - split) * (pieces[1][1] - pieces[1][0]);
          h -= f[i] / 2.0 * (1.0 + std::sin(3.0 * pi * f[i]));
        }
        f[m - 1] = 2.0 * h;
        pts.push_back(std::move(f));
      }
      return detail::keep_nondominated(std::move(pts));
    };
    break;
  default:
    break;
  }
  return p;
}

// ZDT -------------------------------------------------------------------------

inline problem_spec make_zdt(int family, std::size_t n_var) {
  std::string const name = "ZDT" + std::to_string(family);
  if (family != 1 && family != 2 && family != 3 && family != 4 && family != 6) {
    throw config_error("unknown ZDT family " + name);
  }
  if (n_var == 0) {
    n_var = family == 4 || family == 6 ? 10 : 30;
  }
  if (n_var < 2) {
    throw config_error(name + " requires n_var >= 2");
  }
  problem_spec p;
  p.name = name;
  p.n_var = n_var;
  p.n_obj = 2;
  p.lower.assign(n_var, 0.0);
  p.upper.assign(n_var, 1.0);
  double const tail_n = static_cast<double>(n_var - 1);

  auto curve = [](std::function<double(double)> f2, std::vector<std::array<double, 2>> intervals) {
    return [f2 = std::move(f2), intervals = std::move(intervals)](std::size_t count) {
      std::vector<objective_vector> pts;
      pts.reserve(count);
      for (double f1 : detail::spread_over(intervals, count)) {
        pts.push_back({f1, f2(f1)});
      }
      return pts;
    };
  };

  switch (family) {
  case 1:
  case 2:
  case 3:
    p.evaluate = [tail_n, family](std::span<double const> x) {
      double s = 0.0;
      for (std::size_t i = 1; i < x.size(); ++i) {
        s += x[i];
      }
      double const g = 1.0 + 9.0 * s / tail_n;
      double const r = x[0] / g;
      double h = 0.0;
      if (family == 1) {
        h = 1.0 - std::sqrt(r);
      } else if (family == 2) {
        h = 1.0 - r * r;
      } else {
        h = 1.0 - std::sqrt(r) - r * std::sin(10.0 * pi * x[0]);
      }
      return objective_vector{x[0], g * h};
    };
    if (family == 1) {
      p.sample_front = curve([](double f1) { return 1.0 - std::sqrt(f1); }, {{0.0, 1.0}});
    } else if (family == 2) {
      p.sample_front = curve([](double f1) { return 1.0 - f1 * f1; }, {{0.0, 1.0}});
    } else {
      p.sample_front = curve(
          [](double f1) { return 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * pi * f1); },
          {{0.0, 0.0830015349},
           {0.1822287280, 0.2577623634},
           {0.4093136748, 0.4538821041},
           {0.6183967944, 0.6525117038},
           {0.8233317983, 0.8518328654}});
    }
    break;
  case 4:
    for (std::size_t i = 1; i < n_var; ++i) {
      p.lower[i] = -5.0;
      p.upper[i] = 5.0;
    }
    p.evaluate = [tail_n](std::span<double const> x) {
      double s = 0.0;
      for (std::size_t i = 1; i < x.size(); ++i) {
        s += x[i] * x[i] - 10.0 * std::cos(4.0 * pi * x[i]);
      }
      double const g = 1.0 + 10.0 * tail_n + s;
      return objective_vector{x[0], g * (1.0 - std::sqrt(x[0] / g))};
    };
    p.sample_front = curve([](double f1) { return 1.0 - std::sqrt(f1); }, {{0.0, 1.0}});
    break;
  case 6:
    p.evaluate = [tail_n](std::span<double const> x) {
      double const f1 = 1.0 - std::exp(-4.0 * x[0]) * std::pow(std::sin(6.0 * pi * x[0]), 6.0);
      double s = 0.0;
      for (std::size_t i = 1; i < x.size(); ++i) {
        s += x[i];
      }
      double const g = 1.0 + 9.0 * std::pow(s / tail_n, 0.25);
      double const r = f1 / g;
      return objective_vector{f1, g * (1.0 - r * r)};
    };
    p.sample_front = curve([](double f1) { return 1.0 - f1 * f1; }, {{0.2807753191, 1.0}});
    break;
  default:
    break;
  }
  return p;
}

// Registry --------------------------------------------------------------------

struct registry_entry {
  std::string name;
  std::string description;
  std::function<problem_spec(std::size_t n_var, std::size_t n_obj)> factory;
};

inline std::vector<registry_entry> const& registry() {
  static std::vector<registry_entry> const entries = [] {
    std::vector<registry_entry> out;
    for (int k = 1; k <= 7; ++k) {
      out.push_back({"DTLZ" + std::to_string(k),
                     "scalable DTLZ" + std::to_string(k) + ", n_var default n_obj + " +
                         std::to_string(dtlz_default_k(k)) + " - 1",
                     [k](std::size_t n_var, std::size_t n_obj) {
                       return make_dtlz(k, n_var, n_obj == 0 ? 3 : n_obj);
                     }});
    }
    for (int k : {1, 2, 3, 4, 6}) {
      out.push_back({"ZDT" + std::to_string(k),
                     "bi-objective ZDT" + std::to_string(k) + ", n_var default " +
                         std::to_string(k == 4 || k == 6 ? 10 : 30),
                     [k](std::size_t n_var, std::size_t n_obj) {
                       if (n_obj != 2 && n_obj != 0) {
                         throw config_error("ZDT" + std::to_string(k) + " requires n_obj = 2 (got " +
                                            std::to_string(n_obj) + ")");
                       }
                       return make_zdt(k, n_var);
                     }});
    }
    return out;
  }();
  return entries;
}

inline std::string registry_names() {
  std::string out;
  for (auto const& e : registry()) {
    out += (out.empty() ? "" : ", ") + e.name;
  }
  return out;
}

/// Looks up a benchmark by name. Zero for `n_var` or `n_obj` selects the
/// family default (DTLZ: 3 objectives, ZDT: 2).
inline problem_spec make_problem(std::string const& name, std::size_t n_var, std::size_t n_obj) {
  for (auto const& e : registry()) {
    if (e.name == name) {
      auto p = e.factory(n_var, n_obj);
      p.validate();
      return p;
    }
  }
  throw config_error("unknown problem '" + name + "'; valid options: " + registry_names());
}

/// Deterministic sample of the true Pareto front. Multi-objective simplex
/// based fronts return the largest lattice that fits in `count`.
inline std::vector<objective_vector> sample_true_front(problem_spec const& problem, std::size_t count) {
  if (!problem.sample_front) {
    throw unsupported_error(problem.name + " has no analytic Pareto front");
  }
  if (count == 0) {
    throw usage_error("sample_true_front: count must be positive");
  }
  return problem.sample_front(count);
}

} // namespace temof::bench
