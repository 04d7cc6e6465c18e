#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rmf/compensated.hpp"
#include "rmf/dirichlet.hpp"
#include "rmf/dyadic.hpp"
#include "rmf/errors.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

/// Geometric checkpoints round(10^(j / per_decade)) lying in [x_min, x_max].
/// x_max is always the last checkpoint.
inline std::vector<std::uint64_t> geometric_grid(std::uint64_t x_min, std::uint64_t x_max, int per_decade = 8) {
  if (x_min < 1 || x_min > x_max) throw ConfigError("geometric grid needs 1 <= x_min <= x_max");
  if (per_decade < 1) throw ConfigError("geometric grid needs at least one point per decade");
  std::vector<std::uint64_t> grid;
  for (int j = 0;; ++j) {
    const auto x = static_cast<std::uint64_t>(std::llround(std::pow(10.0, static_cast<double>(j) / per_decade)));
    if (x > x_max) break;
    if (x >= x_min && (grid.empty() || grid.back() != x)) grid.push_back(x);
  }
  if (grid.empty() || grid.back() != x_max) grid.push_back(x_max);
  return grid;
}

/// Partial sums sampled at increasing checkpoints.
template <typename T>
struct SumGrid {
  std::vector<std::uint64_t> checkpoints;
  std::vector<T> sums;
};

using IntSumGrid = SumGrid<std::int64_t>;
using RealSumGrid = SumGrid<double>;

namespace detail {

inline void check_grid(std::span<const std::uint64_t> grid, std::uint64_t limit) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ConfigError("checkpoints must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
  }
  if (!grid.empty() && grid.back() > limit) {
    throw RangeError("checkpoint " + std::to_string(grid.back()) + " exceeds series limit " + std::to_string(limit));
  }
}

}  // namespace detail

inline IntSumGrid partial_sums(const SignSeries& series, std::span<const std::uint64_t> grid) {
  detail::check_grid(grid, series.limit);
  IntSumGrid out;
  out.checkpoints.assign(grid.begin(), grid.end());
  for (std::uint64_t x : grid) out.sums.push_back(series.prefix[x]);
  return out;
}

/// Sum over n <= x of weight(d(n)) f(n), compensated, with d(n) the number
/// of distinct primes of n.
template <typename Weight>
RealSumGrid weighted_partial_sums_with(const SignSeries& series, const SpfTable& table,
                                       std::span<const std::uint64_t> grid, Weight&& weight) {
  detail::check_grid(grid, series.limit);
  if (series.limit > table.limit()) throw RangeError("series limit exceeds sieve limit");
  RealSumGrid out;
  out.checkpoints.assign(grid.begin(), grid.end());
  if (grid.empty()) return out;

  const std::uint64_t limit = grid.back();
  const auto spf = table.raw();
  std::vector<std::uint8_t> distinct(limit + 1, 0);
  CompensatedSum sum;
  std::size_t next = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (n >= 2) {
      const std::uint32_t p = spf[n];
      const std::uint64_t m = n / p;
      distinct[n] = static_cast<std::uint8_t>(distinct[m] + (m == 1 || spf[m] != p ? 1 : 0));
    }
    if (series.values[n] != 0) sum += weight(distinct[n]) * series.values[n];
    if (n == grid[next]) {
      out.sums.push_back(sum.value());
      ++next;
    }
  }
  return out;
}

/// Sum over n <= x of (2 beta - 1)^(-d(n)) f_beta(n).
inline RealSumGrid weighted_partial_sums(const Beta& beta, const SignSeries& series, const SpfTable& table,
                                         std::span<const std::uint64_t> grid) {
  const double scale = detail::weighted_scale(beta);
  if (!(series.beta == beta)) throw PreconditionError("series was built for a different beta");
  std::vector<double> powers(64, 1.0);
  for (std::size_t d = 1; d < powers.size(); ++d) powers[d] = powers[d - 1] * scale;
  return weighted_partial_sums_with(series, table, grid, [&](std::uint8_t d) { return powers[d]; });
}

struct FitWindow {
  std::uint64_t lo = 1;
  std::uint64_t hi = ~std::uint64_t{0};
};

/// Least-squares slope of log|S(x)| against log x.
struct GrowthFit {
  double alpha = 0.0;
  double stderr_alpha = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
  std::size_t points_dropped = 0;  ///< checkpoints in the window with S = 0
  FitWindow window;
};

template <typename T>
GrowthFit fit_growth_exponent(const SumGrid<T>& grid, FitWindow window) {
  std::vector<double> xs, ys;
  GrowthFit fit;
  fit.window = window;
  for (std::size_t i = 0; i < grid.checkpoints.size(); ++i) {
    const std::uint64_t x = grid.checkpoints[i];
    if (x < window.lo || x > window.hi) continue;
    const double s = static_cast<double>(grid.sums[i]);
    if (s == 0.0) {
      ++fit.points_dropped;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(x)));
    ys.push_back(std::log(std::abs(s)));
  }
  fit.points_used = xs.size();
  if (xs.size() < 5) {
    throw FitError("growth fit needs at least 5 nonzero checkpoints in the window, found " +
                   std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw FitError("growth fit needs at least two distinct checkpoints");
  fit.alpha = sxy / sxx;
  fit.intercept = my - fit.alpha * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.alpha * xs[i]);
    ssr += r * r;
  }
  fit.stderr_alpha = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

/// R(x) = S(x) (log x)^(2 beta) / x at every checkpoint x >= 3.
struct SelbergDelangeStat {
  Beta beta = Beta::half();
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> ratios;
  double terminal_ratio = 0.0;
  /// R(x_last) / R(x) for the checkpoint x closest (in log scale) to x_last / 10.
  double decade_ratio = 0.0;
  /// R(x) > 0 at every checkpoint of the final decade.
  bool sign_stable = false;
};

template <typename T>
SelbergDelangeStat selberg_delange_ratio(const Beta& beta, const SumGrid<T>& grid) {
  if (beta.is_one() || !(DyadicFraction::half() < beta.threshold())) {
    throw DomainError("Selberg-Delange ratio is defined for 1/2 < beta < 1, got " + beta.to_string());
  }
  const double exponent = 2.0 * beta.to_double();
  SelbergDelangeStat out;
  out.beta = beta;
  for (std::size_t i = 0; i < grid.checkpoints.size(); ++i) {
    const std::uint64_t x = grid.checkpoints[i];
    if (x < 3) continue;
    const double lx = std::log(static_cast<double>(x));
    out.checkpoints.push_back(x);
    out.ratios.push_back(static_cast<double>(grid.sums[i]) * std::pow(lx, exponent) / static_cast<double>(x));
  }
  if (out.ratios.empty()) throw DomainError("Selberg-Delange ratio needs a checkpoint >= 3");
  out.terminal_ratio = out.ratios.back();
  const double last = static_cast<double>(out.checkpoints.back());
  std::size_t decade = 0;
  double best = INFINITY;
  for (std::size_t i = 0; i < out.checkpoints.size(); ++i) {
    const double gap = std::abs(std::log10(static_cast<double>(out.checkpoints[i])) - (std::log10(last) - 1.0));
    if (gap < best) {
      best = gap;
      decade = i;
    }
  }
  out.decade_ratio = out.terminal_ratio / out.ratios[decade];
  out.sign_stable = true;
  for (std::size_t i = 0; i < out.checkpoints.size(); ++i) {
    if (static_cast<double>(out.checkpoints[i]) * 10.0 >= last && !(out.ratios[i] > 0.0)) out.sign_stable = false;
  }
  return out;
}

/// Residual of the finite Abel summation identity
///   sum_{n<=X} f(n) n^-s = S(X) X^-s + s * sum_{m<X} S(m) * int_m^{m+1} x^(-s-1) dx
/// with the integral in closed form (m^-s - (m+1)^-s) / s.
inline double abel_consistency(const SignSeries& series, std::uint64_t limit, ComplexPoint point) {
  if (!(point.sigma > 0.0)) throw DomainError("Abel check requires Re(s) > 0");
  if (limit < 1 || limit > series.limit) {
    throw RangeError("Abel limit " + std::to_string(limit) + " outside 1.." + std::to_string(series.limit));
  }
  const Complex s = point.value();
  auto power = [&](std::uint64_t n) { return std::exp(-s * std::log(static_cast<double>(n))); };

  CompensatedComplexSum dirichlet;
  CompensatedComplexSum integral;
  Complex current = power(1);
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (series.values[n] != 0) dirichlet += static_cast<double>(series.values[n]) * current;
    if (n < limit) {
      const Complex next = power(n + 1);
      integral += static_cast<double>(series.prefix[n]) * ((current - next) / s);
      current = next;
    }
  }
  const Complex boundary = static_cast<double>(series.prefix[limit]) * power(limit);
  return std::abs(dirichlet.value() - boundary - s * integral.value());
}

}  // namespace rmf
