#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rmf/compensated.hpp"
#include "rmf/errors.hpp"

namespace rmf::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of empty sample");
  CompensatedSum sum;
  for (double x : xs) sum += x;
  return sum.value() / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("variance needs at least two values");
  const double m = mean(xs);
  CompensatedSum sum;
  for (double x : xs) sum += (x - m) * (x - m);
  return sum.value() / static_cast<double>(xs.size() - 1);
}

/// Standard error of the sample mean.
inline double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

/// Linear-interpolation quantile (Hyndman–Fan type 7), q in [0, 1].
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw DomainError("quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw DomainError("quantile level outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a - F_b|.
template <typename T>
double ks_two_sample(std::vector<T> a, std::vector<T> b) {
  if (a.empty() || b.empty()) throw DomainError("KS statistic needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const T x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

/// Asymptotic two-sample KS critical value at significance alpha:
/// sqrt(-ln(alpha/2) / 2) * sqrt((n + m) / (n m)).
inline double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace rmf::stats
