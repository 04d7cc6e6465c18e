#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include "rmf/compensated.hpp"
#include "rmf/dyadic.hpp"
#include "rmf/errors.hpp"
#include "rmf/iet.hpp"
#include "rmf/sampler.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

using Complex = std::complex<double>;

/// s = sigma + i t.
struct ComplexPoint {
  double sigma = 2.0;
  double t = 0.0;

  Complex value() const { return {sigma, t}; }
  ComplexPoint conj() const { return {sigma, -t}; }
};

/// Truncated Euler product over p <= prime_limit, kept in log space.
struct EulerEvaluation {
  std::uint64_t prime_limit = 0;
  ComplexPoint s;
  Complex log_value;  ///< sum of per-factor principal logarithms
  Complex value;      ///< exp(log_value)
};

/// beta must exceed this for the weighted series g = f / (2 beta - 1).
inline const double kWeightedBetaThreshold = 0.5 + 1.0 / (2.0 * std::sqrt(2.0));

/// p^-s.
inline Complex prime_power_neg_s(std::uint64_t p, ComplexPoint s) {
  const double lp = std::log(static_cast<double>(p));
  return std::polar(std::exp(-s.sigma * lp), -s.t * lp);
}

/// Principal log(1 + z) for |z| < 1, accurate for small |z|.
inline Complex log1p_complex(Complex z) {
  const double re = 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
  return {re, std::atan2(z.imag(), 1.0 + z.real())};
}

/// sum_{m>=2} (-1)^(m+1) z^m / m, i.e. log(1 + z) - z, for |z| < 1.
/// Terms are added until their magnitude drops below 1e-18.
inline Complex log1p_tail(Complex z) {
  const double r = std::abs(z);
  if (r >= 1.0) throw DomainError("log1p_tail: |z| must be below 1");
  CompensatedComplexSum sum;
  Complex power = z;
  double magnitude = r;
  for (int m = 2; m < 1'000'000; ++m) {
    power *= z;
    magnitude *= r;
    if (magnitude / m < 1e-18) break;
    const double sign = (m % 2 == 0) ? -1.0 : 1.0;
    sum += power * (sign / m);
  }
  return sum.value();
}

namespace detail {

inline std::span<const std::uint32_t> euler_primes(const SpfTable& table, std::uint64_t prime_limit) {
  if (prime_limit > table.limit()) {
    throw RangeError("prime limit " + std::to_string(prime_limit) + " exceeds sieve limit " +
                     std::to_string(table.limit()));
  }
  return table.primes_up_to(prime_limit);
}

inline void require_positive_sigma(ComplexPoint s) {
  if (!(s.sigma > 0.0)) throw DomainError("Euler factors require Re(s) > 0, got " + std::to_string(s.sigma));
}

/// sum over p <= prime_limit, descending, of log(1 + coef(p) p^-s).
template <typename Coefficient>
EulerEvaluation log_euler_product(const SpfTable& table, std::uint64_t prime_limit, ComplexPoint s,
                                  Coefficient&& coef) {
  const auto primes = euler_primes(table, prime_limit);
  CompensatedComplexSum sum;
  for (auto it = primes.rbegin(); it != primes.rend(); ++it) {
    sum += log1p_complex(coef(*it) * prime_power_neg_s(*it, s));
  }
  EulerEvaluation out{prime_limit, s, sum.value(), {}};
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace detail

/// F_beta(s, omega) truncated to p <= prime_limit.
template <OmegaSource Source>
EulerEvaluation euler_F(const Beta& beta, const Source& omega, const SpfTable& table, std::uint64_t prime_limit,
                        ComplexPoint s) {
  detail::require_positive_sigma(s);
  require_coverage(omega, prime_limit);
  return detail::log_euler_product(table, prime_limit, s, [&](std::uint64_t p) {
    return static_cast<double>(sign_at_prime(beta, omega.omega_unchecked(p)));
  });
}

/// zeta truncated to p <= prime_limit: the negated log-sum of (1 - p^-s).
inline EulerEvaluation zeta_truncated(const SpfTable& table, std::uint64_t prime_limit, ComplexPoint s) {
  detail::require_positive_sigma(s);
  auto out = detail::log_euler_product(table, prime_limit, s, [](std::uint64_t) { return -1.0; });
  out.log_value = -out.log_value;
  out.value = std::exp(out.log_value);
  return out;
}

/// |L - R| for the zeta identity of the 2^level exchange, in log space:
///   L = -(2^level - 1) log zeta_P(s)
///   R = -log F_{1/2}(s, omega) + sum_{k=1}^{2^level} log F_beta(s, T^k omega)
/// with beta = 1 - 2^-(level+1). Both sides use the same primes, so the
/// identity holds factor by factor and the residual is rounding noise.
template <OmegaSource Source>
double identity_residual(unsigned level, const Source& omega, const SpfTable& table, std::uint64_t prime_limit,
                         ComplexPoint s) {
  if (!(s.sigma > 1.0)) {
    throw PreconditionError("zeta identity is stated for Re(s) > 1, got " + std::to_string(s.sigma));
  }
  const IetSpec spec(level);
  const Beta beta = spec.beta();
  const double copies = static_cast<double>(spec.intervals() - 1);

  const Complex left = -copies * zeta_truncated(table, prime_limit, s).log_value;
  CompensatedComplexSum right;
  right += -euler_F(Beta::half(), omega, table, prime_limit, s).log_value;
  for (std::uint64_t k = 1; k <= spec.intervals(); ++k) {
    right += euler_F(beta, apply_T_omega(spec, omega, k), table, prime_limit, s).log_value;
  }
  return std::abs(left - right.value());
}

/// Prime sum and second-order remainder of log F_beta: log F = prime_sum + a_tail.
struct ExpForm {
  Complex prime_sum;
  Complex a_tail;

  Complex value() const { return std::exp(prime_sum + a_tail); }
};

template <OmegaSource Source>
ExpForm exp_form_F(const Beta& beta, const Source& omega, const SpfTable& table, std::uint64_t prime_limit,
                   ComplexPoint s) {
  if (!(s.sigma > 0.5)) {
    throw DomainError("exponential form requires Re(s) > 1/2, got " + std::to_string(s.sigma));
  }
  require_coverage(omega, prime_limit);
  const auto primes = detail::euler_primes(table, prime_limit);
  CompensatedComplexSum prime_sum;
  CompensatedComplexSum tail;
  for (auto it = primes.rbegin(); it != primes.rend(); ++it) {
    const double sign = sign_at_prime(beta, omega.omega_unchecked(*it));
    const Complex z = sign * prime_power_neg_s(*it, s);
    prime_sum += z;
    tail += log1p_tail(z);
  }
  return {prime_sum.value(), tail.value()};
}

namespace detail {

inline double weighted_scale(const Beta& beta) {
  const double b = beta.to_double();
  if (beta.is_one() || !(b > kWeightedBetaThreshold)) {
    throw PreconditionError("weighted series needs 1/2 + 1/(2*sqrt(2)) ~= " + std::to_string(kWeightedBetaThreshold) +
                            " < beta < 1, got " + beta.to_string());
  }
  return 1.0 / (2.0 * b - 1.0);
}

}  // namespace detail

/// G_beta(s) = prod_p (1 + g(p) p^-s) with g(p) = f_beta(p) / (2 beta - 1).
template <OmegaSource Source>
EulerEvaluation weighted_euler_G(const Beta& beta, const Source& omega, const SpfTable& table,
                                 std::uint64_t prime_limit, ComplexPoint s) {
  const double scale = detail::weighted_scale(beta);
  if (!(s.sigma > 0.5)) throw DomainError("weighted product requires Re(s) > 1/2, got " + std::to_string(s.sigma));
  if (!(std::pow(2.0, s.sigma) > scale)) throw DomainError("weighted factor at p = 2 may vanish");
  require_coverage(omega, prime_limit);
  return detail::log_euler_product(table, prime_limit, s, [&](std::uint64_t p) {
    return scale * sign_at_prime(beta, omega.omega_unchecked(p));
  });
}

/// H_beta = G_beta * zeta, truncated; log-sums are added.
template <OmegaSource Source>
EulerEvaluation H_eval(const Beta& beta, const Source& omega, const SpfTable& table, std::uint64_t prime_limit,
                       ComplexPoint s) {
  auto out = weighted_euler_G(beta, omega, table, prime_limit, s);
  out.log_value += zeta_truncated(table, prime_limit, s).log_value;
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace rmf
