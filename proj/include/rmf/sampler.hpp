#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmf/dyadic.hpp"
#include "rmf/errors.hpp"
#include "rmf/philox.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

/// One sample point omega = (omega_p) of the product space, realized lazily.
///
/// omega_p is the Philox word at counter p of the stream keyed by the master
/// seed, read as a dyadic fraction. Nothing is stored; any prime can be
/// queried in O(1).
class OmegaAssignment {
 public:
  OmegaAssignment(std::uint64_t master_seed, std::uint64_t prime_limit)
      : seed_(master_seed), prime_limit_(prime_limit) {
    if (prime_limit < 2) throw ConfigError("omega prime limit must be at least 2");
  }

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t prime_limit() const { return prime_limit_; }

  /// omega_p for a prime p <= prime_limit; the caller guarantees primality.
  DyadicFraction omega_unchecked(std::uint64_t p) const { return DyadicFraction(Philox4x32::u64(seed_, p)); }

 private:
  std::uint64_t seed_;
  std::uint64_t prime_limit_;
};

/// Anything that maps primes to points of [0, 1): an assignment, or a view
/// of one under the exchange map.
template <typename T>
concept OmegaSource = requires(const T& source, std::uint64_t p) {
  { source.omega_unchecked(p) } -> std::same_as<DyadicFraction>;
  { source.prime_limit() } -> std::convertible_to<std::uint64_t>;
};

template <OmegaSource Source>
DyadicFraction omega_at(const Source& source, std::uint64_t p) {
  if (p > source.prime_limit()) {
    throw DomainError("omega_at: " + std::to_string(p) + " exceeds prime limit " +
                      std::to_string(source.prime_limit()));
  }
  if (!is_prime_u64(p)) throw DomainError("omega_at: " + std::to_string(p) + " is not prime");
  return source.omega_unchecked(p);
}

/// f_beta(p) = -1 when omega_p < beta, +1 otherwise.
constexpr int sign_at_prime(const Beta& beta, DyadicFraction omega_p) { return beta.selects_minus(omega_p) ? -1 : 1; }

/// f_beta(n) for 0 <= n <= limit (index 0 holds 0) with exact prefix sums.
struct SignSeries {
  Beta beta = Beta::half();
  std::uint64_t limit = 0;
  std::vector<std::int8_t> values;
  std::vector<std::int64_t> prefix;

  std::int64_t sum_to(std::uint64_t x) const {
    if (x > limit) throw RangeError("sum_to: " + std::to_string(x) + " exceeds series limit " + std::to_string(limit));
    return prefix[x];
  }
};

template <OmegaSource Source>
void require_coverage(const Source& source, std::uint64_t x) {
  if (source.prime_limit() < x) {
    throw CoverageError("omega covers primes up to " + std::to_string(source.prime_limit()) +
                        " but the series needs primes up to " + std::to_string(x));
  }
}

/// Builds f_beta on 1..limit multiplicatively from the signs at primes:
/// f(n) = f(n/p) f(p) when p = spf(n) divides n exactly once, else 0.
template <OmegaSource Source>
SignSeries build_sign_series(const Beta& beta, const Source& source, std::uint64_t limit, const SpfTable& table) {
  require_coverage(source, limit);
  if (limit > table.limit()) {
    throw RangeError("series limit " + std::to_string(limit) + " exceeds sieve limit " + std::to_string(table.limit()));
  }
  SignSeries out;
  out.beta = beta;
  out.limit = limit;
  out.values.assign(limit + 1, 0);
  out.prefix.assign(limit + 1, 0);
  if (limit >= 1) {
    out.values[1] = 1;
    out.prefix[1] = 1;
  }
  const auto spf = table.raw();
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint32_t p = spf[n];
    const std::uint64_t m = n / p;
    std::int8_t v;
    if (m == 1) {
      v = static_cast<std::int8_t>(sign_at_prime(beta, source.omega_unchecked(p)));
    } else if (spf[m] == p) {
      v = 0;
    } else {
      v = static_cast<std::int8_t>(out.values[m] * out.values[p]);
    }
    out.values[n] = v;
    out.prefix[n] = out.prefix[n - 1] + v;
  }
  return out;
}

/// True iff every prime p <= limit that is -1 under beta_low is also -1 under beta_high.
template <OmegaSource Source>
bool coupling_monotone_check(const Beta& beta_low, const Beta& beta_high, const Source& source, std::uint64_t limit,
                             const SpfTable& table) {
  if (!(beta_low <= beta_high)) throw PreconditionError("coupling check requires beta_low <= beta_high");
  require_coverage(source, limit);
  for (std::uint32_t p : table.primes_up_to(limit)) {
    const auto w = source.omega_unchecked(p);
    if (sign_at_prime(beta_low, w) == -1 && sign_at_prime(beta_high, w) != -1) return false;
  }
  return true;
}

/// One block of a streamed sign series: values[i] = f(first + i) and
/// distinct[i] = number of distinct primes of first + i (meaningful only
/// where values[i] != 0).
struct SignBlock {
  std::uint64_t first = 1;
  std::span<const std::int8_t> values;
  std::span<const std::uint8_t> distinct;
};

/// Streams f_beta(1..limit) in blocks with a segmented sieve, never holding
/// more than one block plus the primes up to sqrt(limit). After dividing out
/// every prime <= sqrt(limit) once, a cofactor above 1 is the single large
/// prime factor of n.
template <OmegaSource Source, typename Visitor>
void for_each_sign_block(const Beta& beta, const Source& source, std::uint64_t limit, Visitor&& visit,
                         std::uint64_t block_size = std::uint64_t{1} << 18) {
  require_coverage(source, limit);
  if (limit < 1) return;
  if (block_size == 0) throw ConfigError("block size must be positive");

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while (root * root > limit) --root;
  while ((root + 1) * (root + 1) <= limit) ++root;
  std::vector<std::uint32_t> small_primes;
  std::vector<std::int8_t> small_signs;
  if (root >= 2) {
    const SpfTable small(root);
    for (std::uint32_t p : small.primes()) {
      small_primes.push_back(p);
      small_signs.push_back(static_cast<std::int8_t>(sign_at_prime(beta, source.omega_unchecked(p))));
    }
  }

  std::vector<std::uint64_t> rest(block_size);
  std::vector<std::int8_t> values(block_size);
  std::vector<std::uint8_t> distinct(block_size);
  for (std::uint64_t lo = 1; lo <= limit; lo += block_size) {
    const std::uint64_t hi = std::min(limit + 1, lo + block_size);
    const std::size_t len = hi - lo;
    for (std::size_t i = 0; i < len; ++i) {
      rest[i] = lo + i;
      values[i] = 1;
      distinct[i] = 0;
    }
    for (std::size_t j = 0; j < small_primes.size(); ++j) {
      const std::uint64_t p = small_primes[j];
      const std::int8_t s = small_signs[j];
      for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
        const std::size_t i = m - lo;
        if (values[i] == 0) continue;
        rest[i] /= p;
        if (rest[i] % p == 0) {
          values[i] = 0;
        } else {
          values[i] = static_cast<std::int8_t>(values[i] * s);
          ++distinct[i];
        }
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (values[i] != 0 && rest[i] > 1) {
        values[i] = static_cast<std::int8_t>(values[i] * sign_at_prime(beta, source.omega_unchecked(rest[i])));
        ++distinct[i];
      }
    }
    visit(SignBlock{lo, std::span<const std::int8_t>(values).first(len),
                    std::span<const std::uint8_t>(distinct).first(len)});
  }
}

}  // namespace rmf
