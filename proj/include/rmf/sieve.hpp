#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmf/errors.hpp"

namespace rmf {

/// Largest supported sieve limit. The spf table costs 4 bytes per integer
/// (400 MB at the cap); sign tables add 1 byte per integer.
inline constexpr std::uint64_t kMaxSieveLimit = 100'000'000;

/// Smallest-prime-factor table for 2..limit, built by the linear sieve.
/// Immutable after construction.
class SpfTable {
 public:
  explicit SpfTable(std::uint64_t limit) : limit_(limit) {
    if (limit < 2 || limit > kMaxSieveLimit) {
      throw ConfigError("sieve limit " + std::to_string(limit) + " outside [2, " +
                        std::to_string(kMaxSieveLimit) + "]");
    }
    spf_.assign(limit + 1, 0);
    for (std::uint32_t i = 2; i <= limit; ++i) {
      if (spf_[i] == 0) {
        spf_[i] = i;
        primes_.push_back(i);
      }
      // Each composite i*p is written exactly once, by its smallest prime p.
      for (std::uint32_t p : primes_) {
        const std::uint64_t m = std::uint64_t{i} * p;
        if (p > spf_[i] || m > limit) break;
        spf_[m] = p;
      }
    }
  }

  std::uint64_t limit() const { return limit_; }

  std::uint32_t spf(std::uint64_t n) const {
    check(n);
    return spf_[n];
  }

  bool is_prime(std::uint64_t n) const {
    check(n);
    return n >= 2 && spf_[n] == n;
  }

  /// All primes <= limit, ascending.
  std::span<const std::uint32_t> primes() const { return primes_; }

  /// Primes <= bound; bound must not exceed limit.
  std::span<const std::uint32_t> primes_up_to(std::uint64_t bound) const {
    if (bound > limit_) {
      throw RangeError("prime bound " + std::to_string(bound) + " exceeds sieve limit " + std::to_string(limit_));
    }
    std::size_t lo = 0, hi = primes_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (primes_[mid] <= bound) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return std::span<const std::uint32_t>(primes_).first(lo);
  }

  /// Unchecked access for inner loops; 2 <= n <= limit.
  std::span<const std::uint32_t> raw() const { return spf_; }

 private:
  void check(std::uint64_t n) const {
    if (n > limit_) {
      throw RangeError(std::to_string(n) + " exceeds sieve limit " + std::to_string(limit_));
    }
  }

  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

/// Deterministic Miller–Rabin, exact for every 64-bit input.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n % p == 0) return n == p;
  }
  auto mulmod = [n](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
  };
  auto powmod = [&](std::uint64_t base, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, base);
      base = mulmod(base, base);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    std::uint64_t x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s && witness; ++r) {
      x = mulmod(x, x);
      if (x == n - 1) witness = false;
    }
    if (witness) return false;
  }
  return true;
}

inline SpfTable build_spf(std::uint64_t limit) { return SpfTable(limit); }

struct FactorSummary {
  std::uint64_t n = 1;
  std::vector<std::uint32_t> distinct_primes;
  bool is_squarefree = true;
  int d = 0;  ///< number of distinct prime divisors
  int mobius = 1;
};

inline FactorSummary factor_summary(std::uint64_t n, const SpfTable& table) {
  if (n == 0) throw RangeError("factor_summary: n must be positive");
  if (n > table.limit()) {
    throw RangeError("factor_summary: " + std::to_string(n) + " exceeds sieve limit " +
                     std::to_string(table.limit()));
  }
  FactorSummary out;
  out.n = n;
  const auto spf = table.raw();
  std::uint64_t rest = n;
  while (rest > 1) {
    const std::uint32_t p = spf[rest];
    out.distinct_primes.push_back(p);
    rest /= p;
    if (rest % p == 0) {
      out.is_squarefree = false;
      while (rest % p == 0) rest /= p;
    }
  }
  out.d = static_cast<int>(out.distinct_primes.size());
  out.mobius = out.is_squarefree ? (out.d % 2 == 0 ? 1 : -1) : 0;
  return out;
}

/// mu(n) for 0 <= n <= limit; index 0 holds 0.
inline std::vector<std::int8_t> mobius_sieve(std::uint64_t limit) {
  if (limit < 2 || limit > kMaxSieveLimit) {
    throw ConfigError("mobius sieve limit " + std::to_string(limit) + " outside [2, " +
                      std::to_string(kMaxSieveLimit) + "]");
  }
  std::vector<std::int8_t> mu(limit + 1, 0);
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> primes;
  mu[1] = 1;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      mu[i] = -1;
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t m = std::uint64_t{i} * p;
      if (m > limit) break;
      composite[m] = true;
      if (i % p == 0) {
        mu[m] = 0;
        break;
      }
      mu[m] = static_cast<std::int8_t>(-mu[i]);
    }
  }
  return mu;
}

}  // namespace rmf
