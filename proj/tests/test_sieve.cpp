#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rmf/sieve.hpp"

namespace rmf {
namespace {

// Plain Eratosthenes, independent of the linear sieve.
std::vector<bool> eratosthenes(std::uint64_t limit) {
  std::vector<bool> prime(limit + 1, true);
  prime[0] = false;
  prime[1] = false;
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (!prime[i]) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) prime[j] = false;
  }
  return prime;
}

// Trial-division Mobius.
int mobius_by_trial_division(std::uint64_t n) {
  int mu = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

TEST(SpfTable, SmallValues) {
  const auto table = build_spf(10);
  EXPECT_EQ(table.spf(4), 2u);
  EXPECT_EQ(table.spf(9), 3u);
  EXPECT_EQ(table.spf(7), 7u);
  EXPECT_EQ(table.spf(10), 2u);
  EXPECT_TRUE(table.is_prime(7));
  EXPECT_FALSE(table.is_prime(1));
  EXPECT_EQ(std::vector<std::uint32_t>(table.primes().begin(), table.primes().end()),
            (std::vector<std::uint32_t>{2, 3, 5, 7}));
}

TEST(SpfTable, PrimeCountMatchesEratosthenes) {
  const std::uint64_t limit = 1'000'000;
  const auto oracle = eratosthenes(limit);
  const auto oracle_count = std::count(oracle.begin(), oracle.end(), true);
  EXPECT_EQ(oracle_count, 78498);
  const auto table = build_spf(limit);
  std::uint64_t count = 0;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    if (table.spf(n) == n) ++count;
    ASSERT_EQ(table.is_prime(n), oracle[n]) << n;
  }
  EXPECT_EQ(count, 78498u);
  EXPECT_EQ(table.primes().size(), 78498u);
}

TEST(SpfTable, InvariantsHoldExhaustively) {
  const auto table = build_spf(200'000);
  for (std::uint64_t n = 2; n <= table.limit(); ++n) {
    const std::uint64_t p = table.spf(n);
    ASSERT_EQ(n % p, 0u);
    if (p != n) {
      ASSERT_LE(p * p, n) << n;
    }
    // repeated division by spf gives a complete factorization
    std::uint64_t rest = n, product = 1;
    while (rest > 1) {
      const std::uint64_t q = table.spf(rest);
      ASSERT_TRUE(table.is_prime(q));
      product *= q;
      rest /= q;
    }
    ASSERT_EQ(product, n);
  }
}

TEST(SpfTable, PrimorialBelowCap) {
  // 2*3*5*7*11*13*17*19 = 9699690; the nine-prime primorial exceeds the 10^8 cap.
  const auto table = build_spf(9'699'690);
  EXPECT_EQ(table.spf(9'699'690), 2u);
  EXPECT_EQ(table.spf(9'699'690 / 2), 3u);
  EXPECT_EQ(factor_summary(9'699'690, table).d, 8);
}

TEST(SpfTable, RejectsUnsupportedLimits) {
  EXPECT_THROW(build_spf(1), ConfigError);
  EXPECT_THROW(build_spf(kMaxSieveLimit + 1), ConfigError);
  const auto table = build_spf(100);
  EXPECT_THROW(table.spf(101), RangeError);
  EXPECT_THROW(table.primes_up_to(101), RangeError);
  EXPECT_EQ(table.primes_up_to(10).size(), 4u);
  EXPECT_EQ(table.primes_up_to(11).size(), 5u);
  EXPECT_EQ(table.primes_up_to(1).size(), 0u);
}

TEST(FactorSummary, Examples) {
  const auto table = build_spf(100);
  const auto thirty = factor_summary(30, table);
  EXPECT_EQ(thirty.distinct_primes, (std::vector<std::uint32_t>{2, 3, 5}));
  EXPECT_EQ(thirty.d, 3);
  EXPECT_TRUE(thirty.is_squarefree);
  EXPECT_EQ(thirty.mobius, -1);

  const auto four = factor_summary(4, table);
  EXPECT_FALSE(four.is_squarefree);
  EXPECT_EQ(four.mobius, 0);
  EXPECT_EQ(four.d, 1);

  const auto one = factor_summary(1, table);
  EXPECT_EQ(one.d, 0);
  EXPECT_TRUE(one.is_squarefree);
  EXPECT_EQ(one.mobius, 1);
  EXPECT_TRUE(one.distinct_primes.empty());

  EXPECT_THROW(factor_summary(101, table), RangeError);
  EXPECT_THROW(factor_summary(0, table), RangeError);
}

TEST(FactorSummary, InvariantsHold) {
  const auto table = build_spf(50'000);
  for (std::uint64_t n = 1; n <= table.limit(); ++n) {
    const auto f = factor_summary(n, table);
    const std::uint64_t product =
        std::accumulate(f.distinct_primes.begin(), f.distinct_primes.end(), std::uint64_t{1}, std::multiplies<>());
    ASSERT_EQ(n % product, 0u);
    ASSERT_EQ(f.is_squarefree, product == n);
    ASSERT_TRUE(std::is_sorted(f.distinct_primes.begin(), f.distinct_primes.end()));
    ASSERT_EQ(f.mobius, f.is_squarefree ? (f.d % 2 ? -1 : 1) : 0);
  }
}

TEST(MobiusSieve, FirstTenValues) {
  const auto mu = mobius_sieve(10);
  EXPECT_EQ(std::vector<int>(mu.begin() + 1, mu.end()), (std::vector<int>{1, -1, -1, 0, -1, 1, -1, 0, 0, 1}));
  for (std::uint64_t n = 1; n <= 10; ++n) EXPECT_EQ(mu[n], mobius_by_trial_division(n));
}

TEST(MobiusSieve, AgreesWithFactorSummaryExhaustively) {
  const std::uint64_t limit = 100'000;
  const auto mu = mobius_sieve(limit);
  const auto table = build_spf(limit);
  for (std::uint64_t n = 1; n <= limit; ++n) {
    ASSERT_EQ(mu[n], factor_summary(n, table).mobius) << n;
  }
  for (auto p : table.primes()) ASSERT_EQ(mu[p], -1);
}

TEST(MobiusSieve, SquarefreeDensity) {
  const std::uint64_t limit = 1'000'000;
  const auto mu = mobius_sieve(limit);
  const auto table = build_spf(limit);
  std::uint64_t squarefree = 0;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    squarefree += mu[n] != 0;
    ASSERT_EQ(mu[n] != 0, factor_summary(n, table).is_squarefree);
  }
  const double density = static_cast<double>(squarefree) / limit;
  EXPECT_GE(density, 0.6076);
  EXPECT_LE(density, 0.6083);
}

TEST(MobiusSieve, MultiplicativeOnCoprimePairs) {
  const std::uint64_t limit = 1'000'000;
  const auto mu = mobius_sieve(limit);
  std::mt19937_64 rng(20240917);
  int checked = 0;
  while (checked < 10'000) {
    const std::uint64_t a = 1 + rng() % 1000;
    const std::uint64_t b = 1 + rng() % (limit / a);
    if (std::gcd(a, b) != 1) continue;
    ASSERT_EQ(mu[a * b], mu[a] * mu[b]) << a << " * " << b;
    ++checked;
  }
}

TEST(DistinctPrimes, PrimorialBound) {
  // The product of the first ten primes already exceeds 10^8, so d(n) <= 9 there.
  const std::uint64_t first_ten[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  std::uint64_t primorial = 1;
  for (auto p : first_ten) primorial *= p;
  EXPECT_GT(primorial, kMaxSieveLimit);

  const auto table = build_spf(10'000'000);
  const auto spf = table.raw();
  std::vector<std::uint8_t> d(table.limit() + 1, 0);
  int worst = 0;
  for (std::uint64_t n = 2; n <= table.limit(); ++n) {
    const std::uint64_t m = n / spf[n];
    d[n] = static_cast<std::uint8_t>(d[m] + (m == 1 || spf[m] != spf[n]));
    worst = std::max<int>(worst, d[n]);
  }
  EXPECT_EQ(worst, 8);
}

TEST(MillerRabin, AgreesWithSieve) {
  const auto table = build_spf(100'000);
  for (std::uint64_t n = 0; n <= table.limit(); ++n) {
    ASSERT_EQ(is_prime_u64(n), n >= 2 && table.is_prime(n)) << n;
  }
  EXPECT_TRUE(is_prime_u64(1'000'000'007));
  EXPECT_FALSE(is_prime_u64(3215031751));  // strong pseudoprime to bases 2, 3, 5, 7
  EXPECT_TRUE(is_prime_u64(18446744073709551557ull));
}

}  // namespace
}  // namespace rmf
