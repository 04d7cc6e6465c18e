#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "rmf/compensated.hpp"
#include "rmf/dyadic.hpp"
#include "rmf/philox.hpp"
#include "rmf/stats.hpp"

namespace rmf {
namespace {

TEST(DyadicFraction, RatioAndOrder) {
  const auto quarter = DyadicFraction::from_ratio(1, 2);
  const auto half = DyadicFraction::from_ratio(1, 1);
  EXPECT_EQ(half, DyadicFraction::half());
  EXPECT_LT(quarter, half);
  EXPECT_EQ(quarter.numerator(), std::uint64_t{1} << 62);
  EXPECT_DOUBLE_EQ(DyadicFraction::from_ratio(3, 4).to_double(), 0.1875);
  EXPECT_THROW(DyadicFraction::from_ratio(4, 2), DomainError);
  EXPECT_THROW(DyadicFraction::from_ratio(1, 65), DomainError);
}

TEST(DyadicFraction, ReducedString) {
  EXPECT_EQ(DyadicFraction::from_ratio(6, 4).to_string(), "3/2^3");
  EXPECT_EQ(DyadicFraction().to_string(), "0");
  EXPECT_EQ(DyadicFraction(1).to_string(), "1/2^64");
}

TEST(Beta, ParseForms) {
  EXPECT_EQ(Beta::parse("3/4"), Beta::dyadic(3, 2));
  EXPECT_EQ(Beta::parse("7/2^3"), Beta::dyadic(7, 3));
  EXPECT_EQ(Beta::parse("1/2"), Beta::half());
  EXPECT_TRUE(Beta::parse("1").is_one());
  EXPECT_TRUE(Beta::parse("8/8").is_one());
  EXPECT_THROW(Beta::parse("1/3"), DomainError);
  EXPECT_THROW(Beta::parse("1/4"), DomainError);  // below 1/2
  EXPECT_THROW(Beta::parse("5/4"), DomainError);
  EXPECT_THROW(Beta::parse("0.75"), DomainError);
  EXPECT_EQ(Beta::parse("3/4").to_string(), "3/2^2");
}

TEST(Beta, FromLevelMatchesClosedForm) {
  for (unsigned n = 1; n <= 62; ++n) {
    // 1 - 2^-(n+1) = (2^(n+1) - 1) / 2^(n+1)
    if (n + 1 < 64) {
      EXPECT_EQ(Beta::from_level(n), Beta::dyadic((std::uint64_t{1} << (n + 1)) - 1, n + 1)) << n;
    }
  }
  EXPECT_EQ(Beta::from_level(1), Beta::parse("3/4"));
  EXPECT_THROW(Beta::from_level(0), DomainError);
  EXPECT_THROW(Beta::from_level(63), DomainError);
}

TEST(Beta, SelectsMinusIsRightOpen) {
  const auto beta = Beta::half();
  EXPECT_FALSE(beta.selects_minus(DyadicFraction::half()));
  EXPECT_TRUE(beta.selects_minus(DyadicFraction(DyadicFraction::half().numerator() - 1)));
  EXPECT_TRUE(Beta::one().selects_minus(DyadicFraction(~std::uint64_t{0})));
}

TEST(Beta, Ordering) {
  EXPECT_TRUE(Beta::half() <= Beta::parse("3/4"));
  EXPECT_TRUE(Beta::parse("3/4") <= Beta::one());
  EXPECT_FALSE(Beta::one() <= Beta::parse("7/8"));
}

// Known-answer vectors published with Random123 (kat_vectors, philox4x32 10 rounds).
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, WordIsPureFunctionOfKeyAndCounter) {
  EXPECT_EQ(Philox4x32::u64(7, 11), Philox4x32::u64(7, 11));
  EXPECT_NE(Philox4x32::u64(7, 11), Philox4x32::u64(7, 12));
  EXPECT_NE(Philox4x32::u64(7, 11), Philox4x32::u64(8, 11));
}

TEST(CompensatedSum, RecoversLostLowOrderBits) {
  CompensatedSum sum;
  double naive = 0.0;
  sum += 1.0;
  naive += 1.0;
  for (int i = 0; i < 1000000; ++i) {
    sum += 1e-16;
    naive += 1e-16;
  }
  EXPECT_EQ(naive, 1.0);
  EXPECT_NEAR(sum.value(), 1.0 + 1e-10, 1e-22);
}

TEST(CompensatedSum, LargeAddendAfterSmallSum) {
  CompensatedSum sum;
  sum += 1.0;
  sum += 1e100;
  sum += 1.0;
  sum += -1e100;
  EXPECT_EQ(sum.value(), 2.0);
}

TEST(Stats, QuantileType7) {
  const std::vector<double> xs{4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(stats::median(xs), 3.0);
  EXPECT_DOUBLE_EQ(stats::quantile(xs, 0.1), 1.4);
  EXPECT_DOUBLE_EQ(stats::quantile(xs, 0.9), 4.6);
  EXPECT_DOUBLE_EQ(stats::quantile({7.0}, 0.5), 7.0);
}

TEST(Stats, KolmogorovSmirnov) {
  std::vector<int> a{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::ks_two_sample(a, a), 0.0);
  EXPECT_DOUBLE_EQ(stats::ks_two_sample(std::vector<int>{1, 2}, std::vector<int>{3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(stats::ks_two_sample(std::vector<int>{1, 3}, std::vector<int>{2, 4}), 0.5);
  // c(0.001) = sqrt(-ln(0.0005) / 2)
  EXPECT_NEAR(stats::ks_critical_value(1e-3, 100000, 100000), 1.9494746035204051 * std::sqrt(2.0 / 100000), 1e-9);
}

TEST(Stats, MeanVariance) {
  const std::vector<double> xs{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::mean(xs), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(xs), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::standard_error(xs), std::sqrt(5.0 / 12.0));
}

}  // namespace
}  // namespace rmf
