#pragma once

#include <bit>
#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "rmf/errors.hpp"

namespace rmf {

/// Exact fixed-point value numerator / 2^64 in [0, 1).
///
/// Ordering is the integer ordering of numerators. Sums and differences of
/// values whose denominators are powers of two up to 2^64 are exact as long
/// as the result stays in [0, 1).
class DyadicFraction {
 public:
  constexpr DyadicFraction() = default;
  constexpr explicit DyadicFraction(std::uint64_t numerator) : numerator_(numerator) {}

  /// k / 2^m with 0 <= k < 2^m and m <= 64.
  static constexpr DyadicFraction from_ratio(std::uint64_t k, unsigned m) {
    if (m > 64) throw DomainError("dyadic exponent above 64");
    if (m < 64 && k >= (std::uint64_t{1} << m)) {
      throw DomainError("dyadic ratio k/2^m must be below 1");
    }
    return DyadicFraction(m == 0 ? 0 : k << (64 - m));
  }

  static constexpr DyadicFraction half() { return DyadicFraction(std::uint64_t{1} << 63); }

  constexpr std::uint64_t numerator() const { return numerator_; }

  double to_double() const { return static_cast<double>(numerator_) * 0x1p-64; }

  /// Reduced form "k/2^m", or "0".
  std::string to_string() const {
    if (numerator_ == 0) return "0";
    const int tz = std::countr_zero(numerator_);
    return std::to_string(numerator_ >> tz) + "/2^" + std::to_string(64 - tz);
  }

  friend constexpr auto operator<=>(DyadicFraction, DyadicFraction) = default;

 private:
  std::uint64_t numerator_ = 0;
};

/// Probability parameter of the model, beta in [1/2, 1], dyadic only.
///
/// beta = 1 does not fit in [0, 1) and is carried by a flag meaning
/// "every omega value falls below the threshold".
class Beta {
 public:
  static constexpr Beta one() { return Beta(DyadicFraction{}, true); }
  static constexpr Beta half() { return Beta(DyadicFraction::half(), false); }

  /// k / 2^m; k == 2^m yields one().
  static constexpr Beta dyadic(std::uint64_t k, unsigned m) {
    if (m < 64 && k == (std::uint64_t{1} << m)) return one();
    const auto value = DyadicFraction::from_ratio(k, m);
    if (value < DyadicFraction::half()) throw DomainError("beta must lie in [1/2, 1]");
    return Beta(value, false);
  }

  /// Threshold given directly as a dyadic value in [1/2, 1).
  static constexpr Beta at(DyadicFraction value) {
    if (value < DyadicFraction::half()) throw DomainError("beta must lie in [1/2, 1]");
    return Beta(value, false);
  }

  /// 1 - 1/2^(level+1), the parameter attached to an exchange of 2^level intervals.
  static constexpr Beta from_level(unsigned level) {
    if (level < 1 || level > 62) throw DomainError("level must be in 1..62");
    return Beta(DyadicFraction(~std::uint64_t{0} - ((std::uint64_t{1} << (63 - level)) - 1)), false);
  }

  /// Accepts "1", "k/D" with D a power of two, or "k/2^m".
  static Beta parse(std::string_view text) {
    auto bad = [&] { return DomainError("cannot parse beta '" + std::string(text) + "' as a dyadic fraction"); };
    auto read = [&](std::string_view part) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) throw bad();
      return v;
    };
    if (text == "1" || text == "1/1") return one();
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) throw bad();
    const std::uint64_t k = read(text.substr(0, slash));
    std::string_view den = text.substr(slash + 1);
    unsigned m = 0;
    if (den.starts_with("2^")) {
      const auto e = read(den.substr(2));
      if (e > 64) throw bad();
      m = static_cast<unsigned>(e);
    } else {
      const auto d = read(den);
      if (!std::has_single_bit(d)) throw bad();
      m = static_cast<unsigned>(std::countr_zero(d));
    }
    if (m < 64 && k > (std::uint64_t{1} << m)) throw bad();
    return dyadic(k, m);
  }

  constexpr bool is_one() const { return is_one_; }

  /// Threshold value; meaningless when is_one().
  constexpr DyadicFraction threshold() const { return value_; }

  /// True when omega lands in the "-1" region [0, beta).
  constexpr bool selects_minus(DyadicFraction omega) const { return is_one_ || omega < value_; }

  double to_double() const { return is_one_ ? 1.0 : value_.to_double(); }

  std::string to_string() const { return is_one_ ? "1" : value_.to_string(); }

  friend constexpr bool operator==(const Beta& a, const Beta& b) {
    return a.is_one_ == b.is_one_ && (a.is_one_ || a.value_ == b.value_);
  }

  friend constexpr bool operator<=(const Beta& a, const Beta& b) {
    if (b.is_one_) return true;
    if (a.is_one_) return false;
    return a.value_ <= b.value_;
  }

 private:
  constexpr Beta(DyadicFraction value, bool is_one) : value_(value), is_one_(is_one) {}

  DyadicFraction value_;
  bool is_one_ = false;
};

}  // namespace rmf
