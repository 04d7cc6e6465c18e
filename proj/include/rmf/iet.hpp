#pragma once

#include <cstdint>
#include <string>

#include "rmf/dyadic.hpp"
#include "rmf/errors.hpp"
#include "rmf/sampler.hpp"

namespace rmf {

/// Cyclic exchange of the 2^level equal subintervals of [1/2, 1).
///
/// Intervals are right-open: I_k = [a_{k-1}, a_k) with
/// a_k = 1/2 + k / 2^(level+1). The map fixes [0, 1/2), sends I_1 onto
/// I_{2^level} and I_k onto I_{k-1} for k >= 2, each by a translation.
class IetSpec {
 public:
  static constexpr unsigned kMaxLevel = 62;

  explicit IetSpec(unsigned level) : level_(level) {
    if (level < 1 || level > kMaxLevel) {
      throw DomainError("exchange level " + std::to_string(level) + " outside 1.." + std::to_string(kMaxLevel));
    }
  }

  unsigned level() const { return level_; }

  /// Number of exchanged intervals, 2^level.
  std::uint64_t intervals() const { return std::uint64_t{1} << level_; }

  /// Interval width 2^-(level+1).
  DyadicFraction step() const { return DyadicFraction(step_numerator()); }

  /// 1 - 2^-(level+1), which equals the endpoint a_{2^level - 1}.
  Beta beta() const { return Beta::from_level(level_); }

  /// a_k for k in 0..2^level - 1. a_{2^level} = 1 is not representable and
  /// acts as the exclusive upper bound of the last interval.
  DyadicFraction endpoint(std::uint64_t k) const {
    if (k >= intervals()) throw RangeError("endpoint index " + std::to_string(k) + " not representable");
    return DyadicFraction(DyadicFraction::half().numerator() + k * step_numerator());
  }

  /// The model parameter sitting at endpoint a_k, k in 0..2^level (a_{2^level} = 1).
  Beta endpoint_beta(std::uint64_t k) const { return k == intervals() ? Beta::one() : Beta::at(endpoint(k)); }

  std::uint64_t step_numerator() const { return std::uint64_t{1} << (63 - level_); }

 private:
  unsigned level_;
};

/// 0 for x < 1/2, otherwise k with x in I_k.
inline std::uint64_t interval_index(const IetSpec& spec, DyadicFraction x) {
  const std::uint64_t half = DyadicFraction::half().numerator();
  if (x.numerator() < half) return 0;
  return ((x.numerator() - half) >> (63 - spec.level())) + 1;
}

inline DyadicFraction apply_T(const IetSpec& spec, DyadicFraction x) {
  const std::uint64_t k = interval_index(spec, x);
  if (k == 0) return x;
  const std::uint64_t step = spec.step_numerator();
  if (k == 1) return DyadicFraction(x.numerator() + (spec.intervals() - 1) * step);
  return DyadicFraction(x.numerator() - step);
}

/// k-fold composition in O(1): the interval index rotates down by k modulo
/// 2^level and the point moves by the matching multiple of the step.
inline DyadicFraction apply_T_power(const IetSpec& spec, DyadicFraction x, std::uint64_t k) {
  const std::uint64_t index = interval_index(spec, x);
  if (index == 0) return x;
  const std::uint64_t count = spec.intervals();
  const std::uint64_t mask = count - 1;
  const std::uint64_t target = ((index - 1 - (k & mask)) & mask) + 1;
  // Unsigned wrap-around gives the signed offset (target - index) * step exactly.
  return DyadicFraction(x.numerator() + (target - index) * spec.step_numerator());
}

/// Lazy view of T^k omega: (T^k omega)_p = T^k(omega_p).
template <OmegaSource Source>
class TransformedOmega {
 public:
  TransformedOmega(const IetSpec& spec, const Source& base, std::uint64_t power)
      : spec_(spec), base_(&base), power_(power) {}

  std::uint64_t prime_limit() const { return base_->prime_limit(); }

  DyadicFraction omega_unchecked(std::uint64_t p) const {
    return apply_T_power(spec_, base_->omega_unchecked(p), power_);
  }

  std::uint64_t power() const { return power_; }

 private:
  IetSpec spec_;
  const Source* base_;
  std::uint64_t power_;
};

template <OmegaSource Source>
TransformedOmega<Source> apply_T_omega(const IetSpec& spec, const Source& base, std::uint64_t power) {
  return TransformedOmega<Source>(spec, base, power);
}

}  // namespace rmf
