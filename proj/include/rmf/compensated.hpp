#pragma once

#include <cmath>
#include <complex>

namespace rmf {

/// Kahan–Babuška (Neumaier) running sum. The compensation term collects the
/// low-order bits lost by each addition, including when the addend is larger
/// than the running sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) {
    add(value);
    return *this;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Component-wise compensated sum of complex values.
class CompensatedComplexSum {
 public:
  CompensatedComplexSum& operator+=(std::complex<double> value) {
    re_.add(value.real());
    im_.add(value.imag());
    return *this;
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace rmf
