#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "plaque/errors.hpp"

namespace plaque {

using BigInt = boost::multiprecision::cpp_int;

// numerator / 2^exponent, always in lowest terms (odd numerator, or 0/2^0).
class DyadicValue {
 public:
  DyadicValue() = default;
  DyadicValue(BigInt numerator, std::uint64_t exponent) : numerator_(std::move(numerator)), exponent_(exponent) {
    if (numerator_ < 0) throw ValidationError("dyadic numerator must be non-negative");
    normalize();
  }

  static DyadicValue one() { return DyadicValue(1, 0); }

  const BigInt& numerator() const noexcept { return numerator_; }
  std::uint64_t exponent() const noexcept { return exponent_; }
  BigInt denominator() const { return BigInt(1) << exponent_; }

  double to_double() const {
    // Scale down to keep the conversion finite for very large exponents.
    if (exponent_ <= 1000) return static_cast<double>(numerator_) / static_cast<double>(denominator());
    BigInt shifted = numerator_ >> (exponent_ - 1000);
    return static_cast<double>(shifted) / static_cast<double>(BigInt(1) << 1000);
  }

  // "n/d" with both parts in decimal.
  std::string to_string() const { return numerator_.str() + "/" + denominator().str(); }

  static DyadicValue parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) throw ValidationError("dyadic value needs 'n/d': " + text);
    BigInt n(text.substr(0, slash));
    BigInt d(text.substr(slash + 1));
    if (d <= 0) throw ValidationError("dyadic denominator must be positive");
    std::uint64_t e = 0;
    while (d > 1) {
      if ((d & 1) != 0) throw ValidationError("denominator is not a power of two: " + text);
      d >>= 1;
      ++e;
    }
    return DyadicValue(n, e);
  }

  friend bool operator==(const DyadicValue& a, const DyadicValue& b) {
    return a.exponent_ == b.exponent_ && a.numerator_ == b.numerator_;
  }

  friend bool operator<(const DyadicValue& a, const DyadicValue& b) {
    // Compare a.n * 2^b.e with b.n * 2^a.e.
    if (a.exponent_ >= b.exponent_) return a.numerator_ < (b.numerator_ << (a.exponent_ - b.exponent_));
    return (a.numerator_ << (b.exponent_ - a.exponent_)) < b.numerator_;
  }

 private:
  void normalize() {
    if (numerator_ == 0) {
      exponent_ = 0;
      return;
    }
    while (exponent_ > 0 && (numerator_ & 1) == 0) {
      numerator_ >>= 1;
      --exponent_;
    }
  }

  BigInt numerator_ = 0;
  std::uint64_t exponent_ = 0;
};

}  // namespace plaque
