#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <optional>
#include <string>

namespace dlimp {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number, always normalized (gcd 1, denominator > 0).
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(BigInt num, BigInt den);

  static Rational from_integer_string(const std::string& digits);
  /// Exact value of "<int>.<frac>" decimal notation.
  static Rational from_decimal_string(const std::string& int_part,
                                      const std::string& frac_part);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }

  Rational operator-() const;
  Rational operator+(const Rational&) const;
  Rational operator-(const Rational&) const;
  Rational operator*(const Rational&) const;
  /// Throws std::domain_error on division by zero.
  Rational operator/(const Rational&) const;

  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

  double to_double() const;
  /// "n" when integral, "n/d" otherwise.
  std::string to_string() const;

 private:
  BigInt num_;
  BigInt den_;
};

}  // namespace dlimp
