#ifndef EMPCHEB_NUMERIC_HPP
#define EMPCHEB_NUMERIC_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace empcheb {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Floor of a nonnegative rational, exact.
BigInt rat_floor(const BigRat& r);

double rat_to_double(const BigRat& r);

/// Canonical "p/q" rendering (plain integer when q == 1).
std::string rat_to_string(const BigRat& r);

/// A scalar that remembers whether it is exact. Exact values carry an
/// arbitrary-precision rational and drive the integer floor paths; approx
/// values take the floating paths with conservative rounding.
class Numeric {
 public:
  Numeric() : rat_(0), value_(0.0), exact_(true) {}

  static Numeric exact(BigRat r);
  static Numeric exact(long long num, long long den = 1);
  static Numeric approx(double v);

  /// Accepts "p/q" rationals, plain integers, and decimal/scientific
  /// literals. Decimals with at most 15 significant digits become exact
  /// rationals; longer ones fall back to the approx path.
  static std::optional<Numeric> parse(std::string_view text);

  bool is_exact() const noexcept { return exact_; }

  /// Precondition: is_exact().
  const BigRat& rat() const;

  /// Exact rational view regardless of mode: approx values convert through
  /// the double's exact binary expansion.
  BigRat exact_binary() const;

  double value() const noexcept { return value_; }

  Numeric squared() const;

  bool positive() const;
  bool negative() const;
  bool is_zero() const;

  /// Strictly less than p/q (exact when possible).
  bool less_than(long long num, long long den) const;

 private:
  BigRat rat_;
  double value_;
  bool exact_;
};

}  // namespace empcheb

#endif  // EMPCHEB_NUMERIC_HPP
