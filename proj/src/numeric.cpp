#include "empcheb/numeric.hpp"

#include "empcheb/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace empcheb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::invalid_sample: return "invalid-sample";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::invalid_radius: return "invalid-radius";
    case ErrorCode::invalid_probability: return "invalid-probability";
    case ErrorCode::invalid_k: return "invalid-k";
    case ErrorCode::singular_covariance: return "singular-covariance";
    case ErrorCode::invalid_covariance: return "invalid-covariance";
    case ErrorCode::infeasible_epsilon: return "infeasible-epsilon";
    case ErrorCode::degenerate_spec: return "degenerate-spec";
    case ErrorCode::spec_validation: return "spec-validation";
    case ErrorCode::format_error: return "format-error";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::usage: return "usage";
  }
  return "unknown";
}

BigInt rat_floor(const BigRat& r) {
  // Truncation equals floor for nonnegative values.
  if (r < 0) {
    throw Error(ErrorCode::invalid_radius, "rat_floor requires a nonnegative value");
  }
  return numerator(r) / denominator(r);
}

double rat_to_double(const BigRat& r) { return r.convert_to<double>(); }

std::string rat_to_string(const BigRat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += "/" + denominator(r).str();
  }
  return s;
}

Numeric Numeric::exact(BigRat r) {
  Numeric n;
  n.value_ = rat_to_double(r);
  n.rat_ = std::move(r);
  n.exact_ = true;
  return n;
}

Numeric Numeric::exact(long long num, long long den) {
  return exact(BigRat(BigInt(num), BigInt(den)));
}

Numeric Numeric::approx(double v) {
  Numeric n;
  n.rat_ = 0;
  n.value_ = v;
  n.exact_ = false;
  return n;
}

const BigRat& Numeric::rat() const {
  if (!exact_) {
    throw Error(ErrorCode::usage, "rational view requested from an approx value");
  }
  return rat_;
}

BigRat Numeric::exact_binary() const {
  if (exact_) return rat_;
  if (!std::isfinite(value_)) {
    throw Error(ErrorCode::invalid_sample, "non-finite value has no rational form");
  }
  return BigRat(value_);  // exact binary expansion of the double
}

Numeric Numeric::squared() const {
  if (exact_) return exact(rat_ * rat_);
  return approx(value_ * value_);
}

bool Numeric::positive() const { return exact_ ? rat_ > 0 : value_ > 0.0; }
bool Numeric::negative() const { return exact_ ? rat_ < 0 : value_ < 0.0; }
bool Numeric::is_zero() const { return exact_ ? rat_ == 0 : value_ == 0.0; }

bool Numeric::less_than(long long num, long long den) const {
  if (exact_) return rat_ < BigRat(BigInt(num), BigInt(den));
  return value_ < static_cast<double>(num) / static_cast<double>(den);
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Parses [sign] digits [. digits] [eE [sign] digits]; returns nullopt on junk.
std::optional<Numeric> parse_decimal(std::string_view text) {
  bool negative = false;
  std::string_view s = text;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  long long exp10 = 0;
  std::string_view mantissa = s;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    mantissa = s.substr(0, epos);
    std::string_view es = s.substr(epos + 1);
    bool eneg = false;
    if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
      eneg = es.front() == '-';
      es.remove_prefix(1);
    }
    if (!all_digits(es) || es.size() > 6) return std::nullopt;
    exp10 = std::stoll(std::string(es));
    if (eneg) exp10 = -exp10;
  }

  std::string int_part, frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = std::string(mantissa.substr(0, dot));
    frac_part = std::string(mantissa.substr(dot + 1));
  } else {
    int_part = std::string(mantissa);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;
  if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;

  std::string digits = int_part + frac_part;
  // significant digits: strip leading zeros (all-zero value has one sig digit)
  std::size_t first = digits.find_first_not_of('0');
  std::size_t significant = first == std::string::npos ? 1 : digits.size() - first;

  if (significant > 15) {
    char* end = nullptr;
    std::string owned(text);
    double v = std::strtod(owned.c_str(), &end);
    if (end != owned.c_str() + owned.size()) return std::nullopt;
    return Numeric::approx(v);
  }

  BigInt num(digits.empty() ? "0" : digits);
  BigInt den = 1;
  long long scale = exp10 - static_cast<long long>(frac_part.size());
  if (scale >= 0) {
    num *= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale));
  } else {
    den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-scale));
  }
  if (negative) num = -num;
  return Numeric::exact(BigRat(num, den));
}

}  // namespace

std::optional<Numeric> Numeric::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view ps = text.substr(0, slash);
    std::string_view qs = text.substr(slash + 1);
    bool pneg = false;
    if (!ps.empty() && (ps.front() == '+' || ps.front() == '-')) {
      pneg = ps.front() == '-';
      ps.remove_prefix(1);
    }
    if (!all_digits(ps) || !all_digits(qs)) return std::nullopt;
    BigInt p{std::string(ps)};
    BigInt q{std::string(qs)};
    if (q == 0) return std::nullopt;
    if (pneg) p = -p;
    return Numeric::exact(BigRat(p, q));
  }
  return parse_decimal(text);
}

}  // namespace empcheb
