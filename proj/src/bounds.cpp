#include "empcheb/bounds.hpp"

#include "empcheb/errors.hpp"

#include <cmath>
#include <string>

namespace empcheb {

namespace {

void require_dim(int dim) {
  if (dim < 1) {
    throw Error(ErrorCode::invalid_dimension,
                "dimension must be at least 1, got " + std::to_string(dim));
  }
}

void require_count(std::int64_t count) {
  if (count < 2) {
    throw Error(ErrorCode::insufficient_samples,
                "bound needs a sample count of at least 2, got " +
                    std::to_string(count));
  }
}

void require_positive_radius(const Numeric& lambda_sq) {
  if (!lambda_sq.positive()) {
    throw Error(ErrorCode::invalid_radius, "squared radius must be positive");
  }
}

void require_probability(const Numeric& epsilon) {
  if (!epsilon.positive() || !epsilon.less_than(1, 1)) {
    throw Error(ErrorCode::invalid_probability,
                "epsilon must lie strictly between 0 and 1");
  }
}

/// Conservative floor for the approx path: arguments within 1e-9 of an
/// integer round to that integer, so a value sitting just below a step
/// boundary yields the larger (still valid) floor.
std::int64_t conservative_floor(double arg) {
  const double nearest = std::round(arg);
  if (std::abs(arg - nearest) <= 1e-9 * std::max(1.0, std::abs(arg))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(arg));
}

BoundValue make_exact(BigRat value, BoundFormula formula) {
  if (value > 1) value = 1;
  BoundValue out;
  out.value = rat_to_double(value);
  out.formula = formula;
  out.exact = true;
  out.exact_value = std::move(value);
  return out;
}

BoundValue make_approx(double value, BoundFormula formula) {
  BoundValue out;
  out.value = std::min(1.0, value);
  out.formula = formula;
  out.exact = false;
  return out;
}

/// Shared floor-of-step evaluation for the estimated-moments bounds:
/// min{1, floor(scale*(N+1)*(N^2-1+N*lambda_sq)/(N^2*lambda_sq))/(N+1)}
/// with scale = dim (multivariate) or 1 (univariate route).
BoundValue floored_bound(std::int64_t scale, std::int64_t count,
                         const Numeric& lambda_sq, BoundFormula formula) {
  const BigInt n_big(count);
  if (lambda_sq.is_exact()) {
    const BigRat& l2 = lambda_sq.rat();
    const BigInt p = numerator(l2);
    const BigInt q = denominator(l2);
    // floor argument = scale*(N+1)*(q*(N^2-1) + N*p) / (N^2*p)
    const BigInt num = BigInt(scale) * (n_big + 1) * (q * (n_big * n_big - 1) + n_big * p);
    const BigInt den = n_big * n_big * p;
    const BigInt floored = num / den;  // positive operands: truncation == floor
    return make_exact(BigRat(floored, n_big + 1), formula);
  }
  const double l2 = lambda_sq.value();
  const double n = static_cast<double>(count);
  const double arg = static_cast<double>(scale) * (n + 1.0) * (n * n - 1.0 + n * l2) /
                     (n * n * l2);
  const double floored = static_cast<double>(conservative_floor(arg));
  return make_approx(floored / (n + 1.0), formula);
}

}  // namespace

const char* to_string(BoundFormula formula) noexcept {
  switch (formula) {
    case BoundFormula::empirical: return "empirical";
    case BoundFormula::simplified: return "simplified";
    case BoundFormula::asymptotic: return "asymptotic";
    case BoundFormula::univariate_saw: return "univariate_saw";
  }
  return "unknown";
}

BoundValue empirical_bound(const BoundQuery& query) {
  require_dim(query.dim);
  require_count(query.count);
  require_positive_radius(query.lambda_sq);
  return floored_bound(query.dim, query.count, query.lambda_sq,
                       BoundFormula::empirical);
}

BoundValue simplified_bound(const BoundQuery& query) {
  require_dim(query.dim);
  require_count(query.count);
  require_positive_radius(query.lambda_sq);

  const BigInt n_big(query.count);
  if (query.lambda_sq.is_exact()) {
    const BigRat& l2 = query.lambda_sq.rat();
    const BigInt p = numerator(l2);
    const BigInt q = denominator(l2);
    const BigInt num = BigInt(query.dim) * (q * (n_big * n_big - 1) + n_big * p);
    const BigInt den = n_big * n_big * p;
    return make_exact(BigRat(num, den), BoundFormula::simplified);
  }
  const double l2 = query.lambda_sq.value();
  const double n = static_cast<double>(query.count);
  return make_approx(query.dim * (n * n - 1.0 + n * l2) / (n * n * l2),
                     BoundFormula::simplified);
}

BoundValue asymptotic_bound(int dim, const Numeric& lambda_sq) {
  require_dim(dim);
  require_positive_radius(lambda_sq);
  if (lambda_sq.is_exact()) {
    return make_exact(BigRat(BigInt(dim), 1) / lambda_sq.rat(),
                      BoundFormula::asymptotic);
  }
  return make_approx(static_cast<double>(dim) / lambda_sq.value(),
                     BoundFormula::asymptotic);
}

BoundValue saw_bound(std::int64_t count, const Numeric& lambda_sq) {
  require_count(count);
  require_positive_radius(lambda_sq);
  return floored_bound(1, count, lambda_sq, BoundFormula::univariate_saw);
}

BoundInversion invert_bound(int dim, std::int64_t count, const Numeric& epsilon) {
  require_dim(dim);
  require_count(count);
  require_probability(epsilon);

  const BigInt n(count);
  const BigInt d(dim);
  const BigRat eps = epsilon.exact_binary();

  // Bound <= eps  <=>  floor(arg) <= m* := floor(eps*(N+1)); the floor
  // argument is strictly decreasing in lambda^2 with infimum dim*(N+1)/N,
  // so the achievable minimum of the bound is floor(dim*(N+1)/N)/(N+1).
  const BigInt m_star = rat_floor(eps * BigRat(n + 1, 1));
  const BigInt limit_floor = (d * (n + 1)) / n;

  BoundInversion out;
  out.min_achievable_exact = BigRat(limit_floor, n + 1);
  out.min_achievable = rat_to_double(out.min_achievable_exact);

  // Step boundary: floor(arg) <= m*  <=>  arg < m*+1  <=>
  //   lambda^2 > dim*(N+1)*(N^2-1) / ((m*+1)*N^2 - dim*(N+1)*N).
  const BigInt denom = (m_star + 1) * n * n - d * (n + 1) * n;
  if (m_star < limit_floor || denom <= 0) {
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  out.lambda_sq = BigRat(d * (n + 1) * (n * n - 1), denom);
  out.lambda = std::sqrt(rat_to_double(out.lambda_sq));
  return out;
}

SampleSizeResult min_sample_size(int dim, const Numeric& lambda_sq,
                                 const Numeric& epsilon) {
  require_dim(dim);
  require_positive_radius(lambda_sq);
  require_probability(epsilon);

  const BigRat l2 = lambda_sq.exact_binary();
  const BigRat eps = epsilon.exact_binary();

  // The bound approaches dim/lambda^2 strictly from above, so equality with
  // epsilon is already out of reach at every finite N.
  if (BigRat(BigInt(dim), 1) / l2 >= eps) {
    return {false, 0};
  }

  const Numeric l2n = Numeric::exact(l2);
  auto ok = [&](std::int64_t n) {
    return empirical_bound({dim, n, l2n}).exact_value <= eps;
  };

  std::int64_t hi = 2;
  while (!ok(hi)) hi *= 2;
  std::int64_t lo = hi == 2 ? 2 : hi / 2;
  // invariant: ok(hi); the answer lies in (lo, hi] once !ok(lo)
  while (lo + 1 < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {true, ok(lo) ? lo : hi};
}

Numeric lambda_to_k_sq(std::int64_t count, const Numeric& lambda_sq) {
  require_count(count);
  require_positive_radius(lambda_sq);
  if (lambda_sq.is_exact()) {
    const BigInt n(count);
    const BigRat& l2 = lambda_sq.rat();
    return Numeric::exact(BigRat(n * n, 1) * l2 /
                          (BigRat(n * n - 1, 1) + BigRat(n, 1) * l2));
  }
  const double n = static_cast<double>(count);
  const double l2 = lambda_sq.value();
  return Numeric::approx(n * n * l2 / (n * n - 1.0 + n * l2));
}

Numeric k_to_lambda_sq(std::int64_t count, const Numeric& k_sq) {
  require_count(count);
  if (!k_sq.positive() || !k_sq.less_than(count, 1)) {
    throw Error(ErrorCode::invalid_k,
                "k^2 must lie strictly between 0 and the sample count");
  }
  if (k_sq.is_exact()) {
    const BigInt n(count);
    const BigRat& k2 = k_sq.rat();
    return Numeric::exact(BigRat(n * n - 1, 1) * k2 /
                          (BigRat(n, 1) * (BigRat(n, 1) - k2)));
  }
  const double n = static_cast<double>(count);
  const double k2 = k_sq.value();
  return Numeric::approx((n * n - 1.0) * k2 / (n * (n - k2)));
}

BigInt counting_bound(int dim, std::int64_t count, const Numeric& k_sq) {
  require_dim(dim);
  if (count < 1) {
    throw Error(ErrorCode::insufficient_samples,
                "counting bound needs at least 1 vector");
  }
  if (!k_sq.positive()) {
    throw Error(ErrorCode::invalid_k, "k^2 must be positive");
  }
  const BigRat k2 = k_sq.exact_binary();
  return rat_floor(BigRat(BigInt(dim) * BigInt(count), 1) / k2);
}

}  // namespace empcheb
