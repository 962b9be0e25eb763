#ifndef EMPCHEB_BOUNDS_HPP
#define EMPCHEB_BOUNDS_HPP

#include "empcheb/numeric.hpp"

#include <cstdint>

namespace empcheb {

/// A (dimension, sample count, squared radius) triple for bound evaluation.
struct BoundQuery {
  int dim = 0;             // ambient dimension of the samples
  std::int64_t count = 0;  // number of samples behind the estimates, >= 2
  Numeric lambda_sq;       // squared radius, > 0; exact rational or approx
};

enum class BoundFormula { empirical, simplified, asymptotic, univariate_saw };

const char* to_string(BoundFormula formula) noexcept;

/// A probability bound with provenance. Non-saturated empirical values are
/// integer multiples of 1/(count+1); `exact` marks results whose floor was
/// evaluated in integer arithmetic (exact_value then holds the rational).
struct BoundValue {
  double value = 1.0;
  BoundFormula formula = BoundFormula::empirical;
  bool exact = false;
  BigRat exact_value = 0;
};

/// Probability that a fresh sample falls at squared Mahalanobis distance
/// >= lambda_sq from the mean estimated on `count` prior samples:
/// min{1, floor(dim*(N+1)*(N^2-1+N*lambda_sq) / (N^2*lambda_sq)) / (N+1)}.
/// On the approx path the floor argument is rounded up when within 1e-9 of
/// an integer (a larger floor is a larger, still-valid bound).
BoundValue empirical_bound(const BoundQuery& query);

/// Floor-free relaxation: min{1, dim*(N^2-1+N*lambda_sq)/(N^2*lambda_sq)}.
/// Never smaller than empirical_bound on the same query.
BoundValue simplified_bound(const BoundQuery& query);

/// Known-moments large-sample limit: min{1, dim/lambda_sq}.
BoundValue asymptotic_bound(int dim, const Numeric& lambda_sq);

/// The univariate estimated-moments bound, kept as its own evaluation route;
/// tests assert it coincides with empirical_bound at dim = 1.
BoundValue saw_bound(std::int64_t count, const Numeric& lambda_sq);

struct BoundInversion {
  bool feasible = false;
  /// Infimal radius whose bound is <= epsilon. The feasible region is open:
  /// callers must scale by (1 + 1e-12) before relying on the guarantee.
  double lambda = 0.0;
  BigRat lambda_sq = 0;  // exact boundary (radius squared)
  /// Smallest bound attainable at this (dim, count) as the radius grows,
  /// i.e. floor(dim*(N+1)/N)/(N+1); equals the minimal feasible epsilon.
  double min_achievable = 1.0;
  BigRat min_achievable_exact = 1;
};

/// Threshold radius for a target tail probability: the infimum of
/// { lambda : empirical_bound(dim, count, lambda^2) <= epsilon }, solved
/// exactly on the floor expression's step boundary.
BoundInversion invert_bound(int dim, std::int64_t count, const Numeric& epsilon);

struct SampleSizeResult {
  bool feasible = false;
  std::int64_t count = 0;
};

/// Smallest N with empirical_bound(dim, N, lambda_sq) <= epsilon, by
/// doubling + binary search. Infeasible iff dim/lambda_sq >= epsilon
/// (the large-N limit is approached strictly from above).
SampleSizeResult min_sample_size(int dim, const Numeric& lambda_sq,
                                 const Numeric& epsilon);

/// Radius conversion between the user-facing scale (lambda, against N-sample
/// estimates) and the proof-side scale (k, on the (N+1)-sample whitened set):
/// k^2 = N^2 lambda^2 / (N^2 - 1 + N lambda^2), bijective with k^2 < N.
Numeric lambda_to_k_sq(std::int64_t count, const Numeric& lambda_sq);

/// Inverse map: lambda^2 = (N^2-1) k^2 / (N (N - k^2)); requires 0 < k^2 < N.
Numeric k_to_lambda_sq(std::int64_t count, const Numeric& k_sq);

/// Cap on how many of N centered unit-second-moment vectors can have norm
/// >= k: floor(dim * N / k^2). Deliberately not clipped to N.
BigInt counting_bound(int dim, std::int64_t count, const Numeric& k_sq);

}  // namespace empcheb

#endif  // EMPCHEB_BOUNDS_HPP
