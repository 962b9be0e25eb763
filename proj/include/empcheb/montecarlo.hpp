#ifndef EMPCHEB_MONTECARLO_HPP
#define EMPCHEB_MONTECARLO_HPP

#include "empcheb/bounds.hpp"
#include "empcheb/numeric.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace empcheb {

struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric positive definite
};

struct UniformBoxSpec {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct StudentTSpec {
  double dof = 3.0;  // must exceed 2 so the covariance exists
  Eigen::MatrixXd scale;
};

struct TwoPointSpec {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double weight_a = 0.5;  // probability of drawing a
};

class DistributionSpec;

struct MixtureSpec {
  std::vector<DistributionSpec> components;
  std::vector<double> weights;
};

/// A sampling distribution with finite mean and covariance. Only i.i.d.
/// sampling matters to the guarantees; the family list exists to exercise
/// them under light, heavy-tailed, discrete, and multi-modal data.
class DistributionSpec {
 public:
  using Family =
      std::variant<GaussianSpec, UniformBoxSpec, StudentTSpec, TwoPointSpec, MixtureSpec>;

  explicit DistributionSpec(Family family);

  static DistributionSpec standard_gaussian(int dim);

  int dim() const noexcept { return dim_; }
  const Family& family() const noexcept { return family_; }
  const char* family_name() const noexcept;

  Eigen::VectorXd population_mean() const;
  Eigen::MatrixXd population_covariance() const;

 private:
  Family family_;
  int dim_;
};

/// Deterministic per-stream generator: the same (seed, stream_index) always
/// reproduces the same draws, and distinct stream indices are independent
/// for statistical purposes, so schedules never change results.
std::vector<Eigen::VectorXd> draw(const DistributionSpec& spec,
                                  std::uint64_t seed,
                                  std::uint64_t stream_index, int count);

struct SimulationReport {
  int dim = 0;
  std::int64_t count = 0;       // samples behind the estimates per trial
  double lambda_sq = 0.0;
  std::int64_t trials = 0;
  std::int64_t events = 0;      // exceedances of the squared radius
  std::int64_t rejected_singular = 0;
  double empirical_frequency = 0.0;
  BoundValue bound;
  double mc_stderr = 0.0;       // sqrt(f(1-f)/trials)
  bool pass = false;            // frequency <= bound + 3 * mc_stderr
  std::uint64_t seed = 0;
};

/// Estimates the tail-event probability by simulation and checks it against
/// the exact bound. Trial t always uses stream t; trials whose covariance
/// factorization fails are replaced from reserved streams and counted, with
/// the replacement rate capped at 0.1% of trials.
SimulationReport validate_bound(const DistributionSpec& spec,
                                std::int64_t count, const Numeric& lambda_sq,
                                std::int64_t trials, std::uint64_t seed,
                                int workers = 1);

struct ConvergenceRow {
  std::int64_t count = 0;
  double bound = 0.0;
  double limit = 0.0;
  double gap = 0.0;  // |bound - limit|
};

/// Exact bound values against the large-sample limit over increasing counts.
std::vector<ConvergenceRow> convergence_sweep(int dim, const Numeric& lambda_sq,
                                              std::span<const std::int64_t> counts);

/// Whitens one random sample set and checks, for each k^2 in the grid, that
/// the number of whitened vectors with squared norm >= k^2 stays within the
/// counting cap. Returns the number of grid points violating it (expect 0).
std::int64_t lemma1_trial(int dim, std::int64_t sample_count,
                          std::span<const double> k_sq_grid, std::uint64_t seed);

}  // namespace empcheb

#endif  // EMPCHEB_MONTECARLO_HPP
