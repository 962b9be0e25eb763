#ifndef EMPCHEB_STATS_HPP
#define EMPCHEB_STATS_HPP

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace empcheb {

enum class CovarianceMode { biased, unbiased };

/// Streaming estimate of the mean and scatter matrix of a vector stream.
///
/// The stored quantity is the scatter S = sum_i (x_i - m)(x_i - m)^T rather
/// than a covariance, so both normalizations derive exactly from one state
/// and merging two partial states is exact. Rank-one updates follow the
/// classic running-moments recurrences; the scatter is re-symmetrized on
/// every write to stop drift in long streams.
///
/// Value semantics: copy freely, send across threads; a single writer may
/// call update(). Parallel ingestion = per-partition stats + merged().
class SampleStats {
 public:
  explicit SampleStats(int dim);

  int dim() const noexcept { return dim_; }
  std::int64_t count() const noexcept { return count_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& scatter() const noexcept { return scatter_; }

  /// Absorb one sample. Rejects wrong lengths and non-finite entries
  /// (a silently skipped sample would corrupt the count the bounds use).
  void update(const Eigen::Ref<const Eigen::VectorXd>& sample);

  /// Combined stats equal to ingesting both streams sequentially.
  static SampleStats merged(const SampleStats& a, const SampleStats& b);

  /// scatter/(N-1) (unbiased, needs count >= 2) or scatter/N (biased, >= 1).
  Eigen::MatrixXd covariance(CovarianceMode mode) const;

 private:
  int dim_;
  std::int64_t count_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scatter_;
};

/// Two-pass evaluation of (mean, covariance) over a whole sample set.
/// Deliberately direct so it can serve as the oracle for the streaming path.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> two_pass_covariance(
    std::span<const Eigen::VectorXd> samples, CovarianceMode mode);

}  // namespace empcheb

#endif  // EMPCHEB_STATS_HPP
