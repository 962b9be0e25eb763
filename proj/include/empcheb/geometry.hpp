#ifndef EMPCHEB_GEOMETRY_HPP
#define EMPCHEB_GEOMETRY_HPP

#include "empcheb/bounds.hpp"
#include "empcheb/numeric.hpp"
#include "empcheb/stats.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace empcheb {

/// Lower-triangular L with L L^T = m. Declares the matrix singular when a
/// pivot falls at or below 1e-12 * trace/dim (scale-relative, so a rank
/// deficit is flagged consistently across unit systems).
Eigen::MatrixXd cholesky_factor(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Squared Mahalanobis distance through a precomputed factor: solves
/// L y = point - center and returns |y|^2. Never forms an explicit inverse.
double mahalanobis_sq(const Eigen::Ref<const Eigen::MatrixXd>& chol_lower,
                      const Eigen::Ref<const Eigen::VectorXd>& center,
                      const Eigen::Ref<const Eigen::VectorXd>& point);

/// Convenience overload against the unbiased covariance of a sample stream.
double mahalanobis_sq(const SampleStats& stats,
                      const Eigen::Ref<const Eigen::VectorXd>& point);

/// Open ellipsoid { x : |L^{-1}(x - center)|^2 < radius_sq } whose
/// complement carries probability at most coverage_bound for the next
/// i.i.d. sample.
class ConfidenceEllipsoid {
 public:
  ConfidenceEllipsoid(Eigen::VectorXd center, Eigen::MatrixXd chol_factor,
                      double radius_sq, std::int64_t source_count,
                      double coverage_bound);

  int dim() const noexcept { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const noexcept { return center_; }
  const Eigen::MatrixXd& chol_factor() const noexcept { return chol_; }
  double radius_sq() const noexcept { return radius_sq_; }
  std::int64_t source_count() const noexcept { return source_count_; }
  double coverage_bound() const noexcept { return coverage_bound_; }

  double mahalanobis_sq(const Eigen::Ref<const Eigen::VectorXd>& point) const;
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& point) const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd chol_;
  double radius_sq_;
  std::int64_t source_count_;
  double coverage_bound_;
};

/// Ellipsoid whose complement has probability at most epsilon for the next
/// sample: radius from invert_bound with a (1+1e-12) safety factor (the
/// feasible region is open at the boundary). Throws InfeasibleEpsilonError
/// carrying the smallest feasible epsilon when the count is too small.
ConfidenceEllipsoid confidence_ellipsoid(const SampleStats& stats,
                                         const Numeric& epsilon);

/// Centers and whitens a whole sample set against its own biased covariance:
/// the outputs sum to zero and their outer products sum to count * identity.
std::vector<Eigen::VectorXd> whiten(std::span<const Eigen::VectorXd> samples);

enum class CertificateBranch { interior, saturated };

const char* to_string(CertificateBranch branch) noexcept;

/// Feasibility record for the closed-form optimum of the moment problem
/// behind the known-moments bound: the chosen (P, q=0, r, tau) is plugged
/// into both block linear matrix inequalities and the smallest eigenvalue
/// across them is reported.
struct CertificateReport {
  CertificateBranch branch = CertificateBranch::saturated;
  double objective = 1.0;          // tr(sigma * P) + r
  double min_lmi_eigenvalue = 0.0;
  bool feasible = false;
};

/// Verifies (rather than solves) the semidefinite certificate for
/// min{1, dim/lambda_sq}: branch `interior` uses tau=1, r=0,
/// P = sigma^{-1}/lambda_sq; branch `saturated` uses tau=0, r=1, P=0.
CertificateReport theoretical_certificate(
    const Eigen::Ref<const Eigen::MatrixXd>& sigma, const Numeric& lambda_sq,
    double tol = 1e-9);

}  // namespace empcheb

#endif  // EMPCHEB_GEOMETRY_HPP
