#include "empcheb/geometry.hpp"

#include "empcheb/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

namespace empcheb {

namespace {

void require_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorCode::invalid_covariance, "matrix must be square and nonempty");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw Error(ErrorCode::invalid_covariance, "matrix is not symmetric");
  }
}

Eigen::VectorXd forward_solve(const Eigen::Ref<const Eigen::MatrixXd>& lower,
                              Eigen::VectorXd rhs) {
  lower.triangularView<Eigen::Lower>().solveInPlace(rhs);
  return rhs;
}

}  // namespace

Eigen::MatrixXd cholesky_factor(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  require_symmetric(m);
  const Eigen::Index n = m.rows();
  const double pivot_floor = 1e-12 * m.trace() / static_cast<double>(n);

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = m(j, j) - lower.row(j).head(j).squaredNorm();
    if (d <= pivot_floor) {
      throw Error(ErrorCode::singular_covariance,
                  "covariance is singular or indefinite (pivot " +
                      std::to_string(d) + " at index " + std::to_string(j) + ")");
    }
    lower(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      lower(i, j) =
          (m(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / lower(j, j);
    }
  }
  return lower;
}

double mahalanobis_sq(const Eigen::Ref<const Eigen::MatrixXd>& chol_lower,
                      const Eigen::Ref<const Eigen::VectorXd>& center,
                      const Eigen::Ref<const Eigen::VectorXd>& point) {
  if (point.size() != center.size() || point.size() != chol_lower.rows()) {
    throw Error(ErrorCode::shape_mismatch,
                "point length " + std::to_string(point.size()) +
                    " does not match dimension " + std::to_string(center.size()));
  }
  return forward_solve(chol_lower, point - center).squaredNorm();
}

double mahalanobis_sq(const SampleStats& stats,
                      const Eigen::Ref<const Eigen::VectorXd>& point) {
  const Eigen::MatrixXd lower =
      cholesky_factor(stats.covariance(CovarianceMode::unbiased));
  return mahalanobis_sq(lower, stats.mean(), point);
}

ConfidenceEllipsoid::ConfidenceEllipsoid(Eigen::VectorXd center,
                                         Eigen::MatrixXd chol_factor,
                                         double radius_sq,
                                         std::int64_t source_count,
                                         double coverage_bound)
    : center_(std::move(center)),
      chol_(std::move(chol_factor)),
      radius_sq_(radius_sq),
      source_count_(source_count),
      coverage_bound_(coverage_bound) {
  if (chol_.rows() != center_.size() || chol_.cols() != center_.size()) {
    throw Error(ErrorCode::shape_mismatch, "factor and center dimensions differ");
  }
  if (radius_sq_ <= 0.0) {
    throw Error(ErrorCode::invalid_radius, "ellipsoid radius must be positive");
  }
}

double ConfidenceEllipsoid::mahalanobis_sq(
    const Eigen::Ref<const Eigen::VectorXd>& point) const {
  return empcheb::mahalanobis_sq(chol_, center_, point);
}

bool ConfidenceEllipsoid::contains(
    const Eigen::Ref<const Eigen::VectorXd>& point) const {
  return mahalanobis_sq(point) < radius_sq_;
}

ConfidenceEllipsoid confidence_ellipsoid(const SampleStats& stats,
                                         const Numeric& epsilon) {
  if (stats.count() < stats.dim() + 1) {
    throw Error(ErrorCode::insufficient_samples,
                "confidence ellipsoid needs at least dim+1 = " +
                    std::to_string(stats.dim() + 1) + " samples, have " +
                    std::to_string(stats.count()));
  }
  const Eigen::MatrixXd lower =
      cholesky_factor(stats.covariance(CovarianceMode::unbiased));

  const BoundInversion inv = invert_bound(stats.dim(), stats.count(), epsilon);
  if (!inv.feasible) {
    throw InfeasibleEpsilonError(
        "epsilon is below the smallest bound attainable with " +
            std::to_string(stats.count()) + " samples (" +
            rat_to_string(inv.min_achievable_exact) + ")",
        inv.min_achievable);
  }

  // The feasible region is open at the boundary radius; nudge outward and
  // re-evaluate the exact bound at the radius actually stored.
  const BigRat safety(BigInt(1000000000001LL), BigInt(1000000000000LL));
  const double radius_sq = rat_to_double(inv.lambda_sq * safety * safety);
  const BoundValue coverage = empirical_bound(
      {stats.dim(), stats.count(), Numeric::exact(BigRat(radius_sq))});

  return ConfidenceEllipsoid(stats.mean(), lower, radius_sq, stats.count(),
                             coverage.value);
}

std::vector<Eigen::VectorXd> whiten(std::span<const Eigen::VectorXd> samples) {
  const auto [mean, cov] = two_pass_covariance(samples, CovarianceMode::biased);
  const Eigen::MatrixXd lower = cholesky_factor(cov);
  std::vector<Eigen::VectorXd> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back(forward_solve(lower, s - mean));
  }
  return out;
}

const char* to_string(CertificateBranch branch) noexcept {
  return branch == CertificateBranch::interior ? "interior" : "saturated";
}

CertificateReport theoretical_certificate(
    const Eigen::Ref<const Eigen::MatrixXd>& sigma, const Numeric& lambda_sq,
    double tol) {
  if (!lambda_sq.positive()) {
    throw Error(ErrorCode::invalid_radius, "squared radius must be positive");
  }
  require_symmetric(sigma);
  Eigen::MatrixXd lower;
  try {
    lower = cholesky_factor(sigma);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_covariance) {
      throw Error(ErrorCode::invalid_covariance,
                  "certificate needs a positive definite covariance");
    }
    throw;
  }

  const int n = static_cast<int>(sigma.rows());
  const bool interior =
      lambda_sq.is_exact() ? BigRat(BigInt(n), 1) <= lambda_sq.rat()
                           : static_cast<double>(n) <= lambda_sq.value();

  CertificateReport report;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd sigma_inv =
      lower.transpose().triangularView<Eigen::Upper>().solve(
          lower.triangularView<Eigen::Lower>().solve(identity));
  const Eigen::MatrixXd p_ell = sigma_inv / lambda_sq.value();

  Eigen::MatrixXd p;  // quadratic coefficient of the majorant
  double r = 0.0, tau = 0.0;
  if (interior) {
    // tau = 1, r = 0: the majorant is the ellipsoid's own quadratic form.
    p = p_ell;
    r = 0.0;
    tau = 1.0;
    report.branch = CertificateBranch::interior;
  } else {
    // tau = 0, r = 1: the constant 1 majorizes every indicator.
    p = Eigen::MatrixXd::Zero(n, n);
    r = 1.0;
    tau = 0.0;
    report.branch = CertificateBranch::saturated;
  }

  // Block LMIs with q = 0 (the ellipsoid is centered after the shift):
  //   [[P, 0], [0, r]] >= 0   and   [[P - tau*P_ell, 0], [0, r - 1 + tau]] >= 0
  Eigen::MatrixXd lmi_nonneg = Eigen::MatrixXd::Zero(n + 1, n + 1);
  lmi_nonneg.topLeftCorner(n, n) = p;
  lmi_nonneg(n, n) = r;

  Eigen::MatrixXd lmi_sproc = Eigen::MatrixXd::Zero(n + 1, n + 1);
  lmi_sproc.topLeftCorner(n, n) = p - tau * p_ell;
  lmi_sproc(n, n) = r - 1.0 + tau;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(lmi_nonneg,
                                                     Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(lmi_sproc,
                                                     Eigen::EigenvaluesOnly);
  report.min_lmi_eigenvalue =
      std::min(es1.eigenvalues().minCoeff(), es2.eigenvalues().minCoeff());
  report.objective = (sigma * p).trace() + r;
  report.feasible = report.min_lmi_eigenvalue >= -tol && tau >= 0.0 && r >= 0.0;
  return report;
}

}  // namespace empcheb
