#include "empcheb/stats.hpp"

#include "empcheb/errors.hpp"

#include <cmath>
#include <string>

namespace empcheb {

SampleStats::SampleStats(int dim) : dim_(dim), count_(0) {
  if (dim < 1) {
    throw Error(ErrorCode::invalid_dimension,
                "sample dimension must be at least 1, got " + std::to_string(dim));
  }
  mean_ = Eigen::VectorXd::Zero(dim);
  scatter_ = Eigen::MatrixXd::Zero(dim, dim);
}

void SampleStats::update(const Eigen::Ref<const Eigen::VectorXd>& sample) {
  if (sample.size() != dim_) {
    throw Error(ErrorCode::shape_mismatch,
                "sample of length " + std::to_string(sample.size()) +
                    " fed to dimension-" + std::to_string(dim_) + " stats");
  }
  if (!sample.allFinite()) {
    throw Error(ErrorCode::invalid_sample, "sample contains a non-finite entry");
  }

  const double n = static_cast<double>(count_);
  const Eigen::VectorXd delta = sample - mean_;
  mean_ += delta / (n + 1.0);
  scatter_ += (n / (n + 1.0)) * (delta * delta.transpose());
  scatter_ = ((scatter_ + scatter_.transpose()) * 0.5).eval();
  ++count_;
}

SampleStats SampleStats::merged(const SampleStats& a, const SampleStats& b) {
  if (a.dim_ != b.dim_) {
    throw Error(ErrorCode::shape_mismatch,
                "cannot merge stats of dimension " + std::to_string(a.dim_) +
                    " and " + std::to_string(b.dim_));
  }
  if (a.count_ == 0) return b;
  if (b.count_ == 0) return a;

  SampleStats out(a.dim_);
  const double na = static_cast<double>(a.count_);
  const double nb = static_cast<double>(b.count_);
  const Eigen::VectorXd delta = b.mean_ - a.mean_;
  out.count_ = a.count_ + b.count_;
  out.mean_ = a.mean_ + (nb / (na + nb)) * delta;
  out.scatter_ = a.scatter_ + b.scatter_ +
                 (na * nb / (na + nb)) * (delta * delta.transpose());
  out.scatter_ = ((out.scatter_ + out.scatter_.transpose()) * 0.5).eval();
  return out;
}

Eigen::MatrixXd SampleStats::covariance(CovarianceMode mode) const {
  const std::int64_t needed = mode == CovarianceMode::unbiased ? 2 : 1;
  if (count_ < needed) {
    throw Error(ErrorCode::insufficient_samples,
                std::string(mode == CovarianceMode::unbiased ? "unbiased" : "biased") +
                    " covariance needs at least " + std::to_string(needed) +
                    " samples, have " + std::to_string(count_));
  }
  const double denom = static_cast<double>(
      mode == CovarianceMode::unbiased ? count_ - 1 : count_);
  return scatter_ / denom;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> two_pass_covariance(
    std::span<const Eigen::VectorXd> samples, CovarianceMode mode) {
  const std::int64_t needed = mode == CovarianceMode::unbiased ? 2 : 1;
  if (std::ssize(samples) < needed) {
    throw Error(ErrorCode::insufficient_samples,
                "two-pass covariance needs at least " + std::to_string(needed) +
                    " samples, have " + std::to_string(samples.size()));
  }
  const Eigen::Index dim = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != dim) {
      throw Error(ErrorCode::shape_mismatch, "samples have mixed lengths");
    }
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& s : samples) {
    const Eigen::VectorXd d = s - mean;
    scatter += d * d.transpose();
  }
  const double denom = static_cast<double>(
      mode == CovarianceMode::unbiased ? samples.size() - 1 : samples.size());
  return {mean, scatter / denom};
}

}  // namespace empcheb
