#include "empcheb/montecarlo.hpp"

#include "empcheb/errors.hpp"
#include "empcheb/geometry.hpp"
#include "empcheb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <utility>

namespace empcheb {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream_index) {
  return std::mt19937_64(splitmix64(seed) ^ splitmix64(stream_index * kGolden + 1));
}

void require_spd(const Eigen::MatrixXd& m, const char* what) {
  try {
    cholesky_factor(m);
  } catch (const Error&) {
    throw Error(ErrorCode::spec_validation,
                std::string(what) + " must be symmetric positive definite");
  }
}

struct Validator {
  int dim = -1;

  void visit(const GaussianSpec& g) {
    if (g.mean.size() < 1 || g.covariance.rows() != g.mean.size() ||
        g.covariance.cols() != g.mean.size()) {
      throw Error(ErrorCode::spec_validation, "gaussian mean/covariance shapes differ");
    }
    require_spd(g.covariance, "gaussian covariance");
    dim = static_cast<int>(g.mean.size());
  }
  void visit(const UniformBoxSpec& u) {
    if (u.lo.size() < 1 || u.hi.size() != u.lo.size()) {
      throw Error(ErrorCode::spec_validation, "uniform box bounds shapes differ");
    }
    if (((u.hi - u.lo).array() < 0.0).any()) {
      throw Error(ErrorCode::spec_validation, "uniform box needs lo <= hi per axis");
    }
    dim = static_cast<int>(u.lo.size());
  }
  void visit(const StudentTSpec& t) {
    if (!(t.dof > 2.0)) {
      throw Error(ErrorCode::spec_validation,
                  "student-t needs dof > 2 for a finite covariance");
    }
    if (t.scale.rows() < 1 || t.scale.rows() != t.scale.cols()) {
      throw Error(ErrorCode::spec_validation, "student-t scale must be square");
    }
    require_spd(t.scale, "student-t scale");
    dim = static_cast<int>(t.scale.rows());
  }
  void visit(const TwoPointSpec& p) {
    if (p.a.size() < 1 || p.b.size() != p.a.size()) {
      throw Error(ErrorCode::spec_validation, "two-point values have different lengths");
    }
    if (!(p.weight_a >= 0.0 && p.weight_a <= 1.0)) {
      throw Error(ErrorCode::spec_validation, "two-point weight must lie in [0,1]");
    }
    dim = static_cast<int>(p.a.size());
  }
  void visit(const MixtureSpec& m) {
    if (m.components.empty() || m.components.size() != m.weights.size()) {
      throw Error(ErrorCode::spec_validation,
                  "mixture needs matching, nonempty components and weights");
    }
    double total = 0.0;
    for (double w : m.weights) {
      if (w < 0.0) {
        throw Error(ErrorCode::spec_validation, "mixture weights must be nonnegative");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::spec_validation, "mixture weights must sum to 1");
    }
    dim = m.components.front().dim();
    for (const auto& c : m.components) {
      if (c.dim() != dim) {
        throw Error(ErrorCode::spec_validation, "mixture components have mixed dimensions");
      }
    }
  }
};

Eigen::VectorXd draw_one(const DistributionSpec::Family& family, int dim,
                         std::mt19937_64& engine);

Eigen::VectorXd draw_gaussian(const GaussianSpec& g, std::mt19937_64& engine) {
  // Factor per call would be wasteful for bulk draws; bulk path caches below.
  const Eigen::MatrixXd lower = cholesky_factor(g.covariance);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(g.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine);
  return g.mean + lower * z;
}

Eigen::VectorXd draw_one(const DistributionSpec::Family& family, int dim,
                         std::mt19937_64& engine) {
  return std::visit(
      [&](const auto& f) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return draw_gaussian(f, engine);
        } else if constexpr (std::is_same_v<T, UniformBoxSpec>) {
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          Eigen::VectorXd x(dim);
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            x(i) = f.lo(i) + (f.hi(i) - f.lo(i)) * unit(engine);
          }
          return x;
        } else if constexpr (std::is_same_v<T, StudentTSpec>) {
          const Eigen::MatrixXd lower = cholesky_factor(f.scale);
          std::normal_distribution<double> normal;
          std::chi_squared_distribution<double> chi2(f.dof);
          Eigen::VectorXd z(dim);
          for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine);
          return lower * z * std::sqrt(f.dof / chi2(engine));
        } else if constexpr (std::is_same_v<T, TwoPointSpec>) {
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          return unit(engine) < f.weight_a ? f.a : f.b;
        } else {
          static_assert(std::is_same_v<T, MixtureSpec>);
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          double u = unit(engine);
          std::size_t pick = f.components.size() - 1;
          for (std::size_t i = 0; i < f.weights.size(); ++i) {
            if (u < f.weights[i]) {
              pick = i;
              break;
            }
            u -= f.weights[i];
          }
          return draw_one(f.components[pick].family(), dim, engine);
        }
      },
      family);
}

}  // namespace

DistributionSpec::DistributionSpec(Family family) : family_(std::move(family)) {
  Validator v;
  std::visit([&](const auto& f) { v.visit(f); }, family_);
  dim_ = v.dim;
}

DistributionSpec DistributionSpec::standard_gaussian(int dim) {
  if (dim < 1) {
    throw Error(ErrorCode::spec_validation, "dimension must be at least 1");
  }
  return DistributionSpec(GaussianSpec{Eigen::VectorXd::Zero(dim),
                                       Eigen::MatrixXd::Identity(dim, dim)});
}

const char* DistributionSpec::family_name() const noexcept {
  switch (family_.index()) {
    case 0: return "gaussian";
    case 1: return "uniform_box";
    case 2: return "student_t";
    case 3: return "two_point";
    default: return "mixture";
  }
}

Eigen::VectorXd DistributionSpec::population_mean() const {
  return std::visit(
      [&](const auto& f) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return f.mean;
        } else if constexpr (std::is_same_v<T, UniformBoxSpec>) {
          return 0.5 * (f.lo + f.hi);
        } else if constexpr (std::is_same_v<T, StudentTSpec>) {
          return Eigen::VectorXd::Zero(dim_);
        } else if constexpr (std::is_same_v<T, TwoPointSpec>) {
          return f.weight_a * f.a + (1.0 - f.weight_a) * f.b;
        } else {
          Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
          for (std::size_t i = 0; i < f.components.size(); ++i) {
            m += f.weights[i] * f.components[i].population_mean();
          }
          return m;
        }
      },
      family_);
}

Eigen::MatrixXd DistributionSpec::population_covariance() const {
  return std::visit(
      [&](const auto& f) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return f.covariance;
        } else if constexpr (std::is_same_v<T, UniformBoxSpec>) {
          return ((f.hi - f.lo).array().square() / 12.0).matrix().asDiagonal();
        } else if constexpr (std::is_same_v<T, StudentTSpec>) {
          return f.scale * (f.dof / (f.dof - 2.0));
        } else if constexpr (std::is_same_v<T, TwoPointSpec>) {
          const Eigen::VectorXd d = f.a - f.b;
          return f.weight_a * (1.0 - f.weight_a) * d * d.transpose();
        } else {
          // law of total covariance
          const Eigen::VectorXd mean = population_mean();
          Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim_, dim_);
          for (std::size_t i = 0; i < f.components.size(); ++i) {
            const Eigen::VectorXd d = f.components[i].population_mean() - mean;
            cov += f.weights[i] *
                   (f.components[i].population_covariance() + d * d.transpose());
          }
          return cov;
        }
      },
      family_);
}

std::vector<Eigen::VectorXd> draw(const DistributionSpec& spec,
                                  std::uint64_t seed,
                                  std::uint64_t stream_index, int count) {
  if (count < 0) {
    throw Error(ErrorCode::spec_validation, "draw count must be nonnegative");
  }
  std::mt19937_64 engine = stream_engine(seed, stream_index);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));

  // Bulk fast path for the gaussian family: factor once per stream.
  if (const auto* g = std::get_if<GaussianSpec>(&spec.family())) {
    const Eigen::MatrixXd lower = cholesky_factor(g->covariance);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(spec.dim());
    for (int c = 0; c < count; ++c) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine);
      out.push_back(g->mean + lower * z);
    }
    return out;
  }

  for (int c = 0; c < count; ++c) {
    out.push_back(draw_one(spec.family(), spec.dim(), engine));
  }
  return out;
}

namespace {

// One estimation/test round: estimates on the first `count` draws, tests the
// final draw. Returns the exceedance indicator or nullopt on a singular
// covariance.
std::optional<bool> tail_event_trial(const DistributionSpec& spec,
                                     std::int64_t count, double lambda_sq,
                                     std::uint64_t seed, std::uint64_t stream) {
  const auto samples = draw(spec, seed, stream, static_cast<int>(count) + 1);
  SampleStats stats(spec.dim());
  for (std::int64_t i = 0; i < count; ++i) stats.update(samples[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd lower;
  try {
    lower = cholesky_factor(stats.covariance(CovarianceMode::unbiased));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_covariance) return std::nullopt;
    throw;
  }
  const double q = mahalanobis_sq(lower, stats.mean(), samples.back());
  return q >= lambda_sq;
}

}  // namespace

SimulationReport validate_bound(const DistributionSpec& spec,
                                std::int64_t count, const Numeric& lambda_sq,
                                std::int64_t trials, std::uint64_t seed,
                                int workers) {
  if (trials < 1) {
    throw Error(ErrorCode::spec_validation, "trial count must be positive");
  }
  if (workers < 1) workers = 1;

  SimulationReport report;
  report.dim = spec.dim();
  report.count = count;
  report.lambda_sq = lambda_sq.value();
  report.trials = trials;
  report.seed = seed;
  report.bound = empirical_bound({spec.dim(), count, lambda_sq});

  const double l2 = lambda_sq.value();
  const std::int64_t max_rejected = std::max<std::int64_t>(1, trials / 1000);

  std::vector<std::int64_t> events_per_worker(static_cast<std::size_t>(workers), 0);
  std::vector<std::int64_t> singular_per_worker(static_cast<std::size_t>(workers), 0);
  auto run_range = [&](int w, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t t = lo; t < hi; ++t) {
      const auto hit = tail_event_trial(spec, count, l2, seed,
                                        static_cast<std::uint64_t>(t));
      if (!hit.has_value()) {
        ++singular_per_worker[static_cast<std::size_t>(w)];
      } else if (*hit) {
        ++events_per_worker[static_cast<std::size_t>(w)];
      }
    }
  };

  if (workers == 1) {
    run_range(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = std::min<std::int64_t>(trials, w * chunk);
      const std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
      pool.emplace_back(run_range, w, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::int64_t events = 0;
  std::int64_t singular = 0;
  for (int w = 0; w < workers; ++w) {
    events += events_per_worker[static_cast<std::size_t>(w)];
    singular += singular_per_worker[static_cast<std::size_t>(w)];
  }

  // Replace each rejected trial from reserved streams beyond the main range;
  // replacement is serial so the worker count never affects the totals.
  std::int64_t pending = singular;
  std::uint64_t next_reserve = static_cast<std::uint64_t>(trials);
  while (pending > 0) {
    if (singular > max_rejected) {
      throw Error(ErrorCode::degenerate_spec,
                  "covariance factorization failed in " + std::to_string(singular) +
                      " of " + std::to_string(trials) +
                      " trials (cap 0.1%); the sampling distribution is too degenerate");
    }
    const auto hit = tail_event_trial(spec, count, l2, seed, next_reserve++);
    if (!hit.has_value()) {
      ++singular;
      continue;
    }
    if (*hit) ++events;
    --pending;
  }

  report.events = events;
  report.rejected_singular = singular;
  report.empirical_frequency =
      static_cast<double>(events) / static_cast<double>(trials);
  const double f = report.empirical_frequency;
  report.mc_stderr = std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
  report.pass = f <= report.bound.value + 3.0 * report.mc_stderr;
  return report;
}

std::vector<ConvergenceRow> convergence_sweep(int dim, const Numeric& lambda_sq,
                                              std::span<const std::int64_t> counts) {
  if (counts.empty()) {
    throw Error(ErrorCode::spec_validation, "count list must not be empty");
  }
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] <= counts[i - 1]) {
      throw Error(ErrorCode::spec_validation, "count list must be strictly increasing");
    }
  }
  const BoundValue limit = asymptotic_bound(dim, lambda_sq);
  std::vector<ConvergenceRow> rows;
  rows.reserve(counts.size());
  for (std::int64_t n : counts) {
    const BoundValue b = empirical_bound({dim, n, lambda_sq});
    rows.push_back({n, b.value, limit.value, std::abs(b.value - limit.value)});
  }
  return rows;
}

std::int64_t lemma1_trial(int dim, std::int64_t sample_count,
                          std::span<const double> k_sq_grid, std::uint64_t seed) {
  if (sample_count < 2) {
    throw Error(ErrorCode::insufficient_samples,
                "whitening needs at least 2 samples");
  }
  const DistributionSpec spec = DistributionSpec::standard_gaussian(dim);

  std::vector<Eigen::VectorXd> whitened;
  bool ok = false;
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    const auto samples = draw(spec, seed, attempt, static_cast<int>(sample_count));
    try {
      whitened = whiten(samples);
      ok = true;
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::singular_covariance) throw;
    }
  }
  if (!ok) {
    throw Error(ErrorCode::degenerate_spec,
                "whitening kept failing; sample set persistently singular");
  }

  std::int64_t violations = 0;
  for (double k_sq : k_sq_grid) {
    const BigInt cap = counting_bound(dim, sample_count, Numeric::approx(k_sq));
    std::int64_t hits = 0;
    for (const auto& u : whitened) {
      if (u.squaredNorm() >= k_sq) ++hits;
    }
    if (BigInt(hits) > cap) ++violations;
  }
  return violations;
}

}  // namespace empcheb
