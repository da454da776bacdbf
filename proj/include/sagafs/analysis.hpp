#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sagafs {

/// Cost of an induction algorithm as f(n) ~ n^c, run on the geometric schedule.
template <typename Scalar = double>
struct CostModel {
  Scalar complexity_exponent = 1;  // 1 tree-like, 2 kNN-like, 3 SVM-like
  Scalar a = 2;
  int b = 4;
};

/// Surrogate-stage cost relative to one full-data stage at equal evaluations per
/// level: sum_{i=1..b} (a^-i)^c.
template <typename Scalar>
Scalar schedule_cost_ratio(const CostModel<Scalar>& model) {
  using std::pow;
  if (!(model.complexity_exponent >= Scalar(1))) {
    throw std::invalid_argument("schedule_cost_ratio: exponent must be at least 1");
  }
  if (!(model.a > Scalar(1)) || model.b < 1) {
    throw std::invalid_argument("schedule_cost_ratio: need a > 1 and b >= 1");
  }
  Scalar total(0);
  for (int i = 1; i <= model.b; ++i) total += pow(pow(model.a, Scalar(-i)), model.complexity_exponent);
  return total;
}

/// Trailing mean over min(t+1, window) values; output has the input's length.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> moving_average(
    const Eigen::MatrixBase<Derived>& series, Eigen::Index window) {
  using Scalar = typename Derived::Scalar;
  if (window < 1) throw std::invalid_argument("moving_average: window must be positive");
  if (series.size() == 0) throw std::invalid_argument("moving_average: empty series");
  const Eigen::Index n = series.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index len = std::min(t + 1, window);
    Scalar sum(0);
    for (Eigen::Index j = t - len + 1; j <= t; ++j) sum += series(j);
    out(t) = sum / Scalar(len);
  }
  return out;
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, n-1 denominator; 0 for n = 1
  std::size_t n = 0;
};

template <typename Derived>
Summary summarize(const Eigen::MatrixBase<Derived>& values) {
  const Eigen::Index n = values.size();
  if (n < 1) throw std::invalid_argument("summarize: need at least one value");
  Summary s;
  s.n = static_cast<std::size_t>(n);
  s.mean = static_cast<double>(values.sum()) / static_cast<double>(n);
  if (n > 1) {
    const double ss = (values.template cast<double>().array() - s.mean).square().sum();
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

Summary summarize(const std::vector<double>& values);

/// Regularized incomplete beta I_x(a, b) by continued fraction (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

/// Student-t distribution function with `df` degrees of freedom (df may be fractional).
double student_t_cdf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Sample variances below this floor are raised to it, so constant samples still give a
/// finite statistic.
inline constexpr double kVarianceFloor = 1e-12;

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
TTestResult welch_t(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);
TTestResult welch_t(const std::vector<double>& a, const std::vector<double>& b);

/// Paired t-test on a - b.
TTestResult paired_t(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);
TTestResult paired_t(const std::vector<double>& a, const std::vector<double>& b);

/// A step-function series, e.g. best fitness against instances processed.
struct Series {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

struct Band {
  Eigen::VectorXd x;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

/// Resamples every series on `points` uniform grid points over [0, longest x],
/// smooths each with a trailing moving average, then takes per-point mean and std.
Band aligned_band(const std::vector<Series>& runs, Eigen::Index points = 200, Eigen::Index window = 10);

}  // namespace sagafs
