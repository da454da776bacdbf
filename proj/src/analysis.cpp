#include "sagafs/analysis.hpp"

#include <algorithm>
#include <limits>

namespace sagafs {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace

Summary summarize(const std::vector<double>& values) { return summarize(as_eigen(values)); }

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // the continued fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult welch_t(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t: each sample needs two values");
  const Summary sa = summarize(a);
  const Summary sb = summarize(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = std::max(sa.std * sa.std, kVarianceFloor) / na;
  const double vb = std::max(sb.std * sb.std, kVarianceFloor) / nb;

  TTestResult r;
  r.t = (sa.mean - sb.mean) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p = two_sided_p(r.t, r.df);
  return r;
}

TTestResult welch_t(const std::vector<double>& a, const std::vector<double>& b) {
  return welch_t(as_eigen(a), as_eigen(b));
}

TTestResult paired_t(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t: samples differ in length");
  if (a.size() < 2) throw std::invalid_argument("paired_t: need at least two pairs");
  const Eigen::VectorXd diff = a - b;
  const Summary s = summarize(diff);
  const double n = static_cast<double>(diff.size());
  TTestResult r;
  r.df = n - 1.0;
  r.t = s.mean / std::sqrt(std::max(s.std * s.std, kVarianceFloor) / n);
  r.p = two_sided_p(r.t, r.df);
  return r;
}

TTestResult paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  return paired_t(as_eigen(a), as_eigen(b));
}

Band aligned_band(const std::vector<Series>& runs, Eigen::Index points, Eigen::Index window) {
  if (runs.empty()) throw std::invalid_argument("aligned_band: no runs");
  if (points < 2) throw std::invalid_argument("aligned_band: need at least two grid points");
  double longest = 0.0;
  for (const auto& r : runs) {
    if (r.x.size() == 0 || r.x.size() != r.y.size()) throw std::invalid_argument("aligned_band: bad series");
    longest = std::max(longest, r.x.maxCoeff());
  }

  Band band;
  band.x = Eigen::VectorXd::LinSpaced(points, 0.0, longest);
  Eigen::MatrixXd smoothed(points, static_cast<Eigen::Index>(runs.size()));
  for (std::size_t j = 0; j < runs.size(); ++j) {
    const Series& r = runs[j];
    Eigen::VectorXd resampled(points);
    Eigen::Index cursor = 0;
    for (Eigen::Index g = 0; g < points; ++g) {
      while (cursor + 1 < r.x.size() && r.x(cursor + 1) <= band.x(g)) ++cursor;
      resampled(g) = r.y(cursor);  // before the first event the first value holds
    }
    smoothed.col(static_cast<Eigen::Index>(j)) = moving_average(resampled, window);
  }
  band.mean = smoothed.rowwise().mean();
  band.std = Eigen::VectorXd::Zero(points);
  if (smoothed.cols() > 1) {
    const Eigen::MatrixXd centered = smoothed.colwise() - band.mean;
    band.std = (centered.array().square().rowwise().sum() / static_cast<double>(smoothed.cols() - 1)).sqrt();
  }
  return band;
}

}  // namespace sagafs
