#include <doctest.h>

#include <cmath>

#include "sagafs/analysis.hpp"
#include "sagafs/rng.hpp"

using namespace sagafs;

// Reference values below were computed independently with scipy.stats / scipy.special.

TEST_CASE("schedule cost ratios") {
  CHECK(std::fabs(schedule_cost_ratio(CostModel<double>{1, 2, 4}) - 15.0 / 16.0) < 1e-12);
  CHECK(std::fabs(schedule_cost_ratio(CostModel<double>{2, 2, 4}) - 85.0 / 256.0) < 1e-12);
  CHECK(std::fabs(schedule_cost_ratio(CostModel<double>{3, 2, 4}) - 585.0 / 4096.0) < 1e-12);
  CHECK(std::fabs(schedule_cost_ratio(CostModel<long double>{1, 2, 4}) - 0.9375L) < 1e-15L);
  CHECK(schedule_cost_ratio(CostModel<float>{1, 2, 1}) == 0.5f);

  CHECK_THROWS_AS(schedule_cost_ratio(CostModel<double>{0.5, 2, 4}), std::invalid_argument);
  CHECK_THROWS_AS(schedule_cost_ratio(CostModel<double>{1, 1, 4}), std::invalid_argument);
  CHECK_THROWS_AS(schedule_cost_ratio(CostModel<double>{1, 2, 0}), std::invalid_argument);
}

TEST_CASE("linear cost ratio approaches 1 from below") {
  double previous = 0.0;
  for (int b = 1; b <= 40; ++b) {
    const double r = schedule_cost_ratio(CostModel<double>{1, 2, b});
    CHECK(r > previous);
    CHECK(r < 1.0);
    previous = r;
  }
  CHECK(1.0 - previous < 1e-11);
}

TEST_CASE("moving average fixtures") {
  const Eigen::Vector3d s(1, 2, 3);
  CHECK(moving_average(s, 2) == Eigen::Vector3d(1, 1.5, 2.5));
  CHECK(moving_average(s, 1) == s);
  CHECK(moving_average(s, 10) == Eigen::Vector3d(1, 1.5, 2));
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(7, 0.25);
  CHECK(moving_average(flat, 3) == flat);
  const Eigen::Vector4i ints(2, 4, 6, 8);
  CHECK(moving_average(ints, 2) == Eigen::Vector4i(2, 3, 5, 7));
  CHECK_THROWS_AS(moving_average(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(moving_average(Eigen::VectorXd(0), 2), std::invalid_argument);
}

TEST_CASE("moving average matches a direct recomputation") {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(60));
    const auto w = static_cast<Eigen::Index>(1 + rng.uniform_index(15));
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = static_cast<double>(rng.uniform_index(100));
    const Eigen::VectorXd m = moving_average(s, w);
    for (Eigen::Index t = 0; t < n; ++t) {
      const Eigen::Index from = std::max<Eigen::Index>(0, t - w + 1);
      CHECK(m(t) == doctest::Approx(s.segment(from, t - from + 1).mean()).epsilon(1e-14));
    }
  }
}

TEST_CASE("summaries") {
  const Summary one = summarize(std::vector<double>{4.0});
  CHECK(one.mean == 4.0);
  CHECK(one.std == 0.0);
  CHECK(one.n == 1);
  const Summary two = summarize(std::vector<double>{1.0, 3.0});
  CHECK(two.mean == 2.0);
  CHECK(two.std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const Summary ten = summarize(Eigen::VectorXd::LinSpaced(10, 1, 10));
  CHECK(ten.mean == 5.5);
  CHECK(ten.std == doctest::Approx(3.0276503540974917).epsilon(1e-14));
  CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("regularized incomplete beta") {
  CHECK(regularized_incomplete_beta(0.5, 0.5, 0.3) == doctest::Approx(0.36901011956554536).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(10, 2.5, 0.9) == doctest::Approx(0.8121862743088557).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(1.5, 40, 0.02) == doctest::Approx(0.3465471321502204).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(3, 4, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(3, 4, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 1, 1.5), std::invalid_argument);
}

TEST_CASE("student t distribution") {
  CHECK(student_t_cdf(1.0, 3) == doctest::Approx(0.8044988905221148).epsilon(1e-12));
  CHECK(student_t_cdf(-2.5, 7.3) == doctest::Approx(0.019825117332800207).epsilon(1e-10));
  CHECK(student_t_cdf(0.3, 1) == doctest::Approx(0.5927735790777423).epsilon(1e-12));
  CHECK(student_t_cdf(4.0, 25.5) == doctest::Approx(0.999759465579456).epsilon(1e-12));
  CHECK(student_t_cdf(0.0, 5) == 0.5);
  for (double t : {0.1, 0.7, 1.9, 3.3}) CHECK(student_t_cdf(t, 4.5) + student_t_cdf(-t, 4.5) == doctest::Approx(1.0));
}

TEST_CASE("Welch t-test fixtures") {
  const TTestResult r = welch_t(std::vector<double>{2.1, 2.5, 2.3}, std::vector<double>{3.0, 3.4, 3.2});
  CHECK(std::fabs(r.t - (-5.511351921262157)) < 1e-6);
  CHECK(r.df == doctest::Approx(4.0));
  CHECK(std::fabs(r.p - 0.005288623386241498) < 1e-9);

  const TTestResult u = welch_t(std::vector<double>{0.91, 0.93, 0.95, 0.90, 0.97},
                                std::vector<double>{0.88, 0.85, 0.90, 0.86});
  CHECK(std::fabs(u.t - 3.512683958363577) < 1e-9);
  CHECK(std::fabs(u.p - 0.009823840333501678) < 1e-9);
}

TEST_CASE("Welch t-test edge cases") {
  const std::vector<double> a{0.8, 0.8, 0.8};
  const TTestResult same = welch_t(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  const TTestResult apart = welch_t(std::vector<double>{0, 0, 0, 0}, std::vector<double>{1, 1, 1, 1});
  CHECK(apart.p < 0.001);
  CHECK(std::isfinite(apart.t));

  CHECK_THROWS_AS(welch_t(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("Welch t-test is antisymmetric") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(2 + rng.uniform_index(10)), b(2 + rng.uniform_index(10));
    for (auto& v : a) v = rng.uniform01();
    for (auto& v : b) v = rng.uniform01() + 0.2;
    const TTestResult ab = welch_t(a, b);
    const TTestResult ba = welch_t(b, a);
    CHECK(ab.t == -ba.t);
    CHECK(ab.df == ba.df);
    CHECK(ab.p == ba.p);
    CHECK(ab.p >= 0.0);
    CHECK(ab.p <= 1.0);
  }
}

TEST_CASE("paired t-test") {
  const TTestResult r = paired_t(std::vector<double>{1, 2, 3, 4.5}, std::vector<double>{1.5, 2.1, 3.9, 4.0});
  CHECK(std::fabs(r.t - (-0.8372183582789215)) < 1e-9);
  CHECK(r.df == 3.0);
  CHECK(std::fabs(r.p - 0.46391832599804733) < 1e-9);
  const std::vector<double> x{0.9, 0.8, 0.95};
  CHECK(paired_t(x, x).p == 1.0);
  CHECK_THROWS_AS(paired_t(x, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("aligned band on a hand-computed fixture") {
  // Two step series on x in [0, 4]; 5 grid points at 0, 1, 2, 3, 4; window 2.
  Series a{Eigen::Vector2d(0, 2), Eigen::Vector2d(0.5, 0.7)};
  Series b{Eigen::Vector3d(1, 3, 4), Eigen::Vector3d(0.4, 0.6, 0.8)};
  const Band band = aligned_band({a, b}, 5, 2);
  CHECK(band.x == Eigen::VectorXd::LinSpaced(5, 0, 4));
  // resampled a: .5 .5 .7 .7 .7 -> smoothed .5 .5 .6 .7 .7
  // resampled b: .4 .4 .4 .6 .8 -> smoothed .4 .4 .4 .5 .7
  const Eigen::VectorXd mean = (Eigen::VectorXd(5) << 0.45, 0.45, 0.5, 0.6, 0.7).finished();
  const Eigen::VectorXd sd = (Eigen::VectorXd(5) << 0.05, 0.05, 0.1, 0.1, 0.0).finished() * std::sqrt(2.0);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(band.mean(i) == doctest::Approx(mean(i)).epsilon(1e-12));
    CHECK(band.std(i) == doctest::Approx(sd(i)).epsilon(1e-12).scale(1e-12));
  }

  const Band single = aligned_band({a}, 3, 1);
  CHECK(single.std.isZero());
  CHECK_THROWS_AS(aligned_band({}, 10, 2), std::invalid_argument);
  CHECK_THROWS_AS(aligned_band({a}, 1, 2), std::invalid_argument);
}
