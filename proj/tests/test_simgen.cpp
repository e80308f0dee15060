#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "frontier/csv.hpp"
#include "frontier/simgen.hpp"

using namespace frontier;

namespace {

double dkw_eps(std::size_t n, double alpha = 0.01) { return std::sqrt(std::log(2.0 / alpha) / (2.0 * n)); }

}  // namespace

TEST(Rng, SplitMixReferenceValue) {
  std::uint64_t s = 0;
  EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafULL);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
}

TEST(Rng, UniformMoments) {
  Xoshiro256 rng(9);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n, 1.0 / 3.0, 0.005);
}

TEST(Simgen, TriangleSupportAndMarginal) {
  const auto ds = gen_uniform_triangle(100000, 1);
  std::size_t below = 0;
  for (const auto& o : ds) {
    ASSERT_GE(o.y, 0.0);
    ASSERT_LE(o.y, o.x[0]);
    ASSERT_LE(o.x[0], 1.0);
    below += o.x[0] <= 0.5;
  }
  EXPECT_NEAR(below / 1e5, 0.25, 0.01);
}

TEST(Simgen, CobbDouglasSupport) {
  const auto ds = gen_cobb_douglas(100000, 2);
  for (const auto& o : ds) {
    ASSERT_GE(o.y, 0.0);
    ASSERT_LE(o.y, std::sqrt(o.x[0]));
  }
}

TEST(Simgen, ConditionalCdfWithinDkwBand) {
  for (auto kind : {ScenarioKind::UniformTriangle, ScenarioKind::CobbDouglas}) {
    const auto ds = generate(Scenario{kind, 100000, 3});
    const auto truth = ground_truth(kind);
    for (double x : {0.3, 0.6, 1.0}) {
      const std::vector<double> q{x};
      const auto n_x = static_cast<std::size_t>(std::llround(empirical_fx(ds, q) * ds.size()));
      const double eps = dkw_eps(n_x);
      for (double f : {0.1, 0.5, 0.9, 0.99}) {
        const double y = f * truth.frontier(x);
        EXPECT_NEAR(conditional_cdf(ds, y, q), truth.conditional_cdf(y, x), eps) << to_string(kind) << " " << x;
      }
      EXPECT_NEAR(empirical_fx(ds, q), truth.fx(x), dkw_eps(ds.size()));
    }
  }
}

TEST(Simgen, Deterministic) {
  for (auto kind : {ScenarioKind::UniformTriangle, ScenarioKind::CobbDouglas}) {
    EXPECT_EQ(dataset_to_csv(generate({kind, 500, 17})), dataset_to_csv(generate({kind, 500, 17})));
    EXPECT_NE(dataset_to_csv(generate({kind, 500, 17})), dataset_to_csv(generate({kind, 500, 18})));
  }
  EXPECT_THROW(gen_uniform_triangle(0, 1), Error);
}

TEST(GroundTruth, Triangle) {
  const auto t = ground_truth(ScenarioKind::UniformTriangle);
  EXPECT_EQ(t.frontier(0.4), 0.4);
  EXPECT_NEAR(t.fx(0.5), 0.25, 1e-15);
  EXPECT_EQ(t.conditional_cdf(0.4, 0.4), 1.0);
  EXPECT_NEAR(t.conditional_cdf(0.2, 0.4), 0.75, 1e-15);
  EXPECT_NEAR(t.high_quantile(1.0, 0.01), 0.9, 1e-12);
  EXPECT_NEAR(t.high_quantile(0.5, 0.0025), 0.45, 1e-12);
  EXPECT_THROW(t.high_quantile(0.5, 0.3), Error);
}

TEST(GroundTruth, CobbDouglas) {
  const auto t = ground_truth(ScenarioKind::CobbDouglas);
  EXPECT_NEAR(t.frontier(0.49), 0.7, 1e-15);
  EXPECT_EQ(t.conditional_cdf(0.7, 0.49), 1.0);
  EXPECT_EQ(t.ell(0.25), 3.0);
  // F_X(x) [1 - F(phi - 1/z | x)] z^2 = L_x(z), and L_x(z) -> ell(x).
  for (double x : {0.1, 0.49, 0.9}) {
    for (double z : {5.0, 20.0, 1e3}) {
      if (1.0 / z >= t.frontier(x)) continue;
      const double tail = t.fx(x) * (1.0 - t.conditional_cdf(t.frontier(x) - 1.0 / z, x)) * z * z;
      EXPECT_NEAR(tail, t.slowly_varying(x, z), 1e-9 * t.slowly_varying(x, z));
    }
    EXPECT_NEAR(t.slowly_varying(x, 1e12), t.ell(x), 1e-9);
  }
  EXPECT_NEAR(t.conditional_cdf(0.5, 1.0), 0.5, 1e-15);
}

TEST(Simgen, InjectOutlier) {
  const auto ds = gen_uniform_triangle(100, 4);
  const auto dirty = inject_outlier(ds, {0.5}, 9.0);
  EXPECT_EQ(dirty.size(), 101u);
  EXPECT_EQ(dirty[100].y, 9.0);
  EXPECT_EQ(fdh(dirty, std::vector<double>{0.5}), 9.0);
  EXPECT_THROW(inject_outlier(ds, {0.5, 0.5}, 1.0), Error);
}

TEST(Simgen, FdhScaledErrorMeanLaw) {
  // sqrt(n) (1 - fdh(1)) has survival (1 - s^2/n)^n -> exp(-s^2), mean sqrt(pi)/2.
  const std::size_t n = 5000;
  const int reps = 2000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto ds = gen_uniform_triangle(n, derive_seed(2024, r));
    sum += std::sqrt(static_cast<double>(n)) * (1.0 - fdh(ds, std::vector<double>{1.0}));
  }
  const double target = std::sqrt(std::numbers::pi) / 2.0;
  EXPECT_NEAR(sum / reps, target, 0.05 * target);
}
