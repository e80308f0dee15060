#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "frontier/estimators.hpp"
#include "frontier/kn_select.hpp"
#include "frontier/simgen.hpp"
#include "test_helpers.hpp"

using namespace frontier;
using frontier::testing::sample_from;

namespace {

std::vector<double> tail_sample(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = 1.0 - std::sqrt(u(gen));
  return v;
}

KSelection synthetic(std::vector<double> values, std::size_t halfwidth) {
  KSelection sel;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sel.grid.push_back(GridEntry{values.size() - i, values[i], !std::isnan(values[i])});
  }
  sel.window_halfwidth = halfwidth;
  detail::choose_window(sel);
  return sel;
}

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code);
  }
}

}  // namespace

TEST(FloorSqrtRatio, Exact) {
  EXPECT_EQ(detail::floor_sqrt_ratio(64, 4), 4u);
  EXPECT_EQ(detail::floor_sqrt_ratio(63, 4), 3u);
  EXPECT_EQ(detail::floor_sqrt_ratio(1250, 1), 35u);
  EXPECT_EQ(detail::floor_sqrt_ratio(1250, 400), 1u);
  EXPECT_EQ(detail::floor_sqrt_ratio(0, 1), 0u);
  for (std::size_t n = 1; n < 5000; ++n) {
    const auto r = detail::floor_sqrt_ratio(n, 1);
    EXPECT_LE(r * r, n);
    EXPECT_GT((r + 1) * (r + 1), n);
  }
}

TEST(ChooseWindow, MinimumSdAndCentre) {
  // Windows of 4; the flat stretch sits at indices 3..6.
  const auto sel = synthetic({1, 5, 2, 7, 7, 7, 7, 3, 9, 0}, 2);
  EXPECT_EQ(sel.rolling_sd.size(), 7u);
  EXPECT_EQ(sel.chosen_window, 3u);
  // Centre entries are indices 4 and 5 with k = 6 and 5.
  EXPECT_EQ(sel.chosen_k, 5u);
  EXPECT_EQ(sel.chosen_index, 5u);
  EXPECT_EQ(sel.chosen_value(), 7.0);
}

TEST(ChooseWindow, TiesGoToEarliestWindow) {
  const auto sel = synthetic(std::vector<double>(10, 2.0), 2);
  EXPECT_EQ(sel.chosen_window, 0u);
  for (double sd : sel.rolling_sd) EXPECT_EQ(sd, 0.0);
}

TEST(ChooseWindow, UnbiasedSd) {
  const auto sel = synthetic({1, 2, 3, 4}, 2);
  ASSERT_EQ(sel.rolling_sd.size(), 1u);
  EXPECT_NEAR(sel.rolling_sd[0], std::sqrt(5.0 / 3.0), 1e-15);
}

TEST(ChooseWindow, FailuresDisqualifyWindows) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // Only one window of 4 avoids the failures.
  const auto sel = synthetic({nan, 1, 2, 3, 100, nan}, 2);
  EXPECT_EQ(sel.chosen_window, 1u);
  EXPECT_TRUE(std::isnan(sel.rolling_sd[0]));
  EXPECT_TRUE(std::isnan(sel.rolling_sd[2]));
  expect_code(ErrorCode::InsufficientStableRange, [&] { synthetic({nan, 1, 2, nan, 3, 4, nan}, 2); });
  expect_code(ErrorCode::InsufficientStableRange, [&] { synthetic({1, 2, 3}, 2); });
}

TEST(SelectPickands, GridLayout) {
  const auto ts = sample_from(tail_sample(1, 64));
  const auto sel = select_k_pickands_rho(ts);
  ASSERT_EQ(sel.grid.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(sel.grid[i].k, 16 - i);
  EXPECT_EQ(sel.window_halfwidth, 4u);
  EXPECT_EQ(sel.rolling_sd.size(), 9u);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto direct = pickands_rho(ts, sel.grid[i].k);
    EXPECT_EQ(sel.grid[i].ok, direct.ok());
    if (direct.ok()) {
      EXPECT_EQ(sel.grid[i].value, direct.rho);
    }
  }
  EXPECT_EQ(sel.chosen_k, std::min(sel.grid[sel.chosen_window + 3].k, sel.grid[sel.chosen_window + 4].k));
}

TEST(SelectPickands, TooFewPoints) {
  expect_code(ErrorCode::InsufficientStableRange, [] { select_k_pickands_rho(sample_from(tail_sample(2, 8))); });
  expect_code(ErrorCode::InsufficientStableRange,
              [] { select_k_pickands_rho(sample_from(std::vector<double>(40, 1.0))); });
}

TEST(SelectMoment, GridLayout) {
  const auto ts = sample_from(tail_sample(3, 100), 30);
  const auto sel = select_k_moment_rho(ts);
  ASSERT_EQ(sel.grid.size(), 99u);
  EXPECT_EQ(sel.grid.front().k, 99u);
  EXPECT_EQ(sel.grid.back().k, 1u);
  EXPECT_EQ(sel.window_halfwidth, 10u);
  for (std::size_t i = 0; i < sel.grid.size(); i += 7) {
    const auto direct = moment_rho(ts, sel.grid[i].k);
    EXPECT_EQ(sel.grid[i].ok, direct.ok());
    if (direct.ok()) {
      EXPECT_NEAR(sel.grid[i].value, direct.rho, 1e-9 * std::abs(direct.rho));
    }
  }
  expect_code(ErrorCode::InsufficientStableRange, [] { select_k_moment_rho(sample_from(tail_sample(4, 4))); });
}

TEST(SelectFrontier, GridLayoutAndConstantEstimator) {
  const auto ts = sample_from(tail_sample(5, 1250));
  const auto sel = select_k_frontier(ts, [&](std::size_t) {
    FrontierEstimate e;
    e.value = 1.0;
    return e;
  });
  EXPECT_EQ(sel.grid.size(), 35u);
  EXPECT_EQ(sel.window_halfwidth, 3u);
  EXPECT_EQ(sel.chosen_window, 0u);
  EXPECT_EQ(sel.chosen_k, 3u);

  const auto ts400 = sample_from(tail_sample(6, 400));
  const auto sel400 = select_k_frontier(ts400, [&](std::size_t k) { return known_rho_star(ts400, k, 2.0); });
  EXPECT_EQ(sel400.grid.size(), 20u);
}

TEST(SelectFrontier, ThrowingEstimatorRecordsFailures) {
  const auto ts = sample_from(tail_sample(7, 100));
  // Every k above 6 throws, leaving exactly one clean window of 6.
  const auto sel = select_k_frontier(ts, [&](std::size_t k) {
    if (k > 6) throw Error(ErrorCode::OutOfRange, "k");
    FrontierEstimate e;
    e.value = static_cast<double>(k);
    return e;
  });
  EXPECT_EQ(sel.grid.size(), 10u);
  EXPECT_FALSE(sel.grid[7].ok);
  EXPECT_EQ(sel.chosen_window, 0u);
  EXPECT_EQ(sel.chosen_k, 3u);
  EXPECT_EQ(sel.rolling_sd.size(), 5u);
  EXPECT_TRUE(std::isnan(sel.rolling_sd[1]));
}

TEST(Selection, ScaleInvarianceAndDeterminism) {
  auto v = tail_sample(9, 600);
  const auto a = sample_from(v);
  for (auto& x : v) x *= 16.0;
  const auto b = sample_from(v);
  EXPECT_EQ(select_k_pickands_rho(a).chosen_k, select_k_pickands_rho(b).chosen_k);
  EXPECT_EQ(select_k_moment_rho(a).chosen_k, select_k_moment_rho(b).chosen_k);
  const auto fa = select_k_frontier(a, [&](std::size_t k) { return known_rho_star(a, k, 2.0); });
  const auto fb = select_k_frontier(b, [&](std::size_t k) { return known_rho_star(b, k, 2.0); });
  EXPECT_EQ(fa.chosen_k, fb.chosen_k);

  const auto again = select_k_moment_rho(a);
  const auto first = select_k_moment_rho(a);
  EXPECT_EQ(again.chosen_k, first.chosen_k);
  ASSERT_EQ(again.rolling_sd.size(), first.rolling_sd.size());
  for (std::size_t i = 0; i < first.rolling_sd.size(); ++i) {
    if (!std::isnan(first.rolling_sd[i])) {
      EXPECT_EQ(again.rolling_sd[i], first.rolling_sd[i]);
    }
  }
}

TEST(Selection, PickandsRhoNearTruthOnLargeSample) {
  const auto ds = gen_uniform_triangle(20000, 123);
  const auto sel = select_k_pickands_rho(transform(ds, std::vector<double>{1.0}));
  EXPECT_GT(sel.chosen_value(), 1.0);
  EXPECT_LT(sel.chosen_value(), 3.5);
}
