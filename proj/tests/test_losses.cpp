#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nsopt/error.hpp"
#include "nsopt/loss.hpp"
#include "nsopt/oracles.hpp"
#include "nsopt/rng.hpp"

namespace nsopt {
namespace {

SampleWindow window(std::initializer_list<double> v) {
  return SampleWindow::from_values(std::vector<double>(v));
}

SampleWindow random_window(Rng& rng, double xbar, bool ties) {
  const std::size_t n = 1 + rng.next() % 50;
  std::vector<double> v(n);
  for (double& x : v) {
    x = ties ? std::round(rng.uniform(0.0, xbar) * 20.0) / 20.0 : rng.uniform(0.0, xbar);
  }
  return SampleWindow::from_values(v);
}

// Smallest minimizer of the empirical cost on a uniform grid of [0, xbar].
double grid_minimizer(const SampleWindow& w, const InnerLoss& loss, double xbar, double step) {
  const auto points = static_cast<std::size_t>(std::llround(xbar / step));
  double best_x = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= points; ++i) {
    const double x = static_cast<double>(i) * step;
    const double c = empirical_cost(w, loss, x);
    if (c < best - 1e-12) {
      best = c;
      best_x = x;
    }
  }
  return best_x;
}

TEST(LossEval, Examples) {
  EXPECT_DOUBLE_EQ(loss_eval(InnerLoss::linear(2, 5), 3, 7), 20.0);
  EXPECT_DOUBLE_EQ(loss_eval(InnerLoss::quadratic(2), 1, 3), 8.0);
  EXPECT_DOUBLE_EQ(loss_eval(InnerLoss::auction(0.8), 0.5, 0.3), -0.3);
  EXPECT_DOUBLE_EQ(loss_eval(InnerLoss::auction(0.8), 0.2, 0.3), 0.0);
}

TEST(LossSubgrad, Examples) {
  EXPECT_DOUBLE_EQ(loss_subgrad(InnerLoss::linear(1, 2), 3, 1), 1.0);
  EXPECT_DOUBLE_EQ(loss_subgrad(InnerLoss::linear(1, 2), 1, 3), -2.0);
  EXPECT_DOUBLE_EQ(loss_subgrad(InnerLoss::linear(1, 2), 2, 2), 1.0);
  EXPECT_DOUBLE_EQ(loss_subgrad(InnerLoss::quadratic(1), 2, 5), -6.0);
}

TEST(LossSubgrad, AuctionUnsupported) {
  EXPECT_THROW(loss_subgrad(InnerLoss::auction(0.5), 0.4, 0.2), UnsupportedOperation);
}

TEST(LossSubgrad, MatchesFiniteDifference) {
  Rng rng(1);
  const InnerLoss losses[] = {InnerLoss::linear(1.3, 2.7), InnerLoss::quadratic(0.7)};
  int checked = 0;
  while (checked < 1000) {
    const double x = rng.uniform(0.0, 5.0);
    const double d = rng.uniform(0.0, 5.0);
    if (std::abs(x - d) <= 1e-3) continue;
    for (const auto& loss : losses) {
      const double h = 1e-6;
      const double fd = (loss_eval(loss, x + h, d) - loss_eval(loss, x - h, d)) / (2 * h);
      EXPECT_NEAR(loss_subgrad(loss, x, d), fd, 1e-6);
    }
    ++checked;
  }
}

TEST(InnerLoss, Validation) {
  EXPECT_THROW(InnerLoss::linear(-1, 1), InvalidArgument);
  EXPECT_THROW(InnerLoss::linear(0, 0), InvalidArgument);
  EXPECT_THROW(InnerLoss::quadratic(0), InvalidArgument);
  EXPECT_THROW(InnerLoss::auction(1.5), InvalidArgument);
  EXPECT_THROW(InnerLoss::linear_from_ratio(1, 1.0), InvalidArgument);
}

TEST(InnerLoss, ParametersFromRatio) {
  const auto loss = InnerLoss::linear_from_ratio(1.0, 0.7);
  EXPECT_NEAR(loss.b(), 7.0 / 3.0, 1e-12);
  EXPECT_NEAR(loss.critical_ratio(), 0.7, 1e-12);
}

TEST(Ghat, Examples) {
  const auto w = window({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(ghat(w, 2.5, 1, 1), 0.0);
  EXPECT_DOUBLE_EQ(ghat(w, 0.5, 1, 3), -3.0);
  EXPECT_DOUBLE_EQ(ghat(w, 4.0, 2, 3), 2.0);
  EXPECT_DOUBLE_EQ(ghat(w, 9.0, 2, 3), 2.0);
}

TEST(Ghat, EmptyWindowRejected) {
  EXPECT_THROW(ghat(SampleWindow(), 1.0, 1, 1), InvalidArgument);
}

TEST(Ghat, NondecreasingInX) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto w = random_window(rng, 3.0, i % 2 == 0);
    double prev = -std::numeric_limits<double>::infinity();
    for (double x = -0.5; x <= 3.5; x += 0.01) {
      const double g = ghat(w, x, 1.0, 2.0);
      EXPECT_GE(g, prev);
      prev = g;
    }
  }
}

TEST(QuantileOracle, Examples) {
  EXPECT_DOUBLE_EQ(quantile_oracle(window({1, 2, 3}), 1, 1), 2.0);
  EXPECT_DOUBLE_EQ(quantile_oracle(window({4}), 1, 3), 4.0);
  EXPECT_DOUBLE_EQ(quantile_oracle(window({1, 2, 3, 4}), 1, 1), 2.0);
}

TEST(QuantileOracle, EmptyWindowRejected) {
  EXPECT_THROW(quantile_oracle(SampleWindow(), 1, 1), InvalidArgument);
}

TEST(QuantileOracle, MatchesGridMinimizer) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto w = random_window(rng, 1.0, i % 2 == 0);
    const double h = rng.uniform(0.1, 3.0);
    const double b = rng.uniform(0.1, 3.0);
    const double grid = grid_minimizer(w, InnerLoss::linear(h, b), 1.0, 1e-3);
    EXPECT_NEAR(quantile_oracle(w, h, b), grid, 1e-3 + 1e-12);
  }
}

TEST(QuantileOracle, GradientAtOutputIsSmall) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto w = random_window(rng, 1.0, false);
    const double h = rng.uniform(0.1, 3.0);
    const double b = rng.uniform(0.1, 3.0);
    const double x = quantile_oracle(w, h, b);
    EXPECT_LE(std::abs(ghat(w, x, h, b)), (h + b) / static_cast<double>(w.size()) + 1e-12);
  }
}

TEST(MeanOracle, Examples) {
  EXPECT_DOUBLE_EQ(mean_oracle(window({1, 3}), 10), 2.0);
  EXPECT_DOUBLE_EQ(mean_oracle(window({11, 13}), 10), 10.0);
  EXPECT_DOUBLE_EQ(mean_oracle(window({5}), 10), 5.0);
  EXPECT_THROW(mean_oracle(SampleWindow(), 10), InvalidArgument);
}

TEST(MeanOracle, MatchesGridMinimizer) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto w = random_window(rng, 1.0, i % 2 == 0);
    const auto loss = InnerLoss::quadratic(1.5);
    const double x = mean_oracle(w, 1.0);
    EXPECT_LE(empirical_cost(w, loss, x),
              empirical_cost(w, loss, grid_minimizer(w, loss, 1.0, 1e-3)) + 1e-12);
  }
}

TEST(BreakpointOracle, Examples) {
  EXPECT_DOUBLE_EQ(breakpoint_oracle(window({0.2, 0.3}), 0.8), 0.3);
  EXPECT_DOUBLE_EQ(breakpoint_oracle(window({0.5}), 0.8), 0.5);
  EXPECT_DOUBLE_EQ(breakpoint_oracle(window({0.5}), 0.1), 0.0);
  EXPECT_THROW(breakpoint_oracle(SampleWindow(), 0.5), InvalidArgument);
}

TEST(BreakpointOracle, BeatsEveryCandidate) {
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const auto w = random_window(rng, 1.0, i % 2 == 0);
    const double v = rng.uniform();
    const auto loss = InnerLoss::auction(v);
    const double x = breakpoint_oracle(w, v);
    const double best = empirical_cost(w, loss, x);
    EXPECT_LE(best, empirical_cost(w, loss, 0.0) + 1e-12);
    for (double d : w.values()) EXPECT_LE(best, empirical_cost(w, loss, d) + 1e-12);
    // Piecewise constant between breakpoints: no grid point does better either.
    EXPECT_LE(best, empirical_cost(w, loss, grid_minimizer(w, loss, 1.0, 1e-3)) + 1e-12);
  }
}

TEST(OgdOracle, ApproachesExactOracles) {
  Rng rng(7);
  const OgdOracle ogd;
  for (int i = 0; i < 30; ++i) {
    const auto w = random_window(rng, 1.0, false);
    const auto linear = InnerLoss::linear(1.0, 1.0);
    const auto quad = InnerLoss::quadratic(1.0);
    const auto a = ogd.solve(w, linear, 1.0, 0.01);
    EXPECT_TRUE(std::isnan(a.achieved_accuracy));
    EXPECT_LE(empirical_cost(w, linear, a.decision),
              empirical_cost(w, linear, quantile_oracle(w, 1.0, 1.0)) + 0.05);
    const auto q = ogd.solve(w, quad, 1.0, 0.01);
    EXPECT_LE(empirical_cost(w, quad, q.decision),
              empirical_cost(w, quad, mean_oracle(w, 1.0)) + 0.01);
  }
}

TEST(Oracles, ExactOraclesReportZeroError) {
  const auto w = window({0.2, 0.4});
  EXPECT_EQ(QuantileOracle().solve(w, InnerLoss::linear(1, 1), 1.0, 0.1).achieved_accuracy, 0.0);
  EXPECT_EQ(MeanOracle().solve(w, InnerLoss::quadratic(1), 1.0, 0.1).achieved_accuracy, 0.0);
  EXPECT_EQ(BreakpointOracle().solve(w, InnerLoss::auction(0.5), 1.0, 0.1).achieved_accuracy, 0.0);
}

TEST(Oracles, FactoryAndSupport) {
  EXPECT_EQ(make_oracle("quantile")->name(), "quantile");
  EXPECT_EQ(make_oracle("ogd")->name(), "ogd");
  EXPECT_THROW(make_oracle("newton"), InvalidArgument);
  EXPECT_FALSE(make_oracle("mean")->supports(LossKind::LinearNewsvendor));
  EXPECT_THROW(MeanOracle().solve(window({1}), InnerLoss::linear(1, 1), 1.0, 0.1), PolicyError);
}

TEST(Ghat, EcdfIdentity) {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    const auto w = random_window(rng, 2.0, i % 2 == 0);
    const double x = rng.uniform(-0.5, 2.5);
    const double h = rng.uniform(0.0, 5.0);
    const double b = rng.uniform(0.01, 5.0);
    EXPECT_EQ(ghat(w, x, h, b), (h + b) * ecdf(w, x) - b);
  }
}

}  // namespace
}  // namespace nsopt
