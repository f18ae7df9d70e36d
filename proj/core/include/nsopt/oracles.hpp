#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "nsopt/empirical.hpp"
#include "nsopt/loss.hpp"

namespace nsopt {

// Empirical gradient proxy (h + b) F_n(x) - b of the linear newsvendor cost.
double ghat(const SampleWindow& samples, double x, double h, double b);

// Smallest sample value whose ECDF reaches b / (h + b); an exact minimizer of
// the empirical newsvendor cost.
double quantile_oracle(const SampleWindow& samples, double h, double b);

// Sample mean projected onto [0, xbar]; exact minimizer of the empirical
// quadratic cost.
double mean_oracle(const SampleWindow& samples, double xbar);

// Smallest minimizer of (1/n) sum_k (x - v) 1[x >= d_k] over {0} and the
// sample values in [0, xbar].
double breakpoint_oracle(const SampleWindow& samples, double value, double xbar = 1.0);

// Average empirical loss (1/n) sum_k F(x, d_k).
double empirical_cost(const SampleWindow& samples, const InnerLoss& loss, double x);

struct OracleResult {
  double decision;
  // Certified bound on the empirical suboptimality; 0 for exact oracles,
  // NaN when the oracle cannot certify its output.
  double achieved_accuracy;
};

// Solves min_{x in [0, xbar]} (1/n) sum_k F(x, d_k) to a requested accuracy.
class OptimizationOracle {
 public:
  virtual ~OptimizationOracle() = default;

  virtual std::string name() const = 0;
  virtual bool supports(LossKind kind) const = 0;
  virtual OracleResult solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                             double target_accuracy) const = 0;
};

class QuantileOracle final : public OptimizationOracle {
 public:
  std::string name() const override { return "quantile"; }
  bool supports(LossKind kind) const override { return kind == LossKind::LinearNewsvendor; }
  OracleResult solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                     double target_accuracy) const override;
};

class MeanOracle final : public OptimizationOracle {
 public:
  std::string name() const override { return "mean"; }
  bool supports(LossKind kind) const override { return kind == LossKind::Quadratic; }
  OracleResult solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                     double target_accuracy) const override;
};

class BreakpointOracle final : public OptimizationOracle {
 public:
  std::string name() const override { return "breakpoint"; }
  bool supports(LossKind kind) const override { return kind == LossKind::Auction; }
  OracleResult solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                     double target_accuracy) const override;
};

// Projected subgradient descent on the empirical objective with step
// diam / sqrt(k) at inner step k, returning the average iterate. The number
// of inner steps is ceil(1 / eps^2), clamped to [min_steps, max_steps].
class OgdOracle final : public OptimizationOracle {
 public:
  explicit OgdOracle(std::size_t min_steps = 100, std::size_t max_steps = 20000)
      : min_steps_(min_steps), max_steps_(max_steps) {}

  std::string name() const override { return "ogd"; }
  bool supports(LossKind kind) const override { return kind != LossKind::Auction; }
  OracleResult solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                     double target_accuracy) const override;

 private:
  std::size_t min_steps_;
  std::size_t max_steps_;
};

// "quantile", "mean", "breakpoint" or "ogd".
std::unique_ptr<OptimizationOracle> make_oracle(const std::string& name);

}  // namespace nsopt
