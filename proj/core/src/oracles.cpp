#include "nsopt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nsopt/error.hpp"

namespace nsopt {
namespace {

void require_nonempty(const SampleWindow& samples) {
  if (samples.empty()) {
    throw InvalidArgument("oracle called on an empty sample window");
  }
}

void require_support(const OptimizationOracle& oracle, const InnerLoss& loss) {
  if (!oracle.supports(loss.kind())) {
    throw PolicyError("oracle '" + oracle.name() + "' cannot optimize " + loss.describe());
  }
}

}  // namespace

double ghat(const SampleWindow& samples, double x, double h, double b) {
  return (h + b) * ecdf(samples, x) - b;
}

double quantile_oracle(const SampleWindow& samples, double h, double b) {
  require_nonempty(samples);
  if (!(h >= 0.0 && b >= 0.0 && h + b > 0.0)) {
    throw InvalidArgument("quantile oracle needs h >= 0, b >= 0, h + b > 0");
  }
  // Smallest k with k / n >= b / (h + b), i.e. k (h + b) >= b n, tolerant of
  // rounding in the product.
  const auto n = samples.size();
  const double target = b * static_cast<double>(n);
  const double scale = h + b;
  auto k = static_cast<std::size_t>(std::ceil(target / scale));
  while (k > 0 && static_cast<double>(k - 1) * scale >= target * (1.0 - 1e-12)) --k;
  while (k < n && static_cast<double>(k) * scale < target * (1.0 - 1e-12)) ++k;
  k = std::clamp<std::size_t>(k, 1, n);
  return samples.sorted()[k - 1];
}

double mean_oracle(const SampleWindow& samples, double xbar) {
  require_nonempty(samples);
  const auto values = samples.values();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return std::clamp(mean, 0.0, xbar);
}

double breakpoint_oracle(const SampleWindow& samples, double value, double xbar) {
  require_nonempty(samples);
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument("auction value must lie in [0, 1]");
  }
  const auto sorted = samples.sorted();
  const double n = static_cast<double>(sorted.size());

  double best_x = 0.0;
  double best = (0.0 - value) * static_cast<double>(samples.count_at_most(0.0)) / n;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = sorted[i];
    if (x > xbar) break;
    if (i + 1 < sorted.size() && sorted[i + 1] == x) continue;  // evaluate once per value
    const double cost = (x - value) * static_cast<double>(i + 1) / n;
    if (cost < best - 1e-12) {
      best = cost;
      best_x = x;
    }
  }
  return best_x;
}

double empirical_cost(const SampleWindow& samples, const InnerLoss& loss, double x) {
  require_nonempty(samples);
  double total = 0.0;
  for (double d : samples.values()) total += loss_eval(loss, x, d);
  return total / static_cast<double>(samples.size());
}

OracleResult QuantileOracle::solve(const SampleWindow& samples, const InnerLoss& loss,
                                   double xbar, double) const {
  require_support(*this, loss);
  return {std::clamp(quantile_oracle(samples, loss.h(), loss.b()), 0.0, xbar), 0.0};
}

OracleResult MeanOracle::solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                               double) const {
  require_support(*this, loss);
  return {mean_oracle(samples, xbar), 0.0};
}

OracleResult BreakpointOracle::solve(const SampleWindow& samples, const InnerLoss& loss,
                                     double xbar, double) const {
  require_support(*this, loss);
  return {breakpoint_oracle(samples, loss.value(), xbar), 0.0};
}

OracleResult OgdOracle::solve(const SampleWindow& samples, const InnerLoss& loss, double xbar,
                              double target_accuracy) const {
  require_support(*this, loss);
  require_nonempty(samples);

  std::size_t steps = max_steps_;
  if (target_accuracy > 0.0 && std::isfinite(target_accuracy)) {
    const double wanted = std::ceil(1.0 / (target_accuracy * target_accuracy));
    steps = wanted >= static_cast<double>(max_steps_) ? max_steps_
                                                      : static_cast<std::size_t>(wanted);
  }
  steps = std::clamp(steps, min_steps_, max_steps_);

  const double n = static_cast<double>(samples.size());
  const auto values = samples.values();
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

  double x = 0.5 * xbar;
  double sum = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    double grad = 0.0;
    if (loss.kind() == LossKind::LinearNewsvendor) {
      grad = ghat(samples, x, loss.h(), loss.b());
    } else {
      grad = 2.0 * loss.curvature() * (x - mean);
    }
    sum += x;
    x = std::clamp(x - xbar / std::sqrt(static_cast<double>(k)) * grad, 0.0, xbar);
  }
  return {sum / static_cast<double>(steps), std::numeric_limits<double>::quiet_NaN()};
}

std::unique_ptr<OptimizationOracle> make_oracle(const std::string& name) {
  if (name == "quantile") return std::make_unique<QuantileOracle>();
  if (name == "mean") return std::make_unique<MeanOracle>();
  if (name == "breakpoint") return std::make_unique<BreakpointOracle>();
  if (name == "ogd") return std::make_unique<OgdOracle>();
  throw InvalidArgument("unknown oracle '" + name + "'");
}

}  // namespace nsopt
