#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsopt/loss.hpp"
#include "nsopt/rng.hpp"

namespace nsopt {

enum class ModelKind { PiecewiseDensity, Discrete };

// A bounded demand distribution supported on [0, xbar].
//
// Piecewise densities carry n+1 breakpoints and n density levels, level i
// holding on [breakpoints[i], breakpoints[i+1]). Discrete models carry one
// point mass per breakpoint. Models are canonicalized on construction
// (zero-mass edge pieces dropped, equal neighbouring levels merged) so that
// structural equality coincides with equality in distribution.
class DemandModel {
 public:
  static DemandModel piecewise(std::vector<double> breakpoints, std::vector<double> densities,
                               double xbar);
  static DemandModel discrete(std::vector<double> atoms, std::vector<double> masses, double xbar);

  static DemandModel uniform(double lo, double hi, double xbar);
  static DemandModel point_mass(double at, double xbar);

  ModelKind kind() const noexcept { return kind_; }
  bool is_discrete() const noexcept { return kind_ == ModelKind::Discrete; }
  double xbar() const noexcept { return xbar_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // Right-continuous CDF; 0 below the support, 1 from the top of the support.
  double cdf(double y) const;

  // Smallest x with cdf(x) >= p. quantile(0) is the bottom of the support.
  double quantile(double p) const;

  // Inverse-CDF transform of one uniform variate.
  double sample(Rng& rng) const;

  double mean() const noexcept { return mean_; }
  double variance() const noexcept;

  // Integral of the CDF over [0, x].
  double cdf_integral(double x) const;

  // Density level at y (piecewise models only; 0 outside the support).
  double density(double y) const;

  bool operator==(const DemandModel& other) const;

 private:
  DemandModel() = default;
  void finalize();

  ModelKind kind_ = ModelKind::PiecewiseDensity;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double xbar_ = 0.0;

  // Mass strictly below breakpoints_[i] (piecewise) or at/below atom i (discrete).
  std::vector<double> mass_;
  // Integral of the CDF up to breakpoints_[i] (piecewise) or the partial first
  // moment sum_{j <= i} m_j a_j (discrete).
  std::vector<double> aux_;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
};

// Exact f(x) = E[F(x, D)] by piecewise integration.
double expected_cost(const DemandModel& model, const InnerLoss& loss, double x);

// Smallest minimizer of expected_cost over [0, xbar].
double optimal_decision(const DemandModel& model, const InnerLoss& loss);

// Total variation with the factor 1/2: sup_A |P(A) - Q(A)|.
double tv_distance(const DemandModel& a, const DemandModel& b);

class DemandSequence {
 public:
  explicit DemandSequence(std::vector<DemandModel> models);

  std::size_t horizon() const noexcept { return models_.size(); }
  double xbar() const noexcept { return models_.front().xbar(); }
  // Zero-based: period t lives at index t - 1.
  const DemandModel& at(std::size_t index) const { return models_.at(index); }
  const DemandModel& period(std::size_t t) const { return models_.at(t - 1); }
  std::span<const DemandModel> models() const noexcept { return models_; }
  bool any_discrete() const noexcept;

 private:
  std::vector<DemandModel> models_;
};

struct BudgetReport {
  std::size_t switches = 0;
  double variation = 0.0;
};

BudgetReport sequence_budgets(const DemandSequence& seq);

enum class InstanceFamily { Switch, Drift, SeparatedSwitch, SeparatedDrift };

std::string to_string(InstanceFamily family);
InstanceFamily parse_instance_family(const std::string& text);

// Two-hump pair on [0, 4]: mass 1/2 +- eps on [0, 1) and 1/2 -+ eps on [3, 4).
DemandModel wide_gap_model(double eps, bool first);
// Separated pair on [0, 2]: density 1/2 +- eps on [0, 1) and 1/2 -+ eps on [1, 2).
DemandModel separated_model(double eps, bool first);

struct InstanceOptions {
  // Replace an eps >= 1/4 by kClampedEpsilon instead of failing.
  bool allow_clamp = true;
  // Overrides the budget-derived eps (required shape: 0 < eps).
  std::optional<double> epsilon;
};

inline constexpr double kClampedEpsilon = 0.249;
inline constexpr double kSeparatedSwitchEpsilon = 0.1;

struct HardInstance {
  DemandSequence sequence;
  InstanceFamily family;
  std::size_t batch_length;
  double epsilon;
  bool clamped;
  // One entry per batch; true when the batch plays the first model of the pair.
  std::vector<bool> batch_first;
};

// Batches of constant demand; a fair coin per batch picks one model of the pair.
//   switch:           batch = ceil(T/S),        eps = 1/sqrt(batch)
//   drift:            batch = ceil((T/V)^2/3),  eps = 1/(4 sqrt(batch))
//   separated-switch: batch = ceil(T/S),        eps = 0.1
//   separated-drift:  batch = ceil((T/V)^2/3),  eps = 1/(4 sqrt(batch))
HardInstance make_hard_instance(InstanceFamily family, std::size_t horizon, double budget,
                                Rng& rng, const InstanceOptions& options = {});

}  // namespace nsopt
