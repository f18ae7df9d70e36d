#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsopt/detection.hpp"
#include "nsopt/empirical.hpp"
#include "nsopt/loss.hpp"
#include "nsopt/oracles.hpp"
#include "nsopt/rng.hpp"

namespace nsopt {

enum class Channel { Full, Censored };

std::string to_string(Channel channel);

struct Observation {
  enum class Kind { Full, Censored };

  Kind kind = Kind::Full;
  double value = 0.0;  // demand (full) or sale (censored)
  // Censored only: whether a strict stockout happened when the sale equals the order.
  std::optional<bool> lost_sale;

  static Observation full(double demand) { return {Kind::Full, demand, std::nullopt}; }
  static Observation censored(double sale, std::optional<bool> lost_sale = std::nullopt) {
    return {Kind::Censored, sale, lost_sale};
  }
};

// An online policy driven period by period: decide(t), then observe(t, ...),
// for t = 1, 2, ... in order.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string id() const = 0;
  virtual Channel channel() const = 0;
  virtual const InnerLoss& loss() const = 0;

  virtual double decide(std::size_t t) = 0;
  // Returns true when the observation closes the current epoch (the next
  // period opens a new one).
  virtual bool observe(std::size_t t, const Observation& obs) = 0;

  // Epoch index (from 1) that the most recent decision belongs to.
  virtual std::size_t epoch() const = 0;
};

struct CostParams {
  double h = 1.0;
  double b = 7.0 / 3.0;
  double a = 1.0;  // quadratic curvature
  double v = 0.5;  // auction private value

  InnerLoss make(LossKind kind) const;
};

struct PolicyContext {
  std::size_t horizon = 1;
  double xbar = 1.0;
  CostParams costs;
  double delta = 0.1;
  CandidateGrid grid = CandidateGrid::Geometric;
  double kappa = 1.0;
  std::uint64_t seed = 0;
  // Censored policy: demand is atomic, so sale == order needs a lost-sale flag.
  bool discrete_demand = false;

  void validate() const;
};

// Uncensored nonstationary SAA with adaptive restarts. The first period of
// each epoch plays a uniform draw on [0, xbar]; later periods play the
// empirical b/(h+b)-quantile of the epoch so far. After each observation the
// restart test runs on the epoch window.
class NsaaPolicy final : public Policy {
 public:
  explicit NsaaPolicy(const PolicyContext& ctx);

  std::string id() const override { return "nsaa"; }
  Channel channel() const override { return Channel::Full; }
  const InnerLoss& loss() const override { return loss_; }
  double decide(std::size_t t) override;
  bool observe(std::size_t t, const Observation& obs) override;
  std::size_t epoch() const override { return epoch_; }

  std::size_t epoch_start() const noexcept { return samples_.start(); }
  const SampleWindow& samples() const noexcept { return samples_; }

 private:
  InnerLoss loss_;
  DetectionConfig detection_;
  double xbar_;
  Rng rng_;
  SampleWindow samples_;
  std::size_t epoch_ = 1;
};

// Uniform grid of `intervals + 1` order levels on [0, xbar].
struct DecisionGrid {
  double xbar;
  std::size_t intervals;

  double level(std::size_t i) const {
    return i == intervals ? xbar
                          : xbar * static_cast<double>(i) / static_cast<double>(intervals);
  }
};

// Largest grid index i <= upper with ghat(level(i)) <= threshold, or nullopt
// when none survives. ghat is nondecreasing, so the survivors form a prefix.
std::optional<std::size_t> eliminate_binary(const SampleWindow& samples, const DecisionGrid& grid,
                                            std::size_t upper, double h, double b,
                                            double threshold);
// Same result by scanning every level; reference for the binary search.
std::optional<std::size_t> eliminate_scan(const SampleWindow& samples, const DecisionGrid& grid,
                                          std::size_t upper, double h, double b,
                                          double threshold);

// Value stored in the epoch window for a censored observation taken at order
// level `decision`. A sale below the order is the demand itself. A sale at the
// order is recorded as +inf (demand above every surviving level) unless the
// demand is atomic and the lost-sale flag says the demand was exactly met.
double reconstruct_censored(double decision, const Observation& obs, bool discrete_demand);

// Censored nonstationary SAA-based elimination with adaptive restarts. The
// active set is a prefix [0, u] of the decision grid; the policy orders u,
// simulates the full-information ECDF below u from sales, eliminates levels
// whose gradient proxy exceeds 2 (h + b) r(t - l + 1), and restarts when the
// set empties or the restart test on [0, x_t] fires.
class CensoredNsaaPolicy final : public Policy {
 public:
  explicit CensoredNsaaPolicy(const PolicyContext& ctx);

  std::string id() const override { return "nsaa-censored"; }
  Channel channel() const override { return Channel::Censored; }
  const InnerLoss& loss() const override { return loss_; }
  double decide(std::size_t t) override;
  bool observe(std::size_t t, const Observation& obs) override;
  std::size_t epoch() const override { return epoch_; }

  std::size_t epoch_start() const noexcept { return samples_.start(); }
  std::size_t active_upper() const noexcept { return upper_; }
  const DecisionGrid& grid() const noexcept { return grid_; }
  const SampleWindow& samples() const noexcept { return samples_; }
  double last_threshold() const noexcept { return last_threshold_; }
  bool last_emptied() const noexcept { return last_emptied_; }

 private:
  InnerLoss loss_;
  DetectionConfig detection_;
  DecisionGrid grid_;
  bool discrete_;
  SampleWindow samples_;
  std::size_t upper_;
  std::size_t epoch_ = 1;
  double last_decision_ = 0.0;
  double last_threshold_ = 0.0;
  bool last_emptied_ = false;
};

// Accuracy requested from the oracle at period t.
using AccuracySchedule = std::function<double(std::size_t)>;

// c / sqrt(t).
AccuracySchedule inverse_sqrt_schedule(double scale = 1.0);

// Restarting SAA for an arbitrary inner loss, with the empirical problem
// handed to a pluggable optimization oracle.
class GeneralNsaaPolicy final : public Policy {
 public:
  GeneralNsaaPolicy(const PolicyContext& ctx, InnerLoss loss,
                    std::unique_ptr<OptimizationOracle> oracle,
                    AccuracySchedule schedule = inverse_sqrt_schedule());

  std::string id() const override;
  Channel channel() const override { return Channel::Full; }
  const InnerLoss& loss() const override { return loss_; }
  double decide(std::size_t t) override;
  bool observe(std::size_t t, const Observation& obs) override;
  std::size_t epoch() const override { return epoch_; }

  std::size_t epoch_start() const noexcept { return samples_.start(); }

  struct AccuracyRecord {
    std::size_t t;
    double requested;
    double achieved;
  };
  const std::vector<AccuracyRecord>& accuracy_log() const noexcept { return accuracy_; }

 private:
  InnerLoss loss_;
  std::unique_ptr<OptimizationOracle> oracle_;
  AccuracySchedule schedule_;
  DetectionConfig detection_;
  double xbar_;
  Rng rng_;
  SampleWindow samples_;
  std::size_t epoch_ = 1;
  std::vector<AccuracyRecord> accuracy_;
};

enum class BaselineKind { Saa, Msaa, Rsaa };

// Window length ceil(kappa sqrt(T)) shared by the moving-window and
// periodically restarted baselines.
std::size_t baseline_window(double kappa, std::size_t horizon);

// Non-detecting SAA baselines. Period 1 (no data) plays 0.
//   saa:  all history
//   msaa: the latest n observations
//   rsaa: the window restarts every n periods; at period t it covers
//         [max(1, n floor((t-1)/n)), t-1], so period n+1 sees one sample.
class BaselinePolicy final : public Policy {
 public:
  BaselinePolicy(BaselineKind kind, const PolicyContext& ctx);

  std::string id() const override;
  Channel channel() const override { return Channel::Full; }
  const InnerLoss& loss() const override { return loss_; }
  double decide(std::size_t t) override;
  bool observe(std::size_t t, const Observation& obs) override;
  std::size_t epoch() const override { return epoch_; }

  std::size_t window_length() const noexcept { return window_; }
  // Number of samples the most recent decision was computed from.
  std::size_t last_sample_count() const noexcept { return last_count_; }

 private:
  BaselineKind kind_;
  InnerLoss loss_;
  double xbar_;
  std::size_t window_;
  std::vector<double> history_;
  SampleWindow all_;
  std::size_t epoch_ = 1;
  std::size_t last_count_ = 0;
};

// Plays a fixed per-period decision sequence (for example the clairvoyant optimum).
class ScriptedPolicy final : public Policy {
 public:
  ScriptedPolicy(std::string id, InnerLoss loss, std::vector<double> decisions,
                 Channel channel = Channel::Full);

  std::string id() const override { return id_; }
  Channel channel() const override { return channel_; }
  const InnerLoss& loss() const override { return loss_; }
  double decide(std::size_t t) override { return decisions_.at(t - 1); }
  bool observe(std::size_t, const Observation&) override { return false; }
  std::size_t epoch() const override { return 1; }

 private:
  std::string id_;
  InnerLoss loss_;
  std::vector<double> decisions_;
  Channel channel_;
};

enum class PolicyKind { Nsaa, NsaaCensored, Saa, Msaa, Rsaa, General };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Nsaa;
  LossKind loss = LossKind::LinearNewsvendor;
  std::string oracle;  // general only
  std::string text;

  Channel channel() const {
    return kind == PolicyKind::NsaaCensored ? Channel::Censored : Channel::Full;
  }
};

// "nsaa", "nsaa-censored", "saa", "msaa", "rsaa" or "general:<loss>:<oracle>"
// with loss in {linear, quadratic, auction} and oracle in
// {quantile, mean, breakpoint, ogd}.
PolicySpec parse_policy_spec(const std::string& text);

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const PolicyContext& ctx);

}  // namespace nsopt
