#include "nsopt/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsopt/error.hpp"

namespace nsopt {
namespace {

void expect_next(const SampleWindow& samples, std::size_t t) {
  if (t != samples.start() + samples.size()) {
    throw InvalidArgument("observation for period " + std::to_string(t) +
                          " arrived out of order");
  }
}

void require_full(const Observation& obs) {
  if (obs.kind != Observation::Kind::Full) {
    throw InvalidArgument("policy needs full demand observations; got a censored sale");
  }
}

DetectionConfig detection_for(const PolicyContext& ctx, CapMode cap) {
  DetectionConfig cfg;
  cfg.delta = ctx.delta;
  cfg.horizon = ctx.horizon;
  cfg.grid = ctx.grid;
  cfg.cap = cap;
  cfg.validate();
  return cfg;
}

}  // namespace

std::string to_string(Channel channel) {
  return channel == Channel::Full ? "full" : "censored";
}

InnerLoss CostParams::make(LossKind kind) const {
  switch (kind) {
    case LossKind::LinearNewsvendor:
      return InnerLoss::linear(h, b);
    case LossKind::Quadratic:
      return InnerLoss::quadratic(a);
    case LossKind::Auction:
      return InnerLoss::auction(v);
  }
  throw InvalidArgument("unknown loss kind");
}

void PolicyContext::validate() const {
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (!(xbar > 0.0) || !std::isfinite(xbar)) throw InvalidArgument("xbar must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
}

// ---------------------------------------------------------------------------

NsaaPolicy::NsaaPolicy(const PolicyContext& ctx)
    : loss_(ctx.costs.make(LossKind::LinearNewsvendor)),
      detection_(detection_for(ctx, CapMode::Unrestricted)),
      xbar_(ctx.xbar),
      rng_(ctx.seed),
      samples_(1) {
  ctx.validate();
}

double NsaaPolicy::decide(std::size_t) {
  if (samples_.empty()) return rng_.uniform(0.0, xbar_);
  return std::clamp(quantile_oracle(samples_, loss_.h(), loss_.b()), 0.0, xbar_);
}

bool NsaaPolicy::observe(std::size_t t, const Observation& obs) {
  require_full(obs);
  expect_next(samples_, t);
  samples_.append(obs.value);
  if (samples_.size() < 2 || !detect(samples_, detection_)) return false;
  ++epoch_;
  samples_.reset(t + 1);
  return true;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> eliminate_binary(const SampleWindow& samples, const DecisionGrid& grid,
                                            std::size_t upper, double h, double b,
                                            double threshold) {
  if (ghat(samples, grid.level(0), h, b) > threshold) return std::nullopt;
  std::size_t lo = 0;  // survives
  std::size_t hi = upper;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (ghat(samples, grid.level(mid), h, b) <= threshold) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::optional<std::size_t> eliminate_scan(const SampleWindow& samples, const DecisionGrid& grid,
                                          std::size_t upper, double h, double b,
                                          double threshold) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i <= upper; ++i) {
    if (ghat(samples, grid.level(i), h, b) <= threshold) best = i;
  }
  return best;
}

double reconstruct_censored(double decision, const Observation& obs, bool discrete_demand) {
  if (obs.kind != Observation::Kind::Censored) {
    throw InvalidArgument("censored policy received a full demand observation");
  }
  if (!(obs.value >= 0.0) || obs.value > decision * (1.0 + 1e-12) + 1e-12) {
    throw InvalidArgument("censored sale must lie in [0, decision]");
  }
  if (obs.value < decision) return obs.value;
  if (!discrete_demand) return std::numeric_limits<double>::infinity();
  if (!obs.lost_sale) {
    throw InvalidArgument("sale equals the order under atomic demand but no lost-sale flag given");
  }
  return *obs.lost_sale ? std::numeric_limits<double>::infinity() : decision;
}

CensoredNsaaPolicy::CensoredNsaaPolicy(const PolicyContext& ctx)
    : loss_(ctx.costs.make(LossKind::LinearNewsvendor)),
      detection_(detection_for(ctx, CapMode::Capped)),
      grid_{ctx.xbar, ctx.horizon},
      discrete_(ctx.discrete_demand),
      samples_(1),
      upper_(ctx.horizon) {
  ctx.validate();
}

double CensoredNsaaPolicy::decide(std::size_t) {
  last_decision_ = grid_.level(upper_);
  return last_decision_;
}

bool CensoredNsaaPolicy::observe(std::size_t t, const Observation& obs) {
  expect_next(samples_, t);
  samples_.append(reconstruct_censored(last_decision_, obs, discrete_));

  const double h = loss_.h();
  const double b = loss_.b();
  last_threshold_ =
      2.0 * (h + b) * dkw_radius(samples_.size(), detection_.horizon, detection_.delta);
  const auto survivor = eliminate_binary(samples_, grid_, upper_, h, b, last_threshold_);
  last_emptied_ = !survivor.has_value();

  const bool fired =
      samples_.size() >= 2 && detect(samples_, detection_, last_decision_).has_value();
  if (last_emptied_ || fired) {
    ++epoch_;
    samples_.reset(t + 1);
    upper_ = grid_.intervals;
    return true;
  }
  upper_ = *survivor;
  return false;
}

// ---------------------------------------------------------------------------

AccuracySchedule inverse_sqrt_schedule(double scale) {
  return [scale](std::size_t t) { return scale / std::sqrt(static_cast<double>(t)); };
}

GeneralNsaaPolicy::GeneralNsaaPolicy(const PolicyContext& ctx, InnerLoss loss,
                                     std::unique_ptr<OptimizationOracle> oracle,
                                     AccuracySchedule schedule)
    : loss_(loss),
      oracle_(std::move(oracle)),
      schedule_(std::move(schedule)),
      detection_(detection_for(ctx, CapMode::Unrestricted)),
      xbar_(ctx.xbar),
      rng_(ctx.seed),
      samples_(1) {
  ctx.validate();
  if (!oracle_) throw InvalidArgument("general policy needs an oracle");
  if (!oracle_->supports(loss_.kind())) {
    throw InvalidArgument("oracle '" + oracle_->name() + "' cannot optimize " + loss_.describe());
  }
  if (!schedule_) throw InvalidArgument("general policy needs an accuracy schedule");
}

std::string GeneralNsaaPolicy::id() const {
  std::string loss;
  switch (loss_.kind()) {
    case LossKind::LinearNewsvendor:
      loss = "linear";
      break;
    case LossKind::Quadratic:
      loss = "quadratic";
      break;
    case LossKind::Auction:
      loss = "auction";
      break;
  }
  return "general:" + loss + ":" + oracle_->name();
}

double GeneralNsaaPolicy::decide(std::size_t t) {
  if (samples_.empty()) return rng_.uniform(0.0, xbar_);
  const double requested = schedule_(t);
  OracleResult result;
  try {
    result = oracle_->solve(samples_, loss_, xbar_, requested);
  } catch (const PolicyError&) {
    throw;
  } catch (const std::exception& e) {
    throw PolicyError("oracle '" + oracle_->name() + "' failed at period " + std::to_string(t) +
                      ": " + e.what());
  }
  if (!std::isfinite(result.decision)) {
    throw PolicyError("oracle '" + oracle_->name() + "' returned a non-finite decision");
  }
  accuracy_.push_back({t, requested, result.achieved_accuracy});
  return std::clamp(result.decision, 0.0, xbar_);
}

bool GeneralNsaaPolicy::observe(std::size_t t, const Observation& obs) {
  require_full(obs);
  expect_next(samples_, t);
  samples_.append(obs.value);
  if (samples_.size() < 2 || !detect(samples_, detection_)) return false;
  ++epoch_;
  samples_.reset(t + 1);
  return true;
}

// ---------------------------------------------------------------------------

std::size_t baseline_window(double kappa, std::size_t horizon) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double n = std::ceil(kappa * std::sqrt(static_cast<double>(horizon)) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

BaselinePolicy::BaselinePolicy(BaselineKind kind, const PolicyContext& ctx)
    : kind_(kind),
      loss_(ctx.costs.make(LossKind::LinearNewsvendor)),
      xbar_(ctx.xbar),
      window_(baseline_window(ctx.kappa, ctx.horizon)),
      all_(1) {
  ctx.validate();
}

std::string BaselinePolicy::id() const {
  switch (kind_) {
    case BaselineKind::Saa:
      return "saa";
    case BaselineKind::Msaa:
      return "msaa";
    case BaselineKind::Rsaa:
      return "rsaa";
  }
  return "?";
}

double BaselinePolicy::decide(std::size_t t) {
  if (t != history_.size() + 1) {
    throw InvalidArgument("baseline decisions must be requested in period order");
  }
  if (kind_ == BaselineKind::Rsaa) epoch_ = 1 + (t - 1) / window_;
  if (t == 1) {
    last_count_ = 0;
    return 0.0;
  }
  double decision = 0.0;
  if (kind_ == BaselineKind::Saa) {
    last_count_ = all_.size();
    decision = quantile_oracle(all_, loss_.h(), loss_.b());
  } else {
    std::size_t from = 1;  // first period label in the window
    if (kind_ == BaselineKind::Msaa) {
      from = t > window_ ? t - window_ : 1;
    } else {
      from = std::max<std::size_t>(1, window_ * ((t - 1) / window_));
    }
    const std::span<const double> slice(history_.data() + (from - 1), t - from);
    last_count_ = slice.size();
    decision = quantile_oracle(SampleWindow::from_values(slice, from), loss_.h(), loss_.b());
  }
  return std::clamp(decision, 0.0, xbar_);
}

bool BaselinePolicy::observe(std::size_t t, const Observation& obs) {
  require_full(obs);
  if (t != history_.size() + 1) {
    throw InvalidArgument("observation for period " + std::to_string(t) +
                          " arrived out of order");
  }
  history_.push_back(obs.value);
  if (kind_ == BaselineKind::Saa) all_.append(obs.value);
  return kind_ == BaselineKind::Rsaa && t % window_ == 0;
}

// ---------------------------------------------------------------------------

ScriptedPolicy::ScriptedPolicy(std::string id, InnerLoss loss, std::vector<double> decisions,
                               Channel channel)
    : id_(std::move(id)), loss_(loss), decisions_(std::move(decisions)), channel_(channel) {}

PolicySpec parse_policy_spec(const std::string& text) {
  PolicySpec spec;
  spec.text = text;
  if (text == "nsaa") {
    spec.kind = PolicyKind::Nsaa;
  } else if (text == "nsaa-censored") {
    spec.kind = PolicyKind::NsaaCensored;
  } else if (text == "saa") {
    spec.kind = PolicyKind::Saa;
  } else if (text == "msaa") {
    spec.kind = PolicyKind::Msaa;
  } else if (text == "rsaa") {
    spec.kind = PolicyKind::Rsaa;
  } else if (text.rfind("general:", 0) == 0) {
    const auto rest = text.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw InvalidArgument("general policy must read general:<loss>:<oracle>, got '" + text +
                            "'");
    }
    const auto loss = rest.substr(0, colon);
    spec.kind = PolicyKind::General;
    spec.oracle = rest.substr(colon + 1);
    if (loss == "linear") {
      spec.loss = LossKind::LinearNewsvendor;
    } else if (loss == "quadratic") {
      spec.loss = LossKind::Quadratic;
    } else if (loss == "auction") {
      spec.loss = LossKind::Auction;
    } else {
      throw InvalidArgument("unknown loss '" + loss + "' in policy '" + text + "'");
    }
    // Validates the oracle name.
    (void)make_oracle(spec.oracle);
  } else {
    throw InvalidArgument("unknown policy '" + text + "'");
  }
  return spec;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const PolicyContext& ctx) {
  switch (spec.kind) {
    case PolicyKind::Nsaa:
      return std::make_unique<NsaaPolicy>(ctx);
    case PolicyKind::NsaaCensored:
      return std::make_unique<CensoredNsaaPolicy>(ctx);
    case PolicyKind::Saa:
      return std::make_unique<BaselinePolicy>(BaselineKind::Saa, ctx);
    case PolicyKind::Msaa:
      return std::make_unique<BaselinePolicy>(BaselineKind::Msaa, ctx);
    case PolicyKind::Rsaa:
      return std::make_unique<BaselinePolicy>(BaselineKind::Rsaa, ctx);
    case PolicyKind::General:
      return std::make_unique<GeneralNsaaPolicy>(ctx, ctx.costs.make(spec.loss),
                                                 make_oracle(spec.oracle));
  }
  throw InvalidArgument("unknown policy kind");
}

}  // namespace nsopt
