#include "nsopt/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsopt/error.hpp"

namespace nsopt {
namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kEqualityTolerance = 1e-12;

void check_grid(const std::vector<double>& points, double xbar) {
  if (!(xbar > 0.0) || !std::isfinite(xbar)) {
    throw InvalidArgument("xbar must be positive and finite");
  }
  if (points.empty()) {
    throw InvalidArgument("a demand model needs at least one breakpoint");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      throw InvalidArgument("breakpoints must be finite");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw InvalidArgument("breakpoints must be strictly ascending");
    }
  }
  if (points.front() < 0.0 || points.back() > xbar) {
    throw InvalidArgument("breakpoints must lie in [0, xbar]");
  }
}

void check_nonnegative(const std::vector<double>& values) {
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("densities and point masses must be finite and nonnegative");
    }
  }
}

bool near(double a, double b) { return std::abs(a - b) <= kEqualityTolerance; }

// Ceiling that ignores floating-point dust just above an integer.
std::size_t robust_ceil(double x) {
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

}  // namespace

DemandModel DemandModel::piecewise(std::vector<double> breakpoints,
                                   std::vector<double> densities, double xbar) {
  check_grid(breakpoints, xbar);
  if (breakpoints.size() != densities.size() + 1 || densities.empty()) {
    throw InvalidArgument("piecewise density needs exactly one more breakpoint than levels");
  }
  check_nonnegative(densities);

  double total = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    total += densities[i] * (breakpoints[i + 1] - breakpoints[i]);
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidArgument("piecewise density must integrate to 1");
  }

  // Canonical form: no zero-density pieces at either end, no equal neighbours.
  std::size_t first = 0;
  std::size_t last = densities.size();
  while (first < last && densities[first] == 0.0) ++first;
  while (last > first && densities[last - 1] == 0.0) --last;

  DemandModel m;
  m.kind_ = ModelKind::PiecewiseDensity;
  m.xbar_ = xbar;
  m.breakpoints_.push_back(breakpoints[first]);
  for (std::size_t i = first; i < last; ++i) {
    if (!m.values_.empty() && m.values_.back() == densities[i]) {
      m.breakpoints_.back() = breakpoints[i + 1];
    } else {
      m.values_.push_back(densities[i]);
      m.breakpoints_.push_back(breakpoints[i + 1]);
    }
  }
  m.finalize();
  return m;
}

DemandModel DemandModel::discrete(std::vector<double> atoms, std::vector<double> masses,
                                  double xbar) {
  check_grid(atoms, xbar);
  if (atoms.size() != masses.size()) {
    throw InvalidArgument("discrete model needs one mass per atom");
  }
  check_nonnegative(masses);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidArgument("point masses must sum to 1");
  }

  DemandModel m;
  m.kind_ = ModelKind::Discrete;
  m.xbar_ = xbar;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (masses[i] > 0.0) {
      m.breakpoints_.push_back(atoms[i]);
      m.values_.push_back(masses[i]);
    }
  }
  m.finalize();
  return m;
}

DemandModel DemandModel::uniform(double lo, double hi, double xbar) {
  if (!(hi > lo)) {
    throw InvalidArgument("uniform model needs lo < hi");
  }
  return piecewise({lo, hi}, {1.0 / (hi - lo)}, xbar);
}

DemandModel DemandModel::point_mass(double at, double xbar) {
  return discrete({at}, {1.0}, xbar);
}

void DemandModel::finalize() {
  const std::size_t n = breakpoints_.size();
  mass_.assign(n, 0.0);
  aux_.assign(n, 0.0);
  mean_ = 0.0;
  second_moment_ = 0.0;

  if (kind_ == ModelKind::PiecewiseDensity) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double lo = breakpoints_[i];
      const double hi = breakpoints_[i + 1];
      const double width = hi - lo;
      const double d = values_[i];
      mass_[i + 1] = mass_[i] + d * width;
      aux_[i + 1] = aux_[i] + mass_[i] * width + 0.5 * d * width * width;
      mean_ += d * (hi * hi - lo * lo) / 2.0;
      second_moment_ += d * (hi * hi * hi - lo * lo * lo) / 3.0;
    }
    mass_.back() = 1.0;
  } else {
    double cum = 0.0;
    double first_moment = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cum += values_[i];
      first_moment += values_[i] * breakpoints_[i];
      mass_[i] = cum;
      aux_[i] = first_moment;
      second_moment_ += values_[i] * breakpoints_[i] * breakpoints_[i];
    }
    mass_.back() = 1.0;
    mean_ = first_moment;
  }
}

double DemandModel::cdf(double y) const {
  if (y < breakpoints_.front()) return 0.0;
  if (y >= breakpoints_.back()) return 1.0;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  if (kind_ == ModelKind::Discrete) return mass_[i];
  return std::min(1.0, mass_[i] + values_[i] * (y - breakpoints_[i]));
}

double DemandModel::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("quantile level must lie in [0, 1]");
  }
  if (kind_ == ModelKind::Discrete) {
    const auto it = std::lower_bound(mass_.begin(), mass_.end(), p);
    return breakpoints_[static_cast<std::size_t>(it - mass_.begin())];
  }
  if (p == 0.0) return breakpoints_.front();
  // First breakpoint whose cumulative mass reaches p; the piece before it has
  // positive density because its left mass is still below p.
  const auto it = std::lower_bound(mass_.begin() + 1, mass_.end(), p);
  const auto j = static_cast<std::size_t>(it - mass_.begin());
  const std::size_t i = j - 1;
  const double x = breakpoints_[i] + (p - mass_[i]) / values_[i];
  return std::clamp(x, breakpoints_[i], breakpoints_[j]);
}

double DemandModel::sample(Rng& rng) const { return quantile(rng.uniform()); }

double DemandModel::variance() const noexcept {
  return std::max(0.0, second_moment_ - mean_ * mean_);
}

double DemandModel::cdf_integral(double x) const {
  if (x <= breakpoints_.front()) return 0.0;
  if (kind_ == ModelKind::Discrete) {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return mass_[i] * x - aux_[i];
  }
  if (x >= breakpoints_.back()) {
    return aux_.back() + (x - breakpoints_.back());
  }
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  const double dx = x - breakpoints_[i];
  return aux_[i] + mass_[i] * dx + 0.5 * values_[i] * dx * dx;
}

double DemandModel::density(double y) const {
  if (kind_ == ModelKind::Discrete) {
    throw UnsupportedOperation("discrete models have no density");
  }
  if (y < breakpoints_.front() || y >= breakpoints_.back()) return 0.0;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

bool DemandModel::operator==(const DemandModel& other) const {
  if (kind_ != other.kind_ || !near(xbar_, other.xbar_) ||
      breakpoints_.size() != other.breakpoints_.size() ||
      values_.size() != other.values_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!near(breakpoints_[i], other.breakpoints_[i])) return false;
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!near(values_[i], other.values_[i])) return false;
  }
  return true;
}

double expected_cost(const DemandModel& model, const InnerLoss& loss, double x) {
  if (!(x >= 0.0 && x <= model.xbar())) {
    throw InvalidArgument("decision outside [0, xbar]");
  }
  switch (loss.kind()) {
    case LossKind::LinearNewsvendor: {
      // h E(x-D)^+ + b E(D-x)^+ with E(x-D)^+ = int_0^x G and
      // E(D-x)^+ = E[D] - x + E(x-D)^+.
      const double overage = model.cdf_integral(x);
      return (loss.h() + loss.b()) * overage - loss.b() * (x - model.mean());
    }
    case LossKind::Quadratic: {
      const double shift = x - model.mean();
      return loss.curvature() * (shift * shift + model.variance());
    }
    case LossKind::Auction:
      return (x - loss.value()) * model.cdf(x);
  }
  return 0.0;
}

double optimal_decision(const DemandModel& model, const InnerLoss& loss) {
  switch (loss.kind()) {
    case LossKind::LinearNewsvendor:
      return model.quantile(loss.critical_ratio());
    case LossKind::Quadratic:
      return std::clamp(model.mean(), 0.0, model.xbar());
    case LossKind::Auction:
      break;
  }

  // (x - v) G(x): between breakpoints of a piecewise model this is a convex
  // quadratic; for a discrete model it increases between atoms. Candidates are
  // 0, every breakpoint, and each clipped stationary point.
  const double v = loss.value();
  const double xbar = model.xbar();
  std::vector<double> candidates{0.0};
  const auto& bp = model.breakpoints();
  for (double p : bp) {
    if (p <= xbar) candidates.push_back(p);
  }
  if (!model.is_discrete()) {
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double d = model.values()[i];
      if (d <= 0.0) continue;
      const double g0 = model.cdf(bp[i]);
      const double stationary = 0.5 * (bp[i] + v) - g0 / (2.0 * d);
      candidates.push_back(std::clamp(stationary, bp[i], bp[i + 1]));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  double best_x = candidates.front();
  double best = expected_cost(model, loss, best_x);
  for (double c : candidates) {
    const double value = expected_cost(model, loss, std::clamp(c, 0.0, xbar));
    if (value < best - 1e-15) {
      best = value;
      best_x = c;
    }
  }
  return best_x;
}

double tv_distance(const DemandModel& a, const DemandModel& b) {
  if (!near(a.xbar(), b.xbar())) {
    throw InvalidArgument("total variation requires models on the same support [0, xbar]");
  }
  if (a.kind() != b.kind()) {
    // An absolutely continuous law and a purely atomic law are mutually singular.
    return 1.0;
  }

  double l1 = 0.0;
  if (a.is_discrete()) {
    const auto& pa = a.breakpoints();
    const auto& pb = b.breakpoints();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < pa.size() || j < pb.size()) {
      if (j == pb.size() || (i < pa.size() && pa[i] < pb[j])) {
        l1 += a.values()[i++];
      } else if (i == pa.size() || pb[j] < pa[i]) {
        l1 += b.values()[j++];
      } else {
        l1 += std::abs(a.values()[i++] - b.values()[j++]);
      }
    }
  } else {
    std::vector<double> grid = a.breakpoints();
    grid.insert(grid.end(), b.breakpoints().begin(), b.breakpoints().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double mid = 0.5 * (grid[k] + grid[k + 1]);
      l1 += std::abs(a.density(mid) - b.density(mid)) * (grid[k + 1] - grid[k]);
    }
  }
  return std::clamp(0.5 * l1, 0.0, 1.0);
}

DemandSequence::DemandSequence(std::vector<DemandModel> models) : models_(std::move(models)) {
  if (models_.empty()) {
    throw InvalidArgument("a demand sequence needs at least one period");
  }
  for (const auto& m : models_) {
    if (!near(m.xbar(), models_.front().xbar())) {
      throw InvalidArgument("all periods of a demand sequence must share xbar");
    }
  }
}

bool DemandSequence::any_discrete() const noexcept {
  return std::any_of(models_.begin(), models_.end(),
                     [](const DemandModel& m) { return m.is_discrete(); });
}

BudgetReport sequence_budgets(const DemandSequence& seq) {
  BudgetReport report;
  const auto models = seq.models();
  for (std::size_t t = 1; t < models.size(); ++t) {
    if (models[t] == models[t - 1]) continue;
    ++report.switches;
    report.variation += tv_distance(models[t], models[t - 1]);
  }
  return report;
}

std::string to_string(InstanceFamily family) {
  switch (family) {
    case InstanceFamily::Switch:
      return "switch";
    case InstanceFamily::Drift:
      return "drift";
    case InstanceFamily::SeparatedSwitch:
      return "separated-switch";
    case InstanceFamily::SeparatedDrift:
      return "separated-drift";
  }
  return "?";
}

InstanceFamily parse_instance_family(const std::string& text) {
  if (text == "switch") return InstanceFamily::Switch;
  if (text == "drift") return InstanceFamily::Drift;
  if (text == "separated-switch") return InstanceFamily::SeparatedSwitch;
  if (text == "separated-drift") return InstanceFamily::SeparatedDrift;
  throw InvalidArgument("unknown instance family '" + text + "'");
}

DemandModel wide_gap_model(double eps, bool first) {
  const double lo = first ? 0.5 + eps : 0.5 - eps;
  const double hi = first ? 0.5 - eps : 0.5 + eps;
  return DemandModel::piecewise({0.0, 1.0, 3.0, 4.0}, {lo, 0.0, hi}, 4.0);
}

DemandModel separated_model(double eps, bool first) {
  const double lo = first ? 0.5 + eps : 0.5 - eps;
  const double hi = first ? 0.5 - eps : 0.5 + eps;
  return DemandModel::piecewise({0.0, 1.0, 2.0}, {lo, hi}, 2.0);
}

HardInstance make_hard_instance(InstanceFamily family, std::size_t horizon, double budget,
                                Rng& rng, const InstanceOptions& options) {
  if (horizon < 1) {
    throw InvalidArgument("horizon must be at least 1");
  }
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw InvalidArgument("budget must be positive");
  }
  const double T = static_cast<double>(horizon);
  const bool by_switches =
      family == InstanceFamily::Switch || family == InstanceFamily::SeparatedSwitch;

  std::size_t batch = by_switches ? robust_ceil(T / budget)
                                  : robust_ceil(std::pow(T / budget, 2.0 / 3.0));
  batch = std::max<std::size_t>(batch, 1);

  double eps = 0.0;
  switch (family) {
    case InstanceFamily::Switch:
      eps = 1.0 / std::sqrt(static_cast<double>(batch));
      break;
    case InstanceFamily::SeparatedSwitch:
      eps = kSeparatedSwitchEpsilon;
      break;
    case InstanceFamily::Drift:
    case InstanceFamily::SeparatedDrift:
      eps = 1.0 / (4.0 * std::sqrt(static_cast<double>(batch)));
      break;
  }
  if (options.epsilon) eps = *options.epsilon;
  if (!(eps > 0.0)) {
    throw InvalidArgument("instance epsilon must be positive");
  }

  bool clamped = false;
  if (eps >= 0.25) {
    if (!options.allow_clamp) {
      throw InvalidArgument("budget implies epsilon >= 1/4; enable clamping or lower the budget");
    }
    eps = kClampedEpsilon;
    clamped = true;
  }

  const bool wide = family == InstanceFamily::Switch || family == InstanceFamily::Drift;
  const DemandModel first = wide ? wide_gap_model(eps, true) : separated_model(eps, true);
  const DemandModel second = wide ? wide_gap_model(eps, false) : separated_model(eps, false);

  std::vector<DemandModel> models;
  models.reserve(horizon);
  std::vector<bool> choices;
  while (models.size() < horizon) {
    const bool pick_first = rng.coin();
    choices.push_back(pick_first);
    const std::size_t len = std::min(batch, horizon - models.size());
    for (std::size_t k = 0; k < len; ++k) models.push_back(pick_first ? first : second);
  }

  return HardInstance{DemandSequence(std::move(models)), family, batch, eps, clamped,
                      std::move(choices)};
}

}  // namespace nsopt
