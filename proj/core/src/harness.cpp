#include "nsopt/harness.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nsopt/error.hpp"

namespace nsopt {
namespace {

constexpr std::uint64_t kDemandStream = 0;
constexpr std::uint64_t kPolicyStream = 1;

struct PeriodDemand {
  double demand;
  bool atomic;
};

Trace drive(Policy& policy, Channel channel, std::size_t horizon, double xbar,
            const std::function<PeriodDemand(std::size_t)>& demand_at) {
  if (policy.channel() != channel) {
    throw InvalidArgument("policy '" + policy.id() + "' observes the " +
                          to_string(policy.channel()) + " channel, not the " +
                          to_string(channel) + " channel");
  }
  Trace trace;
  trace.policy = policy.id();
  trace.channel = channel;
  trace.records.reserve(horizon);

  const double slack = 1e-9 * std::max(1.0, xbar);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double x = policy.decide(t);
    if (!std::isfinite(x) || x < -slack || x > xbar + slack) {
      throw PolicyError("policy '" + policy.id() + "' produced decision " + std::to_string(x) +
                        " outside [0, xbar] at period " + std::to_string(t));
    }
    const std::size_t epoch = policy.epoch();
    const PeriodDemand d = demand_at(t);

    Observation obs;
    if (channel == Channel::Full) {
      obs = Observation::full(d.demand);
    } else {
      const double sale = std::min(x, d.demand);
      obs = Observation::censored(sale, d.atomic ? std::optional<bool>(d.demand > x)
                                                 : std::nullopt);
    }
    const bool restart = policy.observe(t, obs);
    trace.records.push_back(
        {t, x, obs.value, d.demand, loss_eval(policy.loss(), x, d.demand), epoch, restart});
  }
  return trace;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

double Trace::total_cost() const {
  double total = 0.0;
  for (const auto& r : records) total += r.cost;
  return total;
}

std::size_t Trace::epochs() const {
  return records.empty() ? 0 : records.back().epoch + (records.back().restart ? 1 : 0);
}

PolicyContext make_context(const RunOptions& options, std::size_t horizon, double xbar,
                           std::uint64_t seed, bool discrete_demand) {
  PolicyContext ctx;
  ctx.horizon = horizon;
  ctx.xbar = xbar;
  ctx.costs = options.costs;
  ctx.delta = options.delta;
  ctx.grid = options.grid;
  ctx.kappa = options.kappa;
  ctx.seed = seed;
  ctx.discrete_demand = discrete_demand;
  return ctx;
}

Trace run(const DemandSequence& seq, Policy& policy, Channel channel, std::uint64_t seed) {
  Rng rng(mix_seed(seed, kDemandStream));
  Trace trace = drive(policy, channel, seq.horizon(), seq.xbar(), [&](std::size_t t) {
    const DemandModel& model = seq.period(t);
    return PeriodDemand{model.sample(rng), model.is_discrete()};
  });
  trace.seed = seed;
  trace.source = TraceSource::Synthetic;
  return trace;
}

Trace run(const DemandSequence& seq, const PolicySpec& spec, Channel channel, std::uint64_t seed,
          const RunOptions& options) {
  if (spec.channel() != channel) {
    throw InvalidArgument("policy '" + spec.text + "' is incompatible with the " +
                          to_string(channel) + " channel");
  }
  const auto ctx = make_context(options, seq.horizon(), seq.xbar(),
                                mix_seed(seed, kPolicyStream), seq.any_discrete());
  auto policy = make_policy(spec, ctx);
  return run(seq, *policy, channel, seed);
}

RegretReport dynamic_regret(const Trace& trace, const DemandSequence& seq,
                            const InnerLoss& loss) {
  if (trace.source == TraceSource::Replay) {
    throw InvalidArgument("dataset replays have no ground-truth model; regret is undefined");
  }
  if (trace.records.size() != seq.horizon()) {
    throw InvalidArgument("trace length does not match the demand sequence");
  }
  RegretReport report;
  const std::size_t T = seq.horizon();
  report.optimal.reserve(T);
  report.per_period.reserve(T);
  report.cumulative.reserve(T);

  // Consecutive periods usually share a model; reuse the optimum.
  const DemandModel* last_model = nullptr;
  double x_star = 0.0;
  double f_star = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    const DemandModel& model = seq.at(i);
    if (last_model == nullptr || !(model == *last_model)) {
      x_star = optimal_decision(model, loss);
      f_star = expected_cost(model, loss, x_star);
      last_model = &model;
    }
    const double x = std::clamp(trace.records[i].decision, 0.0, model.xbar());
    const double gap = expected_cost(model, loss, x) - f_star;
    report.optimal.push_back(x_star);
    report.per_period.push_back(gap);
    report.total += gap;
    report.cumulative.push_back(report.total);
  }
  return report;
}

double replay_xbar(std::span<const double> values) {
  const double top = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  return top > 0.0 ? 1.05 * top : 1.0;
}

ReplayResult replay(std::span<const double> values, const PolicySpec& spec, std::uint64_t seed,
                    const RunOptions& options) {
  if (values.empty()) {
    throw InvalidArgument("cannot replay an empty dataset");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("dataset values must be finite and nonnegative");
    }
  }
  if (spec.channel() != Channel::Full) {
    throw InvalidArgument("replay needs a full-observation policy; '" + spec.text +
                          "' is censored");
  }
  const double xbar = replay_xbar(values);
  const auto ctx =
      make_context(options, values.size(), xbar, mix_seed(seed, kPolicyStream), false);
  auto demand_at = [&](std::size_t t) { return PeriodDemand{values[t - 1], false}; };

  auto policy = make_policy(spec, ctx);
  Trace trace = drive(*policy, Channel::Full, values.size(), xbar, demand_at);
  trace.seed = seed;
  trace.source = TraceSource::Replay;

  CostReport cost;
  cost.policy = trace.policy;
  cost.cumulative_cost = trace.total_cost();
  if (spec.kind == PolicyKind::Nsaa) {
    cost.reference_cost = cost.cumulative_cost;
  } else {
    auto reference = make_policy(parse_policy_spec("nsaa"), ctx);
    cost.reference_cost =
        drive(*reference, Channel::Full, values.size(), xbar, demand_at).total_cost();
  }
  if (cost.reference_cost > 0.0) {
    cost.relative_cost = cost.cumulative_cost / cost.reference_cost;
  } else {
    cost.relative_cost =
        cost.cumulative_cost == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return {std::move(trace), cost};
}

double slope_fit(std::span<const double> horizons, std::span<const double> regrets) {
  if (horizons.size() != regrets.size() || horizons.size() < 2) {
    throw InvalidArgument("slope fit needs at least two (T, regret) pairs");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0) || !(regrets[i] > 0.0)) {
      throw InvalidArgument("slope fit needs positive horizons and regrets");
    }
    lx.push_back(std::log(horizons[i]));
    ly.push_back(std::log(regrets[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) {
    throw InvalidArgument("slope fit needs at least two distinct horizons");
  }
  return sxy / sxx;
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t,policy,decision,observed,cost,epoch,restart\n";
  for (const auto& r : trace.records) {
    out << r.t << ',' << trace.policy << ',' << format_double(r.decision) << ','
        << format_double(r.observed) << ',' << format_double(r.cost) << ',' << r.epoch << ','
        << (r.restart ? 1 : 0) << '\n';
  }
}

void write_regret_csv(std::ostream& out, const Trace& trace, const RegretReport& regret) {
  if (regret.per_period.size() != trace.records.size()) {
    throw InvalidArgument("regret report does not match the trace");
  }
  out << "t,policy,decision,observed,cost,epoch,restart,regret,cum_regret\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    out << r.t << ',' << trace.policy << ',' << format_double(r.decision) << ','
        << format_double(r.observed) << ',' << format_double(r.cost) << ',' << r.epoch << ','
        << (r.restart ? 1 : 0) << ',' << format_double(regret.per_period[i]) << ','
        << format_double(regret.cumulative[i]) << '\n';
  }
}

Trace read_trace_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty trace file");
  std::map<std::string, std::size_t> column;
  const auto header = split(line);
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* name : {"t", "policy", "decision", "observed", "cost", "epoch", "restart"}) {
    if (!column.count(name)) throw ParseError(1, std::string("missing column '") + name + "'");
  }

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() < header.size()) throw ParseError(line_no, "too few columns");
    try {
      PeriodRecord r;
      r.t = std::stoull(cells[column["t"]]);
      r.decision = std::stod(cells[column["decision"]]);
      r.observed = std::stod(cells[column["observed"]]);
      r.demand = r.observed;
      r.cost = std::stod(cells[column["cost"]]);
      r.epoch = std::stoull(cells[column["epoch"]]);
      r.restart = cells[column["restart"]] == "1";
      trace.policy = cells[column["policy"]];
      trace.records.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed trace row");
    }
  }
  return trace;
}

}  // namespace nsopt
