#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "nsopt/distributions.hpp"
#include "nsopt/policies.hpp"

namespace nsopt {

enum class TraceSource { Synthetic, Replay };

struct PeriodRecord {
  std::size_t t = 0;
  double decision = 0.0;
  double observed = 0.0;  // demand (full channel) or sale (censored channel)
  double demand = 0.0;    // realized demand; never shown to censored policies
  double cost = 0.0;      // realized F(decision, demand)
  std::size_t epoch = 1;
  bool restart = false;
};

struct Trace {
  std::string policy;
  Channel channel = Channel::Full;
  TraceSource source = TraceSource::Synthetic;
  std::uint64_t seed = 0;
  std::vector<PeriodRecord> records;

  double total_cost() const;
  std::size_t epochs() const;
};

struct RunOptions {
  CostParams costs;
  double delta = 0.1;
  CandidateGrid grid = CandidateGrid::Geometric;
  double kappa = 1.0;
};

PolicyContext make_context(const RunOptions& options, std::size_t horizon, double xbar,
                           std::uint64_t seed, bool discrete_demand);

// Drives `policy` through the sequence. Demand draws come from a generator
// seeded by `seed`, so every policy run with the same seed sees the same
// demand path. Censored runs reveal min(x, D), plus a lost-sale flag when the
// period's model is atomic.
Trace run(const DemandSequence& seq, Policy& policy, Channel channel, std::uint64_t seed);

// Builds the policy from `spec` (its generator is derived from `seed`) and runs it.
Trace run(const DemandSequence& seq, const PolicySpec& spec, Channel channel, std::uint64_t seed,
          const RunOptions& options = {});

struct RegretReport {
  std::vector<double> optimal;     // clairvoyant x_t^*
  std::vector<double> per_period;  // f_t(x_t) - f_t(x_t^*)
  std::vector<double> cumulative;
  double total = 0.0;
};

// Exact dynamic regret against the per-period clairvoyant optimum.
RegretReport dynamic_regret(const Trace& trace, const DemandSequence& seq, const InnerLoss& loss);

struct CostReport {
  std::string policy;
  double cumulative_cost = 0.0;
  double reference_cost = 0.0;
  double relative_cost = 1.0;  // cumulative_cost / reference_cost
};

struct ReplayResult {
  Trace trace;
  CostReport cost;
};

// xbar used when replaying a dataset: 1.05 times its largest value.
double replay_xbar(std::span<const double> values);

// Feeds a recorded demand stream to a full-information policy and reports
// its cumulative cost relative to NSAA on the same stream and seed.
ReplayResult replay(std::span<const double> values, const PolicySpec& spec, std::uint64_t seed,
                    const RunOptions& options = {});

// Least-squares slope of log(regret) against log(T).
double slope_fit(std::span<const double> horizons, std::span<const double> regrets);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanStderr mean_stderr(std::span<const double> values);

// Trace CSV: t,policy,decision,observed,cost,epoch,restart
void write_trace_csv(std::ostream& out, const Trace& trace);
// Trace CSV plus regret,cum_regret.
void write_regret_csv(std::ostream& out, const Trace& trace, const RegretReport& regret);
// Reads the columns written by write_trace_csv (extra columns ignored).
Trace read_trace_csv(std::istream& in);

// Runs fn(0..count-1) on up to `workers` threads and returns results in index
// order, so the output never depends on scheduling.
template <typename Result, typename Fn>
std::vector<Result> run_replications(std::size_t count, Fn&& fn, std::size_t workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::vector<Result> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace nsopt
