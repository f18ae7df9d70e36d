#include "cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nsopt/error.hpp"
#include "nsopt/instance_io.hpp"

namespace nsopt::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kInstanceStream = 2;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string text = trim(cell);
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
  return value;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string file_stem(const std::string& policy) {
  std::string stem = policy;
  for (char& c : stem) {
    if (c == ':') c = '-';
  }
  return stem;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Replication {
  std::vector<double> regret;  // per policy
  std::vector<std::size_t> epochs;
  bool clamped = false;
  double epsilon = 0.0;
  std::size_t batch_length = 0;
};

// Demand sequence for replication `seed` at horizon T.
struct SyntheticSource {
  const ExperimentConfig& cfg;
  std::optional<DemandSequence> fixed;

  explicit SyntheticSource(const ExperimentConfig& c) : cfg(c) {
    if (cfg.instance) {
      std::ifstream in(*cfg.instance);
      if (!in) throw InvalidArgument("cannot open instance " + cfg.instance->string());
      fixed = read_instance(in);
    }
  }

  HardInstance make(std::size_t horizon, std::uint64_t seed) const {
    if (fixed) {
      return {*fixed, InstanceFamily::Switch, fixed->horizon(), 0.0, false, {}};
    }
    Rng rng(mix_seed(seed, kInstanceStream));
    InstanceOptions options;
    options.epsilon = cfg.epsilon;
    return make_hard_instance(*cfg.family, horizon, cfg.budget, rng, options);
  }
};

// Runs every policy on replication i at horizon T; optionally writes traces.
Replication replicate(const ExperimentConfig& cfg, const SyntheticSource& source,
                      const std::vector<PolicySpec>& specs, std::size_t horizon, std::size_t i,
                      bool write) {
  const std::uint64_t seed = cfg.replication_seed(i);
  const HardInstance inst = source.make(horizon, seed);
  const RunOptions options = cfg.run_options();

  Replication rep;
  rep.clamped = inst.clamped;
  rep.epsilon = inst.epsilon;
  rep.batch_length = inst.batch_length;
  for (const auto& spec : specs) {
    const Trace trace = run(inst.sequence, spec, spec.channel(), seed, options);
    const RegretReport regret = dynamic_regret(trace, inst.sequence, cfg.costs().make(spec.loss));
    rep.regret.push_back(regret.total);
    rep.epochs.push_back(trace.epochs());
    if (write) {
      auto out = open_output(cfg.out / (file_stem(spec.text) + "_T" + std::to_string(horizon) +
                                        "_seed" + std::to_string(i) + ".csv"));
      write_regret_csv(out, trace, regret);
    }
  }
  return rep;
}

json synthetic_experiment(const ExperimentConfig& cfg) {
  if (!cfg.family && !cfg.instance) {
    throw InvalidArgument("synthetic experiments need a 'family' or an 'instance' file");
  }
  const SyntheticSource source(cfg);
  std::vector<std::size_t> horizons = cfg.horizons;
  if (source.fixed) horizons = {source.fixed->horizon()};
  if (horizons.empty()) throw InvalidArgument("no horizon given");

  std::vector<PolicySpec> specs;
  for (const auto& text : cfg.policies) specs.push_back(parse_policy_spec(text));

  const bool write = cfg.kind == ExperimentKind::Simulate && cfg.write_traces;
  if (write || cfg.kind == ExperimentKind::Sweep) fs::create_directories(cfg.out);

  // means[p][h]
  std::vector<std::vector<double>> means(specs.size());
  std::vector<std::vector<double>> errors(specs.size());
  json results = json::array();
  json instances = json::array();
  for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
    const std::size_t T = horizons[hi];
    const auto reps = run_replications<Replication>(
        cfg.seeds, [&](std::size_t i) { return replicate(cfg, source, specs, T, i, write); },
        cfg.workers);

    bool clamped = false;
    for (const auto& rep : reps) clamped = clamped || rep.clamped;
    instances.push_back({{"horizon", T},
                         {"batch_length", reps.front().batch_length},
                         {"epsilon", reps.front().epsilon},
                         {"clamped", clamped}});

    for (std::size_t p = 0; p < specs.size(); ++p) {
      std::vector<double> regrets;
      double epochs = 0.0;
      for (const auto& rep : reps) {
        regrets.push_back(rep.regret[p]);
        epochs += static_cast<double>(rep.epochs[p]);
      }
      const MeanStderr stats = mean_stderr(regrets);
      means[p].push_back(stats.mean);
      errors[p].push_back(stats.std_error);
      results.push_back({{"policy", specs[p].text},
                         {"horizon", T},
                         {"mean_regret", stats.mean},
                         {"std_error", stats.std_error},
                         {"mean_epochs", epochs / static_cast<double>(reps.size())},
                         {"regrets", regrets}});
    }
  }

  json summary = {{"config", config_to_json(cfg)}, {"instances", instances}, {"results", results}};
  if (cfg.kind == ExperimentKind::Sweep) {
    auto table = open_output(cfg.out / "sweep.csv");
    table << "policy,horizon,mean_regret,std_error\n";
    table.precision(17);
    json slopes = json::object();
    for (std::size_t p = 0; p < specs.size(); ++p) {
      for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
        table << specs[p].text << ',' << horizons[hi] << ',' << means[p][hi] << ','
              << errors[p][hi] << '\n';
      }
      std::vector<double> ts(horizons.begin(), horizons.end());
      json slope = nullptr;
      if (horizons.size() >= 2) slope = slope_fit(ts, means[p]);
      slopes[specs[p].text] = slope;
    }
    summary["slopes"] = slopes;
    summary["slope"] = slopes[specs.front().text];
  }
  return summary;
}

json replay_experiment(const ExperimentConfig& cfg) {
  if (!cfg.data) throw InvalidArgument("replay needs a dataset ('data')");
  const std::vector<double> values = ingest_dataset(*cfg.data);
  const RunOptions options = cfg.run_options();
  fs::create_directories(cfg.out);

  json rows = json::array();
  auto table = open_output(cfg.out / "replay.csv");
  table << "policy,cumulative_cost,relative_cost\n";
  table.precision(17);
  for (const auto& text : cfg.policies) {
    const ReplayResult result = replay(values, parse_policy_spec(text), cfg.seed, options);
    table << text << ',' << result.cost.cumulative_cost << ',' << result.cost.relative_cost
          << '\n';
    rows.push_back({{"policy", text},
                    {"cumulative_cost", result.cost.cumulative_cost},
                    {"reference_cost", result.cost.reference_cost},
                    {"relative_cost", result.cost.relative_cost}});
    if (cfg.write_traces) {
      auto out = open_output(cfg.out / (file_stem(text) + "_replay.csv"));
      write_trace_csv(out, result.trace);
    }
  }
  return {{"config", config_to_json(cfg)},
          {"periods", values.size()},
          {"xbar", replay_xbar(values)},
          {"reference", "nsaa"},
          {"results", rows}};
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Simulate:
      return "simulate";
    case ExperimentKind::Replay:
      return "replay";
    case ExperimentKind::Sweep:
      return "sweep";
  }
  return "simulate";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  if (text == "simulate") return ExperimentKind::Simulate;
  if (text == "replay") return ExperimentKind::Replay;
  if (text == "sweep") return ExperimentKind::Sweep;
  throw InvalidArgument("unknown experiment kind '" + text + "'");
}

void ExperimentConfig::resolve() {
  if (!(h > 0.0)) throw InvalidArgument("h must be positive");
  if (ratio && !(*ratio > 0.0 && *ratio < 1.0)) {
    throw InvalidArgument("critical ratio must lie in (0, 1)");
  }
  if (b) {
    if (!(*b > 0.0)) throw InvalidArgument("b must be positive");
    const double implied = *b / (h + *b);
    if (ratio && std::abs(implied - *ratio) > 1e-9) {
      throw InvalidArgument("b and the critical ratio disagree");
    }
    ratio = implied;
  } else {
    if (!ratio) ratio = 0.7;
    b = InnerLoss::linear_from_ratio(h, *ratio).b();
  }
  if (seeds < 1) throw InvalidArgument("seeds must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (policies.empty()) throw InvalidArgument("no policy given");
  for (const auto& p : policies) parse_policy_spec(p);
}

CostParams ExperimentConfig::costs() const {
  CostParams c;
  c.h = h;
  c.b = b.value_or(InnerLoss::linear_from_ratio(h, ratio.value_or(0.7)).b());
  c.a = a;
  c.v = v;
  return c;
}

RunOptions ExperimentConfig::run_options() const {
  RunOptions options;
  options.costs = costs();
  options.delta = delta;
  options.grid = grid;
  options.kappa = kappa;
  return options;
}

std::uint64_t ExperimentConfig::replication_seed(std::size_t i) const {
  return mix_seed(seed, 1000 + i);
}

namespace {

// Absent and null keys both leave the default in place.
bool present(const json& doc, const char* key) { return doc.contains(key) && !doc[key].is_null(); }

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig cfg;
  try {
    if (present(doc, "experiment")) cfg.kind = parse_experiment_kind(doc["experiment"]);
    if (present(doc, "family")) cfg.family = parse_instance_family(doc["family"]);
    if (present(doc, "budget")) cfg.budget = doc["budget"];
    if (present(doc, "epsilon")) cfg.epsilon = doc["epsilon"];
    if (present(doc, "instance")) cfg.instance = doc["instance"].get<std::string>();
    if (present(doc, "horizon")) cfg.horizons = {doc["horizon"].get<std::size_t>()};
    if (present(doc, "horizons")) cfg.horizons = doc["horizons"].get<std::vector<std::size_t>>();
    if (present(doc, "data")) cfg.data = doc["data"].get<std::string>();
    if (present(doc, "h")) cfg.h = doc["h"];
    if (present(doc, "b")) cfg.b = doc["b"];
    if (present(doc, "ratio")) cfg.ratio = doc["ratio"];
    if (present(doc, "a")) cfg.a = doc["a"];
    if (present(doc, "v")) cfg.v = doc["v"];
    if (present(doc, "delta")) cfg.delta = doc["delta"];
    if (present(doc, "kappa")) cfg.kappa = doc["kappa"];
    if (present(doc, "detect_grid")) cfg.grid = parse_candidate_grid(doc["detect_grid"]);
    if (present(doc, "policies")) cfg.policies = doc["policies"].get<std::vector<std::string>>();
    if (present(doc, "seeds")) cfg.seeds = doc["seeds"];
    if (present(doc, "seed")) cfg.seed = doc["seed"];
    if (present(doc, "workers")) cfg.workers = doc["workers"];
    if (present(doc, "out")) cfg.out = doc["out"].get<std::string>();
    if (present(doc, "write_traces")) cfg.write_traces = doc["write_traces"];
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc = {{"experiment", to_string(cfg.kind)},
              {"budget", cfg.budget},
              {"horizons", cfg.horizons},
              {"h", cfg.h},
              {"a", cfg.a},
              {"v", cfg.v},
              {"delta", cfg.delta},
              {"kappa", cfg.kappa},
              {"detect_grid", to_string(cfg.grid)},
              {"policies", cfg.policies},
              {"seeds", cfg.seeds},
              {"seed", cfg.seed},
              {"workers", cfg.workers},
              {"out", cfg.out.string()},
              {"write_traces", cfg.write_traces}};
  doc["family"] = cfg.family ? json(to_string(*cfg.family)) : json(nullptr);
  doc["epsilon"] = cfg.epsilon ? json(*cfg.epsilon) : json(nullptr);
  doc["instance"] = cfg.instance ? json(cfg.instance->string()) : json(nullptr);
  doc["data"] = cfg.data ? json(cfg.data->string()) : json(nullptr);
  doc["b"] = cfg.b ? json(*cfg.b) : json(nullptr);
  doc["ratio"] = cfg.ratio ? json(*cfg.ratio) : json(nullptr);
  json seeds = json::array();
  for (std::size_t i = 0; i < cfg.seeds; ++i) seeds.push_back(cfg.replication_seed(i));
  doc["replication_seeds"] = seeds;
  return doc;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return config_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::vector<double> parse_dataset(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.empty() || cells.size() > 2) {
      throw ParseError(line_no, "expected 'value' or 'date,value'");
    }
    const auto value = parse_number(cells.back());
    if (!seen_row) {
      seen_row = true;
      columns = cells.size();
      if (!value) continue;  // header
    }
    if (cells.size() != columns) throw ParseError(line_no, "inconsistent column count");
    if (!value) throw ParseError(line_no, "not a number: '" + trim(cells.back()) + "'");
    if (!std::isfinite(*value)) throw ParseError(line_no, "value is not finite");
    if (*value < 0.0) throw ParseError(line_no, "negative demand value");
    values.push_back(*value);
  }
  if (values.empty()) throw ParseError(line_no, "dataset has no values");
  return values;
}

std::vector<double> ingest_dataset(const fs::path& path) {
  if (!fs::exists(path)) throw InvalidArgument("dataset " + path.string() + " does not exist");
  return parse_dataset(read_file(path));
}

json run_experiment(ExperimentConfig cfg) {
  cfg.resolve();
  json summary = cfg.kind == ExperimentKind::Replay ? replay_experiment(cfg)
                                                     : synthetic_experiment(cfg);
  fs::create_directories(cfg.out);
  auto out = open_output(cfg.out / "summary.json");
  out << summary.dump(2) << '\n';
  return summary;
}

}  // namespace nsopt::cli
