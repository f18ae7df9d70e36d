#include "nsopt/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsopt/error.hpp"

namespace nsopt {

std::string to_string(CandidateGrid grid) {
  return grid == CandidateGrid::All ? "all" : "geometric";
}

CandidateGrid parse_candidate_grid(const std::string& text) {
  if (text == "all") return CandidateGrid::All;
  if (text == "geometric") return CandidateGrid::Geometric;
  throw InvalidArgument("unknown detection grid '" + text + "' (expected all|geometric)");
}

void DetectionConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("detection delta must lie in (0, 1)");
  }
  if (horizon < 1) {
    throw InvalidArgument("detection horizon must be at least 1");
  }
}

std::vector<std::size_t> candidate_splits(std::size_t l, std::size_t t, CandidateGrid grid) {
  std::vector<std::size_t> splits;
  if (t < l) return splits;
  if (grid == CandidateGrid::All) {
    splits.reserve(t - l + 1);
    for (std::size_t s = l; s <= t; ++s) splits.push_back(s);
    return splits;
  }
  // Right-window lengths 1, 2, 4, ... capped by the epoch, plus the full epoch.
  for (std::size_t len = 1; len <= t - l + 1; len *= 2) splits.push_back(t - len + 1);
  if (splits.back() != l) splits.push_back(l);
  std::reverse(splits.begin(), splits.end());
  return splits;
}

std::vector<SplitStatistic> split_statistics(const SampleWindow& epoch, const DetectionConfig& cfg,
                                             std::optional<double> y_max) {
  cfg.validate();
  if (epoch.size() < 2) {
    throw InvalidArgument("restart test needs t > l (a nonempty left window)");
  }
  if (cfg.cap == CapMode::Capped && !y_max) {
    throw InvalidArgument("capped detection requires y_max");
  }
  const double cap = cfg.cap == CapMode::Capped ? *y_max : std::numeric_limits<double>::infinity();

  const std::size_t l = epoch.start();
  const std::size_t t = epoch.end();
  const std::size_t n_left = t - l;
  const double left_radius = dkw_radius(n_left, cfg.horizon, cfg.delta);

  std::vector<SplitStatistic> stats;
  std::vector<std::size_t> first_offset;  // arrival offset where each right window begins
  std::vector<double> right_size;
  for (std::size_t s : candidate_splits(l, t, cfg.grid)) {
    const std::size_t n_right = t - s + 1;
    const double threshold =
        2.0 * left_radius + 2.0 * dkw_radius(n_right, cfg.horizon, cfg.delta);
    if (threshold >= 1.0) continue;
    stats.push_back({s, 0.0, threshold});
    first_offset.push_back(s - l);
    right_size.push_back(static_cast<double>(n_right));
  }
  if (stats.empty()) return stats;

  // One sweep over the epoch in value order. Splits are ascending, so an
  // observation at offset o belongs to the right windows of a prefix of them.
  const std::size_t k = stats.size();
  std::vector<std::size_t> right_count(k, 0);
  std::size_t left_count = 0;
  const std::size_t last_offset = n_left;  // offset of period t, outside the left window

  const auto sorted = epoch.sorted();
  const auto order = epoch.order();
  const double nl = static_cast<double>(n_left);
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double y = sorted[i];
    if (y > cap) break;
    for (; i < sorted.size() && sorted[i] == y; ++i) {
      const std::size_t offset = order[i];
      if (offset != last_offset) ++left_count;
      for (std::size_t c = 0; c < k && first_offset[c] <= offset; ++c) ++right_count[c];
    }
    const double fl = static_cast<double>(left_count) / nl;
    for (std::size_t c = 0; c < k; ++c) {
      const double gap = std::abs(fl - static_cast<double>(right_count[c]) / right_size[c]);
      stats[c].ks = std::max(stats[c].ks, gap);
    }
  }
  return stats;
}

std::optional<std::size_t> detect(const SampleWindow& epoch, const DetectionConfig& cfg,
                                  std::optional<double> y_max) {
  for (const auto& stat : split_statistics(epoch, cfg, y_max)) {
    if (stat.ks > stat.threshold) return stat.split;
  }
  return std::nullopt;
}

}  // namespace nsopt
