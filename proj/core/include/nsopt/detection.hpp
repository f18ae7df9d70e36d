#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nsopt/empirical.hpp"

namespace nsopt {

enum class CandidateGrid {
  // Every split s in [l, t]. Cubic work per epoch; meant for small horizons.
  All,
  // s in {t, t-1, t-3, t-7, ...} plus l: right windows of length 2^k.
  Geometric,
};

enum class CapMode { Unrestricted, Capped };

std::string to_string(CandidateGrid grid);
CandidateGrid parse_candidate_grid(const std::string& text);

struct DetectionConfig {
  double delta = 0.1;
  std::size_t horizon = 1;
  CandidateGrid grid = CandidateGrid::Geometric;
  CapMode cap = CapMode::Unrestricted;

  void validate() const;
};

struct SplitStatistic {
  std::size_t split;  // period label s
  double ks;          // sup |F_[l,t-1] - F_[s,t]| over the (capped) pooled points
  double threshold;   // 2 r(t - l) + 2 r(t - s + 1)
};

// Candidate splits for an epoch window [l, t], ascending in s.
std::vector<std::size_t> candidate_splits(std::size_t l, std::size_t t, CandidateGrid grid);

// KS statistic and threshold for every candidate split whose threshold is
// below 1 (a KS distance never exceeds 1, so other candidates cannot fire).
std::vector<SplitStatistic> split_statistics(const SampleWindow& epoch, const DetectionConfig& cfg,
                                             std::optional<double> y_max = std::nullopt);

// Restart test on an epoch window spanning [l, t]: the left window [l, t-1]
// is compared with each right window [s, t]. Returns the smallest split whose
// KS distance strictly exceeds its threshold.
//
// With cfg.cap == Capped the supremum runs over pooled points <= y_max, which
// must then be supplied. Throws when t == l (no left window).
std::optional<std::size_t> detect(const SampleWindow& epoch, const DetectionConfig& cfg,
                                  std::optional<double> y_max = std::nullopt);

}  // namespace nsopt
