#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nsopt {

// Observations from a contiguous run of periods [start, end], kept in arrival
// order together with an ascending index. Appends cost O(log n) comparisons
// plus one contiguous move. +infinity is a valid value: it marks an
// observation known only to exceed every level of interest (a censored sale).
class SampleWindow {
 public:
  explicit SampleWindow(std::size_t start = 1) : start_(start) {}

  static SampleWindow from_values(std::span<const double> values, std::size_t start = 1);

  void append(double value);
  // Drop everything; the next append is labelled `start`.
  void reset(std::size_t start);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::size_t start() const noexcept { return start_; }
  // Label of the last observation; start - 1 while empty.
  std::size_t end() const noexcept { return start_ + values_.size() - 1; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> sorted() const noexcept { return sorted_; }
  // Arrival offsets (0-based) in ascending value order; ties keep arrival order.
  std::span<const std::uint32_t> order() const noexcept { return order_; }

  std::size_t count_at_most(double y) const;

 private:
  std::size_t start_;
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::vector<std::uint32_t> order_;
};

// (#samples <= y) / n.
double ecdf(const SampleWindow& window, double y);

// sup_y |F_a(y) - F_b(y)| over the pooled sample points, restricted to points
// <= y_max when given (0 if no pooled point qualifies).
double ks_distance(const SampleWindow& a, const SampleWindow& b,
                   std::optional<double> y_max = std::nullopt);

// sqrt(ln(2 T^2 / delta) / n).
double dkw_radius(std::size_t n, std::size_t horizon, double delta);

}  // namespace nsopt
