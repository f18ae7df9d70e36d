#include "nsopt/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsopt/error.hpp"

namespace nsopt {

SampleWindow SampleWindow::from_values(std::span<const double> values, std::size_t start) {
  SampleWindow w(start);
  for (double v : values) w.append(v);
  return w;
}

void SampleWindow::append(double value) {
  if (std::isnan(value)) {
    throw InvalidArgument("sample value is NaN");
  }
  if (values_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("sample window is full");
  }
  const auto pos = std::upper_bound(sorted_.begin(), sorted_.end(), value);
  const auto offset = pos - sorted_.begin();
  sorted_.insert(pos, value);
  order_.insert(order_.begin() + offset, static_cast<std::uint32_t>(values_.size()));
  values_.push_back(value);
}

void SampleWindow::reset(std::size_t start) {
  start_ = start;
  values_.clear();
  sorted_.clear();
  order_.clear();
}

std::size_t SampleWindow::count_at_most(double y) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), y) -
                                  sorted_.begin());
}

double ecdf(const SampleWindow& window, double y) {
  if (window.empty()) {
    throw InvalidArgument("empirical CDF of an empty window");
  }
  return static_cast<double>(window.count_at_most(y)) / static_cast<double>(window.size());
}

double ks_distance(const SampleWindow& a, const SampleWindow& b, std::optional<double> y_max) {
  if (a.empty() || b.empty()) {
    throw InvalidArgument("KS distance needs two nonempty windows");
  }
  const auto sa = a.sorted();
  const auto sb = b.sorted();
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double y;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      y = sa[i];
    } else {
      y = sb[j];
    }
    if (y_max && y > *y_max) break;
    while (i < sa.size() && sa[i] == y) ++i;
    while (j < sb.size() && sb[j] == y) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double dkw_radius(std::size_t n, std::size_t horizon, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("confidence delta must lie in (0, 1)");
  }
  if (n < 1 || horizon < 1) {
    throw InvalidArgument("DKW radius needs n >= 1 and T >= 1");
  }
  const double T = static_cast<double>(horizon);
  return std::sqrt(std::log(2.0 * T * T / delta) / static_cast<double>(n));
}

}  // namespace nsopt
