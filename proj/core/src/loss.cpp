#include "nsopt/loss.hpp"

#include <cmath>
#include <sstream>

#include "nsopt/error.hpp"

namespace nsopt {

InnerLoss InnerLoss::linear(double h, double b) {
  if (!(h >= 0.0) || !(b >= 0.0) || !(h + b > 0.0) || !std::isfinite(h) || !std::isfinite(b)) {
    throw InvalidArgument("linear loss requires h >= 0, b >= 0, h + b > 0");
  }
  return InnerLoss(LossKind::LinearNewsvendor, h, b);
}

InnerLoss InnerLoss::linear_from_ratio(double h, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("critical ratio must lie in (0, 1)");
  }
  if (!(h > 0.0)) {
    throw InvalidArgument("overage cost h must be positive when deriving b from a ratio");
  }
  return linear(h, ratio * h / (1.0 - ratio));
}

InnerLoss InnerLoss::quadratic(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InvalidArgument("quadratic loss requires a > 0");
  }
  return InnerLoss(LossKind::Quadratic, a, 0.0);
}

InnerLoss InnerLoss::auction(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument("auction value must lie in [0, 1]");
  }
  return InnerLoss(LossKind::Auction, value, 0.0);
}

double InnerLoss::critical_ratio() const {
  if (kind_ != LossKind::LinearNewsvendor) {
    throw UnsupportedOperation("critical ratio is defined only for the linear newsvendor loss");
  }
  return p1_ / (p0_ + p1_);
}

std::string InnerLoss::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case LossKind::LinearNewsvendor:
      out << "linear(h=" << p0_ << ",b=" << p1_ << ")";
      break;
    case LossKind::Quadratic:
      out << "quadratic(a=" << p0_ << ")";
      break;
    case LossKind::Auction:
      out << "auction(v=" << p0_ << ")";
      break;
  }
  return out.str();
}

double loss_eval(const InnerLoss& loss, double x, double d) {
  switch (loss.kind()) {
    case LossKind::LinearNewsvendor:
      return x >= d ? loss.h() * (x - d) : loss.b() * (d - x);
    case LossKind::Quadratic:
      return loss.curvature() * (x - d) * (x - d);
    case LossKind::Auction:
      return x >= d ? x - loss.value() : 0.0;
  }
  return 0.0;
}

double loss_subgrad(const InnerLoss& loss, double x, double d) {
  switch (loss.kind()) {
    case LossKind::LinearNewsvendor:
      return x >= d ? loss.h() : -loss.b();
    case LossKind::Quadratic:
      return 2.0 * loss.curvature() * (x - d);
    case LossKind::Auction:
      break;
  }
  throw UnsupportedOperation(
      "auction loss is discontinuous in x and has no usable subgradient");
}

}  // namespace nsopt
