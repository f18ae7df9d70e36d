#pragma once

#include <string>

namespace nsopt {

enum class LossKind { LinearNewsvendor, Quadratic, Auction };

// Inner cost F(x, d).
//   linear:    h (x - d)^+ + b (d - x)^+
//   quadratic: a (x - d)^2
//   auction:   (x - v) 1[x >= d]   (negated first-price utility)
class InnerLoss {
 public:
  static InnerLoss linear(double h, double b);
  // Linear newsvendor from overage cost h and critical ratio r = b / (h + b).
  static InnerLoss linear_from_ratio(double h, double ratio);
  static InnerLoss quadratic(double a);
  static InnerLoss auction(double value);

  LossKind kind() const noexcept { return kind_; }
  double h() const noexcept { return p0_; }
  double b() const noexcept { return p1_; }
  double curvature() const noexcept { return p0_; }
  double value() const noexcept { return p0_; }

  // b / (h + b); only meaningful for the linear loss.
  double critical_ratio() const;

  std::string describe() const;

 private:
  InnerLoss(LossKind kind, double p0, double p1) : kind_(kind), p0_(p0), p1_(p1) {}

  LossKind kind_;
  double p0_;
  double p1_;
};

double loss_eval(const InnerLoss& loss, double x, double d);

// Linear: h for x >= d (right derivative at the kink), -b for x < d.
// Quadratic: 2a(x - d). Auction throws UnsupportedOperation.
double loss_subgrad(const InnerLoss& loss, double x, double d);

}  // namespace nsopt
