#pragma once

#include <string>
#include <variant>
#include <vector>

#include "slipflow/types.hpp"

namespace slipflow {

/// Graph x1 = b(x2) of one strip wall. Either a constant level or a level plus a
/// compactly supported bump  amplitude * exp(-1 / (1 - ((x2 - center)/half_width)^2)).
class WallFunction {
 public:
  static WallFunction flat(double level);
  static WallFunction bump(double level, double amplitude, double half_width, double center = 0.0);

  double value(double x2) const;
  double slope(double x2) const;
  double second_derivative(double x2) const;

  double level() const noexcept { return level_; }
  double amplitude() const noexcept { return amplitude_; }
  double half_width() const noexcept { return half_width_; }
  double center() const noexcept { return center_; }
  bool is_flat() const noexcept { return amplitude_ == 0.0; }

  /// Largest |x2| at which the wall still deviates from its level (0 for flat walls).
  double distortion_extent() const noexcept;

 private:
  WallFunction(double level, double amplitude, double half_width, double center)
      : level_(level), amplitude_(amplitude), half_width_(half_width), center_(center) {}

  double level_;
  double amplitude_;
  double half_width_;
  double center_;
};

/// C2 periodic cubic spline through equally spaced samples on [0, 2*pi).
class PeriodicSpline {
 public:
  PeriodicSpline() = default;
  explicit PeriodicSpline(std::vector<double> samples);

  double value(double theta) const;
  double d1(double theta) const;
  double d2(double theta) const;
  double min_value() const;
  const std::vector<double>& samples() const noexcept { return y_; }

 private:
  struct Local {
    int i;
    double t;
  };
  Local locate(double theta) const;

  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at knots
  double h_ = 0.0;
};

struct IntervalDomain {
  double length = 1.0;
};

struct DiskDomain {
  double radius = 1.0;
};

struct StarShapedDomain {
  /// Boundary radius r(theta) sampled at theta_k = 2*pi*k/n.
  std::vector<double> radii;
};

struct DistortedStripDomain {
  WallFunction lower = WallFunction::flat(0.0);
  WallFunction upper = WallFunction::flat(1.0);
  double half_length = 4.0;             // zeta: the truncated strip is |x2| <= zeta
  double distortion_half_length = 1.0;  // Z: walls are straight for |x2| >= Z
};

using DomainKind = std::variant<IntervalDomain, DiskDomain, StarShapedDomain, DistortedStripDomain>;

struct DomainSpec {
  DomainKind kind = IntervalDomain{};
  double alpha = 1.0;

  bool is_interval() const { return std::holds_alternative<IntervalDomain>(kind); }
  bool is_disk() const { return std::holds_alternative<DiskDomain>(kind); }
  bool is_star() const { return std::holds_alternative<StarShapedDomain>(kind); }
  bool is_strip() const { return std::holds_alternative<DistortedStripDomain>(kind); }
  std::string kind_name() const;

  /// Throws MeshError describing the first violated invariant.
  void validate() const;
};

}  // namespace slipflow
