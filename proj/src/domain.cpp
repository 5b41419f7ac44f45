#include "slipflow/domain.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slipflow/errors.hpp"

namespace slipflow {

WallFunction WallFunction::flat(double level) { return WallFunction(level, 0.0, 1.0, 0.0); }

WallFunction WallFunction::bump(double level, double amplitude, double half_width, double center) {
  if (!(half_width > 0.0)) throw MeshError("bump wall needs a positive half width");
  return WallFunction(level, amplitude, half_width, center);
}

double WallFunction::value(double x2) const {
  if (amplitude_ == 0.0) return level_;
  const double t = (x2 - center_) / half_width_;
  if (std::abs(t) >= 1.0) return level_;
  const double q = 1.0 - t * t;
  return level_ + amplitude_ * std::exp(-1.0 / q);
}

double WallFunction::slope(double x2) const {
  if (amplitude_ == 0.0) return 0.0;
  const double t = (x2 - center_) / half_width_;
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  const double f = amplitude_ * std::exp(-1.0 / q);
  return f * (-2.0 * t / (q * q)) / half_width_;
}

double WallFunction::second_derivative(double x2) const {
  if (amplitude_ == 0.0) return 0.0;
  const double t = (x2 - center_) / half_width_;
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  const double f = amplitude_ * std::exp(-1.0 / q);
  const double q2 = q * q;
  return f * (4.0 * t * t / (q2 * q2) - 2.0 / q2 - 8.0 * t * t / (q2 * q)) /
         (half_width_ * half_width_);
}

double WallFunction::distortion_extent() const noexcept {
  if (amplitude_ == 0.0) return 0.0;
  return std::abs(center_) + half_width_;
}

PeriodicSpline::PeriodicSpline(std::vector<double> samples) : y_(std::move(samples)) {
  const int n = static_cast<int>(y_.size());
  if (n < 3) throw MeshError("periodic spline needs at least 3 samples");
  h_ = 2.0 * std::numbers::pi / n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n;
    const int ip = (i + 1) % n;
    a(i, im) += h_ / 6.0;
    a(i, i) += 2.0 * h_ / 3.0;
    a(i, ip) += h_ / 6.0;
    rhs(i) = (y_[ip] - 2.0 * y_[i] + y_[im]) / h_;
  }
  const Eigen::VectorXd m = a.partialPivLu().solve(rhs);
  m_.assign(m.data(), m.data() + n);
}

PeriodicSpline::Local PeriodicSpline::locate(double theta) const {
  const double period = 2.0 * std::numbers::pi;
  double th = std::fmod(theta, period);
  if (th < 0.0) th += period;
  const int n = static_cast<int>(y_.size());
  int i = static_cast<int>(th / h_);
  if (i >= n) i = n - 1;
  return {i, th - i * h_};
}

double PeriodicSpline::value(double theta) const {
  const auto [i, t] = locate(theta);
  const int j = (i + 1) % static_cast<int>(y_.size());
  const double s = h_ - t;
  return m_[i] * s * s * s / (6.0 * h_) + m_[j] * t * t * t / (6.0 * h_) +
         (y_[i] / h_ - m_[i] * h_ / 6.0) * s + (y_[j] / h_ - m_[j] * h_ / 6.0) * t;
}

double PeriodicSpline::d1(double theta) const {
  const auto [i, t] = locate(theta);
  const int j = (i + 1) % static_cast<int>(y_.size());
  const double s = h_ - t;
  return -m_[i] * s * s / (2.0 * h_) + m_[j] * t * t / (2.0 * h_) -
         (y_[i] / h_ - m_[i] * h_ / 6.0) + (y_[j] / h_ - m_[j] * h_ / 6.0);
}

double PeriodicSpline::d2(double theta) const {
  const auto [i, t] = locate(theta);
  const int j = (i + 1) % static_cast<int>(y_.size());
  return (m_[i] * (h_ - t) + m_[j] * t) / h_;
}

double PeriodicSpline::min_value() const {
  double lo = value(0.0);
  const int samples = 64 * static_cast<int>(y_.size());
  for (int k = 1; k < samples; ++k) lo = std::min(lo, value(2.0 * std::numbers::pi * k / samples));
  return lo;
}

std::string DomainSpec::kind_name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, IntervalDomain>) return "interval";
        else if constexpr (std::is_same_v<K, DiskDomain>) return "disk";
        else if constexpr (std::is_same_v<K, StarShapedDomain>) return "star";
        else return "strip";
      },
      kind);
}

void DomainSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw MeshError("friction coefficient alpha must be positive");
  if (const auto* iv = std::get_if<IntervalDomain>(&kind)) {
    if (!(iv->length > 0.0)) throw MeshError("interval length must be positive");
  } else if (const auto* d = std::get_if<DiskDomain>(&kind)) {
    if (!(d->radius > 0.0)) throw MeshError("disk radius must be positive");
  } else if (const auto* s = std::get_if<StarShapedDomain>(&kind)) {
    if (s->radii.size() < 4) throw MeshError("star-shaped boundary needs at least 4 radius samples");
    for (double r : s->radii)
      if (!(r > 0.0)) throw MeshError("star-shaped radius samples must be strictly positive");
    if (!(PeriodicSpline(s->radii).min_value() > 0.0))
      throw MeshError("interpolated star-shaped radius is not strictly positive");
  } else {
    const auto& st = std::get<DistortedStripDomain>(kind);
    if (!(st.distortion_half_length > 0.0)) throw MeshError("distortion half-length Z must be positive");
    if (!(st.half_length > st.distortion_half_length + 1.0))
      throw MeshError("strip half-length zeta must exceed Z + 1");
    if (st.lower.level() != 0.0 || st.upper.level() != 1.0)
      throw MeshError("strip outlets must be straight with walls at x1 = 0 and x1 = 1");
    if (st.lower.distortion_extent() > st.distortion_half_length ||
        st.upper.distortion_extent() > st.distortion_half_length)
      throw MeshError("wall distortion extends beyond |x2| = Z");
    const int samples = 4000;
    for (int k = 0; k <= samples; ++k) {
      const double x2 = -st.half_length + 2.0 * st.half_length * k / samples;
      if (!(st.lower.value(x2) < st.upper.value(x2))) {
        std::ostringstream os;
        os << "strip walls cross at x2 = " << x2;
        throw MeshError(os.str());
      }
    }
  }
}

}  // namespace slipflow
