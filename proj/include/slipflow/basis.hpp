#pragma once

#include <array>
#include <cmath>

#include "slipflow/types.hpp"

// Lagrange bases and Gauss rules on the reference interval [0, 1] and square [0, 1]^2.
// Biquadratic nodes are numbered lexicographically, k = i + 3 j, with 1D nodes at 0, 1/2, 1.
namespace slipflow::basis {

/// Three-point Gauss rule on [0, 1]; exact for polynomials of degree 5.
struct Gauss3 {
  static constexpr int size = 3;
  static inline const std::array<double, 3> points{0.5 - 0.5 * std::sqrt(0.6), 0.5,
                                                   0.5 + 0.5 * std::sqrt(0.6)};
  static constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
};

inline std::array<double, 3> q2_1d(double s) {
  return {2.0 * (s - 0.5) * (s - 1.0), -4.0 * s * (s - 1.0), 2.0 * s * (s - 0.5)};
}
inline std::array<double, 3> q2_1d_d1(double s) { return {4.0 * s - 3.0, 4.0 - 8.0 * s, 4.0 * s - 1.0}; }
inline constexpr std::array<double, 3> q2_1d_d2() { return {4.0, -8.0, 4.0}; }

inline std::array<double, 2> q1_1d(double s) { return {1.0 - s, s}; }
inline constexpr std::array<double, 2> q1_1d_d1() { return {-1.0, 1.0}; }

struct Q2Values {
  std::array<double, 9> value;
  std::array<Vec2, 9> grad;  // reference gradient
};

inline Q2Values q2_2d(const Vec2& ref) {
  const auto lx = q2_1d(ref.x()), ly = q2_1d(ref.y());
  const auto dx = q2_1d_d1(ref.x()), dy = q2_1d_d1(ref.y());
  Q2Values out;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      out.value[i + 3 * j] = lx[i] * ly[j];
      out.grad[i + 3 * j] = Vec2(dx[i] * ly[j], lx[i] * dy[j]);
    }
  return out;
}

/// Reference second derivatives (xx, xy, yy) of the 9 biquadratic functions.
inline std::array<std::array<double, 3>, 9> q2_2d_hessian(const Vec2& ref) {
  const auto lx = q2_1d(ref.x()), ly = q2_1d(ref.y());
  const auto dx = q2_1d_d1(ref.x()), dy = q2_1d_d1(ref.y());
  constexpr auto dd = q2_1d_d2();
  std::array<std::array<double, 3>, 9> out{};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) out[i + 3 * j] = {dd[i] * ly[j], dx[i] * dy[j], lx[i] * dd[j]};
  return out;
}

/// Local biquadratic node indices of the four cell corners, ordered (0,0), (1,0), (0,1), (1,1).
inline constexpr std::array<int, 4> kCornerNodes{0, 2, 6, 8};

inline std::array<double, 4> q1_2d(const Vec2& ref) {
  const auto lx = q1_1d(ref.x()), ly = q1_1d(ref.y());
  return {lx[0] * ly[0], lx[1] * ly[0], lx[0] * ly[1], lx[1] * ly[1]};
}

/// Cell sides: 0 bottom (eta = 0), 1 right (xi = 1), 2 top (eta = 1), 3 left (xi = 0).
inline constexpr std::array<std::array<int, 3>, 4> kSideNodes{{{0, 1, 2}, {2, 5, 8}, {6, 7, 8}, {0, 3, 6}}};

inline Vec2 side_point(int side, double t) {
  switch (side) {
    case 0: return Vec2(t, 0.0);
    case 1: return Vec2(1.0, t);
    case 2: return Vec2(t, 1.0);
    default: return Vec2(0.0, t);
  }
}

/// Reference tangent d(ref)/dt along a side.
inline Vec2 side_direction(int side) { return (side == 0 || side == 2) ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0); }

}  // namespace slipflow::basis
