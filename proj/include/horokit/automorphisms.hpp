#pragma once

#include <cmath>
#include <stdexcept>

#include "horokit/cpoint.hpp"

namespace horokit {

/// The standard involutive automorphism phi_a of the unit ball with
/// phi_a(0) = a and phi_a(a) = 0:
///   phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z,a>),
/// P_a the orthogonal projection on C a, Q_a = I - P_a, s_a = sqrt(1-|a|^2).
inline CPoint ball_involution(const CPoint& a, const CPoint& z) {
  const double a2 = a.norm_sq();
  if (a2 >= 1.0) throw std::invalid_argument("ball_involution: center outside ball");
  if (a2 == 0.0) return -1.0 * z;
  const double s = std::sqrt(1.0 - a2);
  const Complex za = hermitian_inner(z, a);
  const CPoint pz = (za / a2) * a;
  const CPoint qz = z - pz;
  return (1.0 / (1.0 - za)) * (a - pz - s * qz);
}

/// Unit-speed geodesic through the ball from x toward y (invariant arc
/// length t in [0, distance(x,y)] reaches y).
inline CPoint ball_geodesic_point(const CPoint& x, const CPoint& y, double t) {
  const CPoint m = ball_involution(x, y);
  const double mn = m.norm();
  if (mn == 0.0) return x;
  return ball_involution(x, (std::tanh(t) / mn) * m);
}

inline Complex disc_geodesic_point(Complex x, Complex y, double t) {
  const Complex m = (y - x) / (1.0 - std::conj(x) * y);
  const double mn = std::abs(m);
  if (mn == 0.0) return x;
  const Complex w = std::tanh(t) * (m / mn);
  return (w + x) / (1.0 + std::conj(x) * w);
}

}  // namespace horokit
