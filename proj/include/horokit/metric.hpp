#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "horokit/cpoint.hpp"
#include "horokit/domain.hpp"

namespace horokit {

/// Evaluation configuration shared by the tail estimators and samplers.
struct MetricConfig {
  long tail_start = 256;   // first index N0 of the tail window
  long tail_len = 64;      // window length L
  double tol = 1e-3;       // decision tolerance / undecidable band half-width
  std::vector<double> r_grid = {0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0};
  long samples = 200;      // sampling budget per operation
  std::uint64_t seed = 20240817;

  void validate() const {
    if (tail_start < 1) throw std::invalid_argument("MetricConfig: tail_start must be >= 1");
    if (tail_len < 8) throw std::invalid_argument("MetricConfig: tail_len must be >= 8");
    if (!(tol > 0.0)) throw std::invalid_argument("MetricConfig: tol must be positive");
    if (r_grid.empty()) throw std::invalid_argument("MetricConfig: empty r_grid");
    double prev = 0.0;
    for (double r : r_grid) {
      if (!(r > prev)) throw std::invalid_argument("MetricConfig: r_grid must be positive and sorted");
      prev = r;
    }
    if (samples < 1) throw std::invalid_argument("MetricConfig: samples must be >= 1");
  }
};

// All distances use the 1/2 log convention, so K(0,r) = (1/2) log((1+r)/(1-r))
// on the unit disc. The disc/ball/half-plane formulas below are algebraically
// rearranged so that no catastrophic cancellation occurs near the boundary:
// |1 - conj(z) w|^2 - |z - w|^2 = (1 - |z|^2)(1 - |w|^2) turns the log of a
// small difference into a sum of well-conditioned logs.

inline double disc_distance(Complex z, Complex w) {
  const double b = std::abs(1.0 - std::conj(z) * w);
  const double a = std::abs(z - w);
  if (a == 0.0) return 0.0;
  const double oz = (1.0 - std::abs(z)) * (1.0 + std::abs(z));
  const double ow = (1.0 - std::abs(w)) * (1.0 + std::abs(w));
  return std::log(b + a) - 0.5 * std::log(oz) - 0.5 * std::log(ow);
}

/// Poincare distance of the right half-plane {Re > 0}.
inline double right_half_plane_distance(Complex a, Complex b) {
  const double p = std::abs(a + std::conj(b));
  const double q = std::abs(a - b);
  if (q == 0.0) return 0.0;
  return std::log(p + q) - 0.5 * std::log(4.0 * a.real() * b.real());
}

inline double ball_distance(const CPoint& z, const CPoint& w) {
  const Complex ip = hermitian_inner(z, w);
  const double b = std::abs(1.0 - ip);
  const double zn = z.norm_sq(), wn = w.norm_sq();
  // sigma^2 = |z-w|^2 - (|z|^2 |w|^2 - |<z,w>|^2) = |1-<z,w>|^2 - (1-|z|^2)(1-|w|^2)
  const double s2 = std::max(0.0, (z - w).norm_sq() - (zn * wn - std::norm(ip)));
  const double s = std::sqrt(s2);
  if (s == 0.0) return 0.0;
  return std::log(b + s) - 0.5 * std::log(1.0 - zn) - 0.5 * std::log(1.0 - wn);
}

namespace detail {

inline CPoint siegel_to_ball(const CPoint& w) {
  const Complex den = w[0] + 1.0;
  return CPoint{(w[0] - 1.0) / den, 2.0 * w[1] / den};
}

inline CPoint ball_to_siegel(const CPoint& z) {
  const Complex den = 1.0 - z[0];
  return CPoint{(1.0 + z[0]) / den, z[1] / den};
}

inline CPoint parabolic_to_siegel(const CPoint& z) { return CPoint{z[0] - z[1] * z[1], z[1]}; }
inline CPoint siegel_to_parabolic(const CPoint& w) { return CPoint{w[0] + w[1] * w[1], w[1]}; }

}  // namespace detail

/// True when distance() below evaluates the kind exactly.
inline bool has_exact_distance(const Domain& d) {
  return d.kind() != DomainKind::SampledConvex;
}

/// Invariant (Kobayashi) distance. Exact closed forms: disc, polydisc (max of
/// the coordinate distances), ball, real half-space (reduction to a half
/// plane), and the Siegel/parabolic models by explicit biholomorphic
/// reduction to the ball. SampledConvex has no closed form here; use
/// convex_distance_bounds.
inline double distance(const Domain& d, const CPoint& z, const CPoint& w) {
  if (!d.contains(z) || !d.contains(w)) throw std::invalid_argument("distance: point outside domain");
  switch (d.kind()) {
    case DomainKind::UnitDisc:
      return disc_distance(z[0], w[0]);
    case DomainKind::Polydisc: {
      double m = 0.0;
      for (int i = 0; i < d.dim(); ++i) m = std::max(m, disc_distance(z[i], w[i]));
      return m;
    }
    case DomainKind::UnitBall:
      return ball_distance(z, w);
    case DomainKind::RealHalfSpace: {
      // reduce on the C-linear functional defining the half-space
      const CPoint q = d.nearest_boundary_point(d.center());
      const std::vector<double> u = d.outward_normal(q);
      const double off = detail::dot(u, q.real_coords());
      const Complex sz = Domain::clinear_functional(u, z);
      const Complex sw = Domain::clinear_functional(u, w);
      return right_half_plane_distance(Complex(off, 0.0) - sz, Complex(off, 0.0) - sw);
    }
    case DomainKind::SiegelH2:
      return ball_distance(detail::siegel_to_ball(z), detail::siegel_to_ball(w));
    case DomainKind::ParabolicConvex:
      return ball_distance(detail::siegel_to_ball(detail::parabolic_to_siegel(z)),
                           detail::siegel_to_ball(detail::parabolic_to_siegel(w)));
    case DomainKind::SampledConvex:
      throw std::invalid_argument("distance: SampledConvex has no closed form, use convex_distance_bounds");
  }
  throw std::logic_error("unreachable");
}

struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

namespace detail {

// Adaptive Simpson on [0,1]; the integrand blows up like 1/delta near the
// boundary, so fixed grids are not reliable.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // noise floor: the directional-distance integrand carries ~1e-10 jitter
  if (std::abs(delta) <= 15.0 * eps || std::abs(delta) <= 1e-9 * (1.0 + std::abs(whole)))
    return left + right + delta / 15.0;
  if (depth <= 0) throw std::runtime_error("convex_distance_bounds: quadrature did not converge");
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * eps, depth - 1);
}

}  // namespace detail

/// Exact distance of the supporting half-space {u . x < u . q} evaluated at
/// z, w; a valid lower bound for any convex domain contained in it.
inline double supporting_half_space_distance(const std::vector<double>& u, const CPoint& q,
                                             const CPoint& z, const CPoint& w) {
  const double off = detail::dot(u, q.real_coords());
  const Complex sz = Domain::clinear_functional(u, z);
  const Complex sw = Domain::clinear_functional(u, w);
  const Complex hz = Complex(off, 0.0) - sz;
  const Complex hw = Complex(off, 0.0) - sw;
  if (hz.real() <= 0.0 || hw.real() <= 0.0) return 0.0;  // numerically outside
  return right_half_plane_distance(hz, hw);
}

/// Certified bracket for the invariant distance on a convex domain.
/// upper: integral of |gamma'| / delta(gamma; w-z line) over the straight
/// segment (valid since k_D(z;v) <= |v| / delta(z, bd D cap (z + Cv))).
/// lower: best supporting-half-space distance over a sampled set of boundary
/// contact points (valid since D subset H implies K_D >= K_H).
inline DistanceBounds convex_distance_bounds(const Domain& d, const CPoint& z, const CPoint& w,
                                             const MetricConfig& cfg) {
  if (!d.is_convex()) throw std::invalid_argument("convex_distance_bounds: non-convex kind");
  if (!d.contains(z) || !d.contains(w)) throw std::invalid_argument("convex_distance_bounds: point outside");
  if ((z - w).norm() == 0.0) return {0.0, 0.0};

  const CPoint v = w - z;
  const auto integrand = [&](double t) {
    const CPoint p = z + t * v;
    return v.norm() / d.directional_boundary_distance(p, v);
  };
  const double f0 = integrand(0.0), f1 = integrand(1.0), fm = integrand(0.5);
  const double upper =
      detail::adaptive_simpson(integrand, 0.0, 1.0, f0, fm, f1, std::min(cfg.tol, 1e-6), 40);

  // Candidate contact points: boundary projections of z, w, the midpoint, and
  // points reached along a sampled fan of directions from the midpoint.
  std::vector<CPoint> contacts;
  contacts.push_back(d.nearest_boundary_point(z));
  contacts.push_back(d.nearest_boundary_point(w));
  const CPoint mid = midpoint(z, w);
  contacts.push_back(d.nearest_boundary_point(mid));
  const long fan = std::max<long>(16, cfg.samples / 8);
  for (long k = 0; k < fan; ++k) {
    // rotate the segment direction inside the (extended) real span of v
    const double phi = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(fan);
    CPoint dir = std::polar(1.0, phi) * v;
    const double step = d.directional_boundary_distance(mid, dir);
    if (!std::isfinite(step)) continue;
    const CPoint probe = mid + (0.999 * step / dir.norm()) * dir;
    if (d.contains(probe)) contacts.push_back(d.nearest_boundary_point(probe));
  }
  double lower = 0.0;
  for (const CPoint& q : contacts) {
    const std::vector<double> u = d.outward_normal(q);
    lower = std::max(lower, supporting_half_space_distance(u, q, z, w));
  }
  if (lower > upper + 1e-9) throw std::runtime_error("convex_distance_bounds: bracket inversion");
  return {std::min(lower, upper), upper};
}

/// Variable part of the boundary upper estimate:
/// (1/2) log(1 + |w-z|/delta(w)) + (1/2) log(1 + |w-z|/delta(z)).
inline double boundary_estimate_upper(const Domain& d, const CPoint& z, const CPoint& w) {
  const double dz = d.boundary_distance(z);
  const double dw = d.boundary_distance(w);
  const double e = (w - z).norm();
  return 0.5 * std::log1p(e / dw) + 0.5 * std::log1p(e / dz);
}

/// Variable part of the boundary lower estimate: -(1/2) log(delta(z)). The
/// base point only enters the bounded-defect check done by the harness.
inline double boundary_estimate_lower(const Domain& d, const CPoint& /*x*/, const CPoint& z) {
  return -0.5 * std::log(d.boundary_distance(z));
}

// Disc Moebius helpers, shared by geodesics and automorphisms.
inline Complex mobius_to_origin(Complex a, Complex z) { return (z - a) / (1.0 - std::conj(a) * z); }
inline Complex mobius_from_origin(Complex a, Complex w) { return (w + a) / (1.0 + std::conj(a) * w); }

}  // namespace horokit
