#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "horokit/automorphisms.hpp"
#include "horokit/horosphere.hpp"
#include "horokit/metric.hpp"
#include "horokit/sampling.hpp"
#include "horokit/sequence.hpp"

namespace horokit {

/// Gromov product (x,y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2; nonnegative by
/// the triangle inequality.
inline double gromov_product(const Domain& d, const CPoint& x, const CPoint& y, const CPoint& w) {
  const double p = 0.5 * (distance(d, x, w) + distance(d, y, w) - distance(d, x, y));
  if (p < -1e-9) throw std::runtime_error("gromov_product: triangle inequality violated");
  return std::max(p, 0.0);
}

/// A curve from invariant arc length to the domain, unit speed by contract.
struct Ray {
  Domain domain;
  std::function<CPoint(double)> curve;
  CPoint basepoint;

  CPoint at(double t) const { return curve(t); }
};

/// Unit-speed geodesic ray from x toward a boundary point of the disc/ball,
/// or coordinatewise max-synchronised for the polydisc (the fastest
/// coordinate runs a disc geodesic, the others trail 1-Lipschitz).
inline Ray geodesic_ray(const Domain& d, const CPoint& x, const CPoint& boundary_point) {
  if (!d.contains(x)) throw std::invalid_argument("geodesic_ray: base outside domain");
  switch (d.kind()) {
    case DomainKind::UnitDisc: {
      const Complex p = boundary_point[0] / std::abs(boundary_point[0]);
      const Complex x0 = x[0];
      return {d, [x0, p](double t) {
                const Complex dir = mobius_to_origin(x0, p);  // unimodular
                return CPoint{mobius_from_origin(x0, std::tanh(t) * dir)};
              },
              x};
    }
    case DomainKind::UnitBall: {
      const CPoint p = (1.0 / boundary_point.norm()) * boundary_point;
      return {d, [x, p](double t) {
                CPoint dir = ball_involution(x, (1.0 - 1e-12) * p);
                dir = (1.0 / dir.norm()) * dir;
                return ball_involution(x, std::tanh(t) * dir);
              },
              x};
    }
    case DomainKind::Polydisc: {
      // speeds proportional to how unimodular each target coordinate is
      const int n = d.dim();
      std::vector<double> speed(static_cast<std::size_t>(n), 0.0);
      double top = 0.0;
      for (int j = 0; j < n; ++j) {
        speed[static_cast<std::size_t>(j)] = std::abs(boundary_point[j]) >= 1.0 - 1e-9 ? 1.0 : 0.0;
        top = std::max(top, speed[static_cast<std::size_t>(j)]);
      }
      if (top == 0.0) throw std::invalid_argument("geodesic_ray: target not on the boundary");
      return {d, [d, x, boundary_point, speed](double t) {
                CPoint z = x;
                for (int j = 0; j < d.dim(); ++j) {
                  const double s = speed[static_cast<std::size_t>(j)];
                  if (s > 0.0) {
                    const Complex pj = boundary_point[j] / std::abs(boundary_point[j]);
                    z[j] = disc_geodesic_point(x[j], (1.0 - 1e-14) * pj, s * t);
                  }
                }
                return z;
              },
              x};
    }
    default:
      throw std::invalid_argument("geodesic_ray: unsupported kind");
  }
}

/// Unit-speed geodesic segment between two interior points.
inline Ray geodesic_segment(const Domain& d, const CPoint& a, const CPoint& b) {
  switch (d.kind()) {
    case DomainKind::UnitDisc:
      return {d, [a, b](double t) { return CPoint{disc_geodesic_point(a[0], b[0], t)}; }, a};
    case DomainKind::UnitBall:
      return {d, [a, b](double t) { return ball_geodesic_point(a, b, t); }, a};
    case DomainKind::Polydisc: {
      const int n = d.dim();
      std::vector<double> dist(static_cast<std::size_t>(n));
      double top = 0.0;
      for (int j = 0; j < n; ++j) {
        dist[static_cast<std::size_t>(j)] = disc_distance(a[j], b[j]);
        top = std::max(top, dist[static_cast<std::size_t>(j)]);
      }
      const double total = top;
      return {d, [d, a, b, dist, total](double t) {
                CPoint z = a;
                if (total == 0.0) return z;
                for (int j = 0; j < d.dim(); ++j) {
                  const double s = dist[static_cast<std::size_t>(j)] / total;
                  z[j] = disc_geodesic_point(a[j], b[j], s * t);
                }
                return z;
              },
              a};
    }
    default:
      throw std::invalid_argument("geodesic_segment: unsupported kind");
  }
}

/// The two opposite face rays of the bidisc through the first coordinate,
/// t -> (tanh(+-t), 0); their Gromov product at the origin vanishes
/// identically.
inline Ray bidisc_face_ray(int sign) {
  const Domain d2 = Domain::polydisc(2);
  return {d2, [sign](double t) {
            return CPoint{Complex(sign >= 0 ? std::tanh(t) : -std::tanh(t), 0.0), Complex(0.0, 0.0)};
          },
          CPoint::zero(2)};
}

// ---------------------------------------------------------------------------
// Sequence equivalence at infinity
// ---------------------------------------------------------------------------

/// ~_s equivalence: the products (a_n, b_n)_w must exceed every bound with an
/// escaping trend; bounded stabilising products decide the negative. The
/// precondition that both sequences tend to infinity is checked through
/// off-diagonal self products.
inline Verdict seq_equiv_s(const Domain& d, const CPoint& w, const PointSequence& a,
                           const PointSequence& b, const MetricConfig& cfg) {
  cfg.validate();
  const auto window_min = [&](const std::function<double(long)>& f, int k) {
    const long n0 = cfg.tail_start << k;
    double m = kInfinity;
    for (long j = 0; j < cfg.tail_len; ++j) m = std::min(m, f(n0 + j));
    return m;
  };
  const auto self_escapes = [&](const PointSequence& s) {
    const auto f = [&](long n) {
      return gromov_product(d, s.at(n), s.at(n + cfg.tail_len / 2 + 1), w);
    };
    const double m0 = window_min(f, 0), m1 = window_min(f, 1), m2 = window_min(f, 2);
    return m1 > m0 && m2 > m1 && m2 > 1.0;
  };
  if (!self_escapes(a) || !self_escapes(b))
    throw std::invalid_argument("seq_equiv_s: a sequence does not tend to infinity");

  const auto f = [&](long n) { return gromov_product(d, a.at(n), b.at(n), w); };
  const double m0 = window_min(f, 0), m1 = window_min(f, 1), m2 = window_min(f, 2);

  Verdict v;
  v.tol = cfg.tol;
  v.window_start = cfg.tail_start << 2;
  v.window_len = cfg.tail_len;
  v.estimate = m2;
  const bool grows = m1 > m0 + cfg.tol && m2 > m1 + cfg.tol;
  const bool stable = std::abs(m1 - m0) < cfg.tol && std::abs(m2 - m1) < cfg.tol;
  if (grows && m2 > 1.0) {
    v.decision = true;
    v.converged = true;
    v.margin = m2 - m1;
    return v;
  }
  if (stable) {
    v.decision = false;
    v.converged = true;
    v.margin = -(m2 + 1.0);
    return v;
  }
  v.decision = false;
  v.converged = false;  // inconclusive: neither escape nor stabilisation
  v.margin = 0.0;
  return v;
}

// ---------------------------------------------------------------------------
// Quasi-geodesics
// ---------------------------------------------------------------------------

struct QuasiGeodesicResult {
  Verdict verdict;
  double worst_slack = 0.0;   // min over pairs of the two inequality slacks
  double length = 0.0;        // invariant length of the reparametrised curve
};

namespace detail {

// cumulative invariant length along a Euclidean-parametrised curve by chord
// sums (exact distances) refined until stable
inline std::vector<double> cumulative_length(const Domain& d, const std::function<CPoint(double)>& curve,
                                             double t1, long segments) {
  std::vector<double> s(static_cast<std::size_t>(segments) + 1, 0.0);
  CPoint prev = curve(0.0);
  for (long i = 1; i <= segments; ++i) {
    const CPoint next = curve(t1 * static_cast<double>(i) / static_cast<double>(segments));
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i) - 1] + distance(d, prev, next);
    prev = next;
  }
  return s;
}

}  // namespace detail

/// (A,B) quasi-geodesic verification: the curve is reparametrised by
/// cumulative invariant length, then both inequalities
///   |s_i - s_j|/A - B <= d(c_i, c_j) <= A |s_i - s_j| + B
/// are checked over sampled index pairs. worst_slack < 0 reports the deepest
/// violation.
inline QuasiGeodesicResult quasi_geodesic_check(const Domain& d,
                                                const std::function<CPoint(double)>& curve,
                                                double t_end, double A, double B,
                                                const MetricConfig& cfg) {
  cfg.validate();
  if (A < 1.0 || B <= 0.0) throw std::invalid_argument("quasi_geodesic_check: need A >= 1, B > 0");
  const long segments = std::max<long>(128, cfg.samples);
  const auto s = detail::cumulative_length(d, curve, t_end, segments);
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] < s[i - 1]) throw std::runtime_error("quasi_geodesic_check: non-monotone length");

  std::vector<CPoint> pts;
  pts.reserve(s.size());
  for (long i = 0; i <= segments; ++i)
    pts.push_back(curve(t_end * static_cast<double>(i) / static_cast<double>(segments)));

  double worst = kInfinity;
  const long stride = std::max<long>(1, segments / 48);
  for (long i = 0; i <= segments; i += stride) {
    for (long j = i + stride; j <= segments; j += stride) {
      const double ds = s[static_cast<std::size_t>(j)] - s[static_cast<std::size_t>(i)];
      const double dd = distance(d, pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      worst = std::min(worst, dd - (ds / A - B));
      worst = std::min(worst, (A * ds + B) - dd);
    }
  }
  QuasiGeodesicResult out;
  out.worst_slack = worst;
  out.length = s.back();
  out.verdict.tol = cfg.tol;
  out.verdict.estimate = worst;
  out.verdict.margin = worst;
  out.verdict.converged = true;
  out.verdict.decision = worst >= -cfg.tol;
  return out;
}

/// Smallest constants (A, B) on a sampled grid for which the curve passes;
/// existence is guaranteed for straight segments toward the boundary of a
/// hyperbolic convex domain.
inline std::pair<double, double> fit_quasi_geodesic_constants(const Domain& d,
                                                              const std::function<CPoint(double)>& curve,
                                                              double t_end, const MetricConfig& cfg) {
  for (double A : {1.0, 1.5, 2.0, 3.0, 5.0, 8.0}) {
    for (double B : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      if (quasi_geodesic_check(d, curve, t_end, A, B, cfg).verdict.decision) return {A, B};
    }
  }
  return {kInfinity, kInfinity};
}

// ---------------------------------------------------------------------------
// Delta hyperbolicity
// ---------------------------------------------------------------------------

/// Thin-triangle defect estimate: geodesic triangles with vertices at
/// invariant distance ~ scale from the center, each side sampled at fixed
/// arc-length resolution; returns the max over triangles of the max over
/// side points of the distance to the union of the other two sides.
inline double delta_hyperbolicity_estimate(const Domain& d, double scale, const MetricConfig& cfg) {
  cfg.validate();
  if (d.kind() != DomainKind::UnitDisc && d.kind() != DomainKind::Polydisc &&
      d.kind() != DomainKind::UnitBall)
    throw std::invalid_argument("delta_hyperbolicity_estimate: geodesics unavailable for kind");
  Rng rng = make_rng(cfg.seed, 0x6D);
  const CPoint center = d.center();
  const long triangles = std::max<long>(8, cfg.samples / 16);
  const double step = 0.05;

  double delta = 0.0;
  for (long it = 0; it < triangles; ++it) {
    CPoint v[3];
    for (auto& vi : v) {
      CPoint target = CPoint::zero(d.dim());
      if (d.kind() == DomainKind::Polydisc) {
        // mix face and corner targets: a stalled coordinate rides at speed 0,
        // which is what exposes the flat max-metric planes of the polydisc
        bool any = false;
        for (int j = 0; j < d.dim(); ++j) {
          if (uniform(rng, 0.0, 1.0) < 0.5) {
            target[j] = uniform_circle_point(rng);
            any = true;
          }
        }
        if (!any) target[static_cast<int>(uniform(rng, 0.0, 0.999) * d.dim())] = uniform_circle_point(rng);
      } else if (d.kind() == DomainKind::UnitDisc) {
        target[0] = uniform_circle_point(rng);
      } else {
        CPoint g = sample_interior(d, rng, 0.5);
        if (g.norm() < 1e-6) g[0] = Complex(1.0, 0.0);
        target = (1.0 / g.norm()) * g;
      }
      vi = geodesic_ray(d, center, target).at(scale);
    }
    Ray sides[3] = {geodesic_segment(d, v[0], v[1]), geodesic_segment(d, v[1], v[2]),
                    geodesic_segment(d, v[2], v[0])};
    double len[3];
    len[0] = distance(d, v[0], v[1]);
    len[1] = distance(d, v[1], v[2]);
    len[2] = distance(d, v[2], v[0]);

    for (int si = 0; si < 3; ++si) {
      const long np = std::max<long>(2, static_cast<long>(len[si] / step));
      for (long i = 1; i < np; ++i) {
        const CPoint p = sides[si].at(len[si] * static_cast<double>(i) / static_cast<double>(np));
        double best = kInfinity;
        for (int so = 0; so < 3 && best > 0.0; ++so) {
          if (so == si) continue;
          const long nq = std::max<long>(2, static_cast<long>(len[so] / step));
          for (long j = 0; j <= nq; ++j) {
            const CPoint q = sides[so].at(len[so] * static_cast<double>(j) / static_cast<double>(nq));
            best = std::min(best, distance(d, p, q));
          }
        }
        delta = std::max(delta, best);
      }
    }
  }
  return delta;
}

}  // namespace horokit
