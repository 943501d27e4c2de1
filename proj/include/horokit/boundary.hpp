#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "horokit/horosphere.hpp"

namespace horokit {

/// Boundary class: an admissible sequence together with its cached
/// closed-form reduction where the domain admits one.
struct BoundaryClass {
  enum class Form { DiscPoint, BallPoint, BidiscProduct, Generic };

  PointSequence representative;
  Verdict admissibility;
  Form form = Form::Generic;
  CPoint contact;                  // DiscPoint / BallPoint
  std::vector<BidiscClass> parts;  // BidiscProduct
};

inline BoundaryClass make_boundary_class(const Domain& d, const CPoint& x, const PointSequence& seq,
                                         const MetricConfig& cfg) {
  BoundaryClass cls;
  cls.representative = seq;
  cls.admissibility = is_admissible(d, x, seq, cfg);
  if (!cls.admissibility.decision && cls.admissibility.converged)
    throw std::invalid_argument("make_boundary_class: sequence is not admissible");
  if (d.kind() == DomainKind::UnitDisc || d.kind() == DomainKind::UnitBall) {
    const TailClusters cl = cluster_tail_points(seq, cfg);
    if (cl.points.size() == 1) {
      cls.form = d.kind() == DomainKind::UnitDisc ? BoundaryClass::Form::DiscPoint
                                                  : BoundaryClass::Form::BallPoint;
      cls.contact = (1.0 / cl.points[0].norm()) * cl.points[0];
    }
  } else if (d.kind() == DomainKind::Polydisc && d.dim() == 2) {
    cls.parts = detail::bidisc_parts(seq, cfg);
    cls.form = BoundaryClass::Form::BidiscProduct;
  }
  return cls;
}

/// Exact tail limsup of K(w,u_n) - K(x,u_n) when the class reduces to a
/// closed form; empty otherwise.
inline std::optional<double> class_limsup_value(const BoundaryClass& cls, const CPoint& x,
                                                const CPoint& w) {
  switch (cls.form) {
    case BoundaryClass::Form::DiscPoint:
      return 0.5 * std::log(disc_horocycle_value(cls.contact[0], w[0])) -
             0.5 * std::log(disc_horocycle_value(cls.contact[0], x[0]));
    case BoundaryClass::Form::BallPoint:
      return 0.5 * std::log(ball_horosphere_value(cls.contact, w)) -
             0.5 * std::log(ball_horosphere_value(cls.contact, x));
    case BoundaryClass::Form::BidiscProduct:
      return bidisc_parts_limsup_value(cls.parts, x, w);
    case BoundaryClass::Form::Generic:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Membership of w in E_x(cls, R): exact via the closed form when available,
/// estimator windows otherwise.
inline Verdict class_membership(const Domain& d, const CPoint& x, const BoundaryClass& cls,
                                const CPoint& w, double R, const MetricConfig& cfg) {
  const double thr = 0.5 * std::log(R);
  if (const auto v = class_limsup_value(cls, x, w)) {
    Verdict out;
    out.estimate = *v;
    out.margin = thr - *v;
    out.converged = true;
    out.tol = 1e-9;  // exact evaluation: only the level set itself is undecidable
    out.decision = out.margin > out.tol;
    return out;
  }
  return horosphere_contains(Horosphere(d, x, cls.representative, R), w, cfg);
}

// ---------------------------------------------------------------------------
// Horosphere intersection tests
// ---------------------------------------------------------------------------

namespace detail {

inline Outcome horodiscs_intersect(Complex p, double Rp, Complex q, double Rq, double slack) {
  // Euclidean discs centered p/(Rp+1), q/(Rq+1) with radii Rp/(Rp+1), Rq/(Rq+1)
  const double gap = std::abs(p / (Rp + 1.0) - q / (Rq + 1.0));
  const double reach = Rp / (Rp + 1.0) + Rq / (Rq + 1.0);
  if (gap < reach - slack) return Outcome::True;
  if (gap > reach + slack) return Outcome::False;
  return Outcome::Undecidable;
}

// Effective product factors of a part list rebased at x: per coordinate the
// tangency p_j and a multiplier m_j with factor = E(p_j, R * m_j); absent
// means the coordinate is free. Rebasing at x multiplies each part's radius
// by exp(2 * part value at x), and the intersection over parts takes the
// smallest per-coordinate radius.
inline std::array<std::optional<std::pair<Complex, double>>, 2> product_factors(
    const std::vector<BidiscClass>& parts, const CPoint& x) {
  std::array<std::optional<std::pair<Complex, double>>, 2> f;
  for (const BidiscClass& cls : parts) {
    const auto [s1, s2] = part_scales(cls);
    const double rebase = std::exp(2.0 * bidisc_limsup_value(cls, x));
    const Complex ps[2] = {cls.p1, cls.p2};
    const double ss[2] = {s1, s2};
    for (int j = 0; j < 2; ++j) {
      if (ss[j] <= 0.0) continue;
      const double m = rebase / ss[j];
      if (!f[j]) f[j] = std::make_pair(ps[j], m);
      else f[j]->second = std::min(f[j]->second, m);
    }
  }
  return f;
}

}  // namespace detail

/// Nonemptiness of E_x(a,R) cap E_x(b,R). Closed forms decide the disc, the
/// bidisc and (partially) the ball; the generic route searches for a sampled
/// common member and reports Undecidable on exhaustion.
inline Outcome horospheres_intersect(const Domain& d, const CPoint& x, const BoundaryClass& a,
                                     const BoundaryClass& b, double R, const MetricConfig& cfg) {
  const double slack = cfg.tol;
  if (a.form == BoundaryClass::Form::DiscPoint && b.form == BoundaryClass::Form::DiscPoint) {
    // base-point change only rescales both radii by the same factor exp(2 B(x))
    const double sa = disc_horocycle_value(a.contact[0], x[0]);
    const double sb = disc_horocycle_value(b.contact[0], x[0]);
    return detail::horodiscs_intersect(a.contact[0], R * sa, b.contact[0], R * sb, slack);
  }
  if (a.form == BoundaryClass::Form::BidiscProduct && b.form == BoundaryClass::Form::BidiscProduct) {
    const auto fa = detail::product_factors(a.parts, x);
    const auto fb = detail::product_factors(b.parts, x);
    Outcome combined = Outcome::True;
    for (int j = 0; j < 2; ++j) {
      if (!fa[j] || !fb[j]) continue;  // a free factor always meets anything
      const Outcome o = detail::horodiscs_intersect(fa[j]->first, R * fa[j]->second,
                                                    fb[j]->first, R * fb[j]->second, slack);
      if (o == Outcome::False) return Outcome::False;
      if (o == Outcome::Undecidable) combined = Outcome::Undecidable;
    }
    return combined;
  }
  if (a.form == BoundaryClass::Form::BallPoint && b.form == BoundaryClass::Form::BallPoint) {
    // witness candidates along the rays toward both contacts and their middle
    const auto value = [&](const CPoint& p, const CPoint& w) {
      return 0.5 * std::log(ball_horosphere_value(p, w)) - 0.5 * std::log(ball_horosphere_value(p, x));
    };
    const double thr = 0.5 * std::log(R);
    CPoint mid = 0.5 * (a.contact + b.contact);
    std::vector<CPoint> dirs = {a.contact, b.contact};
    if (mid.norm() > 1e-9) dirs.push_back((1.0 / mid.norm()) * mid);
    for (const CPoint& p : dirs) {
      for (int k = 1; k <= 40; ++k) {
        const CPoint z = (1.0 - std::pow(0.5, k)) * p;
        if (value(a.contact, z) < thr - slack && value(b.contact, z) < thr - slack) return Outcome::True;
      }
    }
    const double t = R / (1.0 + R);
    if ((1.0 - t) * a.contact.distance_to(b.contact) > 2.0 * std::sqrt(t * t + t) + slack)
      return Outcome::False;
    return Outcome::Undecidable;
  }
  // generic sampled search
  Rng rng = make_rng(cfg.seed, 0xB0);
  const auto members =
      detail::sample_horosphere_members(d, x, a.representative, R, cfg, rng, std::max<long>(8, cfg.samples / 8));
  for (const CPoint& w : members) {
    if (class_membership(d, x, b, w, R, cfg).decision) return Outcome::True;
  }
  return Outcome::Undecidable;
}

// ---------------------------------------------------------------------------
// Convergence in the horosphere topology
// ---------------------------------------------------------------------------

/// Convergence of a sequence of boundary classes to a target: for every grid
/// radius there must be a cutoff m_R past which each class's horosphere meets
/// the target's. estimate reports the largest cutoff over the grid.
inline Verdict converges_H(const Domain& d, const CPoint& x, const std::vector<BoundaryClass>& classes,
                           const BoundaryClass& target, const MetricConfig& cfg) {
  cfg.validate();
  if (classes.empty()) throw std::invalid_argument("converges_H: empty class list");
  Verdict v;
  v.tol = cfg.tol;
  long worst_cutoff = 0;
  for (double R : cfg.r_grid) {
    long m_R = -1;
    Outcome stop = Outcome::False;
    for (long m = static_cast<long>(classes.size()) - 1; m >= 0; --m) {
      const Outcome o = horospheres_intersect(d, x, classes[static_cast<std::size_t>(m)], target, R, cfg);
      if (o != Outcome::True) {
        stop = o;  // the all-True suffix ends here; what lies below is irrelevant
        break;
      }
      m_R = m;
    }
    if (m_R == -1) {
      v.decision = false;
      v.converged = stop == Outcome::False;  // inconclusive when the tail was undecidable
      v.estimate = static_cast<double>(classes.size());
      v.margin = -1.0;
      return v;
    }
    worst_cutoff = std::max(worst_cutoff, m_R);
  }
  v.decision = true;
  v.converged = true;
  v.estimate = static_cast<double>(worst_cutoff);
  v.margin = static_cast<double>(classes.size()) - static_cast<double>(worst_cutoff);
  return v;
}

/// E-limit: the tested sequence is eventually contained in every horosphere
/// of the target class. Tail points of the final window are tested at each
/// grid radius; an undecidable membership propagates.
inline Verdict e_limit(const Domain& d, const CPoint& x, const PointSequence& seq_to_test,
                       const BoundaryClass& target, const MetricConfig& cfg) {
  cfg.validate();
  Verdict v;
  v.tol = cfg.tol;
  v.window_start = cfg.tail_start << 2;
  v.window_len = cfg.tail_len;
  double worst_margin = kInfinity;
  bool any_undecided = false;
  for (double R : cfg.r_grid) {
    for (long j = 0; j < cfg.tail_len; ++j) {
      const CPoint z = seq_to_test.at((cfg.tail_start << 2) + j);
      if (!d.contains(z)) throw std::invalid_argument("e_limit: tested sequence leaves the domain");
      const Verdict m = class_membership(d, x, target, z, R, cfg);
      worst_margin = std::min(worst_margin, m.margin);
      if (m.outcome() == Outcome::False) {
        v.decision = false;
        v.converged = true;
        v.estimate = m.estimate;
        v.margin = m.margin;
        return v;
      }
      if (!m.decided()) any_undecided = true;
    }
  }
  v.decision = !any_undecided;
  v.converged = !any_undecided;
  v.margin = worst_margin;
  v.estimate = worst_margin;
  return v;
}

// ---------------------------------------------------------------------------
// Impressions and principal parts
// ---------------------------------------------------------------------------

/// Euclidean cluster points of boundary probes; points are merged at the
/// standard radius. escapes_to_infinity replaces projective coordinates on
/// unbounded domains.
struct ClusterSet {
  std::vector<CPoint> points;
  bool escapes_to_infinity = false;

  bool contains_near(const CPoint& q, double radius) const {
    for (const CPoint& p : points)
      if (p.distance_to(q) <= radius) return true;
    return false;
  }
};

namespace detail {

inline void merge_into(ClusterSet& cs, const CPoint& q, double radius) {
  if (!q.is_finite()) return;
  if (q.norm() > 1e6) {
    cs.escapes_to_infinity = true;
    return;
  }
  for (const CPoint& p : cs.points)
    if (p.distance_to(q) <= radius) return;
  cs.points.push_back(q);
}

}  // namespace detail

/// Horosphere impression: Euclidean cluster points of probe sequences that
/// converge to the class in the horosphere topology. Each probe carries its
/// own witness classes (radial probes witness themselves; the face sweeps on
/// the bidisc use the face/corner classes through the moving point). Probes
/// are verified through the closed-form intersection tests before their
/// limits enter the cluster set.
inline ClusterSet impression_estimate(const Domain& d, const CPoint& x, const BoundaryClass& cls,
                                      const MetricConfig& cfg) {
  cfg.validate();
  ClusterSet out;
  const double radius = merge_radius(cfg);
  const long deep = 1'000'000;

  // every cluster point of the representative is reached by a radial probe
  // witnessed by the class itself
  const TailClusters cl = cluster_tail_points(cls.representative, cfg);
  out.escapes_to_infinity = cl.escapes_to_infinity;
  for (const CPoint& p : cl.points) detail::merge_into(out, p, radius);

  if (cls.form == BoundaryClass::Form::BidiscProduct) {
    // Probes sweeping the face through a constrained coordinate: the probe
    // m -> (p_j deep, c) sits eventually in every horosphere of the face
    // witness class at p_j, and that witness horosphere E(p_j,R) x D always
    // meets the target's, since they share the factor tangency. Both halves
    // are verified numerically per grid radius before a sweep is admitted.
    const auto f = detail::product_factors(cls.parts, x);
    for (int j = 0; j < 2; ++j) {
      if (!f[j]) continue;
      const int other = 1 - j;
      const Complex pj = f[j]->first;
      const PointSequence witness_seq =
          j == 0 ? PointSequence::bidisc_w2(pj) : PointSequence::bidisc_w3(pj);
      const BoundaryClass witness = make_boundary_class(d, x, witness_seq, cfg);
      bool verified = true;
      for (double R : cfg.r_grid) {
        if (horospheres_intersect(d, x, witness, cls, R, cfg) != Outcome::True) verified = false;
        CPoint probe = CPoint::zero(2);
        probe[j] = (1.0 - 1.0 / static_cast<double>(deep)) * pj;
        probe[other] = Complex(0.25, 0.0);
        if (class_membership(d, x, witness, probe, R, cfg).outcome() == Outcome::False) verified = false;
      }
      if (!verified) continue;
      for (int ir = 0; ir <= 4; ++ir) {
        for (int ia = 0; ia < 12; ++ia) {
          const Complex c = std::polar(0.25 * ir, 2.0 * M_PI * ia / 12.0);
          CPoint limit = CPoint::zero(2);
          limit[j] = pj;
          limit[other] = c;
          detail::merge_into(out, limit, radius);
          if (ir == 0) break;  // center once
        }
      }
      // boundary points of the face, reached with the same witness
      for (int ia = 0; ia < 16; ++ia) {
        CPoint limit = CPoint::zero(2);
        limit[j] = pj;
        limit[other] = std::polar(1.0, 2.0 * M_PI * ia / 16.0);
        detail::merge_into(out, limit, radius);
      }
    }
    return out;
  }

  // disc/ball: radial and tangential probes all collapse to the contact
  // point; horosphere-interior probes at shrinking radii can only confirm it
  if (cls.form == BoundaryClass::Form::DiscPoint || cls.form == BoundaryClass::Form::BallPoint) {
    const CPoint p = cls.contact;
    const CPoint probe = x + (1.0 - 1.0 / static_cast<double>(deep)) * (p - x);
    // verify the deep probe is inside every grid horosphere (E-convergence)
    bool ok = true;
    for (double R : cfg.r_grid)
      ok = ok && class_membership(d, x, cls, probe, R, cfg).outcome() != Outcome::False;
    if (ok) detail::merge_into(out, p, radius);
    return out;
  }

  // generic: horosphere-interior probes at the smallest grid radii
  Rng rng = make_rng(cfg.seed, 0x1F);
  for (double R : {cfg.r_grid.front(), cfg.r_grid[cfg.r_grid.size() / 2]}) {
    const auto members = detail::sample_horosphere_members(d, x, cls.representative, R, cfg, rng,
                                                           std::max<long>(8, cfg.samples / 8));
    for (const CPoint& w : members) {
      if (!d.is_bounded() && w.norm() > 1e6) {
        out.escapes_to_infinity = true;
        continue;
      }
      detail::merge_into(out, d.nearest_boundary_point(w), radius);
    }
  }
  return out;
}

namespace detail {

// near-boundary members of a product-form horosphere at radius R, by exact
// per-coordinate construction: "pushed" coordinates are placed on the thin
// ring inside their factor, the rest sample the factor interior
inline std::vector<CPoint> sample_product_members_near_boundary(
    const std::array<std::optional<std::pair<Complex, double>>, 2>& factors, double R, double eta,
    Rng& rng, long count) {
  std::vector<CPoint> out;
  const auto factor_disc = [&](int j) -> std::pair<Complex, double> {
    const auto& f = factors[static_cast<std::size_t>(j)];
    return disc_horosphere_closed_form(f->first, R * f->second);
  };
  for (long it = 0; it < 16 * count && static_cast<long>(out.size()) < count; ++it) {
    CPoint w = CPoint::zero(2);
    // choose a nonempty subset of coordinates to push toward the boundary
    const int mask = 1 + static_cast<int>(uniform(rng, 0.0, 2.99));
    bool valid = true;
    for (int j = 0; j < 2 && valid; ++j) {
      const bool push = (mask >> j) & 1;
      if (factors[static_cast<std::size_t>(j)]) {
        const auto [c, r] = factor_disc(j);
        if (push) {
          // ring points inside the factor disc: |w| = 1 - eta u, angle within
          // the arc the factor disc cuts from that ring
          const double rho = 1.0 - eta * uniform(rng, 0.05, 1.0);
          const double ca = std::abs(c);
          if (ca < 1e-12) { valid = rho < r; if (valid) w[j] = std::polar(rho, uniform(rng, 0.0, 2 * M_PI)); continue; }
          const double cosmin = (rho * rho + ca * ca - r * r) / (2.0 * rho * ca);
          if (cosmin >= 1.0) { valid = false; continue; }
          const double dmax = std::acos(std::max(-1.0, cosmin));
          const double psi = std::arg(c) + uniform(rng, -dmax, dmax);
          w[j] = std::polar(rho, psi);
          valid = std::abs(w[j] - c) < r;
        } else {
          w[j] = c + r * uniform_disc_point(rng, 0.98);
        }
      } else {
        w[j] = push ? std::polar(1.0 - eta * uniform(rng, 0.05, 1.0), uniform(rng, 0.0, 2 * M_PI))
                    : uniform_disc_point(rng, 1.0 - 2.0 * eta);
      }
    }
    if (valid) out.push_back(w);
  }
  return out;
}

}  // namespace detail

/// Horosphere principal part: boundary cluster points of near-boundary
/// members, sampled at the smallest grid radius and intersected over the
/// larger ones (the horospheres are nested, so the larger radii can only
/// confirm). On the ball-like models the R-independence of the boundary
/// trace is additionally verified.
inline ClusterSet principal_part_estimate(const Domain& d, const CPoint& x, const BoundaryClass& cls,
                                          const MetricConfig& cfg) {
  cfg.validate();
  ClusterSet out;
  const double radius = merge_radius(cfg);
  const double eta = std::max(cfg.tol, 1e-4);
  Rng rng = make_rng(cfg.seed, 0x2E);
  const double Rmin = cfg.r_grid.front();

  const auto collect = [&](double R, ClusterSet& dst, long count) {
    if (cls.form == BoundaryClass::Form::BidiscProduct) {
      const auto factors = detail::product_factors(cls.parts, x);
      for (const CPoint& w :
           detail::sample_product_members_near_boundary(factors, R, eta, rng, count)) {
        CPoint q = w;
        for (int j = 0; j < 2; ++j)
          if (1.0 - std::abs(w[j]) <= eta) q[j] = w[j] / std::abs(w[j]);
        detail::merge_into(dst, q, radius);
      }
      return;
    }
    if (cls.form == BoundaryClass::Form::DiscPoint) {
      const double base = disc_horocycle_value(cls.contact[0], x[0]);
      const auto [c, r] = disc_horosphere_closed_form(cls.contact[0], R * std::max(base, 1e-12));
      for (long it = 0; it < count; ++it) {
        const Complex w = c + r * uniform_disc_point(rng);
        detail::merge_into(dst, CPoint{w / std::abs(w)}, radius);
      }
      return;
    }
    if (cls.form == BoundaryClass::Form::BallPoint) {
      const double base = ball_horosphere_value(cls.contact, x);
      const double Reff = R * std::max(base, 1e-12);
      const double t = Reff / (1.0 + Reff);
      const CPoint c = (1.0 - t) * cls.contact;
      const double rr = std::sqrt(t * t + t);
      for (long it = 0; it < 8 * count; ++it) {
        CPoint w = c;
        for (int j = 0; j < d.dim(); ++j)
          w[j] += Complex(rr * uniform(rng, -1.0, 1.0), rr * uniform(rng, -1.0, 1.0));
        if (!d.contains(w) || ball_horosphere_value(cls.contact, w) >= Reff) continue;
        detail::merge_into(dst, d.nearest_boundary_point(w), radius);
      }
      return;
    }
    const auto members =
        detail::sample_horosphere_members(d, x, cls.representative, R, cfg, rng, count);
    for (const CPoint& w : members) {
      if (!d.is_bounded() && w.norm() > 1e6) {
        dst.escapes_to_infinity = true;
        continue;
      }
      if (d.boundary_distance(w) <= 10.0 * eta) detail::merge_into(dst, d.nearest_boundary_point(w), radius);
    }
  };

  collect(Rmin, out, std::max<long>(64, cfg.samples));

  // intersection over the remaining grid radii: candidates must reappear
  for (std::size_t k = 1; k < cfg.r_grid.size(); ++k) {
    ClusterSet larger;
    collect(cfg.r_grid[k], larger, std::max<long>(64, cfg.samples));
    std::vector<CPoint> kept;
    for (const CPoint& q : out.points)
      if (larger.contains_near(q, 4.0 * radius)) kept.push_back(q);
    out.points = std::move(kept);
  }

  if (out.points.empty() && !out.escapes_to_infinity)
    throw std::runtime_error("principal_part_estimate: empty sample (inconclusive)");
  return out;
}

// ---------------------------------------------------------------------------
// Bidisc topology triviality
// ---------------------------------------------------------------------------

struct TopologyCheckItem {
  std::string from;
  std::string to;
  bool ok = false;
  long worst_cutoff = 0;
};

struct TopologyReport {
  std::vector<TopologyCheckItem> items;
  bool all_ok = true;
};

/// Closure steps of the bidisc horosphere-topology triviality: constant
/// corner-class sequences converge to the face classes (A) and the face
/// classes swallow every corner through them (B, and C by the coordinate
/// swap). Each pair is verified through the grid with converges_H.
inline TopologyReport bidisc_topology_trivial_check(const MetricConfig& cfg,
                                                    const std::vector<Complex>& sample_points = {
                                                        Complex(1, 0), Complex(0, 1), Complex(-1, 0)}) {
  cfg.validate();
  const Domain d2 = Domain::polydisc(2);
  const CPoint x = CPoint::zero(2);
  TopologyReport report;

  const auto check = [&](const PointSequence& from, const PointSequence& to, std::string fname,
                         std::string tname) {
    const BoundaryClass cf = make_boundary_class(d2, x, from, cfg);
    const BoundaryClass ct = make_boundary_class(d2, x, to, cfg);
    const std::vector<BoundaryClass> constant(8, cf);
    const Verdict v = converges_H(d2, x, constant, ct, cfg);
    report.items.push_back({std::move(fname), std::move(tname), v.decision,
                            static_cast<long>(v.estimate)});
    report.all_ok = report.all_ok && v.decision;
  };

  for (Complex p1 : sample_points) {
    for (Complex p2 : sample_points) {
      const std::string w1 = "W1(" + std::to_string(std::arg(p1)) + "," + std::to_string(std::arg(p2)) + ")";
      // A: the corner class accumulates at both face classes
      check(PointSequence::bidisc_w1(p1, p2), PointSequence::bidisc_w2(p1), w1, "W2");
      check(PointSequence::bidisc_w1(p1, p2), PointSequence::bidisc_w3(p2), w1, "W3");
      // B: the face class accumulates at every corner through it
      check(PointSequence::bidisc_w2(p1), PointSequence::bidisc_w1(p1, p2), "W2", w1);
      // C: coordinate swap of B
      check(PointSequence::bidisc_w3(p2), PointSequence::bidisc_w1(p1, p2), "W3", w1);
    }
  }
  return report;
}

}  // namespace horokit
