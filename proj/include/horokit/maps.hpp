#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "horokit/automorphisms.hpp"
#include "horokit/boundary.hpp"
#include "horokit/horosphere.hpp"
#include "horokit/metric.hpp"

namespace horokit {

enum class MapKind { DiscAutomorphism, BallAutomorphism, Cayley2, SiegelToParabolic, Composite };

inline const char* map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::DiscAutomorphism: return "DiscAutomorphism";
    case MapKind::BallAutomorphism: return "BallAutomorphism";
    case MapKind::Cayley2: return "Cayley2";
    case MapKind::SiegelToParabolic: return "SiegelToParabolic";
    case MapKind::Composite: return "Composite";
  }
  return "?";
}

/// Explicit biholomorphism between model domains, with forward and inverse
/// evaluators. Supported atoms: disc automorphisms e^{i theta}(z-a)/(1-conj(a)z),
/// ball automorphisms (involution at a center followed by coordinate phases),
/// the Cayley map of the ball onto the Siegel domain, and the shear
/// (w1,w2) -> (w1+w2^2, w2) onto the parabolic model. Composites chain left
/// to right; inverse() reverses the chain.
class MapSpec {
 public:
  static MapSpec disc_automorphism(Complex a, double theta) {
    if (std::abs(a) >= 1.0) throw std::invalid_argument("disc_automorphism: |a| must be < 1");
    MapSpec m(MapKind::DiscAutomorphism, Domain::unit_disc(), Domain::unit_disc());
    m.a_ = CPoint{a};
    m.theta_ = theta;
    return m;
  }

  static MapSpec ball_automorphism(const CPoint& center, std::vector<double> phases) {
    const int n = center.dim();
    if (center.norm() >= 1.0) throw std::invalid_argument("ball_automorphism: center outside ball");
    if (phases.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("ball_automorphism: one phase per coordinate");
    MapSpec m(MapKind::BallAutomorphism, Domain::unit_ball(n), Domain::unit_ball(n));
    m.a_ = center;
    m.phases_ = std::move(phases);
    return m;
  }

  static MapSpec cayley2() { return MapSpec(MapKind::Cayley2, Domain::unit_ball(2), Domain::siegel_h2()); }

  static MapSpec siegel_to_parabolic() {
    return MapSpec(MapKind::SiegelToParabolic, Domain::siegel_h2(), Domain::parabolic_convex());
  }

  static MapSpec composite(std::vector<MapSpec> maps) {
    if (maps.empty()) throw std::invalid_argument("composite: empty chain");
    for (std::size_t i = 1; i < maps.size(); ++i) {
      if (maps[i].source().kind() != maps[i - 1].target().kind())
        throw std::invalid_argument("composite: domain chain mismatch");
    }
    MapSpec m(MapKind::Composite, maps.front().source(), maps.back().target());
    m.children_ = std::make_shared<std::vector<MapSpec>>(std::move(maps));
    return m;
  }

  MapSpec inverse() const {
    MapSpec m = *this;
    m.inverted_ = !m.inverted_;
    std::swap(m.source_, m.target_);
    return m;
  }

  const Domain& source() const { return source_; }
  const Domain& target() const { return target_; }
  MapKind kind() const { return kind_; }
  bool inverted() const { return inverted_; }
  const CPoint& center_param() const { return a_; }
  double theta_param() const { return theta_; }
  const std::vector<double>& phases_param() const { return phases_; }
  const std::vector<MapSpec>& children() const {
    if (!children_) throw std::logic_error("MapSpec: not a composite");
    return *children_;
  }

  CPoint forward(const CPoint& z) const { return inverted_ ? raw_backward(z) : raw_forward(z); }
  CPoint backward(const CPoint& w) const { return inverted_ ? raw_forward(w) : raw_backward(w); }

 private:
  MapSpec(MapKind k, Domain src, Domain dst) : kind_(k), source_(std::move(src)), target_(std::move(dst)) {}

  CPoint raw_forward(const CPoint& z) const {
    switch (kind_) {
      case MapKind::DiscAutomorphism:
        return CPoint{std::polar(1.0, theta_) * mobius_to_origin(a_[0], z[0])};
      case MapKind::BallAutomorphism: {
        CPoint w = ball_involution(a_, z);
        for (int j = 0; j < w.dim(); ++j) w[j] *= std::polar(1.0, phases_[static_cast<std::size_t>(j)]);
        return w;
      }
      case MapKind::Cayley2:
        return detail::ball_to_siegel(z);
      case MapKind::SiegelToParabolic:
        return detail::siegel_to_parabolic(z);
      case MapKind::Composite: {
        CPoint w = z;
        for (const MapSpec& m : *children_) w = m.forward(w);
        return w;
      }
    }
    throw std::logic_error("unreachable");
  }

  CPoint raw_backward(const CPoint& w) const {
    switch (kind_) {
      case MapKind::DiscAutomorphism:
        return CPoint{mobius_from_origin(a_[0], std::polar(1.0, -theta_) * w[0])};
      case MapKind::BallAutomorphism: {
        CPoint z = w;
        for (int j = 0; j < z.dim(); ++j) z[j] *= std::polar(1.0, -phases_[static_cast<std::size_t>(j)]);
        return ball_involution(a_, z);
      }
      case MapKind::Cayley2:
        return detail::siegel_to_ball(w);
      case MapKind::SiegelToParabolic:
        return detail::parabolic_to_siegel(w);
      case MapKind::Composite: {
        CPoint z = w;
        for (auto it = children_->rbegin(); it != children_->rend(); ++it) z = it->backward(z);
        return z;
      }
    }
    throw std::logic_error("unreachable");
  }

  MapKind kind_;
  Domain source_;
  Domain target_;
  bool inverted_ = false;
  CPoint a_ = CPoint::zero(1);
  double theta_ = 0.0;
  std::vector<double> phases_;
  std::shared_ptr<std::vector<MapSpec>> children_;
};

/// MapSpec contract check: the round trip must hold to 1e-10 on sampled
/// interior points and the map must preserve the invariant distance on
/// sampled pairs where both sides evaluate exactly.
inline Verdict validate_map(const MapSpec& F, const MetricConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, 0x3A);
  double worst_round = 0.0, worst_iso = 0.0;
  CPoint prev = F.source().center();
  for (long it = 0; it < 100; ++it) {
    const CPoint z = sample_interior(F.source(), rng, 0.9);
    const CPoint w = F.forward(z);
    if (!F.target().contains(w)) throw std::runtime_error("validate_map: image left the target domain");
    worst_round = std::max(worst_round, F.backward(w).distance_to(z));
    if (has_exact_distance(F.source()) && has_exact_distance(F.target())) {
      worst_iso = std::max(worst_iso,
                           std::abs(distance(F.target(), w, F.forward(prev)) - distance(F.source(), z, prev)));
    }
    prev = z;
  }
  Verdict v;
  v.tol = 1e-10;
  v.estimate = std::max(worst_round, worst_iso);
  v.margin = 1e-10 - v.estimate;
  v.converged = true;
  v.decision = worst_round < 1e-10 && worst_iso < 1e-9;
  return v;
}

// ---------------------------------------------------------------------------
// Pushforward of horospheres
// ---------------------------------------------------------------------------

/// Sampled check that w in E_x({u_n}, R) iff F(w) in E_{F(x)}({F(u_n)}, R):
/// pushed sequences generate pushed horospheres. Undecidable samples on
/// either side are excluded from the verdict.
inline Verdict pushforward_horosphere_check(const MapSpec& F, const Horosphere& h,
                                            const MetricConfig& cfg) {
  cfg.validate();
  if (h.domain.kind() != F.source().kind())
    throw std::invalid_argument("pushforward_horosphere_check: horosphere not on the source");
  const PointSequence pushed = PointSequence::custom(
      F.target(), [F, seq = h.seq](long n) { return F.forward(seq.at(n)); }, "pushforward");
  const Horosphere hF(F.target(), F.forward(h.base), pushed, h.radius);

  Rng rng = make_rng(cfg.seed, 0x4B);
  long agree = 0, total = 0;
  const TailClusters cl = cluster_tail_points(h.seq, cfg);
  for (long it = 0; it < cfg.samples; ++it) {
    CPoint w;
    if (!cl.points.empty() && it % 2 == 0) {
      const CPoint& p = cl.points[static_cast<std::size_t>(it / 2) % cl.points.size()];
      const double s = std::pow(0.5, 1.0 + uniform(rng, 0.0, 10.0));
      w = h.base + (1.0 - s) * (p - h.base);
      if (!h.domain.contains(w)) continue;
    } else {
      w = sample_interior(h.domain, rng, 0.95);
    }
    const Verdict src = horosphere_contains(h, w, cfg);
    if (!src.decided()) continue;
    const Verdict dst = horosphere_contains(hF, F.forward(w), cfg);
    if (!dst.decided()) continue;
    ++total;
    if (src.outcome() == dst.outcome()) ++agree;
  }
  Verdict v;
  v.tol = cfg.tol;
  v.estimate = total > 0 ? static_cast<double>(agree) / static_cast<double>(total) : 0.0;
  v.margin = v.estimate - 1.0;
  v.converged = total >= cfg.samples / 4;
  v.decision = v.converged && agree == total;
  return v;
}

// ---------------------------------------------------------------------------
// Cluster sets
// ---------------------------------------------------------------------------

enum class ProbeFilter { None, NonTangential, ELimit };

/// Cluster set Gamma(F;p): limits of F along probe families converging to p
/// in the source. NonTangential keeps the straight segment families only;
/// ELimit keeps probes that E-converge to the boundary class of p (disc,
/// ball and bidisc sources). Escape to infinity is data, not an error.
inline ClusterSet cluster_set(const MapSpec& F, const CPoint& p, const MetricConfig& cfg,
                              ProbeFilter filter = ProbeFilter::None) {
  cfg.validate();
  const Domain& src = F.source();
  ClusterSet out;
  const double radius = merge_radius(cfg);
  Rng rng = make_rng(cfg.seed, 0x5C);

  // probe families: straight segments from several interior anchors, plus
  // curved families with tangential second-order terms
  std::vector<std::function<CPoint(long)>> probes;
  std::vector<bool> straight;
  const CPoint c0 = src.center();
  probes.push_back([p, c0](long m) { return p + (1.0 / static_cast<double>(m)) * (c0 - p); });
  straight.push_back(true);
  for (int k = 0; k < 4; ++k) {
    const CPoint ck = sample_interior(src, rng, 0.6);
    probes.push_back([p, ck](long m) { return p + (1.0 / static_cast<double>(m)) * (ck - p); });
    straight.push_back(true);
  }
  for (int k = 0; k < 3; ++k) {
    const CPoint ck = sample_interior(src, rng, 0.6);
    const CPoint dk = sample_interior(src, rng, 0.3);
    probes.push_back([p, ck, dk](long m) {
      const double t = 1.0 / static_cast<double>(m);
      return p + t * (ck - p) + (std::sqrt(t) * 0.2) * (dk - ck);
    });
    straight.push_back(false);
  }

  std::optional<BoundaryClass> cls;
  if (filter == ProbeFilter::ELimit &&
      (src.kind() == DomainKind::UnitDisc || src.kind() == DomainKind::UnitBall ||
       (src.kind() == DomainKind::Polydisc && src.dim() == 2))) {
    cls = make_boundary_class(src, src.center(), PointSequence::radial(src, p), cfg);
  }

  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    if (filter == ProbeFilter::NonTangential && !straight[pi]) continue;
    // validity: probes must stay inside the source
    bool inside = true;
    for (long m : {2L, 16L, 256L, 65536L}) inside = inside && src.contains(probes[pi](m));
    if (!inside) continue;
    if (cls) {
      const PointSequence probe_seq = PointSequence::custom(src, probes[pi], "probe");
      if (!e_limit(src, src.center(), probe_seq, *cls, cfg).decision) continue;
    }
    // follow the image to its limit or to escape
    CPoint prev = F.forward(probes[pi](1024));
    bool settled = false;
    for (long m = 4096; m <= (1L << 22); m *= 4) {
      const CPoint cur = F.forward(probes[pi](m));
      if (cur.norm() > 1e6) {
        out.escapes_to_infinity = true;
        settled = true;
        break;
      }
      if (cur.distance_to(prev) < 1e-7) {
        detail::merge_into(out, cur, radius);
        settled = true;
        break;
      }
      prev = cur;
    }
    if (!settled) detail::merge_into(out, prev, radius);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic sets of convex boundaries
// ---------------------------------------------------------------------------

/// Ch(p): intersection of the complex supporting hyperplanes at p with the
/// closed domain, described by its vertex, the real directions spanning its
/// affine hull, and the sampled extent along each.
struct CharSet {
  CPoint vertex;
  std::vector<CPoint> directions;  // real directions with positive extent
  std::vector<double> extents;     // sampled extent along each direction
  bool singleton = true;
};

namespace detail {

inline bool contains_closure(const Domain& d, const CPoint& z, double tol) {
  if (d.contains(z)) return true;
  switch (d.kind()) {
    case DomainKind::UnitDisc: return std::abs(z[0]) <= 1.0 + tol;
    case DomainKind::Polydisc: {
      for (int i = 0; i < d.dim(); ++i)
        if (std::abs(z[i]) > 1.0 + tol) return false;
      return true;
    }
    case DomainKind::UnitBall: return z.norm() <= 1.0 + tol;
    case DomainKind::SiegelH2: return z[0].real() >= std::norm(z[1]) - tol;
    case DomainKind::ParabolicConvex: {
      const double x2 = z[1].real();
      return z[0].real() >= 2.0 * x2 * x2 - tol;
    }
    default: {
      CPoint inward = d.center() - z;
      const double n = inward.norm();
      if (n < tol) return true;
      return d.contains(z + (tol / n) * inward);
    }
  }
}

}  // namespace detail

inline CharSet char_set(const Domain& d, const CPoint& p, const MetricConfig& cfg) {
  cfg.validate();
  if (!d.is_convex()) throw std::invalid_argument("char_set: non-convex kind");
  if (d.contains(p)) throw std::invalid_argument("char_set: interior point passed");

  // supporting functionals: the outward normal at p, plus (on the polydisc)
  // one per unimodular coordinate
  std::vector<std::vector<double>> normals;
  if (d.kind() == DomainKind::Polydisc) {
    for (int j = 0; j < d.dim(); ++j) {
      if (std::abs(p[j]) >= 1.0 - 1e-9) {
        std::vector<double> u(2 * static_cast<std::size_t>(d.dim()), 0.0);
        const Complex c = p[j] / std::abs(p[j]);
        u[2 * static_cast<std::size_t>(j)] = c.real();
        u[2 * static_cast<std::size_t>(j) + 1] = c.imag();
        normals.push_back(std::move(u));
      }
    }
  } else {
    normals.push_back(d.outward_normal(p));
  }
  if (normals.empty()) throw std::invalid_argument("char_set: no supporting functional found");

  // joint complex kernel of the functionals sigma_i, by Gram-Schmidt over C
  std::vector<CPoint> sigma;
  for (const auto& u : normals) {
    CPoint s = CPoint::zero(d.dim());
    for (int j = 0; j < d.dim(); ++j)
      s[j] = Complex(u[2 * static_cast<std::size_t>(j)], -u[2 * static_cast<std::size_t>(j) + 1]);
    sigma.push_back(s);
  }
  std::vector<CPoint> kernel;
  for (int j = 0; j < d.dim(); ++j) {
    CPoint e = CPoint::zero(d.dim());
    e[j] = Complex(1.0, 0.0);
    for (const CPoint& s : sigma) {
      // project out the direction making sigma(e) nonzero: e -= <e, s*> s*/|s|^2
      CPoint sconj = s;
      for (int i2 = 0; i2 < d.dim(); ++i2) sconj[i2] = std::conj(s[i2]);
      const Complex coef = hermitian_inner(e, sconj) / hermitian_inner(sconj, sconj);
      e = e - coef * sconj;
    }
    for (const CPoint& k : kernel) {
      const Complex coef = hermitian_inner(e, k) / hermitian_inner(k, k);
      e = e - coef * k;
    }
    if (e.norm() > 1e-9) kernel.push_back((1.0 / e.norm()) * e);
  }

  CharSet out;
  out.vertex = p;
  const double scan_cap = 16.0;
  const double closure_tol = 1e-9;  // tight, so degenerate touch directions vanish
  for (const CPoint& k : kernel) {
    for (int re = 0; re < 2; ++re) {
      const CPoint dir = re == 0 ? k : Complex(0.0, 1.0) * k;
      double extent = 0.0;
      for (double sgn : {1.0, -1.0}) {
        double lo = 0.0, hi = scan_cap;
        if (detail::contains_closure(d, p + (sgn * hi) * dir, closure_tol)) {
          extent = std::max(extent, hi);
          continue;
        }
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (detail::contains_closure(d, p + (sgn * mid) * dir, closure_tol)) lo = mid;
          else hi = mid;
        }
        extent = std::max(extent, lo);
      }
      if (extent > 10.0 * cfg.tol) {
        out.directions.push_back(dir);
        out.extents.push_back(extent);
        out.singleton = false;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Denjoy-Wolff iteration
// ---------------------------------------------------------------------------

struct DenjoyWolffResult {
  ClusterSet targets;                 // merged boundary clusters over all starts
  std::vector<CPoint> per_start;      // terminal boundary projection per start
  Verdict invariance;                 // f(E) inside E on the orbit horospheres
  bool stagnation = false;            // orbit settled at an interior point
};

/// Iterate a fixed-point-free self-map from z0 and seeded alternates, collect
/// the orbit targets, and test the horosphere invariance f(E) subset E on the
/// orbit-generated sequence. An interior-converging orbit reports stagnation
/// (a violated precondition) instead of a target.
inline DenjoyWolffResult denjoy_wolff_iterate(const Domain& d, const MapSpec& f, const CPoint& z0,
                                              const MetricConfig& cfg, int starts = 5) {
  cfg.validate();
  if (f.source().kind() != d.kind() || f.target().kind() != d.kind())
    throw std::invalid_argument("denjoy_wolff_iterate: not a self-map of the domain");
  DenjoyWolffResult out;
  Rng rng = make_rng(cfg.seed, 0x7D);

  std::vector<CPoint> origins{z0};
  for (int s = 1; s < starts; ++s) origins.push_back(sample_interior(d, rng, 0.7));

  std::vector<CPoint> first_orbit;
  for (std::size_t s = 0; s < origins.size(); ++s) {
    CPoint z = origins[s];
    std::vector<CPoint>* record = s == 0 ? &first_orbit : nullptr;
    if (record) record->push_back(z);
    double gap = kInfinity;
    for (long k = 0; k < cfg.samples; ++k) {
      const CPoint next = f.forward(z);
      gap = next.distance_to(z);
      z = next;
      if (record && record->size() < 600000) record->push_back(z);
      if (gap < 1e-12) break;
    }
    // an orbit that never approached the boundary violates the fixed-point-
    // free precondition (or exhausted the budget); reported, not asserted
    const double delta = d.boundary_distance(z);
    if (delta > 10.0 * cfg.tol) {
      out.stagnation = true;
      continue;
    }
    const CPoint q = d.nearest_boundary_point(z);
    out.per_start.push_back(q);
    detail::merge_into(out.targets, q, merge_radius(cfg));
  }
  if (out.stagnation) {
    out.invariance.tol = cfg.tol;
    return out;
  }

  // invariance on the orbit-derived sequence
  const PointSequence orbit_seq = PointSequence::from_orbit(d, first_orbit, "orbit");
  Rng rng2 = make_rng(cfg.seed, 0x7E);
  long violations = 0, checked = 0;
  const CPoint x = d.center();
  for (double R : cfg.r_grid) {
    const Horosphere h(d, x, orbit_seq, R);
    for (long it = 0; it < std::max<long>(8, cfg.samples / 16); ++it) {
      const CPoint w = sample_interior(d, rng2, 0.97);
      const Verdict inw = horosphere_contains(h, w, cfg);
      if (inw.outcome() != Outcome::True) continue;
      ++checked;
      if (horosphere_contains(h, f.forward(w), cfg).outcome() == Outcome::False) ++violations;
    }
  }
  out.invariance.tol = cfg.tol;
  out.invariance.estimate = static_cast<double>(violations);
  out.invariance.margin = -static_cast<double>(violations);
  out.invariance.converged = checked > 0;
  out.invariance.decision = out.invariance.converged && violations == 0;
  return out;
}

}  // namespace horokit
