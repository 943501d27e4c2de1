#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "horokit/cpoint.hpp"
#include "horokit/domain.hpp"
#include "horokit/metric.hpp"
#include "horokit/sampling.hpp"
#include "horokit/sequence.hpp"

namespace horokit {

// ---------------------------------------------------------------------------
// Tail estimators
// ---------------------------------------------------------------------------

struct TailEstimate {
  double value = 0.0;
  bool converged = false;
  long window_start = 0;
  long window_len = 0;
  double last_delta = 0.0;  // movement across the final doubling
  double oscillation = 0.0; // max - min over the final window (limit mode)
};

namespace detail {

// Windowed running maximum over [N0 2^k, N0 2^k + L), k = 0,1,2. Converged
// when both doublings move the estimate by less than tol. A guarded Aitken
// step removes the O(1/n) tail bias when the window maxima decay
// geometrically; otherwise the last window value is reported as is.
template <class F>
TailEstimate limsup_windows(F&& f, const MetricConfig& cfg) {
  double e[3];
  for (int k = 0; k < 3; ++k) {
    const long n0 = cfg.tail_start << k;
    double m = -kInfinity;
    for (long j = 0; j < cfg.tail_len; ++j) m = std::max(m, f(n0 + j));
    e[k] = m;
  }
  const double d1 = e[1] - e[0], d2 = e[2] - e[1];
  TailEstimate out;
  out.value = e[2];
  if (d1 * d2 > 0.0 && std::abs(d2) < 0.9 * std::abs(d1) && std::abs(d2) > 0.02 * std::abs(d1)) {
    out.value = e[2] + d2 * d2 / (d1 - d2);
  }
  out.converged = std::abs(d1) < cfg.tol && std::abs(d2) < cfg.tol;
  out.window_start = cfg.tail_start << 2;
  out.window_len = cfg.tail_len;
  out.last_delta = d2;
  return out;
}

// Windowed limit: midpoint of the final window's range; convergence requires
// the in-window oscillation and both doubling movements to stay under tol.
template <class F>
TailEstimate limit_windows(F&& f, const MetricConfig& cfg) {
  double mid[3], osc[3];
  for (int k = 0; k < 3; ++k) {
    const long n0 = cfg.tail_start << k;
    double mx = -kInfinity, mn = kInfinity;
    for (long j = 0; j < cfg.tail_len; ++j) {
      const double v = f(n0 + j);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    mid[k] = 0.5 * (mx + mn);
    osc[k] = mx - mn;
  }
  const double d1 = mid[1] - mid[0], d2 = mid[2] - mid[1];
  TailEstimate out;
  out.value = mid[2];
  if (d1 * d2 > 0.0 && std::abs(d2) < 0.9 * std::abs(d1) && std::abs(d2) > 0.02 * std::abs(d1)) {
    out.value = mid[2] + d2 * d2 / (d1 - d2);
  }
  out.converged = osc[2] < cfg.tol && std::abs(d1) < cfg.tol && std::abs(d2) < cfg.tol;
  out.window_start = cfg.tail_start << 2;
  out.window_len = cfg.tail_len;
  out.last_delta = d2;
  out.oscillation = osc[2];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Outcome { True, False, Undecidable };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::True: return "true";
    case Outcome::False: return "false";
    case Outcome::Undecidable: return "undecidable";
  }
  return "?";
}

/// Diagnosed boolean for limsup-based decisions. For membership verdicts,
/// margin = threshold - estimate (positive means inside) and decision is true
/// only when the estimate clears the threshold by tol with a converged
/// window. halfwidth widens the undecidable band when the estimate itself is
/// only bracketed.
struct Verdict {
  bool decision = false;
  double estimate = 0.0;
  double margin = 0.0;
  bool converged = false;
  long window_start = 0;
  long window_len = 0;
  double tol = 0.0;
  double halfwidth = 0.0;

  Outcome outcome() const {
    if (!converged) return Outcome::Undecidable;
    if (margin > tol + halfwidth) return Outcome::True;
    if (margin < -(tol + halfwidth)) return Outcome::False;
    return Outcome::Undecidable;
  }
  bool decided() const { return outcome() != Outcome::Undecidable; }
};

inline Verdict make_verdict(const TailEstimate& e, double threshold, double tol, double halfwidth = 0.0) {
  Verdict v;
  v.estimate = e.value;
  v.margin = threshold - e.value;
  v.converged = e.converged;
  v.window_start = e.window_start;
  v.window_len = e.window_len;
  v.tol = tol;
  v.halfwidth = halfwidth;
  v.decision = v.converged && v.margin > tol + halfwidth;
  return v;
}

/// Cluster-merge radius used when finite samples stand in for closed sets.
inline double merge_radius(const MetricConfig& cfg) { return 10.0 * cfg.tol; }

// ---------------------------------------------------------------------------
// Horospheres
// ---------------------------------------------------------------------------

/// Sequence horosphere E_x({u_n}, R): sublevel set of
/// limsup_n [K(w, u_n) - K(x, u_n)] at threshold (1/2) log R.
struct Horosphere {
  Domain domain;
  CPoint base;
  PointSequence seq;
  double radius = 1.0;

  Horosphere(const Domain& d, CPoint x, PointSequence s, double R)
      : domain(d), base(std::move(x)), seq(std::move(s)), radius(R) {
    if (!(R > 0.0)) throw std::invalid_argument("Horosphere: radius must be positive");
    if (!domain.contains(base)) throw std::invalid_argument("Horosphere: base outside domain");
  }

  double threshold() const { return 0.5 * std::log(radius); }
};

/// Disc horocycle level value |p - z|^2 / (1 - |z|^2); membership in
/// E(p, R) is value < R.
inline double disc_horocycle_value(Complex p, Complex z) {
  return std::norm(p - z) / ((1.0 - std::abs(z)) * (1.0 + std::abs(z)));
}

/// Ball analogue |1 - <z,p>|^2 / (1 - |z|^2).
inline double ball_horosphere_value(const CPoint& p, const CPoint& z) {
  return std::norm(1.0 - hermitian_inner(z, p)) / (1.0 - z.norm_sq());
}

/// Euclidean (center, radius) of the disc horosphere at a unimodular point:
/// center p/(R+1), radius R/(R+1), internally tangent at p.
inline std::pair<Complex, double> disc_horosphere_closed_form(Complex p, double R) {
  if (std::abs(std::abs(p) - 1.0) > 1e-12)
    throw std::invalid_argument("disc_horosphere_closed_form: |p| must be 1");
  if (!(R > 0.0)) throw std::invalid_argument("disc_horosphere_closed_form: R must be positive");
  return {p / (R + 1.0), R / (R + 1.0)};
}

/// Membership of w in the horosphere, decided from the tail windows. Exact
/// distances are used where the kind has a closed form; SampledConvex falls
/// back to certified brackets and the verdict carries the bracket half-width.
inline Verdict horosphere_contains(const Horosphere& h, const CPoint& w, const MetricConfig& cfg) {
  cfg.validate();
  if (!h.domain.contains(w)) throw std::invalid_argument("horosphere_contains: point outside domain");
  const double thr = h.threshold();
  if (has_exact_distance(h.domain)) {
    const auto f = [&](long n) {
      const CPoint u = h.seq.at(n);
      return distance(h.domain, w, u) - distance(h.domain, h.base, u);
    };
    return make_verdict(detail::limsup_windows(f, cfg), thr, cfg.tol);
  }
  const auto hi = [&](long n) {
    const CPoint u = h.seq.at(n);
    return convex_distance_bounds(h.domain, w, u, cfg).upper -
           convex_distance_bounds(h.domain, h.base, u, cfg).lower;
  };
  const auto lo = [&](long n) {
    const CPoint u = h.seq.at(n);
    return convex_distance_bounds(h.domain, w, u, cfg).lower -
           convex_distance_bounds(h.domain, h.base, u, cfg).upper;
  };
  const TailEstimate ehi = detail::limsup_windows(hi, cfg);
  const TailEstimate elo = detail::limsup_windows(lo, cfg);
  TailEstimate mid;
  mid.value = 0.5 * (ehi.value + elo.value);
  mid.converged = ehi.converged && elo.converged;
  mid.window_start = ehi.window_start;
  mid.window_len = ehi.window_len;
  mid.last_delta = ehi.last_delta;
  return make_verdict(mid, thr, cfg.tol, 0.5 * (ehi.value - elo.value));
}

struct BusemannValue {
  double value = 0.0;
  bool converged = false;
  double oscillation = 0.0;
  long window_start = 0;
  long window_len = 0;
};

/// Windowed limit of K(z, u_n) - K(x, u_n). Non-convergence is data, not an
/// error; the oscillation over the final window is reported.
inline BusemannValue busemann_value(const Domain& d, const CPoint& x, const PointSequence& seq,
                                    const CPoint& z, const MetricConfig& cfg) {
  cfg.validate();
  if (!d.contains(z) || !d.contains(x)) throw std::invalid_argument("busemann_value: point outside domain");
  const auto f = [&](long n) {
    const CPoint u = seq.at(n);
    return distance(d, z, u) - distance(d, x, u);
  };
  const TailEstimate e = detail::limit_windows(f, cfg);
  return {e.value, e.converged, e.oscillation, e.window_start, e.window_len};
}

// ---------------------------------------------------------------------------
// Cluster detection
// ---------------------------------------------------------------------------

/// Euclidean cluster representatives of the sequence tail, merged at the
/// standard radius. escapes reports points drifting beyond any bound (only
/// possible on unbounded domains).
struct TailClusters {
  std::vector<CPoint> points;
  std::vector<std::vector<long>> indices;  // sampled indices per cluster
  bool escapes_to_infinity = false;
};

inline TailClusters cluster_tail_points(const PointSequence& seq, const MetricConfig& cfg) {
  TailClusters out;
  const double radius = merge_radius(cfg);
  std::vector<CPoint> reps;
  std::vector<std::vector<long>> members;
  std::vector<long> sizes;
  const auto visit = [&](long n) {
    const CPoint u = seq.at(n);
    if (u.norm() > 1e6) {
      out.escapes_to_infinity = true;
      return;
    }
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (reps[c].distance_to(u) <= radius) {
        // running mean keeps the representative near the cluster limit
        reps[c] = (1.0 / (sizes[c] + 1.0)) * (static_cast<double>(sizes[c]) * reps[c] + u);
        members[c].push_back(n);
        ++sizes[c];
        return;
      }
    }
    reps.push_back(u);
    members.push_back({n});
    sizes.push_back(1);
  };
  // the last window dominates; earlier windows only refine cluster identity
  for (int k = 2; k >= 0; --k) {
    const long n0 = cfg.tail_start << k;
    for (long j = 0; j < cfg.tail_len; ++j) visit(n0 + j);
  }
  // deep refinement: slowly approaching sequences may not have reached their
  // limit inside the windows, so follow the tail far beyond them and replace
  // each representative by the deepest point assigned to it
  long deep = (cfg.tail_start << 2) + cfg.tail_len;
  for (int k = 0; k < 14 && deep < 500000000L; ++k) {
    deep *= 4;
    for (long n : {deep, deep + 1}) {
      const CPoint u = seq.at(n);
      if (u.norm() > 1e6) {
        out.escapes_to_infinity = true;
        continue;
      }
      std::size_t best = reps.size();
      double bd = 4.0 * radius;
      for (std::size_t c = 0; c < reps.size(); ++c) {
        const double dist = reps[c].distance_to(u);
        if (dist < bd) { bd = dist; best = c; }
      }
      if (best < reps.size()) reps[best] = u;
    }
  }
  out.points = std::move(reps);
  out.indices = std::move(members);
  return out;
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

namespace detail {

// Sound emptiness certificates from closed forms. Only a certified true
// emptiness is returned; absence of a certificate proves nothing.
inline bool horosphere_certified_empty(const Domain& d, const TailClusters& clusters, double R,
                                       const MetricConfig& cfg) {
  const double slack = merge_radius(cfg);
  if (d.kind() == DomainKind::UnitDisc) {
    // E(seq,R) lies in every cluster horodisc; separated tangency points give
    // disjoint horodiscs when |p-q| > 2R.
    for (std::size_t i = 0; i < clusters.points.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.points.size(); ++j) {
        const Complex p = clusters.points[i][0] / std::abs(clusters.points[i][0]);
        const Complex q = clusters.points[j][0] / std::abs(clusters.points[j][0]);
        if (std::abs(p - q) > 2.0 * R + slack) return true;
      }
    }
    return false;
  }
  if (d.kind() == DomainKind::Polydisc) {
    // per-coordinate: two clusters with separated unimodular limits in the
    // same coordinate force disjoint factors for small R
    for (int coord = 0; coord < d.dim(); ++coord) {
      std::vector<Complex> tangencies;
      for (const CPoint& c : clusters.points) {
        if (std::abs(c[coord]) > 1.0 - slack) tangencies.push_back(c[coord] / std::abs(c[coord]));
      }
      for (std::size_t i = 0; i < tangencies.size(); ++i)
        for (std::size_t j = i + 1; j < tangencies.size(); ++j)
          if (std::abs(tangencies[i] - tangencies[j]) > 2.0 * R + slack) return true;
    }
    return false;
  }
  if (d.kind() == DomainKind::UnitBall) {
    // E(p,R) sits inside the Euclidean ball of center (1-t)p, radius
    // sqrt(t^2+t), t = R/(1+R)
    const double t = R / (1.0 + R);
    const double r = std::sqrt(t * t + t);
    for (std::size_t i = 0; i < clusters.points.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.points.size(); ++j) {
        const CPoint p = (1.0 / clusters.points[i].norm()) * clusters.points[i];
        const CPoint q = (1.0 / clusters.points[j].norm()) * clusters.points[j];
        if ((1.0 - t) * p.distance_to(q) > 2.0 * r + slack) return true;
      }
    }
    return false;
  }
  return false;
}

}  // namespace detail

/// Admissibility: (i) K(x, u_n) escapes over the tail, (ii) every radius of
/// the grid admits a witness point. The witness search follows the cone
/// regions toward each cluster point, with pull-backs of the sequence points
/// themselves as a fallback. decision=false with converged=true only under a
/// closed-form emptiness certificate; a fruitless search alone reports
/// inconclusive (converged=false).
inline Verdict is_admissible(const Domain& d, const CPoint& x, const PointSequence& seq,
                             const MetricConfig& cfg) {
  cfg.validate();
  if (!d.contains(x)) throw std::invalid_argument("is_admissible: base outside domain");

  Verdict v;
  v.tol = cfg.tol;
  v.window_start = cfg.tail_start << 2;
  v.window_len = cfg.tail_len;

  // (i) escape
  double wmin[3];
  for (int k = 0; k < 3; ++k) {
    const long n0 = cfg.tail_start << k;
    double m = kInfinity;
    for (long j = 0; j < cfg.tail_len; ++j) m = std::min(m, distance(d, x, seq.at(n0 + j)));
    wmin[k] = m;
  }
  const bool escapes = wmin[1] > wmin[0] && wmin[2] > wmin[1] && wmin[2] > 1.5;
  if (!escapes) {
    v.decision = false;
    v.converged = wmin[2] < 1.5 && std::abs(wmin[2] - wmin[0]) < cfg.tol;  // certainly bounded
    v.estimate = wmin[2];
    v.margin = -1.0;
    return v;
  }

  const TailClusters clusters = cluster_tail_points(seq, cfg);

  // Witness anchors: the cluster points, plus (on the polydisc) the combined
  // corner assembled coordinatewise from the unimodular cluster limits; the
  // intersection of the subsequence horospheres accumulates there.
  std::vector<CPoint> anchors = clusters.points;
  if (d.kind() == DomainKind::Polydisc && clusters.points.size() > 1) {
    CPoint combined = CPoint::zero(d.dim());
    for (int j = 0; j < d.dim(); ++j) {
      for (const CPoint& p : clusters.points) {
        if (std::abs(p[j]) > std::abs(combined[j])) combined[j] = p[j];
      }
    }
    anchors.push_back(combined);
  }

  long witnessed = 0;
  bool certified_failure = false;
  double worst_margin = kInfinity;
  for (double R : cfg.r_grid) {
    const Horosphere h(d, x, seq, R);
    bool found = false;
    // A candidate at boundary depth s only sees its tail limit once the
    // window indices pass ~1/s, so the window start adapts to the depth. A
    // witness is accepted when the (extrapolated) estimate clears the
    // threshold either within tol with converged windows, or by a wide
    // margin while the windows are still settling.
    const auto try_point = [&](const CPoint& z, double depth) {
      if (found || !d.contains(z)) return;
      MetricConfig local = cfg;
      if (depth > 0.0) {
        const double want = 256.0 / depth;
        local.tail_start = std::max<long>(cfg.tail_start,
                                          static_cast<long>(std::min(want, 1048576.0)));
      }
      const Verdict m = horosphere_contains(h, z, local);
      if (m.decision || m.margin > 0.3) {
        found = true;
        worst_margin = std::min(worst_margin, m.margin);
      }
    };
    for (const CPoint& p : anchors) {
      for (int k = 1; k <= 22 && !found; ++k) {
        const double s = std::pow(0.5, k);
        try_point(x + (1.0 - s) * (p - x), s);
      }
    }
    if (!found) {
      const long probes[] = {cfg.tail_start, cfg.tail_start + cfg.tail_len / 2, 2 * cfg.tail_start,
                             4 * cfg.tail_start};
      for (long n : probes) {
        for (double tau : {0.5, 0.25, 0.1, 0.05}) {
          try_point(seq.at(n) + tau * (x - seq.at(n)), 0.0);
          if (found) break;
        }
        if (found) break;
      }
    }
    if (found) {
      ++witnessed;
    } else if (detail::horosphere_certified_empty(d, clusters, R, cfg)) {
      certified_failure = true;
      break;
    }
  }

  v.estimate = static_cast<double>(witnessed);
  v.margin = static_cast<double>(witnessed) - static_cast<double>(cfg.r_grid.size());
  if (certified_failure) {
    v.decision = false;
    v.converged = true;
    return v;
  }
  if (witnessed == static_cast<long>(cfg.r_grid.size())) {
    v.decision = true;
    v.converged = true;
    return v;
  }
  v.decision = false;
  v.converged = false;  // inconclusive: no witness, no certificate
  return v;
}

// ---------------------------------------------------------------------------
// Bidisc classification
// ---------------------------------------------------------------------------

/// Limsup ratio parameters of a bidisc sequence converging to the boundary,
/// with the face/corner trichotomy. T values may be 0 or +infinity; the
/// membership rule below uses only min(1, T), which makes those ends exact.
struct BidiscClass {
  enum class Case { FaceZ1, FaceZ2, Corner };
  Case kind = Case::Corner;
  Complex p1{1.0, 0.0};
  Complex p2{1.0, 0.0};
  double T1 = 1.0;
  double T2 = 1.0;
  bool converged = true;

  const char* case_name() const {
    switch (kind) {
      case Case::FaceZ1: return "FaceZ1";
      case Case::FaceZ2: return "FaceZ2";
      case Case::Corner: return "Corner";
    }
    return "?";
  }
};

namespace detail {

// Trend-resolved limsup of a positive ratio sequence: geometric growth across
// the doublings reads as +infinity, geometric decay as 0.
template <class F>
std::pair<double, bool> ratio_limsup(F&& f, const MetricConfig& cfg) {
  double e[3];
  for (int k = 0; k < 3; ++k) {
    const long n0 = cfg.tail_start << k;
    double m = 0.0;
    for (long j = 0; j < cfg.tail_len; ++j) m = std::max(m, f(n0 + j));
    e[k] = m;
  }
  if (e[0] > 0.0 && e[1] > 1.4 * e[0] && e[2] > 1.4 * e[1]) return {kInfinity, true};
  if (e[1] < 0.75 * e[0] && e[2] < 0.75 * e[1] && e[2] < 0.5) return {0.0, true};
  const bool stable = std::abs(e[2] - e[1]) < cfg.tol * (1.0 + std::abs(e[1])) &&
                      std::abs(e[1] - e[0]) < cfg.tol * (1.0 + std::abs(e[0]));
  // Aitken on a geometric tail sharpens finite limits.
  const double d1 = e[1] - e[0], d2 = e[2] - e[1];
  double val = e[2];
  if (d1 * d2 > 0.0 && std::abs(d2) < 0.9 * std::abs(d1) && std::abs(d2) > 0.02 * std::abs(d1))
    val = e[2] + d2 * d2 / (d1 - d2);
  return {val, stable};
}

}  // namespace detail

namespace detail {

BidiscClass bidisc_classify_at(const PointSequence& seq, const CPoint& limit, const MetricConfig& cfg);

}  // namespace detail

/// Classify a convergent bidisc sequence. Throws when the tail does not
/// converge to a single boundary point (use canonical_form_bidisc then).
inline BidiscClass bidisc_classify(const PointSequence& seq, const MetricConfig& cfg) {
  cfg.validate();
  if (seq.domain().kind() != DomainKind::Polydisc || seq.domain().dim() != 2)
    throw std::invalid_argument("bidisc_classify: sequence must live in Polydisc(2)");
  const TailClusters clusters = cluster_tail_points(seq, cfg);
  if (clusters.points.size() != 1)
    throw std::invalid_argument("bidisc_classify: non-convergent sequence; reduce to canonical form instead");
  return detail::bidisc_classify_at(seq, clusters.points[0], cfg);
}

namespace detail {

/// Face/corner classification against a known boundary limit; used directly
/// on cluster subsequences, whose limit the parent clustering already
/// refined (re-walking a lazily indexed subsequence into the deep tail would
/// be quadratic).
inline BidiscClass bidisc_classify_at(const PointSequence& seq, const CPoint& limit,
                                      const MetricConfig& cfg) {
  const double m1 = std::abs(limit[0]), m2 = std::abs(limit[1]);
  const double slack = merge_radius(cfg);
  if (std::max(m1, m2) < 1.0 - slack)
    throw std::invalid_argument("bidisc_classify: sequence does not reach the boundary");

  BidiscClass cls;
  if (m1 >= 1.0 - slack && m2 < 1.0 - slack) {
    cls.kind = BidiscClass::Case::FaceZ1;
    cls.p1 = limit[0] / m1;
    cls.p2 = limit[1];
    cls.T1 = 0.0;
    cls.T2 = kInfinity;
    return cls;
  }
  if (m2 >= 1.0 - slack && m1 < 1.0 - slack) {
    cls.kind = BidiscClass::Case::FaceZ2;
    cls.p1 = limit[0];
    cls.p2 = limit[1] / m2;
    cls.T1 = kInfinity;
    cls.T2 = 0.0;
    return cls;
  }
  cls.kind = BidiscClass::Case::Corner;
  cls.p1 = limit[0] / m1;
  cls.p2 = limit[1] / m2;
  const auto ratio = [&](long n) {
    const CPoint u = seq.at(n);
    const double a = (1.0 - std::abs(u[0])) * (1.0 + std::abs(u[0]));
    const double b = (1.0 - std::abs(u[1])) * (1.0 + std::abs(u[1]));
    return a / b;
  };
  const auto [t1, c1] = detail::ratio_limsup(ratio, cfg);
  const auto [t2, c2] = detail::ratio_limsup([&](long n) { return 1.0 / ratio(n); }, cfg);
  cls.T1 = t1;
  cls.T2 = t2;
  cls.converged = c1 && c2;
  return cls;
}

}  // namespace detail

/// Limsup value (1/2) log max(...) of the classified membership rule.
inline double bidisc_limsup_value(const BidiscClass& cls, const CPoint& w) {
  const double r1 = disc_horocycle_value(cls.p1, w[0]);
  const double r2 = disc_horocycle_value(cls.p2, w[1]);
  switch (cls.kind) {
    case BidiscClass::Case::FaceZ1:
      return 0.5 * std::log(r1);
    case BidiscClass::Case::FaceZ2:
      return 0.5 * std::log(r2);
    case BidiscClass::Case::Corner: {
      const double s1 = std::min(1.0, cls.T2);
      const double s2 = std::min(1.0, cls.T1);
      return 0.5 * std::log(std::max(r1 * s1, r2 * s2));
    }
  }
  throw std::logic_error("unreachable");
}

inline bool bidisc_member(const BidiscClass& cls, const CPoint& w, double R) {
  return bidisc_limsup_value(cls, w) < 0.5 * std::log(R);
}

// ---------------------------------------------------------------------------
// Canonical form on the bidisc
// ---------------------------------------------------------------------------

struct CanonicalBidisc {
  PointSequence representative;
  Verdict verdict;  // sampled mutual-inclusion check diagnostics
};

namespace detail {

struct CoordConstraint {
  bool constrained = false;
  Complex p{0.0, 0.0};
  double scale = 0.0;  // effective min(1,T) factor
};

// Per-cluster subsequence built from proximity assignment; indices are
// resolved lazily and memoized so the tail estimators can address any k.
inline PointSequence cluster_subsequence(const PointSequence& seq, const CPoint& rep, double radius) {
  struct State {
    std::vector<long> map;
    long scanned = 0;
  };
  auto st = std::make_shared<State>();
  return PointSequence::custom(
      seq.domain(),
      [seq, rep, radius, st](long k) {
        while (static_cast<long>(st->map.size()) < k) {
          ++st->scanned;
          if (st->scanned > 100000000L) throw std::runtime_error("cluster_subsequence: index overflow");
          if (seq.at(st->scanned).distance_to(rep) <= 4.0 * radius) st->map.push_back(st->scanned);
        }
        return seq.at(st->map[static_cast<std::size_t>(k) - 1]);
      },
      "cluster-subsequence");
}

}  // namespace detail

namespace detail {

/// Classified convergent subsequences, one per tail cluster; the horospheres
/// of the full sequence are the intersection of the parts' horospheres.
inline std::vector<BidiscClass> bidisc_parts(const PointSequence& seq, const MetricConfig& cfg) {
  const TailClusters clusters = cluster_tail_points(seq, cfg);
  if (clusters.points.empty()) throw std::invalid_argument("bidisc_parts: empty tail");
  std::vector<BidiscClass> parts;
  for (const CPoint& rep : clusters.points) {
    if (clusters.points.size() == 1) {
      parts.push_back(detail::bidisc_classify_at(seq, rep, cfg));
    } else {
      const PointSequence sub = detail::cluster_subsequence(seq, rep, merge_radius(cfg));
      parts.push_back(detail::bidisc_classify_at(sub, rep, cfg));
    }
  }
  return parts;
}

/// min(1,T) weights of a classified part, per coordinate.
inline std::pair<double, double> part_scales(const BidiscClass& cls) {
  const double s1 = cls.kind == BidiscClass::Case::FaceZ1   ? 1.0
                    : cls.kind == BidiscClass::Case::FaceZ2 ? 0.0
                                                            : std::min(1.0, cls.T2);
  const double s2 = cls.kind == BidiscClass::Case::FaceZ2   ? 1.0
                    : cls.kind == BidiscClass::Case::FaceZ1 ? 0.0
                                                            : std::min(1.0, cls.T1);
  return {s1, s2};
}

}  // namespace detail

/// Tail limsup of K(w,u_n) - K(x,u_n) for a sequence with classified parts,
/// from the closed forms: max over parts of the rebased part value.
inline double bidisc_parts_limsup_value(const std::vector<BidiscClass>& parts, const CPoint& x,
                                        const CPoint& w) {
  double v = -kInfinity;
  for (const BidiscClass& cls : parts)
    v = std::max(v, bidisc_limsup_value(cls, w) - bidisc_limsup_value(cls, x));
  return v;
}

/// Reduce an admissible bidisc sequence to its unique canonical
/// representative among the three model families, via the per-subsequence
/// closed forms and the subsequence-intersection law; the verdict carries a
/// sampled agreement check between the estimator membership and the reduced
/// closed-form rule.
inline CanonicalBidisc canonical_form_bidisc(const PointSequence& seq, const MetricConfig& cfg) {
  cfg.validate();
  if (seq.domain().kind() != DomainKind::Polydisc || seq.domain().dim() != 2)
    throw std::invalid_argument("canonical_form_bidisc: sequence must live in Polydisc(2)");

  detail::CoordConstraint cc[2];
  bool all_converged = true;
  const std::vector<BidiscClass> parts = detail::bidisc_parts(seq, cfg);
  for (const BidiscClass& cls : parts) {
    all_converged = all_converged && cls.converged;
    const auto [s1, s2] = detail::part_scales(cls);
    const auto apply = [&](int j, Complex p, double s) {
      if (s <= 0.0) return;
      if (cc[j].constrained && std::abs(cc[j].p - p) > merge_radius(cfg))
        throw std::invalid_argument("canonical_form_bidisc: incompatible subsequence tangencies (not admissible)");
      cc[j].constrained = true;
      cc[j].p = p;
      cc[j].scale = std::max(cc[j].scale, s);
    };
    apply(0, cls.p1, s1);
    apply(1, cls.p2, s2);
  }

  PointSequence rep;
  if (cc[0].constrained && cc[1].constrained)
    rep = PointSequence::bidisc_w1(cc[0].p / std::abs(cc[0].p), cc[1].p / std::abs(cc[1].p));
  else if (cc[0].constrained)
    rep = PointSequence::bidisc_w2(cc[0].p / std::abs(cc[0].p));
  else if (cc[1].constrained)
    rep = PointSequence::bidisc_w3(cc[1].p / std::abs(cc[1].p));
  else
    throw std::invalid_argument("canonical_form_bidisc: no constrained coordinate (not admissible)");

  // Sampled check: estimator membership for seq against the intersection rule
  // of the detected parts, on a spread of radii.
  Rng rng = make_rng(cfg.seed, 0xCA);
  const CPoint x = CPoint::zero(2);
  long agree = 0, total = 0;
  const double radii[] = {0.25, 1.0, 4.0};
  for (double R : radii) {
    const Horosphere h(seq.domain(), x, seq, R);
    for (long s = 0; s < std::max<long>(8, cfg.samples / 8); ++s) {
      const CPoint w = sample_interior(seq.domain(), rng, 0.97);
      const Verdict est = horosphere_contains(h, w, cfg);
      if (!est.decided()) continue;
      bool rule = true;
      for (const BidiscClass& cls : parts) rule = rule && bidisc_member(cls, w, R);
      ++total;
      if (rule == (est.outcome() == Outcome::True)) ++agree;
    }
  }
  Verdict v;
  v.tol = cfg.tol;
  v.estimate = total > 0 ? static_cast<double>(agree) / static_cast<double>(total) : 0.0;
  v.margin = v.estimate - 0.99;
  v.converged = all_converged && total > 0;
  v.decision = v.converged && v.margin >= 0.0;
  v.window_start = cfg.tail_start << 2;
  v.window_len = cfg.tail_len;
  return {rep, v};
}

// ---------------------------------------------------------------------------
// Equivalence and rebasing
// ---------------------------------------------------------------------------

namespace detail {

/// Rejection-sample points whose membership verdict in E_x(seq, R) is a
/// decided yes.
inline std::vector<CPoint> sample_horosphere_members(const Domain& d, const CPoint& x,
                                                     const PointSequence& seq, double R,
                                                     const MetricConfig& cfg, Rng& rng, long want) {
  std::vector<CPoint> out;
  const Horosphere h(d, x, seq, R);
  const TailClusters cl = cluster_tail_points(seq, cfg);
  long attempts = 0;
  const long cap = 64 * want;
  while (static_cast<long>(out.size()) < want && attempts < cap) {
    ++attempts;
    CPoint w;
    if (!cl.points.empty() && attempts % 2 == 0) {
      // bias half the draws toward the cluster points, where members live
      const CPoint& p = cl.points[static_cast<std::size_t>(attempts / 2) % cl.points.size()];
      const double s = std::pow(0.5, 1.0 + uniform(rng, 0.0, 18.0));
      w = x + (1.0 - s) * (p - x);
      for (int i = 0; i < d.dim(); ++i) w[i] += Complex(s * 0.2 * uniform(rng, -1.0, 1.0),
                                                        s * 0.2 * uniform(rng, -1.0, 1.0));
      if (!d.contains(w)) continue;
    } else {
      w = sample_interior(d, rng, 0.98);
    }
    if (horosphere_contains(h, w, cfg).decision) out.push_back(w);
  }
  return out;
}

}  // namespace detail

/// Mutual horosphere inclusion up to radius rescaling. Canonical reductions
/// decide the disc, the ball and the bidisc exactly; other inputs go through
/// the sampled R' search over a geometric grid spanning [R*1e-4, R*1e4].
inline Verdict sequences_equivalent(const Domain& d, const CPoint& x, const PointSequence& a,
                                    const PointSequence& b, const MetricConfig& cfg) {
  cfg.validate();
  Verdict v;
  v.tol = cfg.tol;
  v.window_start = cfg.tail_start << 2;
  v.window_len = cfg.tail_len;

  if (d.kind() == DomainKind::UnitDisc || d.kind() == DomainKind::UnitBall) {
    const TailClusters ca = cluster_tail_points(a, cfg);
    const TailClusters cb = cluster_tail_points(b, cfg);
    if (ca.points.size() == 1 && cb.points.size() == 1) {
      const double gap = ca.points[0].distance_to(cb.points[0]);
      v.decision = gap <= merge_radius(cfg);
      v.converged = true;
      v.estimate = gap;
      v.margin = merge_radius(cfg) - gap;
      return v;
    }
  }
  if (d.kind() == DomainKind::Polydisc && d.dim() == 2) {
    const CanonicalBidisc na = canonical_form_bidisc(a, cfg);
    const CanonicalBidisc nb = canonical_form_bidisc(b, cfg);
    bool same = na.representative.family() == nb.representative.family();
    if (same) {
      const auto& pa = na.representative.params()[0];
      const auto& pb = nb.representative.params()[0];
      same = pa.distance_to(pb) <= merge_radius(cfg);
    }
    v.decision = same;
    v.converged = na.verdict.converged && nb.verdict.converged;
    v.estimate = same ? 1.0 : 0.0;
    v.margin = same ? 1.0 : -1.0;
    return v;
  }

  // Sampled search: for each R find R' with E(a,R') inside E(b,R), and
  // symmetrically. Diagnostics: estimate = fraction of directed checks that
  // found an R'.
  Rng rng = make_rng(cfg.seed, 0xEE);
  long ok = 0, total = 0;
  bool any_undecided = false;
  const auto directed = [&](const PointSequence& from, const PointSequence& to, double R) {
    const Horosphere target(d, x, to, R);
    for (int k = -4; k <= 4; ++k) {
      const double rp = R * std::pow(10.0, k);
      const auto members = detail::sample_horosphere_members(d, x, from, rp, cfg, rng,
                                                             std::max<long>(6, cfg.samples / 16));
      if (members.empty()) continue;
      bool all_in = true;
      for (const CPoint& w : members) {
        const Verdict m = horosphere_contains(target, w, cfg);
        if (m.outcome() == Outcome::False) { all_in = false; break; }
        if (!m.decided()) any_undecided = true;
      }
      if (all_in) return true;
    }
    return false;
  };
  for (double R : cfg.r_grid) {
    total += 2;
    if (directed(a, b, R)) ++ok;
    if (directed(b, a, R)) ++ok;
  }
  v.decision = ok == total;
  v.converged = !any_undecided;
  v.estimate = total > 0 ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
  v.margin = v.estimate - 1.0;
  return v;
}

struct RebaseFactors {
  double alpha = 1.0;
  double beta = 1.0;
  bool converged = true;
  Verdict inclusion_check;
};

/// Base-point change factors: E_y(alpha R) inside E_x(R) inside E_y(beta R),
/// with (1/2) log beta = limsup [K(x,u_n) - K(y,u_n)] and
/// (1/2) log alpha = -limsup [K(y,u_n) - K(x,u_n)]. Both halves are bounded
/// by K(x,y) in absolute value. Non-converged windows widen the factors by
/// the observed movement, which keeps the inclusions valid.
inline RebaseFactors rebase_factors(const Domain& d, const CPoint& x, const CPoint& y,
                                    const PointSequence& seq, const MetricConfig& cfg) {
  cfg.validate();
  if (!d.contains(x) || !d.contains(y)) throw std::invalid_argument("rebase_factors: base outside domain");
  const auto fb = [&](long n) {
    const CPoint u = seq.at(n);
    return distance(d, x, u) - distance(d, y, u);
  };
  const auto fa = [&](long n) {
    const CPoint u = seq.at(n);
    return distance(d, y, u) - distance(d, x, u);
  };
  const TailEstimate eb = detail::limsup_windows(fb, cfg);
  const TailEstimate ea = detail::limsup_windows(fa, cfg);
  RebaseFactors out;
  double half_log_beta = eb.value;
  double half_log_alpha = -ea.value;
  out.converged = ea.converged && eb.converged;
  if (!eb.converged) half_log_beta += std::abs(eb.last_delta) + cfg.tol;
  if (!ea.converged) half_log_alpha -= std::abs(ea.last_delta) + cfg.tol;
  const double k = distance(d, x, y);
  half_log_beta = std::clamp(half_log_beta, -k, k);
  half_log_alpha = std::clamp(half_log_alpha, -k, k);
  out.beta = std::exp(2.0 * half_log_beta);
  out.alpha = std::exp(2.0 * half_log_alpha);

  // sampled inclusion checks at each grid radius
  Rng rng = make_rng(cfg.seed, 0xAB);
  long violations = 0, checked = 0;
  for (double R : cfg.r_grid) {
    const auto inner = detail::sample_horosphere_members(d, y, seq, out.alpha * R, cfg, rng,
                                                         std::max<long>(4, cfg.samples / 32));
    const Horosphere hx(d, x, seq, R);
    for (const CPoint& w : inner) {
      ++checked;
      if (horosphere_contains(hx, w, cfg).outcome() == Outcome::False) ++violations;
    }
    const auto mid = detail::sample_horosphere_members(d, x, seq, R, cfg, rng,
                                                       std::max<long>(4, cfg.samples / 32));
    const Horosphere hy(d, y, seq, out.beta * R);
    for (const CPoint& w : mid) {
      ++checked;
      if (horosphere_contains(hy, w, cfg).outcome() == Outcome::False) ++violations;
    }
  }
  Verdict ic;
  ic.tol = cfg.tol;
  ic.estimate = static_cast<double>(violations);
  ic.margin = -static_cast<double>(violations);
  ic.converged = checked > 0;
  ic.decision = ic.converged && violations == 0;
  out.inclusion_check = ic;
  return out;
}

}  // namespace horokit
