#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "horokit/cpoint.hpp"

namespace horokit {

enum class DomainKind {
  UnitDisc,
  Polydisc,
  UnitBall,
  RealHalfSpace,
  SiegelH2,
  ParabolicConvex,
  SampledConvex,
};

inline const char* domain_kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::UnitDisc: return "UnitDisc";
    case DomainKind::Polydisc: return "Polydisc";
    case DomainKind::UnitBall: return "UnitBall";
    case DomainKind::RealHalfSpace: return "RealHalfSpace";
    case DomainKind::SiegelH2: return "SiegelH2";
    case DomainKind::ParabolicConvex: return "ParabolicConvex";
    case DomainKind::SampledConvex: return "SampledConvex";
  }
  return "?";
}

/// Support oracle of a convex body: unit direction in R^{2n} -> sup of the
/// real inner product over the body.
using SupportOracle = std::function<double(const std::vector<double>&)>;

namespace detail {

/// Real roots of a*t^3 + b*t^2 + c*t + d = 0 (a != 0), by depressed-cubic
/// trigonometric/Cardano formulas.
inline std::vector<double> real_cubic_roots(double a, double b, double c, double d) {
  const double p = (3.0 * a * c - b * b) / (3.0 * a * a);
  const double q = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
  const double shift = -b / (3.0 * a);
  std::vector<double> roots;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    roots.push_back(u + v + shift);
  } else if (p == 0.0 && q == 0.0) {
    roots.push_back(shift);
  } else {
    const double r = std::sqrt(-p * p * p / 27.0);
    const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
    const double m = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k) {
      roots.push_back(m * std::cos((phi + 2.0 * M_PI * k) / 3.0) + shift);
    }
  }
  // One Newton polish per root.
  for (double& t : roots) {
    for (int it = 0; it < 2; ++it) {
      const double f = ((a * t + b) * t + c) * t + d;
      const double fp = (3.0 * a * t + 2.0 * b) * t + c;
      if (fp != 0.0) t -= f / fp;
    }
  }
  return roots;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Tagged model-domain descriptor with membership and boundary-distance
/// services. All domains are open; membership is strict.
class Domain {
 public:
  static Domain unit_disc() { return Domain(DomainKind::UnitDisc, 1); }

  static Domain polydisc(int n) {
    if (n < 1) throw std::invalid_argument("polydisc: dim must be positive");
    return Domain(DomainKind::Polydisc, n);
  }

  static Domain unit_ball(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball: dim must be positive");
    return Domain(DomainKind::UnitBall, n);
  }

  /// {x in R^{2n} : normal . x < offset}; the normal is normalised here.
  static Domain real_half_space(std::vector<double> normal, double offset) {
    if (normal.empty() || normal.size() % 2 != 0)
      throw std::invalid_argument("real_half_space: normal must have even positive length");
    const double n2 = detail::norm(normal);
    if (n2 <= 0.0) throw std::invalid_argument("real_half_space: zero normal");
    for (double& v : normal) v /= n2;
    Domain d(DomainKind::RealHalfSpace, static_cast<int>(normal.size() / 2));
    d.normal_ = std::move(normal);
    d.offset_ = offset / n2;
    return d;
  }

  /// {(w1,w2) in C^2 : Re w1 > |w2|^2}, the unbounded realization of the ball.
  static Domain siegel_h2() { return Domain(DomainKind::SiegelH2, 2); }

  /// {(z1,z2) in C^2 : Re z1 > 2 (Re z2)^2}.
  static Domain parabolic_convex() { return Domain(DomainKind::ParabolicConvex, 2); }

  static Domain sampled_convex(int n, SupportOracle support) {
    if (n < 1) throw std::invalid_argument("sampled_convex: dim must be positive");
    if (!support) throw std::invalid_argument("sampled_convex: null support oracle");
    Domain d(DomainKind::SampledConvex, n);
    d.support_ = std::move(support);
    d.init_sample_directions();
    return d;
  }

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }

  // Every supported kind is convex (the polydisc included).
  bool is_convex() const { return true; }

  bool is_bounded() const {
    switch (kind_) {
      case DomainKind::UnitDisc:
      case DomainKind::Polydisc:
      case DomainKind::UnitBall:
      case DomainKind::SampledConvex:
        return true;
      default:
        return false;
    }
  }

  /// Canonical interior point: origin for circular domains, (1,0) for the
  /// Siegel domain and its parabolic image.
  CPoint center() const {
    switch (kind_) {
      case DomainKind::UnitDisc:
      case DomainKind::Polydisc:
      case DomainKind::UnitBall:
        return CPoint::zero(dim_);
      case DomainKind::SiegelH2:
      case DomainKind::ParabolicConvex:
        return CPoint{Complex(1.0, 0.0), Complex(0.0, 0.0)};
      case DomainKind::RealHalfSpace: {
        // offset point one unit inward along the normal
        std::vector<double> x(normal_.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (offset_ - 1.0) * normal_[i];
        return CPoint::from_real_coords(x);
      }
      case DomainKind::SampledConvex:
        return interior_point_;
    }
    throw std::logic_error("unreachable");
  }

  bool contains(const CPoint& z) const {
    check_dim(z);
    if (!z.is_finite()) return false;
    switch (kind_) {
      case DomainKind::UnitDisc:
        return std::abs(z[0]) < 1.0;
      case DomainKind::Polydisc: {
        for (int i = 0; i < dim_; ++i)
          if (std::abs(z[i]) >= 1.0) return false;
        return true;
      }
      case DomainKind::UnitBall:
        return z.norm_sq() < 1.0;
      case DomainKind::RealHalfSpace:
        return detail::dot(normal_, z.real_coords()) < offset_;
      case DomainKind::SiegelH2:
        return z[0].real() > std::norm(z[1]);
      case DomainKind::ParabolicConvex: {
        const double x2 = z[1].real();
        return z[0].real() > 2.0 * x2 * x2;
      }
      case DomainKind::SampledConvex: {
        const std::vector<double> x = z.real_coords();
        for (const auto& u : sample_dirs_) {
          if (detail::dot(u, x) >= support_(u)) return false;
        }
        return true;
      }
    }
    throw std::logic_error("unreachable");
  }

  /// Euclidean distance from an interior point to the topological boundary.
  double boundary_distance(const CPoint& z) const {
    if (!contains(z)) throw std::invalid_argument("boundary_distance: point outside domain");
    switch (kind_) {
      case DomainKind::UnitDisc:
        return 1.0 - std::abs(z[0]);
      case DomainKind::Polydisc: {
        double m = kInfinity;
        for (int i = 0; i < dim_; ++i) m = std::min(m, 1.0 - std::abs(z[i]));
        return m;
      }
      case DomainKind::UnitBall:
        return 1.0 - z.norm();
      case DomainKind::RealHalfSpace:
        return offset_ - detail::dot(normal_, z.real_coords());
      case DomainKind::SiegelH2:
        return siegel_boundary(z).second;
      case DomainKind::ParabolicConvex:
        return parabolic_boundary(z).second;
      case DomainKind::SampledConvex:
        return sampled_boundary_distance(z);
    }
    throw std::logic_error("unreachable");
  }

  /// Euclidean distance from z to the boundary within the complex line
  /// z + C v; +infinity when the line misses the boundary.
  double directional_boundary_distance(const CPoint& z, const CPoint& v) const {
    if (!contains(z)) throw std::invalid_argument("directional_boundary_distance: point outside domain");
    check_dim(v);
    const double vn = v.norm();
    if (vn == 0.0) throw std::invalid_argument("directional_boundary_distance: zero direction");
    switch (kind_) {
      case DomainKind::UnitDisc:
        return 1.0 - std::abs(z[0]);
      case DomainKind::Polydisc: {
        double m = kInfinity;
        for (int i = 0; i < dim_; ++i) {
          const double vi = std::abs(v[i]);
          if (vi > 0.0) m = std::min(m, (1.0 - std::abs(z[i])) / vi);
        }
        return m * vn;
      }
      case DomainKind::UnitBall: {
        const double a = std::abs(hermitian_inner(v, z));
        const double r = std::sqrt((1.0 - z.norm_sq()) * vn * vn + a * a);
        return (r - a) / vn;
      }
      case DomainKind::RealHalfSpace: {
        // Re(lambda * sigma(v)) = offset - n.x, sigma the C-linear functional
        // with real part n.
        const Complex sv = clinear_functional(normal_, v);
        const double gap = offset_ - detail::dot(normal_, z.real_coords());
        const double m = std::abs(sv);
        if (m == 0.0) return kInfinity;
        return gap * vn / m;
      }
      case DomainKind::SiegelH2:
      case DomainKind::ParabolicConvex:
        return line_distance_by_angle_scan(z, v);
      case DomainKind::SampledConvex:
        return line_distance_by_angle_scan(z, v);
    }
    throw std::logic_error("unreachable");
  }

  /// Nearest boundary point (any minimiser when not unique).
  CPoint nearest_boundary_point(const CPoint& z) const {
    switch (kind_) {
      case DomainKind::UnitDisc: {
        const Complex c = z[0];
        const double m = std::abs(c);
        return CPoint{m > 0.0 ? c / m : Complex(1.0, 0.0)};
      }
      case DomainKind::Polydisc: {
        CPoint q = z;
        int j = 0;
        double best = std::abs(z[0]);
        for (int i = 1; i < dim_; ++i) {
          if (std::abs(z[i]) > best) { best = std::abs(z[i]); j = i; }
        }
        q[j] = best > 0.0 ? z[j] / best : Complex(1.0, 0.0);
        return q;
      }
      case DomainKind::UnitBall: {
        const double m = z.norm();
        if (m == 0.0) {
          CPoint q = CPoint::zero(dim_);
          q[0] = Complex(1.0, 0.0);
          return q;
        }
        return (1.0 / m) * z;
      }
      case DomainKind::RealHalfSpace: {
        std::vector<double> x = z.real_coords();
        const double gap = offset_ - detail::dot(normal_, x);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += gap * normal_[i];
        return CPoint::from_real_coords(x);
      }
      case DomainKind::SiegelH2:
        return siegel_boundary(z).first;
      case DomainKind::ParabolicConvex:
        return parabolic_boundary(z).first;
      case DomainKind::SampledConvex:
        return sampled_nearest_boundary(z);
    }
    throw std::logic_error("unreachable");
  }

  /// Outward unit normal in R^{2n} at a boundary point (smooth kinds; for the
  /// polydisc the face of largest modulus is used).
  std::vector<double> outward_normal(const CPoint& q) const {
    switch (kind_) {
      case DomainKind::UnitDisc:
      case DomainKind::UnitBall: {
        std::vector<double> u = q.real_coords();
        const double n = detail::norm(u);
        if (n == 0.0) throw std::invalid_argument("outward_normal: origin is not a boundary point");
        for (double& v : u) v /= n;
        return u;
      }
      case DomainKind::Polydisc: {
        int j = 0;
        double best = std::abs(q[0]);
        for (int i = 1; i < dim_; ++i)
          if (std::abs(q[i]) > best) { best = std::abs(q[i]); j = i; }
        std::vector<double> u(2 * static_cast<std::size_t>(dim_), 0.0);
        const Complex c = q[j] / std::abs(q[j]);
        u[2 * static_cast<std::size_t>(j)] = c.real();
        u[2 * static_cast<std::size_t>(j) + 1] = c.imag();
        return u;
      }
      case DomainKind::RealHalfSpace:
        return normal_;
      case DomainKind::SiegelH2: {
        // gradient of |w2|^2 - Re w1
        std::vector<double> u{-1.0, 0.0, 2.0 * q[1].real(), 2.0 * q[1].imag()};
        const double n = detail::norm(u);
        for (double& v : u) v /= n;
        return u;
      }
      case DomainKind::ParabolicConvex: {
        // gradient of 2 (Re z2)^2 - Re z1
        std::vector<double> u{-1.0, 0.0, 4.0 * q[1].real(), 0.0};
        const double n = detail::norm(u);
        for (double& v : u) v /= n;
        return u;
      }
      case DomainKind::SampledConvex: {
        // direction whose supporting hyperplane is (nearly) active at q
        const std::vector<double> x = q.real_coords();
        double best = kInfinity;
        std::vector<double> arg;
        for (const auto& u : sample_dirs_) {
          const double slack = support_(u) - detail::dot(u, x);
          if (slack < best) { best = slack; arg = u; }
        }
        return arg;
      }
    }
    throw std::logic_error("unreachable");
  }

  /// Support value sup_{z in D} u . z for bounded kinds.
  double support(const std::vector<double>& u) const {
    if (u.size() != static_cast<std::size_t>(2 * dim_))
      throw std::invalid_argument("support: direction dimension mismatch");
    switch (kind_) {
      case DomainKind::UnitDisc:
      case DomainKind::UnitBall:
        return detail::norm(u);
      case DomainKind::Polydisc: {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
          s += std::hypot(u[2 * static_cast<std::size_t>(i)], u[2 * static_cast<std::size_t>(i) + 1]);
        return s;
      }
      case DomainKind::SampledConvex:
        return support_(u);
      default:
        throw std::logic_error("support: unbounded kind");
    }
  }

  /// The C-linear functional sigma with Re sigma(z) = u . real_coords(z).
  static Complex clinear_functional(const std::vector<double>& u, const CPoint& z) {
    Complex s(0.0, 0.0);
    for (int j = 0; j < z.dim(); ++j) {
      const Complex c(u[2 * static_cast<std::size_t>(j)], -u[2 * static_cast<std::size_t>(j) + 1]);
      s += c * z[j];
    }
    return s;
  }

 private:
  Domain(DomainKind k, int n) : kind_(k), dim_(n) {}

  void check_dim(const CPoint& z) const {
    if (z.dim() != dim_) throw std::invalid_argument("Domain: dimension mismatch");
  }

  // Nearest boundary point and distance for the Siegel domain. The imaginary
  // part of w1 is free along the boundary, so the problem reduces to
  // min_r (x - r^2)^2 + (|w2| - r)^2 with x = Re w1.
  std::pair<CPoint, double> siegel_boundary(const CPoint& w) const {
    const double x = w[0].real();
    const double rho = std::abs(w[1]);
    double best = kInfinity, rbest = 0.0;
    for (double r : detail::real_cubic_roots(2.0, 0.0, 1.0 - 2.0 * x, -rho)) {
      if (r < 0.0) continue;
      const double f = (x - r * r) * (x - r * r) + (rho - r) * (rho - r);
      if (f < best) { best = f; rbest = r; }
    }
    {  // r = 0 endpoint
      const double f = x * x + rho * rho;
      if (f < best) { best = f; rbest = 0.0; }
    }
    const Complex dir = rho > 0.0 ? w[1] / rho : Complex(1.0, 0.0);
    CPoint q{Complex(rbest * rbest, w[0].imag()), rbest * dir};
    return {q, std::sqrt(best)};
  }

  // Same reduction for {Re z1 > 2 (Re z2)^2}: both imaginary parts are free,
  // min_t (x1 - 2 t^2)^2 + (x2 - t)^2.
  std::pair<CPoint, double> parabolic_boundary(const CPoint& z) const {
    const double x1 = z[0].real();
    const double x2 = z[1].real();
    double best = kInfinity, tbest = 0.0;
    for (double t : detail::real_cubic_roots(8.0, 0.0, 1.0 - 4.0 * x1, -x2)) {
      const double f = (x1 - 2.0 * t * t) * (x1 - 2.0 * t * t) + (x2 - t) * (x2 - t);
      if (f < best) { best = f; tbest = t; }
    }
    CPoint q{Complex(2.0 * tbest * tbest, z[0].imag()), Complex(tbest, z[1].imag())};
    return {q, std::sqrt(best)};
  }

  double sampled_boundary_distance(const CPoint& z) const {
    const std::vector<double> x = z.real_coords();
    double best = kInfinity;
    for (const auto& u : sample_dirs_) best = std::min(best, support_(u) - detail::dot(u, x));
    return std::max(best, 0.0);
  }

  CPoint sampled_nearest_boundary(const CPoint& z) const {
    const std::vector<double> u = outward_normal(z);
    std::vector<double> x = z.real_coords();
    const double gap = support_(u) - detail::dot(u, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += gap * u[i];
    return CPoint::from_real_coords(x);
  }

  // Exit radius along the real ray z + r * e^{i theta} v, minimised over
  // theta. For the Siegel/parabolic kinds the per-angle exit solves a real
  // quadratic; for sampled bodies it uses the support constraints. A coarse
  // angular grid is refined by golden-section around the best angle.
  double line_distance_by_angle_scan(const CPoint& z, const CPoint& v) const {
    const auto exit_radius = [&](double theta) { return ray_exit_radius(z, v, theta); };
    const int kGrid = 64;
    double best = kInfinity, tbest = 0.0;
    for (int k = 0; k < kGrid; ++k) {
      const double th = 2.0 * M_PI * k / kGrid;
      const double r = exit_radius(th);
      if (r < best) { best = r; tbest = th; }
    }
    double lo = tbest - 2.0 * M_PI / kGrid, hi = tbest + 2.0 * M_PI / kGrid;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = exit_radius(c), fd = exit_radius(d);
    for (int it = 0; it < 48; ++it) {
      if (fc < fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = exit_radius(c); }
      else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = exit_radius(d); }
    }
    best = std::min({best, fc, fd});
    return best;
  }

  double ray_exit_radius(const CPoint& z, const CPoint& v, double theta) const {
    const Complex phase = std::polar(1.0, theta);
    if (kind_ == DomainKind::SiegelH2) {
      // Re(w1 + lambda v1) - |w2 + lambda v2|^2 = 0, lambda = r * phase
      const Complex v1 = phase * v[0], v2 = phase * v[1];
      const double a = -std::norm(v2);
      const double b = v1.real() - 2.0 * (std::conj(z[1]) * v2).real();
      const double c = z[0].real() - std::norm(z[1]);
      return positive_quadratic_root(a, b, c) * v.norm();
    }
    if (kind_ == DomainKind::ParabolicConvex) {
      const Complex v1 = phase * v[0], v2 = phase * v[1];
      const double p2 = v2.real();
      const double x2 = z[1].real();
      const double a = -2.0 * p2 * p2;
      const double b = v1.real() - 4.0 * x2 * p2;
      const double c = z[0].real() - 2.0 * x2 * x2;
      return positive_quadratic_root(a, b, c) * v.norm();
    }
    // SampledConvex: exit against the sampled supporting half-spaces.
    const std::vector<double> x = z.real_coords();
    std::vector<double> dir = (phase * v).real_coords();
    const double dn = detail::norm(dir);
    for (double& t : dir) t /= dn;
    double best = kInfinity;
    for (const auto& u : sample_dirs_) {
      const double den = detail::dot(u, dir);
      if (den > 0.0) best = std::min(best, (support_(u) - detail::dot(u, x)) / den);
    }
    return best;
  }

  // Smallest r > 0 with a r^2 + b r + c = 0 given c > 0; +infinity if the ray
  // never exits.
  static double positive_quadratic_root(double a, double b, double c) {
    if (a == 0.0) {
      if (b >= 0.0) return kInfinity;
      return -c / b;
    }
    const double disc = b * b - 4.0 * a * c;
    if (a < 0.0) {
      // parabola opens down, one positive root
      return (-b - std::sqrt(disc)) / (2.0 * a);
    }
    if (disc < 0.0) return kInfinity;
    const double s = std::sqrt(disc);
    const double r1 = (-b - s) / (2.0 * a);
    const double r2 = (-b + s) / (2.0 * a);
    double best = kInfinity;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
    return best;
  }

  void init_sample_directions() {
    // deterministic low-discrepancy directions on the unit sphere of R^{2n}
    const int n2 = 2 * dim_;
    const int count = 64 * n2;
    sample_dirs_.reserve(static_cast<std::size_t>(count));
    double state = 0.5;
    for (int k = 0; k < count; ++k) {
      std::vector<double> u(static_cast<std::size_t>(n2));
      double norm2 = 0.0;
      for (int j = 0; j < n2; ++j) {
        state = std::fmod(state + 0.6180339887498949 * (j + 1) + 0.3819660112501051 * (k + 1), 1.0);
        u[static_cast<std::size_t>(j)] = std::cos(2.0 * M_PI * state) *
                                         std::sqrt(-2.0 * std::log(std::max(1e-12, 1.0 - state * 0.999)));
        norm2 += u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)];
      }
      if (norm2 <= 0.0) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& t : u) t *= inv;
      sample_dirs_.push_back(std::move(u));
    }
    // Axis directions keep boxes and faces exact.
    for (int j = 0; j < n2; ++j) {
      std::vector<double> u(static_cast<std::size_t>(n2), 0.0);
      u[static_cast<std::size_t>(j)] = 1.0;
      sample_dirs_.push_back(u);
      u[static_cast<std::size_t>(j)] = -1.0;
      sample_dirs_.push_back(u);
    }
    // A deterministic interior point: the Chebyshev-ish center from the
    // sampled constraints, seeded from the support midpoint.
    std::vector<double> x(static_cast<std::size_t>(n2), 0.0);
    for (int j = 0; j < n2; ++j) {
      std::vector<double> up(static_cast<std::size_t>(n2), 0.0), dn(static_cast<std::size_t>(n2), 0.0);
      up[static_cast<std::size_t>(j)] = 1.0;
      dn[static_cast<std::size_t>(j)] = -1.0;
      x[static_cast<std::size_t>(j)] = 0.5 * (support_(up) - support_(dn));
    }
    interior_point_ = CPoint::from_real_coords(x);
  }

  DomainKind kind_;
  int dim_;
  std::vector<double> normal_;  // RealHalfSpace
  double offset_ = 0.0;         // RealHalfSpace
  SupportOracle support_;       // SampledConvex
  std::vector<std::vector<double>> sample_dirs_;
  CPoint interior_point_;
};

/// Support oracle of the convex hull of a finite vertex set.
inline SupportOracle hull_support(std::vector<CPoint> vertices) {
  std::vector<std::vector<double>> vs;
  vs.reserve(vertices.size());
  for (const CPoint& p : vertices) vs.push_back(p.real_coords());
  return [vs = std::move(vs)](const std::vector<double>& u) {
    double best = -kInfinity;
    for (const auto& v : vs) best = std::max(best, detail::dot(u, v));
    return best;
  };
}

/// Support oracle of a coordinate-aligned ellipsoid with the given semiaxes
/// (one per real coordinate).
inline SupportOracle ellipsoid_support(std::vector<double> semiaxes) {
  return [a = std::move(semiaxes)](const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += a[i] * a[i] * u[i] * u[i];
    return std::sqrt(s);
  };
}

}  // namespace horokit
