#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "horokit/cpoint.hpp"
#include "horokit/domain.hpp"

namespace horokit {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(seed * 0x9E3779B97F4A7C15ULL + stream + 1);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex uniform_disc_point(Rng& rng, double max_radius = 1.0) {
  const double r = max_radius * std::sqrt(uniform(rng, 0.0, 1.0));
  const double th = uniform(rng, 0.0, 2.0 * M_PI);
  return std::polar(r, th);
}

inline Complex uniform_circle_point(Rng& rng) { return std::polar(1.0, uniform(rng, 0.0, 2.0 * M_PI)); }

/// Interior sample. Bounded circular kinds are sampled uniformly (scaled by
/// max_radius to stay clear of the boundary when needed); unbounded kinds get
/// a Gaussian cloud around the canonical center, rejected into the domain.
inline CPoint sample_interior(const Domain& d, Rng& rng, double max_radius = 1.0) {
  switch (d.kind()) {
    case DomainKind::UnitDisc:
      return CPoint{uniform_disc_point(rng, max_radius)};
    case DomainKind::Polydisc: {
      CPoint p = CPoint::zero(d.dim());
      for (int i = 0; i < d.dim(); ++i) p[i] = uniform_disc_point(rng, max_radius);
      return p;
    }
    case DomainKind::UnitBall: {
      std::normal_distribution<double> g(0.0, 1.0);
      CPoint p = CPoint::zero(d.dim());
      double n2 = 0.0;
      for (int i = 0; i < d.dim(); ++i) {
        p[i] = Complex(g(rng), g(rng));
        n2 += std::norm(p[i]);
      }
      const double r = max_radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / (2.0 * d.dim()));
      return (r / std::sqrt(n2)) * p;
    }
    default: {
      std::normal_distribution<double> g(0.0, 1.0);
      const CPoint c = d.center();
      for (int tries = 0; tries < 4096; ++tries) {
        CPoint p = c;
        for (int i = 0; i < d.dim(); ++i) p[i] += Complex(0.5 * g(rng), 0.5 * g(rng));
        if (d.contains(p)) return p;
      }
      return c;
    }
  }
}

}  // namespace horokit
