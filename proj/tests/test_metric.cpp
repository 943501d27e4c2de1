#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "horokit/domain.hpp"
#include "horokit/metric.hpp"
#include "horokit/sampling.hpp"

using namespace horokit;

namespace {

// Brute-force boundary distance over a dense boundary sample, the independent
// oracle for the constrained-minimisation implementations.
double siegel_boundary_distance_brute(const CPoint& w) {
  double best = kInfinity;
  for (int i = 0; i <= 400; ++i) {
    const double r = 3.0 * i / 400.0;
    for (int j = 0; j <= 200; ++j) {
      const double phi = 2.0 * M_PI * j / 200.0;
      for (int k = -60; k <= 60; ++k) {
        const double y1 = w[0].imag() + k * 0.05;
        const CPoint q{Complex(r * r, y1), std::polar(r, phi)};
        best = std::min(best, (w - q).norm());
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("membership basics") {
  const Domain disc = Domain::unit_disc();
  CHECK(disc.contains(CPoint{Complex(0.0, 0.0)}));
  CHECK_FALSE(disc.contains(CPoint{Complex(1.0, 0.0)}));

  const Domain par = Domain::parabolic_convex();
  CHECK(par.contains(CPoint{Complex(1.0, 0.0), Complex(0.5, 0.0)}));  // 1 > 2*(0.5)^2
  CHECK_FALSE(par.contains(CPoint{Complex(0.5, 0.0), Complex(0.5, 0.0)}));

  CHECK_THROWS_AS(disc.contains(CPoint{Complex(0, 0), Complex(0, 0)}), std::invalid_argument);

  // canonical centers are interior
  for (const Domain& d : {Domain::unit_disc(), Domain::polydisc(2), Domain::unit_ball(3),
                          Domain::siegel_h2(), Domain::parabolic_convex()}) {
    CHECK(d.contains(d.center()));
  }
}

TEST_CASE("convexity of membership under segment sampling") {
  Rng rng = make_rng(7);
  for (const Domain& d : {Domain::unit_ball(2), Domain::siegel_h2(), Domain::parabolic_convex()}) {
    for (int it = 0; it < 50; ++it) {
      const CPoint a = sample_interior(d, rng);
      const CPoint b = sample_interior(d, rng);
      for (double t : {0.25, 0.5, 0.75}) {
        CHECK(d.contains(a + t * (b - a)));
      }
    }
  }
}

TEST_CASE("boundary distances") {
  CHECK(Domain::unit_disc().boundary_distance(CPoint{Complex(0, 0)}) == Catch::Approx(1.0));
  CHECK(Domain::unit_ball(2).boundary_distance(CPoint{Complex(0.6, 0), Complex(0, 0)}) ==
        Catch::Approx(0.4));

  const CPoint w{Complex(1.0, 0.0), Complex(0.0, 0.0)};
  const double d = Domain::siegel_h2().boundary_distance(w);
  CHECK(d == Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
  CHECK(d == Catch::Approx(siegel_boundary_distance_brute(w)).margin(2e-3));

  // parabolic: cross-check against a dense parabola sample
  const Domain par = Domain::parabolic_convex();
  const CPoint z{Complex(1.0, 0.3), Complex(0.4, -0.2)};
  double brute = kInfinity;
  for (int i = -4000; i <= 4000; ++i) {
    const double t = i / 1000.0;
    const double dx = 1.0 - 2.0 * t * t, dy = 0.4 - t;
    brute = std::min(brute, std::hypot(dx, dy));
  }
  CHECK(par.boundary_distance(z) == Catch::Approx(brute).margin(1e-5));
}

TEST_CASE("directional boundary distances") {
  CHECK(Domain::unit_disc().directional_boundary_distance(CPoint{Complex(0, 0)}, CPoint{Complex(1, 0)}) ==
        Catch::Approx(1.0));
  // second coordinate unconstrained on this line
  CHECK(Domain::polydisc(2).directional_boundary_distance(
            CPoint{Complex(0, 0), Complex(0, 0)}, CPoint{Complex(1, 0), Complex(0, 0)}) ==
        Catch::Approx(1.0));
  const Domain hs = Domain::real_half_space({1, 0, 0, 0}, 1.0);  // {Re z1 < 1}
  CHECK(hs.directional_boundary_distance(CPoint{Complex(0, 0), Complex(0, 0)},
                                         CPoint{Complex(1, 0), Complex(0, 0)}) == Catch::Approx(1.0));
  // line parallel to the boundary misses it
  CHECK(hs.directional_boundary_distance(CPoint{Complex(0, 0), Complex(0, 0)},
                                         CPoint{Complex(0, 0), Complex(1, 0)}) == kInfinity);
  CHECK_THROWS_AS(Domain::unit_disc().directional_boundary_distance(CPoint{Complex(0, 0)},
                                                                    CPoint{Complex(0, 0)}),
                  std::invalid_argument);

  // polydisc line distance agrees with a 1-D root find on the line
  const Domain d2 = Domain::polydisc(2);
  Rng rng = make_rng(12);
  for (int it = 0; it < 25; ++it) {
    const CPoint z = sample_interior(d2, rng, 0.8);
    CPoint v{Complex(uniform(rng, -1, 1), uniform(rng, -1, 1)),
             Complex(uniform(rng, -1, 1), uniform(rng, -1, 1))};
    if (v.norm() < 0.1) continue;
    const double got = d2.directional_boundary_distance(z, v);
    double brute = kInfinity;
    for (int a = 0; a < 720; ++a) {
      const Complex phase = std::polar(1.0, M_PI * a / 360.0);
      double lo = 0.0, hi = 8.0;
      for (int b = 0; b < 60; ++b) {
        const double m = 0.5 * (lo + hi);
        if (d2.contains(z + m * (phase * (1.0 / v.norm()) * v))) lo = m; else hi = m;
      }
      brute = std::min(brute, lo);
    }
    CHECK(got == Catch::Approx(brute).margin(2e-3));
  }
}

TEST_CASE("disc distance closed form and normalization") {
  CHECK(disc_distance(Complex(0, 0), Complex(0.5, 0)) == Catch::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  // K(0,r) = (1/2) log((1+r)/(1-r))
  for (double r : {0.1, 0.5, 0.9, 0.999}) {
    CHECK(disc_distance(0.0, r) == Catch::Approx(0.5 * std::log((1 + r) / (1 - r))).epsilon(1e-13));
  }
  // identity of indiscernibles, symmetry
  Rng rng = make_rng(3);
  for (int it = 0; it < 200; ++it) {
    const Complex z = uniform_disc_point(rng, 0.999);
    const Complex w = uniform_disc_point(rng, 0.999);
    CHECK(disc_distance(z, z) == 0.0);
    CHECK(disc_distance(z, w) == Catch::Approx(disc_distance(w, z)).margin(1e-14));
  }
}

TEST_CASE("Moebius invariance to 1e-12") {
  Rng rng = make_rng(4);
  for (int it = 0; it < 100; ++it) {
    const Complex a = uniform_disc_point(rng, 0.9);
    const double th = uniform(rng, 0.0, 2 * M_PI);
    const Complex z = uniform_disc_point(rng, 0.99);
    const Complex w = uniform_disc_point(rng, 0.99);
    const auto phi = [&](Complex s) { return std::polar(1.0, th) * mobius_to_origin(a, s); };
    CHECK(std::abs(disc_distance(phi(z), phi(w)) - disc_distance(z, w)) < 1e-12);
  }
}

TEST_CASE("polydisc product law and triangle inequality") {
  const Domain d2 = Domain::polydisc(2);
  Rng rng = make_rng(5);
  for (int it = 0; it < 100; ++it) {
    const CPoint z = sample_interior(d2, rng, 0.99);
    const CPoint w = sample_interior(d2, rng, 0.99);
    const CPoint y = sample_interior(d2, rng, 0.99);
    const double k = distance(d2, z, w);
    CHECK(k == std::max(disc_distance(z[0], w[0]), disc_distance(z[1], w[1])));
    CHECK(k <= distance(d2, z, y) + distance(d2, y, w) + 1e-12);
  }
  const CPoint z0{Complex(0, 0), Complex(0, 0)};
  const CPoint w0{Complex(0.5, 0), Complex(0, 0.3)};
  CHECK(distance(d2, z0, w0) == Catch::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("ball distance agrees with disc on slices and with automorphism pullback") {
  const Domain b2 = Domain::unit_ball(2);
  for (double r : {0.3, 0.8, 0.99}) {
    CHECK(distance(b2, CPoint::zero(2), CPoint{Complex(r, 0), Complex(0, 0)}) ==
          Catch::Approx(0.5 * std::log((1 + r) / (1 - r))).epsilon(1e-12));
  }
}

TEST_CASE("half space distance via disc reduction") {
  const Domain hs = Domain::real_half_space({1, 0}, 1.0);  // {Re z < 1} in C
  CHECK(distance(hs, CPoint{Complex(0, 0)}, CPoint{Complex(0.9, 0)}) ==
        Catch::Approx(0.5 * std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("siegel and parabolic distances are isometric to the ball") {
  const Domain b2 = Domain::unit_ball(2);
  const Domain sg = Domain::siegel_h2();
  const Domain pb = Domain::parabolic_convex();
  Rng rng = make_rng(6);
  for (int it = 0; it < 50; ++it) {
    const CPoint z = sample_interior(b2, rng, 0.9);
    const CPoint w = sample_interior(b2, rng, 0.9);
    const CPoint zs = detail::ball_to_siegel(z), ws = detail::ball_to_siegel(w);
    REQUIRE(sg.contains(zs));
    CHECK(distance(sg, zs, ws) == Catch::Approx(distance(b2, z, w)).margin(1e-11));
    const CPoint zp = detail::siegel_to_parabolic(zs), wp = detail::siegel_to_parabolic(ws);
    REQUIRE(pb.contains(zp));
    CHECK(distance(pb, zp, wp) == Catch::Approx(distance(b2, z, w)).margin(1e-11));
  }
}

TEST_CASE("convex distance bounds bracket the closed forms") {
  const MetricConfig cfg;
  const Domain disc = Domain::unit_disc();
  const CPoint z{Complex(0, 0)};
  const CPoint w{Complex(0.9, 0)};
  const auto b = convex_distance_bounds(disc, z, w, cfg);
  const double truth = 0.5 * std::log(19.0);
  CHECK(b.lower >= 0.5 * std::log(10.0) - 1e-9);  // supporting half-space at 1
  CHECK(b.lower <= truth + 1e-9);
  CHECK(b.upper >= truth - 1e-9);

  CHECK(convex_distance_bounds(disc, z, z, cfg).upper == 0.0);

  const Domain d2 = Domain::polydisc(2);
  const auto b2 = convex_distance_bounds(d2, CPoint{Complex(0, 0), Complex(0, 0)},
                                         CPoint{Complex(0.5, 0), Complex(0, 0)}, cfg);
  const double t2 = 0.5 * std::log(3.0);
  CHECK(b2.lower <= t2 + 1e-9);
  CHECK(b2.upper >= t2 - 1e-9);

  Rng rng = make_rng(8);
  for (const Domain& d : {Domain::unit_disc(), Domain::unit_ball(2), Domain::parabolic_convex()}) {
    for (int it = 0; it < 20; ++it) {
      const CPoint a = sample_interior(d, rng, 0.95);
      const CPoint c = sample_interior(d, rng, 0.95);
      const auto bb = convex_distance_bounds(d, a, c, cfg);
      const double truth2 = distance(d, a, c);
      CHECK(bb.lower <= truth2 + 1e-9);
      CHECK(bb.upper >= truth2 - 1e-9);
      CHECK(bb.lower <= bb.upper);
    }
  }
}

TEST_CASE("upper bound functional is quasi-convex under refinement") {
  // if U(x,z) <= c and U(x,w) <= c then U(x, midpoint) <= c + tol
  const MetricConfig cfg;
  Rng rng = make_rng(9);
  for (const Domain& d : {Domain::unit_disc(), Domain::unit_ball(2), Domain::parabolic_convex()}) {
    const CPoint x = d.center();
    for (int it = 0; it < 15; ++it) {
      const CPoint z = sample_interior(d, rng, 0.9);
      const CPoint w = sample_interior(d, rng, 0.9);
      const double uz = convex_distance_bounds(d, x, z, cfg).upper;
      const double uw = convex_distance_bounds(d, x, w, cfg).upper;
      const double um = convex_distance_bounds(d, x, midpoint(z, w), cfg).upper;
      CHECK(um <= std::max(uz, uw) + cfg.tol);
    }
  }
}

TEST_CASE("quasi-convexity of the exact distance on convex kinds") {
  Rng rng = make_rng(10);
  for (const Domain& d : {Domain::unit_disc(), Domain::unit_ball(2), Domain::siegel_h2(),
                          Domain::parabolic_convex()}) {
    const CPoint x = d.center();
    for (int it = 0; it < 40; ++it) {
      const CPoint z = sample_interior(d, rng, 0.95);
      const CPoint w = sample_interior(d, rng, 0.95);
      const double c = std::max(distance(d, x, z), distance(d, x, w));
      CHECK(distance(d, x, midpoint(z, w)) <= c + 1e-10);
    }
  }
}

TEST_CASE("boundary estimates") {
  const Domain disc = Domain::unit_disc();
  CHECK(boundary_estimate_upper(disc, CPoint{Complex(0.5, 0)}, CPoint{Complex(0.5, 0)}) == 0.0);
  CHECK(boundary_estimate_upper(disc, CPoint{Complex(0.9, 0)}, CPoint{Complex(0.99, 0)}) ==
        Catch::Approx(0.5 * std::log(10.0) + 0.5 * std::log(1.9)).epsilon(1e-12));

  // disc: K(0,z) + (1/2) log delta(z) stays bounded (tends to (1/2) log 2)
  for (int k = 1; k <= 12; ++k) {
    const double delta = std::pow(10.0, -k);
    const CPoint z{Complex(1.0 - delta, 0)};
    const double defect = disc_distance(0.0, 1.0 - delta) - boundary_estimate_lower(disc, CPoint{Complex(0, 0)}, z);
    CHECK(std::abs(defect - 0.5 * std::log(2.0 - delta)) < 1e-9);
    CHECK(defect < 0.5 * std::log(2.0) + 1e-9);
  }

  // ball: same bounded-defect check along a radius, by rotation invariance
  const Domain b3 = Domain::unit_ball(3);
  const CPoint x0 = CPoint::zero(3);
  double sup_defect = -kInfinity;
  for (int k = 1; k <= 10; ++k) {
    CPoint z = CPoint::zero(3);
    z[0] = Complex(1.0 - std::pow(10.0, -k), 0.0);
    sup_defect = std::max(sup_defect, distance(b3, x0, z) + 0.5 * std::log(b3.boundary_distance(z)));
  }
  CHECK(sup_defect < 0.5 * std::log(2.0) + 1e-9);

  // ball: sup over sampled near-boundary pairs of K - upper estimate is
  // finite and stable under refinement toward the boundary point (1,0)
  const Domain b2 = Domain::unit_ball(2);
  Rng rng = make_rng(11);
  const auto batch_sup = [&](double scale) {
    double sup = -kInfinity;
    for (int it = 0; it < 200; ++it) {
      CPoint z{Complex(1.0 - scale * uniform(rng, 0.2, 1.0), scale * uniform(rng, -0.3, 0.3)),
               Complex(scale * uniform(rng, -0.3, 0.3), scale * uniform(rng, -0.3, 0.3))};
      CPoint w{Complex(1.0 - scale * uniform(rng, 0.2, 1.0), scale * uniform(rng, -0.3, 0.3)),
               Complex(scale * uniform(rng, -0.3, 0.3), scale * uniform(rng, -0.3, 0.3))};
      if (!b2.contains(z) || !b2.contains(w)) continue;
      sup = std::max(sup, distance(b2, z, w) - boundary_estimate_upper(b2, z, w));
    }
    return sup;
  };
  const double coarse = batch_sup(1e-2);
  const double fine = batch_sup(1e-4);
  CHECK(std::isfinite(coarse));
  CHECK(std::isfinite(fine));
  CHECK(fine <= coarse + 1.0);  // stable: no blow-up as delta -> 0 at desk scale
}

TEST_CASE("sampled convex support services") {
  // axis-aligned square [-1,1]^2 in C as a hull oracle
  const Domain sq = Domain::sampled_convex(
      1, hull_support({CPoint{Complex(1, 1)}, CPoint{Complex(1, -1)}, CPoint{Complex(-1, 1)},
                       CPoint{Complex(-1, -1)}}));
  CHECK(sq.contains(CPoint{Complex(0.5, 0.5)}));
  CHECK_FALSE(sq.contains(CPoint{Complex(1.5, 0.0)}));
  CHECK(sq.boundary_distance(CPoint{Complex(0.0, 0.0)}) == Catch::Approx(1.0).margin(1e-6));
  CHECK(sq.boundary_distance(CPoint{Complex(0.5, 0.0)}) == Catch::Approx(0.5).margin(1e-6));
}
