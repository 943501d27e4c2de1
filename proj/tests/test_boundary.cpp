#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "horokit/boundary.hpp"

using namespace horokit;

namespace {

MetricConfig quick_cfg() {
  MetricConfig cfg;
  cfg.tail_start = 512;
  cfg.tail_len = 64;
  cfg.tol = 1e-3;
  cfg.r_grid = {0.05, 0.25, 1.0, 5.0};
  cfg.samples = 96;
  cfg.seed = 43;
  return cfg;
}

}  // namespace

TEST_CASE("boundary classes and closed-form membership") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};
  const BoundaryClass cls = make_boundary_class(disc, x, PointSequence::radial(disc, CPoint{Complex(1, 0)}), cfg);
  CHECK(cls.form == BoundaryClass::Form::DiscPoint);
  CHECK(cls.contact.distance_to(CPoint{Complex(1, 0)}) < 1e-6);

  // closed-form value equals the busemann oracle
  const auto v = class_limsup_value(cls, x, CPoint{Complex(0.5, 0)});
  REQUIRE(v.has_value());
  CHECK(*v == Catch::Approx(0.5 * std::log(1.0 / 3.0)).margin(1e-6));

  // four-point cluster sequences are rejected
  const PointSequence four = PointSequence::custom(disc, [](long n) {
    const Complex dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return CPoint{(1.0 - 1.0 / static_cast<double>(n)) * dirs[n % 4]};
  });
  CHECK_THROWS_AS(make_boundary_class(disc, x, four, cfg), std::invalid_argument);
}

TEST_CASE("converges_H on the disc") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};
  const auto radial_class = [&](double theta) {
    return make_boundary_class(disc, x, PointSequence::radial(disc, CPoint{std::polar(1.0, theta)}), cfg);
  };
  const BoundaryClass target = radial_class(0.0);

  // constant list converges to itself
  CHECK(converges_H(disc, x, std::vector<BoundaryClass>(6, target), target, cfg).decision);

  // tangency angles shrinking to 0 converge; angles toward pi/2 do not
  std::vector<BoundaryClass> toward, away;
  for (int m = 1; m <= 24; ++m) {
    toward.push_back(radial_class(1.2 / m));
    away.push_back(radial_class(M_PI / 2.0 * m / 24.0));
  }
  CHECK(converges_H(disc, x, toward, target, cfg).decision);
  const Verdict bad = converges_H(disc, x, away, target, cfg);
  CHECK_FALSE(bad.decision);
  CHECK(bad.converged);  // certified by the closed-form disjointness
}

TEST_CASE("converges_H bidisc closure step A") {
  const MetricConfig cfg = quick_cfg();
  const Domain d2 = Domain::polydisc(2);
  const CPoint x = CPoint::zero(2);
  const BoundaryClass corner = make_boundary_class(d2, x, PointSequence::bidisc_w1(Complex(1, 0), Complex(1, 0)), cfg);
  const BoundaryClass face = make_boundary_class(d2, x, PointSequence::bidisc_w2(Complex(1, 0)), cfg);
  CHECK(converges_H(d2, x, std::vector<BoundaryClass>(6, corner), face, cfg).decision);
}

TEST_CASE("e_limit") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};
  const BoundaryClass target = make_boundary_class(disc, x, PointSequence::radial(disc, CPoint{Complex(1, 0)}), cfg);

  // radial approach E-converges
  const PointSequence radial2 = PointSequence::custom(disc, [](long n) {
    return CPoint{Complex(1.0 - 1.0 / static_cast<double>(n), 0)};
  });
  CHECK(e_limit(disc, x, radial2, target, cfg).decision);

  // tangential approach along the internally tangent circle of radius 1/2
  // stays on the level set |1-z|^2/(1-|z|^2) = 1, so it never enters R < 1
  const PointSequence tangent = PointSequence::custom(disc, [](long n) {
    const double th = 1.0 / static_cast<double>(n);
    return CPoint{0.5 + 0.5 * std::polar(1.0, th)};
  });
  const Verdict vt = e_limit(disc, x, tangent, target, cfg);
  CHECK_FALSE(vt.decision);
  CHECK(vt.converged);

  // the class's own representative E-converges to it
  CHECK(e_limit(disc, x, target.representative, target, cfg).decision);
}

TEST_CASE("impressions") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x0{Complex(0, 0)};
  const BoundaryClass rd = make_boundary_class(disc, x0, PointSequence::radial(disc, CPoint{Complex(1, 0)}), cfg);
  const ClusterSet i1 = impression_estimate(disc, x0, rd, cfg);
  REQUIRE(i1.points.size() == 1);
  CHECK(i1.points[0].distance_to(CPoint{Complex(1, 0)}) < 1e-2);

  const Domain b2 = Domain::unit_ball(2);
  const CPoint xb = CPoint::zero(2);
  const BoundaryClass rb = make_boundary_class(b2, xb, PointSequence::radial(b2, CPoint{Complex(1, 0), Complex(0, 0)}), cfg);
  const ClusterSet i2 = impression_estimate(b2, xb, rb, cfg);
  REQUIRE(i2.points.size() == 1);
  CHECK(i2.points[0].distance_to(CPoint{Complex(1, 0), Complex(0, 0)}) < 1e-2);

  // bidisc face class: impression is not a singleton, probes cluster along the face
  const Domain d2 = Domain::polydisc(2);
  const BoundaryClass face = make_boundary_class(d2, CPoint::zero(2), PointSequence::bidisc_w2(Complex(1, 0)), cfg);
  const ClusterSet i3 = impression_estimate(d2, CPoint::zero(2), face, cfg);
  CHECK(i3.points.size() > 10);
  for (const CPoint& p : i3.points) CHECK(std::abs(p[0] - Complex(1, 0)) < 2e-2);
}

TEST_CASE("principal parts") {
  MetricConfig cfg = quick_cfg();
  cfg.r_grid = {0.002, 0.01, 0.05, 0.25, 1.0};
  cfg.samples = 256;
  const Domain d2 = Domain::polydisc(2);
  const CPoint x = CPoint::zero(2);

  // interleaved example: principal part is the corner {(1,1)}
  const PointSequence mix =
      PointSequence::interleaved(PointSequence::bidisc_w3(Complex(1, 0)), PointSequence::bidisc_w2(Complex(1, 0)));
  const BoundaryClass mcls = make_boundary_class(d2, x, mix, cfg);
  const ClusterSet pp = principal_part_estimate(d2, x, mcls, cfg);
  REQUIRE_FALSE(pp.points.empty());
  const CPoint corner{Complex(1, 0), Complex(1, 0)};
  for (const CPoint& q : pp.points) CHECK(q.distance_to(corner) < 1e-2);

  // face class W3(1): principal part fills closure(D) x {1}
  const BoundaryClass w3 = make_boundary_class(d2, x, PointSequence::bidisc_w3(Complex(1, 0)), cfg);
  const ClusterSet pp3 = principal_part_estimate(d2, x, w3, cfg);
  double lo = 1.0, hi = -1.0;
  for (const CPoint& q : pp3.points) {
    if (std::abs(q[1] - Complex(1, 0)) < 2e-2) {
      lo = std::min(lo, q[0].real());
      hi = std::max(hi, q[0].real());
    }
  }
  CHECK(hi - lo >= 1.8);  // covers at least 90% of the diameter

  // disc radial: singleton {1}
  const Domain disc = Domain::unit_disc();
  const BoundaryClass rd =
      make_boundary_class(disc, CPoint{Complex(0, 0)}, PointSequence::radial(disc, CPoint{Complex(1, 0)}), cfg);
  const ClusterSet ppd = principal_part_estimate(disc, CPoint{Complex(0, 0)}, rd, cfg);
  for (const CPoint& q : ppd.points) CHECK(q.distance_to(CPoint{Complex(1, 0)}) < 2e-2);

  // impression contains the principal part on tested classes
  const ClusterSet imp = impression_estimate(d2, x, w3, cfg);
  for (const CPoint& q : pp3.points) {
    bool near = false;
    for (const CPoint& p : imp.points) near = near || p.distance_to(q) < 0.3;
    CHECK(near);
  }
}

TEST_CASE("principal part convexity on convex kinds") {
  MetricConfig cfg = quick_cfg();
  cfg.r_grid = {0.002, 0.01, 0.05};
  const Domain d2 = Domain::polydisc(2);
  const CPoint x = CPoint::zero(2);
  const BoundaryClass w3 = make_boundary_class(d2, x, PointSequence::bidisc_w3(Complex(1, 0)), cfg);
  const ClusterSet pp = principal_part_estimate(d2, x, w3, cfg);
  // the set is closure(D) x {1} up to the sampling band: midpoints of sampled
  // pairs must stay inside the same band around the face
  const double band = 2.0 * (2.0 * cfg.r_grid.front() + merge_radius(cfg));
  REQUIRE(pp.points.size() >= 4);
  for (std::size_t i = 0; i + 1 < pp.points.size() && i < 40; i += 2) {
    const CPoint m = midpoint(pp.points[i], pp.points[i + 1]);
    CHECK(std::abs(m[1] - Complex(1, 0)) < band);
    CHECK(std::abs(m[0]) < 1.0 + 1e-9);
  }
}

TEST_CASE("rebase invariance of converges_H") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};
  const CPoint y{Complex(0.3, 0.2)};
  const auto radial_class = [&](const CPoint& base, double theta) {
    return make_boundary_class(disc, base, PointSequence::radial(disc, CPoint{std::polar(1.0, theta)}), cfg);
  };
  // long enough that the cutoff exists for both rebased radius scales
  std::vector<BoundaryClass> toward_x, toward_y;
  for (int m = 1; m <= 40; ++m) {
    toward_x.push_back(radial_class(x, 1.0 / m));
    toward_y.push_back(radial_class(y, 1.0 / m));
  }
  const Verdict vx = converges_H(disc, x, toward_x, radial_class(x, 0.0), cfg);
  const Verdict vy = converges_H(disc, y, toward_y, radial_class(y, 0.0), cfg);
  CHECK(vx.decision == vy.decision);

  std::vector<BoundaryClass> away_x, away_y;
  for (int m = 1; m <= 16; ++m) {
    away_x.push_back(radial_class(x, M_PI / 2.0 * m / 16.0));
    away_y.push_back(radial_class(y, M_PI / 2.0 * m / 16.0));
  }
  CHECK(converges_H(disc, x, away_x, radial_class(x, 0.0), cfg).decision ==
        converges_H(disc, y, away_y, radial_class(y, 0.0), cfg).decision);
}

TEST_CASE("bidisc topology triviality steps") {
  MetricConfig cfg = quick_cfg();
  cfg.r_grid = {0.05, 0.25, 1.0};
  const TopologyReport report = bidisc_topology_trivial_check(cfg, {Complex(1, 0), Complex(0, 1)});
  CHECK(report.all_ok);
  CHECK(report.items.size() == 16);  // 4 checks per (p1,p2) pair
  for (const auto& item : report.items) CHECK(item.ok);
}
