#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "horokit/horosphere.hpp"
#include "horokit/sampling.hpp"

using namespace horokit;

namespace {

MetricConfig quick_cfg() {
  MetricConfig cfg;
  cfg.tail_start = 512;
  cfg.tail_len = 64;
  cfg.tol = 1e-3;
  cfg.r_grid = {0.05, 0.25, 1.0, 5.0};
  cfg.samples = 96;
  cfg.seed = 41;
  return cfg;
}

double disc_busemann(Complex p, Complex z) { return 0.5 * std::log(disc_horocycle_value(p, z)); }

}  // namespace

TEST_CASE("disc horosphere closed form") {
  const auto [c, r] = disc_horosphere_closed_form(Complex(1, 0), 1.0);
  CHECK(c == Complex(0.5, 0.0));
  CHECK(r == Catch::Approx(0.5));
  // large R exhausts the disc
  const auto [cL, rL] = disc_horosphere_closed_form(Complex(1, 0), 1e9);
  CHECK(std::abs(cL) < 1e-8);
  CHECK(rL == Catch::Approx(1.0).margin(1e-8));
  CHECK_THROWS_AS(disc_horosphere_closed_form(Complex(0.5, 0), 1.0), std::invalid_argument);

  // p=i, R=1: 0.5i lies on both sides of the two membership descriptions
  CHECK(disc_horocycle_value(Complex(0, 1), Complex(0, 0.5)) == Catch::Approx(1.0 / 3.0));
  CHECK(std::abs(Complex(0, 0.5) - Complex(0, 0.5)) < 0.5);

  // Euclidean disc membership coincides with the level-set rule on a grid
  Rng rng = make_rng(17);
  for (int it = 0; it < 500; ++it) {
    const Complex z = uniform_disc_point(rng, 0.999);
    for (double R : {0.3, 1.0, 3.0}) {
      const auto [cc, rr] = disc_horosphere_closed_form(Complex(1, 0), R);
      const bool in_disc = std::abs(z - cc) < rr;
      const bool in_level = disc_horocycle_value(Complex(1, 0), z) < R;
      if (std::abs(std::abs(z - cc) - rr) > 1e-12) CHECK(in_disc == in_level);
    }
  }
}

TEST_CASE("horosphere membership via limsup matches the disc oracle") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});

  // limsup at w=0.5, R=1: (1/2) log(1/3) < 0, inside
  const Horosphere h1(disc, CPoint{Complex(0, 0)}, radial, 1.0);
  const Verdict v1 = horosphere_contains(h1, CPoint{Complex(0.5, 0)}, cfg);
  CHECK(v1.decision);
  CHECK(v1.estimate == Catch::Approx(0.5 * std::log(1.0 / 3.0)).margin(2e-3));

  // w=0 sits exactly on the horocycle of R=1: undecidable with margin ~ 0
  const Verdict v0 = horosphere_contains(h1, CPoint{Complex(0, 0)}, cfg);
  CHECK(v0.outcome() == Outcome::Undecidable);
  CHECK(std::abs(v0.margin) < 2e-3);
  CHECK_FALSE(v0.decision);

  // bidisc face: E = E_D(1,R) x D, the second coordinate never matters
  const Domain d2 = Domain::polydisc(2);
  const Horosphere h2(d2, CPoint::zero(2), PointSequence::bidisc_w2(Complex(1, 0)), 1.0);
  CHECK(horosphere_contains(h2, CPoint{Complex(0.2, 0), Complex(0, 0.99)}, cfg).decision);
  CHECK(horosphere_contains(h2, CPoint{Complex(0.2, 0), Complex(-0.99, 0)}, cfg).decision);
  CHECK(horosphere_contains(h2, CPoint{Complex(-0.2, 0), Complex(0, 0)}, cfg).outcome() == Outcome::False);
}

TEST_CASE("busemann values") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});
  Rng rng = make_rng(23);
  for (int it = 0; it < 30; ++it) {
    const Complex z = uniform_disc_point(rng, 0.9);
    const auto b = busemann_value(disc, CPoint{Complex(0, 0)}, radial, CPoint{z}, cfg);
    CHECK(b.converged);
    CHECK(b.value == Catch::Approx(disc_busemann(Complex(1, 0), z)).margin(2e-3));
  }
  const auto b0 = busemann_value(disc, CPoint{Complex(0, 0)}, radial, CPoint{Complex(0, 0)}, cfg);
  CHECK(b0.value == Catch::Approx(0.0).margin(1e-12));

  // interleaving two different faces oscillates at z=(0.5, 0)
  const Domain d2 = Domain::polydisc(2);
  const PointSequence mix =
      PointSequence::interleaved(PointSequence::bidisc_w3(Complex(1, 0)), PointSequence::bidisc_w2(Complex(1, 0)));
  const auto bm = busemann_value(d2, CPoint::zero(2), mix, CPoint{Complex(0.5, 0), Complex(0, 0)}, cfg);
  CHECK_FALSE(bm.converged);
  CHECK(bm.oscillation > 0.4);  // swings between 0 and (1/2) log(1/3)
}

TEST_CASE("admissibility") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};

  CHECK(is_admissible(disc, x, PointSequence::radial(disc, CPoint{Complex(1, 0)}), cfg).decision);

  // cluster set of four points: certified not admissible
  const PointSequence four = PointSequence::custom(disc, [](long n) {
    const double r = 1.0 - 1.0 / static_cast<double>(n);
    const Complex dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return CPoint{r * dirs[n % 4]};
  });
  const Verdict vf = is_admissible(disc, x, four, cfg);
  CHECK_FALSE(vf.decision);
  CHECK(vf.converged);

  // interleaved bidisc faces: admissible with E = E(1,R) x E(1,R)
  const Domain d2 = Domain::polydisc(2);
  const PointSequence mix =
      PointSequence::interleaved(PointSequence::bidisc_w2(Complex(1, 0)), PointSequence::bidisc_w3(Complex(1, 0)));
  CHECK(is_admissible(d2, CPoint::zero(2), mix, cfg).decision);

  // a relatively compact sequence fails the escape requirement
  const PointSequence stuck = PointSequence::custom(disc, [](long n) {
    return CPoint{Complex(0.3 * std::cos(0.1 * n), 0.3 * std::sin(0.1 * n))};
  });
  CHECK_FALSE(is_admissible(disc, x, stuck, cfg).decision);
}

TEST_CASE("bidisc classification") {
  const MetricConfig cfg = quick_cfg();
  // W1(1,1): T1 = T2 = 1, corner
  const BidiscClass c1 = bidisc_classify(PointSequence::bidisc_w1(Complex(1, 0), Complex(1, 0)), cfg);
  CHECK(c1.kind == BidiscClass::Case::Corner);
  CHECK(c1.T1 == Catch::Approx(1.0).margin(2e-2));
  CHECK(c1.T2 == Catch::Approx(1.0).margin(2e-2));

  // W2(1): face in z1
  const BidiscClass c2 = bidisc_classify(PointSequence::bidisc_w2(Complex(1, 0)), cfg);
  CHECK(c2.kind == BidiscClass::Case::FaceZ1);
  CHECK(std::abs(c2.p1 - Complex(1, 0)) < 1e-9);

  // mixed rates: T1 = +inf, T2 = 0, membership rule keeps only the second factor
  const Domain d2 = Domain::polydisc(2);
  const PointSequence mixed = PointSequence::custom(d2, [](long n) {
    const double nn = static_cast<double>(n);
    return CPoint{Complex(1.0 - 1.0 / nn, 0), Complex(1.0 - 1.0 / (nn * nn), 0)};
  });
  const BidiscClass cm = bidisc_classify(mixed, cfg);
  CHECK(cm.kind == BidiscClass::Case::Corner);
  CHECK(cm.T1 == kInfinity);
  CHECK(cm.T2 == 0.0);
  // rule: E = D x E_D(1,R)
  CHECK(bidisc_member(cm, CPoint{Complex(-0.9, 0), Complex(0.8, 0)}, 1.0));
  CHECK_FALSE(bidisc_member(cm, CPoint{Complex(0, 0), Complex(-0.5, 0)}, 1.0));

  // T1*T2 >= 1 whenever both finite and nonzero, on a spread of corner sequences
  for (double k : {1.0, 1.5, 2.0}) {
    const PointSequence s = PointSequence::custom(d2, [k](long n) {
      const double nn = static_cast<double>(n);
      return CPoint{Complex(1.0 - k / nn, 0), Complex(1.0 - 1.0 / nn, 0)};
    });
    const BidiscClass c = bidisc_classify(s, cfg);
    if (std::isfinite(c.T1) && std::isfinite(c.T2) && c.T1 > 0 && c.T2 > 0)
      CHECK(c.T1 * c.T2 >= 1.0 - 5e-2);
  }

  CHECK_THROWS_AS(bidisc_classify(PointSequence::interleaved(PointSequence::bidisc_w2(Complex(1, 0)),
                                                             PointSequence::bidisc_w3(Complex(1, 0))),
                                  cfg),
                  std::invalid_argument);
}

TEST_CASE("bidisc membership rule agrees with limsup sampling") {
  const MetricConfig cfg = quick_cfg();
  const Domain d2 = Domain::polydisc(2);
  const CPoint x = CPoint::zero(2);
  Rng rng = make_rng(29);
  const PointSequence seqs[] = {PointSequence::bidisc_w1(Complex(1, 0), Complex(1, 0)),
                                PointSequence::bidisc_w2(Complex(0, 1)),
                                PointSequence::bidisc_w3(Complex(-1, 0))};
  for (const auto& seq : seqs) {
    const BidiscClass cls = bidisc_classify(seq, cfg);
    long checked = 0, agreed = 0;
    for (int it = 0; it < 120; ++it) {
      const CPoint w = sample_interior(d2, rng, 0.97);
      for (double R : {0.5, 1.0, 2.0}) {
        const Verdict v = horosphere_contains(Horosphere(d2, x, seq, R), w, cfg);
        if (!v.decided()) continue;
        ++checked;
        if ((v.outcome() == Outcome::True) == bidisc_member(cls, w, R)) ++agreed;
      }
    }
    REQUIRE(checked > 100);
    CHECK(static_cast<double>(agreed) / static_cast<double>(checked) >= 0.99);
  }
}

TEST_CASE("canonical form on the bidisc") {
  const MetricConfig cfg = quick_cfg();
  const Domain d2 = Domain::polydisc(2);

  // interleaved faces collapse to the corner representative
  const auto mix = canonical_form_bidisc(
      PointSequence::interleaved(PointSequence::bidisc_w3(Complex(1, 0)), PointSequence::bidisc_w2(Complex(1, 0))),
      cfg);
  CHECK(mix.representative.family() == SequenceFamily::BidiscW1);
  CHECK(mix.representative.params()[0].distance_to(CPoint{Complex(1, 0), Complex(1, 0)}) < 1e-9);
  CHECK(mix.verdict.decision);

  // canonical sequences are fixed points
  const auto w1 = canonical_form_bidisc(PointSequence::bidisc_w1(Complex(0, 1), Complex(-1, 0)), cfg);
  CHECK(w1.representative.family() == SequenceFamily::BidiscW1);
  CHECK(w1.representative.params()[0].distance_to(CPoint{Complex(0, 1), Complex(-1, 0)}) < 1e-6);

  // spiral approach to the face point (1,0)
  const auto sp = canonical_form_bidisc(PointSequence::custom(d2, [](long n) {
    const double nn = static_cast<double>(n);
    return CPoint{(1.0 - 1.0 / nn) * std::polar(1.0, 1.0 / nn), Complex(0, 0)};
  }), cfg);
  CHECK(sp.representative.family() == SequenceFamily::BidiscW2);
  CHECK(std::abs(sp.representative.params()[0][0] - Complex(1, 0)) < 1e-2);

  // mixed-rate corner reduces to the slow-face representative (T2 = 0 kills
  // the first factor, so E = D x E_D(1,R), the w3 family)
  const auto mr = canonical_form_bidisc(PointSequence::custom(d2, [](long n) {
    const double nn = static_cast<double>(n);
    return CPoint{Complex(1.0 - 1.0 / nn, 0), Complex(1.0 - 1.0 / (nn * nn), 0)};
  }), cfg);
  CHECK(mr.representative.family() == SequenceFamily::BidiscW3);
}

TEST_CASE("sequence equivalence") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};

  const PointSequence r1 = PointSequence::radial(disc, CPoint{Complex(1, 0)});
  const PointSequence fast = PointSequence::custom(disc, [](long n) {
    const double nn = static_cast<double>(n);
    return CPoint{Complex(1.0 - 1.0 / (nn * nn), 0)};
  });
  CHECK(sequences_equivalent(disc, x, r1, fast, cfg).decision);
  CHECK(sequences_equivalent(disc, x, r1, r1, cfg).decision);  // reflexive
  CHECK_FALSE(sequences_equivalent(disc, x, r1, PointSequence::radial(disc, CPoint{Complex(0, 1)}), cfg).decision);

  const Domain d2 = Domain::polydisc(2);
  CHECK_FALSE(sequences_equivalent(d2, CPoint::zero(2), PointSequence::bidisc_w2(Complex(1, 0)),
                                   PointSequence::bidisc_w3(Complex(1, 0)), cfg)
                  .decision);

  // equivalence relation across the canonical families: symmetry + transitivity
  const PointSequence fams[] = {PointSequence::bidisc_w1(Complex(1, 0), Complex(1, 0)),
                                PointSequence::bidisc_w2(Complex(1, 0)),
                                PointSequence::bidisc_w3(Complex(1, 0))};
  bool eq[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      eq[i][j] = sequences_equivalent(d2, CPoint::zero(2), fams[i], fams[j], cfg).decision;
  for (int i = 0; i < 3; ++i) {
    CHECK(eq[i][i]);
    for (int j = 0; j < 3; ++j) {
      CHECK(eq[i][j] == eq[j][i]);
      if (i != j) CHECK_FALSE(eq[i][j]);
      for (int k = 0; k < 3; ++k)
        if (eq[i][j] && eq[j][k]) CHECK(eq[i][k]);
    }
  }
}

TEST_CASE("rebase factors") {
  const MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});
  const CPoint x{Complex(0, 0)};

  const auto same = rebase_factors(disc, x, x, radial, cfg);
  CHECK(same.alpha == Catch::Approx(1.0).margin(1e-6));
  CHECK(same.beta == Catch::Approx(1.0).margin(1e-6));

  const CPoint y{Complex(0.5, 0)};
  const auto rb = rebase_factors(disc, x, y, radial, cfg);
  const double k = distance(disc, x, y);
  CHECK(std::abs(0.5 * std::log(rb.beta)) <= k + 1e-9);
  CHECK(std::abs(0.5 * std::log(rb.alpha)) <= k + 1e-9);
  // (1/2) log beta = limsup [K(x,u_n) - K(y,u_n)] = -busemann of radial at y, swapped roles
  CHECK(0.5 * std::log(rb.beta) == Catch::Approx(-disc_busemann(Complex(1, 0), Complex(0.5, 0))).margin(5e-3));
  CHECK(rb.inclusion_check.decision);

  const CPoint yi{Complex(0, 0.5)};
  const auto rbi = rebase_factors(disc, x, yi, radial, cfg);
  CHECK(rbi.inclusion_check.decision);
}

TEST_CASE("horosphere properties: openness, monotonicity, empty intersection, escape, convexity") {
  MetricConfig cfg = quick_cfg();
  const Domain disc = Domain::unit_disc();
  const CPoint x{Complex(0, 0)};
  const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});
  Rng rng = make_rng(31);

  // openness: margin m members keep membership within the K-ball of radius m/2
  for (int it = 0; it < 20; ++it) {
    const Complex z = uniform_disc_point(rng, 0.9);
    const Horosphere h(disc, x, radial, 2.0);
    const Verdict v = horosphere_contains(h, CPoint{z}, cfg);
    if (!v.decision) continue;
    for (int jt = 0; jt < 5; ++jt) {
      const Complex dz = 0.05 * uniform_disc_point(rng);
      const CPoint w2{z + dz};
      if (!disc.contains(w2) || distance(disc, CPoint{z}, w2) >= v.margin / 2) continue;
      CHECK(horosphere_contains(h, w2, cfg).outcome() != Outcome::False);
    }
  }

  // monotonicity in R
  for (int it = 0; it < 30; ++it) {
    const Complex z = uniform_disc_point(rng, 0.95);
    const Verdict small = horosphere_contains(Horosphere(disc, x, radial, 0.5), CPoint{z}, cfg);
    if (small.decision)
      CHECK(horosphere_contains(Horosphere(disc, x, radial, 2.0), CPoint{z}, cfg).outcome() != Outcome::False);
  }

  // empty total intersection: every sampled point drops out along a
  // decreasing grid reaching 1e-6
  for (int it = 0; it < 20; ++it) {
    const Complex z = uniform_disc_point(rng, 0.95);
    bool in_all = true;
    for (double R : {1.0, 1e-2, 1e-4, 1e-6}) {
      if (horosphere_contains(Horosphere(disc, x, radial, R), CPoint{z}, cfg).outcome() != Outcome::True) {
        in_all = false;
        break;
      }
    }
    CHECK_FALSE(in_all);
  }

  // uniform escape: members at R <= R0(rho) stay out of the K-ball of radius rho
  for (double rho : {1.0, 2.0}) {
    const double R0 = std::exp(-2.0 * (rho + 2.0 * cfg.tol));
    Rng rng2 = make_rng(33);
    const auto members = detail::sample_horosphere_members(disc, x, radial, R0, cfg, rng2, 10);
    for (const CPoint& w : members) CHECK(distance(disc, x, w) >= rho);
  }

  // convexity on a convex domain: midpoints of decided members are members
  const Horosphere h(disc, x, radial, 1.5);
  std::vector<CPoint> members;
  for (int it = 0; it < 200 && members.size() < 12; ++it) {
    const Complex z = uniform_disc_point(rng, 0.97);
    if (horosphere_contains(h, CPoint{z}, cfg).decision) members.push_back(CPoint{z});
  }
  for (std::size_t i = 0; i + 1 < members.size(); i += 2) {
    CHECK(horosphere_contains(h, midpoint(members[i], members[i + 1]), cfg).outcome() != Outcome::False);
  }
}
