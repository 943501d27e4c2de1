#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "horokit/gromov.hpp"
#include "horokit/parallel.hpp"
#include "horokit/serialize.hpp"

namespace horokit {

inline std::string report_schema_version() { return "1"; }

/// One CSV point row: re/im per coordinate plus a tag column.
struct PointRow {
  std::vector<double> coords;
  std::string tag;
};

struct RunResult {
  Json report;
  std::vector<PointRow> points;
  int point_dim = 0;
  int exit_code = 0;  // 0 pass, 1 assertion failure, 2 inconclusive present, 3 config error
};

struct ExperimentConfig {
  std::string experiment;
  Domain domain = Domain::unit_disc();
  MetricConfig metric;
  Json payload;
  std::string report_name = "report.json";
  std::string points_name;
  Json raw;
};

inline ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.experiment = j.at("experiment").get<std::string>();
  if (j.contains("domain")) cfg.domain = domain_from_json(j.at("domain"));
  if (j.contains("metric")) cfg.metric = metric_config_from_json(j.at("metric"));
  cfg.payload = j.value("payload", Json::object());
  const Json out = j.value("output", Json::object());
  cfg.report_name = out.value("report", std::string("report.json"));
  cfg.points_name = out.value("points", std::string());
  if (j.contains("schema") && j.at("schema").get<std::string>() != report_schema_version())
    throw std::invalid_argument("experiment config: unsupported schema version");
  return cfg;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ItemList {
  Json items = Json::array();
  long failed = 0;
  long inconclusive = 0;

  void add(const std::string& name, const std::string& status, Json data = Json::object()) {
    Json item;
    item["name"] = name;
    item["status"] = status;
    item["data"] = std::move(data);
    items.push_back(std::move(item));
    if (status == "fail") ++failed;
    if (status == "inconclusive") ++inconclusive;
  }
  void add_verdict(const std::string& name, const Verdict& v, bool decision_is_assertion) {
    std::string status = "pass";
    if (!v.converged) status = "inconclusive";
    else if (decision_is_assertion && !v.decision) status = "fail";
    add(name, status, to_json(v));
  }
};

inline CPoint payload_point(const Json& payload, const char* key, const CPoint& fallback) {
  return payload.contains(key) ? cpoint_from_json(payload.at(key)) : fallback;
}

// ---------------------------------------------------------------------------
// individual experiments
// ---------------------------------------------------------------------------

inline void run_horosphere_slice(const ExperimentConfig& ec, ItemList& items, RunResult& out) {
  const Domain& d = ec.domain;
  const PointSequence seq = sequence_from_json(ec.payload.at("seq"));
  const CPoint base = payload_point(ec.payload, "base", d.center());
  const double R = ec.payload.value("R", 1.0);
  const long res = ec.payload.value("resolution", 64);
  const int axis = ec.payload.value("axis", 0);
  const CPoint fixed = payload_point(ec.payload, "fixed", d.center());
  const double range = ec.payload.value("range", 1.05);

  const Horosphere h(d, base, seq, R);
  out.point_dim = d.dim();
  long n_in = 0, n_out = 0, n_und = 0, mismatches = 0;
  const bool disc_oracle = d.kind() == DomainKind::UnitDisc && seq.family() == SequenceFamily::Radial;
  std::vector<std::optional<PointRow>> rows(static_cast<std::size_t>(res * res));
  std::vector<int> tally(static_cast<std::size_t>(res * res), -1);
  parallel_for(res * res, [&](long idx) {
    const long i = idx % res, jr = idx / res;
    CPoint z = fixed;
    z[axis] = Complex(-range + 2.0 * range * (i + 0.5) / res, -range + 2.0 * range * (jr + 0.5) / res);
    if (!d.contains(z)) return;
    const Verdict v = horosphere_contains(h, z, ec.metric);
    PointRow row;
    for (const Complex& c : z.coords()) {
      row.coords.push_back(c.real());
      row.coords.push_back(c.imag());
    }
    row.tag = outcome_name(v.outcome());
    int code = v.outcome() == Outcome::True ? 0 : v.outcome() == Outcome::False ? 1 : 2;
    if (disc_oracle && v.decided()) {
      // rebased closed form: E_x(p, R) = { z : hv(p,z) < R * hv(p,x) }
      const Complex p = seq.params()[0][0] / std::abs(seq.params()[0][0]);
      const bool inside = disc_horocycle_value(p, z[0]) < R * disc_horocycle_value(p, base[0]);
      if (inside != (v.outcome() == Outcome::True)) code += 10;
    }
    rows[static_cast<std::size_t>(idx)] = std::move(row);
    tally[static_cast<std::size_t>(idx)] = code;
  });
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!rows[k]) continue;
    out.points.push_back(*rows[k]);
    const int code = tally[k];
    if (code >= 10) ++mismatches;
    switch (code % 10) {
      case 0: ++n_in; break;
      case 1: ++n_out; break;
      default: ++n_und; break;
    }
  }
  Json data;
  data["in"] = n_in;
  data["out"] = n_out;
  data["undecidable"] = n_und;
  if (disc_oracle) {
    data["closed_form_mismatches"] = mismatches;
    items.add("slice-closed-form-agreement", mismatches == 0 ? "pass" : "fail", data);
  } else {
    items.add("slice", "pass", data);
  }
}

inline void run_classify_bidisc(const ExperimentConfig& ec, ItemList& items) {
  const PointSequence seq = sequence_from_json(ec.payload.at("seq"));
  const CanonicalBidisc cb = canonical_form_bidisc(seq, ec.metric);
  Json data;
  data["canonical"] = to_json(cb.representative);
  const TailClusters cl = cluster_tail_points(seq, ec.metric);
  if (cl.points.size() == 1) {
    const BidiscClass cls = bidisc_classify(seq, ec.metric);
    data["case"] = cls.case_name();
    data["T1"] = std::isfinite(cls.T1) ? Json(cls.T1) : Json("inf");
    data["T2"] = std::isfinite(cls.T2) ? Json(cls.T2) : Json("inf");
  }
  data["agreement"] = to_json(cb.verdict);
  items.add("classify-bidisc", cb.verdict.converged ? (cb.verdict.decision ? "pass" : "fail") : "inconclusive",
            data);
}

inline void run_equivalence(const ExperimentConfig& ec, ItemList& items) {
  const PointSequence a = sequence_from_json(ec.payload.at("a"));
  const PointSequence b = sequence_from_json(ec.payload.at("b"));
  const CPoint base = payload_point(ec.payload, "base", ec.domain.center());
  const Verdict v = sequences_equivalent(ec.domain, base, a, b, ec.metric);
  Json data = to_json(v);
  data["equivalent"] = v.decision;
  items.add("equivalence", v.converged ? "pass" : "inconclusive", data);
}

inline void run_impression(const ExperimentConfig& ec, ItemList& items, bool principal) {
  const PointSequence seq = sequence_from_json(ec.payload.at("seq"));
  const CPoint base = payload_point(ec.payload, "base", ec.domain.center());
  const BoundaryClass cls = make_boundary_class(ec.domain, base, seq, ec.metric);
  const ClusterSet cs = principal ? principal_part_estimate(ec.domain, base, cls, ec.metric)
                                  : impression_estimate(ec.domain, base, cls, ec.metric);
  Json data = to_json(cs);
  data["count"] = cs.points.size();
  items.add(principal ? "principal-part" : "impression",
            cs.points.empty() && !cs.escapes_to_infinity ? "inconclusive" : "pass", data);
}

inline void run_gromov_product(const ExperimentConfig& ec, ItemList& items) {
  const std::string mode = ec.payload.value("mode", std::string("points"));
  if (mode == "points") {
    const CPoint x = cpoint_from_json(ec.payload.at("x"));
    const CPoint y = cpoint_from_json(ec.payload.at("y"));
    const CPoint w = payload_point(ec.payload, "w", ec.domain.center());
    Json data;
    data["product"] = gromov_product(ec.domain, x, y, w);
    items.add("gromov-product", "pass", data);
    return;
  }
  if (mode == "bidisc-face-rays") {
    const Domain d2 = Domain::polydisc(2);
    const Ray plus = bidisc_face_ray(+1), minus = bidisc_face_ray(-1);
    const CPoint w = CPoint::zero(2);
    std::vector<double> ts = ec.payload.value("t_values", std::vector<double>{});
    if (ts.empty())
      for (int i = 1; i <= 10; ++i) ts.push_back(0.7 * i);
    double worst = 0.0;
    for (double t : ts)
      for (double s : ts) worst = std::max(worst, std::abs(gromov_product(d2, plus.at(t), minus.at(s), w)));
    Json data;
    data["pairs"] = ts.size() * ts.size();
    data["max_abs_product"] = worst;
    items.add("bidisc-face-rays-product-zero", worst <= 1e-9 ? "pass" : "fail", data);
    return;
  }
  throw std::invalid_argument("gromov-product: unknown mode " + mode);
}

inline void run_delta_estimate(const ExperimentConfig& ec, ItemList& items) {
  std::vector<double> scales = ec.payload.value("scales", std::vector<double>{3.0, 6.0});
  Json data = Json::object();
  for (double s : scales)
    data[fmt_double(s)] = delta_hyperbolicity_estimate(ec.domain, s, ec.metric);
  items.add("delta-estimate", "pass", data);
}

inline void run_quasi_geodesic(const ExperimentConfig& ec, ItemList& items) {
  const Json curve = ec.payload.at("curve");
  const std::string type = curve.at("type").get<std::string>();
  std::function<CPoint(double)> fn;
  double t_end = curve.value("t_end", 1.0);
  if (type == "segment") {
    const CPoint a = cpoint_from_json(curve.at("from"));
    const CPoint b = cpoint_from_json(curve.at("to"));
    fn = [a, b](double t) { return a + t * (b - a); };
  } else if (type == "disc-arc") {
    const Complex c = complex_from_json(curve.at("center"));
    const double r = curve.at("radius").get<double>();
    fn = [c, r](double th) { return CPoint{c + std::polar(r, th)}; };
  } else {
    throw std::invalid_argument("quasi-geodesic: unknown curve type " + type);
  }
  Json data;
  if (ec.payload.contains("A")) {
    const double A = ec.payload.at("A").get<double>();
    const double B = ec.payload.at("B").get<double>();
    const auto res = quasi_geodesic_check(ec.domain, fn, t_end, A, B, ec.metric);
    data = to_json(res.verdict);
    data["worst_slack"] = res.worst_slack;
    data["length"] = res.length;
    items.add("quasi-geodesic", res.verdict.converged ? "pass" : "inconclusive", data);
  } else {
    const auto [A, B] = fit_quasi_geodesic_constants(ec.domain, fn, t_end, ec.metric);
    data["A"] = A;
    data["B"] = B;
    items.add("quasi-geodesic-fit", std::isfinite(A) ? "pass" : "inconclusive", data);
  }
}

inline void run_cluster_set(const ExperimentConfig& ec, ItemList& items) {
  const MapSpec F = map_from_json(ec.payload.at("map"));
  const CPoint p = cpoint_from_json(ec.payload.at("point"));
  const std::string filter = ec.payload.value("filter", std::string("none"));
  const ProbeFilter pf = filter == "e" ? ProbeFilter::ELimit
                         : filter == "nt" ? ProbeFilter::NonTangential
                                          : ProbeFilter::None;
  const ClusterSet cs = cluster_set(F, p, ec.metric, pf);
  Json data = to_json(cs);
  data["map_contract"] = to_json(validate_map(F, ec.metric));
  items.add("cluster-set", cs.points.empty() && !cs.escapes_to_infinity ? "inconclusive" : "pass", data);
}

inline void run_denjoy_wolff(const ExperimentConfig& ec, ItemList& items, RunResult& out) {
  const MapSpec f = map_from_json(ec.payload.at("map"));
  const CPoint z0 = payload_point(ec.payload, "start", ec.domain.center());
  const int starts = ec.payload.value("starts", 5);
  const auto res = denjoy_wolff_iterate(ec.domain, f, z0, ec.metric, starts);
  Json data;
  data["targets"] = to_json(res.targets);
  Json per = Json::array();
  for (const CPoint& q : res.per_start) per.push_back(to_json(q));
  data["per_start"] = per;
  data["stagnation"] = res.stagnation;
  data["invariance"] = to_json(res.invariance);
  if (res.stagnation) {
    items.add("denjoy-wolff", "inconclusive", data);
    return;
  }
  // orbit trace for plotting
  out.point_dim = ec.domain.dim();
  CPoint z = z0;
  for (int k = 0; k < 64 && ec.domain.contains(z); ++k) {
    PointRow row;
    for (const Complex& c : z.coords()) {
      row.coords.push_back(c.real());
      row.coords.push_back(c.imag());
    }
    row.tag = "orbit" + std::to_string(k);
    out.points.push_back(std::move(row));
    z = f.forward(z);
  }
  items.add("denjoy-wolff", res.invariance.decision ? "pass" : "fail", data);
}

inline void run_bidisc_topology(const ExperimentConfig& ec, ItemList& items) {
  std::vector<Complex> pts;
  if (ec.payload.contains("points"))
    for (const auto& e : ec.payload.at("points")) pts.push_back(complex_from_json(e));
  const TopologyReport rep = pts.empty() ? bidisc_topology_trivial_check(ec.metric)
                                         : bidisc_topology_trivial_check(ec.metric, pts);
  for (const auto& item : rep.items) {
    Json data;
    data["from"] = item.from;
    data["to"] = item.to;
    data["worst_cutoff"] = item.worst_cutoff;
    items.add("closure:" + item.from + "->" + item.to, item.ok ? "pass" : "fail", data);
  }
}

inline void run_oracle_suite(const ExperimentConfig& ec, ItemList& items) {
  const MetricConfig& cfg = ec.metric;
  Rng rng = make_rng(cfg.seed, 0x05);
  const Domain disc = Domain::unit_disc();
  const CPoint x0{Complex(0, 0)};

  {  // disc horosphere: limsup membership vs closed form
    const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});
    long mismatches = 0, decided = 0;
    for (double R : {0.3, 1.0, 3.0}) {
      const Horosphere h(disc, x0, radial, R);
      for (int it = 0; it < 60; ++it) {
        const Complex z = uniform_disc_point(rng, 0.995);
        const Verdict v = horosphere_contains(h, CPoint{z}, cfg);
        if (!v.decided()) continue;
        ++decided;
        if ((disc_horocycle_value(Complex(1, 0), z) < R) != (v.outcome() == Outcome::True)) ++mismatches;
      }
    }
    Json data{{"decided", decided}, {"mismatches", mismatches}};
    items.add("disc-horosphere-oracle", mismatches == 0 && decided > 100 ? "pass" : "fail", data);
  }
  {  // busemann closed form
    const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});
    double worst = 0.0;
    for (int it = 0; it < 25; ++it) {
      const Complex z = uniform_disc_point(rng, 0.9);
      const auto b = busemann_value(disc, x0, radial, CPoint{z}, cfg);
      worst = std::max(worst, std::abs(b.value - 0.5 * std::log(disc_horocycle_value(Complex(1, 0), z))));
    }
    items.add("busemann-closed-form", worst < 5e-3 ? "pass" : "fail", Json{{"worst", worst}});
  }
  {  // polydisc product law and Moebius invariance
    const Domain d2 = Domain::polydisc(2);
    double worst = 0.0, worst_mob = 0.0;
    for (int it = 0; it < 60; ++it) {
      const CPoint z = sample_interior(d2, rng, 0.99), w = sample_interior(d2, rng, 0.99);
      worst = std::max(worst, std::abs(distance(d2, z, w) -
                                       std::max(disc_distance(z[0], w[0]), disc_distance(z[1], w[1]))));
      const Complex a = uniform_disc_point(rng, 0.9);
      const double th = uniform(rng, 0.0, 2 * M_PI);
      const auto phi = [&](Complex s) { return std::polar(1.0, th) * mobius_to_origin(a, s); };
      worst_mob = std::max(worst_mob, std::abs(disc_distance(phi(z[0]), phi(w[0])) - disc_distance(z[0], w[0])));
    }
    items.add("polydisc-product-law", worst == 0.0 ? "pass" : "fail", Json{{"worst", worst}});
    items.add("moebius-invariance", worst_mob < 1e-12 ? "pass" : "fail", Json{{"worst", worst_mob}});
  }
  {  // ball radial closed form
    double worst = 0.0;
    const Domain b2 = Domain::unit_ball(2);
    for (double r : {0.2, 0.6, 0.95, 0.999}) {
      worst = std::max(worst, std::abs(distance(b2, CPoint::zero(2), CPoint{Complex(r, 0), Complex(0, 0)}) -
                                       0.5 * std::log((1 + r) / (1 - r))));
    }
    items.add("ball-radial-closed-form", worst < 1e-12 ? "pass" : "fail", Json{{"worst", worst}});
  }
  {  // bidisc membership rule vs limsup sampling
    const Domain d2 = Domain::polydisc(2);
    long disagreements = 0, decided = 0;
    for (const PointSequence& seq : {PointSequence::bidisc_w1(Complex(1, 0), Complex(1, 0)),
                                     PointSequence::bidisc_w2(Complex(0, 1))}) {
      const BidiscClass cls = bidisc_classify(seq, cfg);
      for (int it = 0; it < 40; ++it) {
        const CPoint w = sample_interior(d2, rng, 0.97);
        const Verdict v = horosphere_contains(Horosphere(d2, CPoint::zero(2), seq, 1.0), w, cfg);
        if (!v.decided()) continue;
        ++decided;
        if (bidisc_member(cls, w, 1.0) != (v.outcome() == Outcome::True)) ++disagreements;
      }
    }
    Json data{{"decided", decided}, {"disagreements", disagreements}};
    items.add("bidisc-rule-agreement",
              decided > 0 && static_cast<double>(disagreements) / decided <= 0.01 ? "pass" : "fail", data);
  }
  {  // canonical form of the interleaved example
    const auto cb = canonical_form_bidisc(
        PointSequence::interleaved(PointSequence::bidisc_w3(Complex(1, 0)), PointSequence::bidisc_w2(Complex(1, 0))),
        cfg);
    const bool ok = cb.representative.family() == SequenceFamily::BidiscW1 &&
                    cb.representative.params()[0].distance_to(CPoint{Complex(1, 0), Complex(1, 0)}) < 1e-6;
    items.add("interleaved-canonical-form", ok ? "pass" : "fail", to_json(cb.representative));
  }
  {  // face-ray products
    const Domain d2 = Domain::polydisc(2);
    const Ray plus = bidisc_face_ray(+1), minus = bidisc_face_ray(-1);
    double worst = 0.0;
    for (int i = 1; i <= 8; ++i)
      for (int j = 1; j <= 8; ++j)
        worst = std::max(worst, std::abs(gromov_product(d2, plus.at(0.8 * i), minus.at(0.8 * j), CPoint::zero(2))));
    items.add("face-ray-product-zero", worst <= 1e-9 ? "pass" : "fail", Json{{"worst", worst}});
  }
  {  // convex brackets bracket the closed forms
    bool ok = true;
    double width = 0.0;
    for (const Domain& d : {Domain::unit_disc(), Domain::unit_ball(2), Domain::parabolic_convex()}) {
      for (int it = 0; it < 10; ++it) {
        const CPoint a = sample_interior(d, rng, 0.9), b = sample_interior(d, rng, 0.9);
        const auto bb = convex_distance_bounds(d, a, b, cfg);
        const double truth = distance(d, a, b);
        ok = ok && bb.lower <= truth + 1e-9 && truth <= bb.upper + 1e-9;
        width = std::max(width, bb.upper - bb.lower);
      }
    }
    items.add("convex-brackets", ok ? "pass" : "fail", Json{{"max_width", width}});
  }
  {  // rebase factors stay within the base-distance bound, inclusions hold
    const PointSequence radial = PointSequence::radial(disc, CPoint{Complex(1, 0)});
    const CPoint y{Complex(0.4, 0.2)};
    const auto rb = rebase_factors(disc, x0, y, radial, cfg);
    const double k = distance(disc, x0, y);
    const bool ok = std::abs(0.5 * std::log(rb.beta)) <= k + 1e-9 &&
                    std::abs(0.5 * std::log(rb.alpha)) <= k + 1e-9 && rb.inclusion_check.decision;
    Json data{{"alpha", rb.alpha}, {"beta", rb.beta}, {"bound", k}};
    items.add("rebase-factors", ok ? "pass" : "fail", data);
  }
  {  // Cayley chain isometry
    const MapSpec G = MapSpec::composite({MapSpec::cayley2(), MapSpec::siegel_to_parabolic()});
    const Domain b2 = Domain::unit_ball(2);
    const Domain pb = Domain::parabolic_convex();
    double worst = 0.0;
    for (int it = 0; it < 200; ++it) {
      const CPoint z = sample_interior(b2, rng, 0.95), w = sample_interior(b2, rng, 0.95);
      worst = std::max(worst, std::abs(distance(pb, G.forward(z), G.forward(w)) - distance(b2, z, w)));
    }
    items.add("cayley-chain-isometry", worst < 1e-9 ? "pass" : "fail", Json{{"worst", worst}});
  }
  {  // characteristic set of the parabolic model at the origin
    const CharSet cs = char_set(Domain::parabolic_convex(), CPoint{Complex(0, 0), Complex(0, 0)}, cfg);
    const bool ok = !cs.singleton && cs.directions.size() == 1 &&
                    std::abs(cs.directions[0][1] - Complex(0, 1)) < 1e-9;
    items.add("parabolic-char-set", ok ? "pass" : "fail", Json{{"directions", cs.directions.size()}});
  }
  {  // Denjoy-Wolff mini run
    MetricConfig dcfg = cfg;
    dcfg.samples = 2000;
    const auto res = denjoy_wolff_iterate(disc, MapSpec::disc_automorphism(Complex(-0.5, 0), 0.0),
                                          CPoint{Complex(0, 0)}, dcfg, 3);
    const bool ok = !res.stagnation && res.targets.points.size() == 1 &&
                    res.targets.points[0].distance_to(CPoint{Complex(1, 0)}) < 1e-6 &&
                    res.invariance.decision;
    items.add("denjoy-wolff-oracle", ok ? "pass" : "fail", to_json(res.targets));
  }
}

}  // namespace detail

/// Execute one named experiment; the report embeds the schema version, the
/// echoed configuration and per-item diagnostics, and the exit code follows
/// the CLI contract.
inline RunResult run_experiment(const ExperimentConfig& ec) {
  RunResult out;
  detail::ItemList items;
  if (ec.experiment == "horosphere-slice") detail::run_horosphere_slice(ec, items, out);
  else if (ec.experiment == "classify-bidisc") detail::run_classify_bidisc(ec, items);
  else if (ec.experiment == "equivalence") detail::run_equivalence(ec, items);
  else if (ec.experiment == "impression") detail::run_impression(ec, items, false);
  else if (ec.experiment == "principal-part") detail::run_impression(ec, items, true);
  else if (ec.experiment == "gromov-product") detail::run_gromov_product(ec, items);
  else if (ec.experiment == "delta-estimate") detail::run_delta_estimate(ec, items);
  else if (ec.experiment == "quasi-geodesic") detail::run_quasi_geodesic(ec, items);
  else if (ec.experiment == "cluster-set") detail::run_cluster_set(ec, items);
  else if (ec.experiment == "denjoy-wolff") detail::run_denjoy_wolff(ec, items, out);
  else if (ec.experiment == "bidisc-topology") detail::run_bidisc_topology(ec, items);
  else if (ec.experiment == "oracle-suite") detail::run_oracle_suite(ec, items);
  else throw std::invalid_argument("run_experiment: unknown experiment " + ec.experiment);

  out.report["schema"] = report_schema_version();
  out.report["experiment"] = ec.experiment;
  out.report["config"] = Json{{"experiment", ec.experiment},
                              {"domain", to_json(ec.domain)},
                              {"metric", to_json(ec.metric)},
                              {"payload", ec.payload}};
  out.report["items"] = items.items;
  out.report["summary"] = Json{{"total", items.items.size()},
                               {"failed", items.failed},
                               {"inconclusive", items.inconclusive},
                               {"ok", items.failed == 0 && items.inconclusive == 0}};
  out.exit_code = items.failed > 0 ? 1 : items.inconclusive > 0 ? 2 : 0;
  return out;
}

inline std::string points_csv(const RunResult& r) {
  std::ostringstream os;
  for (int j = 0; j < r.point_dim; ++j) os << (j ? "," : "") << "re" << j << ",im" << j;
  os << ",tag\n";
  for (const PointRow& row : r.points) {
    for (std::size_t i = 0; i < row.coords.size(); ++i) os << (i ? "," : "") << detail::fmt_double(row.coords[i]);
    os << "," << row.tag << "\n";
  }
  return os.str();
}

/// File-level runner used by the CLI: reads the config, runs, writes
/// report.json (and points.csv when configured) under out_dir.
inline int run_experiment_file(const std::string& config_path, const std::string& out_dir,
                               std::optional<std::uint64_t> seed_override, bool verbose) {
  ExperimentConfig ec;
  try {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config " + config_path);
    Json j = Json::parse(in);
    ec = experiment_config_from_json(j);
    if (seed_override) ec.metric.seed = *seed_override;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  }
  try {
    const RunResult r = run_experiment(ec);
    std::filesystem::create_directories(out_dir);
    {
      std::ofstream rep(std::filesystem::path(out_dir) / ec.report_name, std::ios::binary);
      rep << r.report.dump(2) << "\n";
    }
    if (!ec.points_name.empty() && r.point_dim > 0) {
      std::ofstream pts(std::filesystem::path(out_dir) / ec.points_name, std::ios::binary);
      pts << points_csv(r);
    }
    if (verbose) {
      for (const auto& item : r.report.at("items"))
        std::printf("[%s] %s\n", item.at("status").get<std::string>().c_str(),
                    item.at("name").get<std::string>().c_str());
    }
    std::printf("%s: %s (exit %d)\n", ec.experiment.c_str(),
                r.report.at("summary").at("ok").get<bool>() ? "ok" : "issues", r.exit_code);
    return r.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  }
}

}  // namespace horokit
