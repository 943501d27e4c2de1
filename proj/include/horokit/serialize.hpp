#pragma once

#include <json.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "horokit/boundary.hpp"
#include "horokit/domain.hpp"
#include "horokit/horosphere.hpp"
#include "horokit/maps.hpp"
#include "horokit/metric.hpp"
#include "horokit/sequence.hpp"

namespace horokit {

// Reports use ordered_json throughout: with a fixed insertion order the
// serialized bytes are reproducible, which the determinism contract needs.
using Json = nlohmann::ordered_json;

inline Json to_json(const CPoint& p) {
  Json a = Json::array();
  for (const Complex& c : p.coords()) a.push_back(Json::array({c.real(), c.imag()}));
  return a;
}

inline CPoint cpoint_from_json(const Json& j) {
  std::vector<Complex> coords;
  for (const auto& e : j) coords.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return CPoint(std::move(coords));
}

inline Complex complex_from_json(const Json& j) {
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

inline Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

inline Json to_json(const Domain& d) {
  Json j;
  j["kind"] = domain_kind_name(d.kind());
  j["dim"] = d.dim();
  j["params"] = Json::object();
  if (d.kind() == DomainKind::RealHalfSpace) {
    const CPoint q = d.nearest_boundary_point(d.center());
    const auto u = d.outward_normal(q);
    j["params"]["normal"] = u;
    double off = 0.0;
    const auto x = q.real_coords();
    for (std::size_t i = 0; i < u.size(); ++i) off += u[i] * x[i];
    j["params"]["offset"] = off;
  }
  return j;
}

inline Domain domain_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.value("dim", 1);
  const Json params = j.value("params", Json::object());
  if (kind == "UnitDisc") return Domain::unit_disc();
  if (kind == "Polydisc") return Domain::polydisc(dim);
  if (kind == "UnitBall") return Domain::unit_ball(dim);
  if (kind == "SiegelH2") return Domain::siegel_h2();
  if (kind == "ParabolicConvex") return Domain::parabolic_convex();
  if (kind == "RealHalfSpace")
    return Domain::real_half_space(params.at("normal").get<std::vector<double>>(),
                                   params.at("offset").get<double>());
  if (kind == "SampledConvex") {
    const std::string preset = params.at("preset").get<std::string>();
    if (preset == "hull") {
      std::vector<CPoint> vs;
      for (const auto& v : params.at("vertices")) vs.push_back(cpoint_from_json(v));
      return Domain::sampled_convex(dim, hull_support(std::move(vs)));
    }
    if (preset == "ellipsoid")
      return Domain::sampled_convex(dim, ellipsoid_support(params.at("semiaxes").get<std::vector<double>>()));
    throw std::invalid_argument("domain_from_json: unknown SampledConvex preset " + preset);
  }
  throw std::invalid_argument("domain_from_json: unknown kind " + kind);
}

// ---------------------------------------------------------------------------
// MetricConfig
// ---------------------------------------------------------------------------

inline Json to_json(const MetricConfig& cfg) {
  Json j;
  j["tail_start"] = cfg.tail_start;
  j["tail_len"] = cfg.tail_len;
  j["tol"] = cfg.tol;
  j["r_grid"] = cfg.r_grid;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  return j;
}

inline MetricConfig metric_config_from_json(const Json& j) {
  MetricConfig cfg;
  cfg.tail_start = j.value("tail_start", cfg.tail_start);
  cfg.tail_len = j.value("tail_len", cfg.tail_len);
  cfg.tol = j.value("tol", cfg.tol);
  if (j.contains("r_grid")) cfg.r_grid = j.at("r_grid").get<std::vector<double>>();
  cfg.samples = j.value("samples", cfg.samples);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// PointSequence
// ---------------------------------------------------------------------------

inline Json to_json(const PointSequence& s);

namespace detail {

inline Json sequence_params_json(const PointSequence& s) {
  Json p = Json::object();
  switch (s.family()) {
    case SequenceFamily::Radial:
      p["point"] = to_json(s.params()[0]);
      break;
    case SequenceFamily::BidiscW1:
      p["p1"] = to_json(s.params()[0][0]);
      p["p2"] = to_json(s.params()[0][1]);
      break;
    case SequenceFamily::BidiscW2:
    case SequenceFamily::BidiscW3:
      p["p"] = to_json(s.params()[0][s.family() == SequenceFamily::BidiscW2 ? 0 : 1]);
      break;
    case SequenceFamily::Interleaved:
      p["a"] = to_json(s.part_a());
      p["b"] = to_json(s.part_b());
      break;
    case SequenceFamily::Custom:
      p["preset"] = s.tag();
      break;
  }
  return p;
}

}  // namespace detail

inline Json to_json(const PointSequence& s) {
  Json j;
  j["label"] = sequence_family_name(s.family());
  j["params"] = detail::sequence_params_json(s);
  j["domain"] = to_json(s.domain());
  return j;
}

/// Custom-sequence presets available to configuration files.
inline PointSequence custom_sequence_from_preset(const Domain& d, const Json& params) {
  const std::string preset = params.at("preset").get<std::string>();
  if (preset == "radial_power") {
    const CPoint p = cpoint_from_json(params.at("point"));
    const double k = params.value("exponent", 1.0);
    return PointSequence::custom(d, [p, k](long n) {
      return (1.0 - std::pow(static_cast<double>(n), -k)) * p;
    }, "radial_power");
  }
  if (preset == "mixed_rate") {
    const Complex p1 = complex_from_json(params.at("p1"));
    const Complex p2 = complex_from_json(params.at("p2"));
    const double k1 = params.value("k1", 1.0);
    const double k2 = params.value("k2", 2.0);
    return PointSequence::custom(d, [p1, p2, k1, k2](long n) {
      const double nn = static_cast<double>(n);
      return CPoint{(1.0 - std::pow(nn, -k1)) * p1, (1.0 - std::pow(nn, -k2)) * p2};
    }, "mixed_rate");
  }
  if (preset == "spiral") {
    const CPoint p = cpoint_from_json(params.at("point"));
    const double rate = params.value("rate", 1.0);
    return PointSequence::custom(d, [p, rate](long n) {
      const double nn = static_cast<double>(n);
      return std::polar(1.0 - 1.0 / nn, rate / nn) * p;
    }, "spiral");
  }
  if (preset == "cycle") {
    std::vector<CPoint> pts;
    for (const auto& e : params.at("points")) pts.push_back(cpoint_from_json(e));
    return PointSequence::custom(d, [pts](long n) {
      return (1.0 - 1.0 / static_cast<double>(n)) * pts[static_cast<std::size_t>(n) % pts.size()];
    }, "cycle");
  }
  throw std::invalid_argument("custom_sequence_from_preset: unknown preset " + preset);
}

inline PointSequence sequence_from_json(const Json& j) {
  const std::string label = j.at("label").get<std::string>();
  const Domain d = domain_from_json(j.at("domain"));
  const Json params = j.value("params", Json::object());
  if (label == "Radial") return PointSequence::radial(d, cpoint_from_json(params.at("point")));
  if (label == "BidiscW1")
    return PointSequence::bidisc_w1(complex_from_json(params.at("p1")), complex_from_json(params.at("p2")));
  if (label == "BidiscW2") return PointSequence::bidisc_w2(complex_from_json(params.at("p")));
  if (label == "BidiscW3") return PointSequence::bidisc_w3(complex_from_json(params.at("p")));
  if (label == "Interleaved")
    return PointSequence::interleaved(sequence_from_json(params.at("a")), sequence_from_json(params.at("b")));
  if (label == "Custom") return custom_sequence_from_preset(d, params);
  throw std::invalid_argument("sequence_from_json: unknown label " + label);
}

// ---------------------------------------------------------------------------
// Verdicts, cluster sets
// ---------------------------------------------------------------------------

inline Json to_json(const Verdict& v) {
  Json j;
  j["decision"] = v.decision;
  j["estimate"] = v.estimate;
  j["margin"] = v.margin;
  j["converged"] = v.converged;
  j["window"] = Json{{"start", v.window_start}, {"len", v.window_len}};
  j["tol"] = v.tol;
  j["halfwidth"] = v.halfwidth;
  j["outcome"] = outcome_name(v.outcome());
  return j;
}

inline Json to_json(const ClusterSet& cs) {
  Json j;
  Json pts = Json::array();
  for (const CPoint& p : cs.points) pts.push_back(to_json(p));
  j["points"] = pts;
  j["escapes_to_infinity"] = cs.escapes_to_infinity;
  return j;
}

// ---------------------------------------------------------------------------
// MapSpec
// ---------------------------------------------------------------------------

inline Json to_json(const MapSpec& m) {
  Json j;
  j["kind"] = map_kind_name(m.kind());
  Json p = Json::object();
  switch (m.kind()) {
    case MapKind::DiscAutomorphism:
      p["a"] = to_json(m.center_param()[0]);
      p["theta"] = m.theta_param();
      break;
    case MapKind::BallAutomorphism:
      p["center"] = to_json(m.center_param());
      p["phases"] = m.phases_param();
      break;
    case MapKind::Composite: {
      Json maps = Json::array();
      for (const MapSpec& c : m.children()) maps.push_back(to_json(c));
      p["maps"] = maps;
      break;
    }
    default:
      break;
  }
  j["params"] = p;
  j["inverted"] = m.inverted();
  return j;
}

inline MapSpec map_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const Json params = j.value("params", Json::object());
  MapSpec m = [&]() {
    if (kind == "DiscAutomorphism")
      return MapSpec::disc_automorphism(complex_from_json(params.at("a")), params.value("theta", 0.0));
    if (kind == "BallAutomorphism")
      return MapSpec::ball_automorphism(cpoint_from_json(params.at("center")),
                                        params.at("phases").get<std::vector<double>>());
    if (kind == "Cayley2") return MapSpec::cayley2();
    if (kind == "SiegelToParabolic") return MapSpec::siegel_to_parabolic();
    if (kind == "Composite") {
      std::vector<MapSpec> maps;
      for (const auto& c : params.at("maps")) maps.push_back(map_from_json(c));
      return MapSpec::composite(std::move(maps));
    }
    throw std::invalid_argument("map_from_json: unknown kind " + kind);
  }();
  if (j.value("inverted", false)) m = m.inverse();
  return m;
}

}  // namespace horokit
