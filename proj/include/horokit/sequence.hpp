#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "horokit/cpoint.hpp"
#include "horokit/domain.hpp"

namespace horokit {

enum class SequenceFamily { Radial, BidiscW1, BidiscW2, BidiscW3, Interleaved, Custom };

inline const char* sequence_family_name(SequenceFamily f) {
  switch (f) {
    case SequenceFamily::Radial: return "Radial";
    case SequenceFamily::BidiscW1: return "BidiscW1";
    case SequenceFamily::BidiscW2: return "BidiscW2";
    case SequenceFamily::BidiscW3: return "BidiscW3";
    case SequenceFamily::Interleaved: return "Interleaved";
    case SequenceFamily::Custom: return "Custom";
  }
  return "?";
}

/// A lazily evaluable sequence {u_n}, n >= 1, in a fixed domain. Canonical
/// constructors cover the families used throughout: radial approach to a
/// boundary point and the three bidisc model families
///   w1(p1,p2)_n = (p1 (1-1/n), p2 (1-1/n)),
///   w2(p)_n     = (p (1-1/n), 0),
///   w3(p)_n     = (0, p (1-1/n)),
/// plus the interleaving u_{2n-1} = a_n, u_{2n} = b_n.
class PointSequence {
 public:
  using Generator = std::function<CPoint(long)>;

  PointSequence() = default;

  static PointSequence radial(const Domain& d, const CPoint& boundary_point) {
    if (boundary_point.dim() != d.dim()) throw std::invalid_argument("radial: dimension mismatch");
    PointSequence s;
    s.domain_ = d;
    s.family_ = SequenceFamily::Radial;
    s.params_ = {boundary_point};
    s.gen_ = [p = boundary_point](long n) { return (1.0 - 1.0 / static_cast<double>(n)) * p; };
    return s;
  }

  static PointSequence bidisc_w1(Complex p1, Complex p2) {
    require_unimodular(p1);
    require_unimodular(p2);
    PointSequence s;
    s.domain_ = Domain::polydisc(2);
    s.family_ = SequenceFamily::BidiscW1;
    s.params_ = {CPoint{p1, p2}};
    s.gen_ = [p1, p2](long n) {
      const double r = 1.0 - 1.0 / static_cast<double>(n);
      return CPoint{r * p1, r * p2};
    };
    return s;
  }

  static PointSequence bidisc_w2(Complex p) {
    require_unimodular(p);
    PointSequence s;
    s.domain_ = Domain::polydisc(2);
    s.family_ = SequenceFamily::BidiscW2;
    s.params_ = {CPoint{p, Complex(0.0, 0.0)}};
    s.gen_ = [p](long n) {
      return CPoint{(1.0 - 1.0 / static_cast<double>(n)) * p, Complex(0.0, 0.0)};
    };
    return s;
  }

  static PointSequence bidisc_w3(Complex p) {
    require_unimodular(p);
    PointSequence s;
    s.domain_ = Domain::polydisc(2);
    s.family_ = SequenceFamily::BidiscW3;
    s.params_ = {CPoint{Complex(0.0, 0.0), p}};
    s.gen_ = [p](long n) {
      return CPoint{Complex(0.0, 0.0), (1.0 - 1.0 / static_cast<double>(n)) * p};
    };
    return s;
  }

  static PointSequence interleaved(const PointSequence& a, const PointSequence& b) {
    if (a.domain().kind() != b.domain().kind() || a.domain().dim() != b.domain().dim())
      throw std::invalid_argument("interleaved: mismatched domains");
    PointSequence s;
    s.domain_ = a.domain_;
    s.family_ = SequenceFamily::Interleaved;
    s.parts_ = std::make_shared<std::pair<PointSequence, PointSequence>>(a, b);
    s.gen_ = [parts = s.parts_](long n) {
      return (n % 2 == 1) ? parts->first.at((n + 1) / 2) : parts->second.at(n / 2);
    };
    return s;
  }

  static PointSequence custom(const Domain& d, Generator gen, std::string tag = "custom") {
    if (!gen) throw std::invalid_argument("custom: null generator");
    PointSequence s;
    s.domain_ = d;
    s.family_ = SequenceFamily::Custom;
    s.gen_ = std::move(gen);
    s.tag_ = std::move(tag);
    return s;
  }

  /// Custom sequence backed by a precomputed orbit (index clamps to the last
  /// stored entry so tail windows stay defined).
  static PointSequence from_orbit(const Domain& d, std::vector<CPoint> orbit, std::string tag = "orbit") {
    if (orbit.empty()) throw std::invalid_argument("from_orbit: empty orbit");
    auto data = std::make_shared<std::vector<CPoint>>(std::move(orbit));
    PointSequence s;
    s.domain_ = d;
    s.family_ = SequenceFamily::Custom;
    s.tag_ = std::move(tag);
    s.gen_ = [data](long n) {
      const std::size_t i = static_cast<std::size_t>(std::max<long>(1, n)) - 1;
      return (*data)[std::min(i, data->size() - 1)];
    };
    return s;
  }

  CPoint at(long n) const {
    if (n < 1) throw std::invalid_argument("PointSequence: index must be >= 1");
    return gen_(n);
  }

  const Domain& domain() const { return domain_; }
  SequenceFamily family() const { return family_; }
  const std::vector<CPoint>& params() const { return params_; }
  const std::string& tag() const { return tag_; }

  const PointSequence& part_a() const { return require_parts().first; }
  const PointSequence& part_b() const { return require_parts().second; }

 private:
  static void require_unimodular(Complex p) {
    if (std::abs(std::abs(p) - 1.0) > 1e-12)
      throw std::invalid_argument("bidisc family: tangency point must be unimodular");
  }
  const std::pair<PointSequence, PointSequence>& require_parts() const {
    if (!parts_) throw std::logic_error("PointSequence: not an interleaving");
    return *parts_;
  }

  Domain domain_ = Domain::unit_disc();
  SequenceFamily family_ = SequenceFamily::Custom;
  std::vector<CPoint> params_;
  std::shared_ptr<std::pair<PointSequence, PointSequence>> parts_;
  Generator gen_;
  std::string tag_;
};

}  // namespace horokit
