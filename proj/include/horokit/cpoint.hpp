#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

namespace horokit {

using Complex = std::complex<double>;

/// A point of C^n stored as an ordered list of complex coordinates.
/// All coordinates must stay finite; dimension is fixed at construction.
class CPoint {
 public:
  CPoint() = default;
  explicit CPoint(std::vector<Complex> coords) : coords_(std::move(coords)) {}
  CPoint(std::initializer_list<Complex> coords) : coords_(coords) {}
  explicit CPoint(Complex z) : coords_{z} {}

  static CPoint zero(int dim) { return CPoint(std::vector<Complex>(static_cast<std::size_t>(dim))); }

  int dim() const { return static_cast<int>(coords_.size()); }

  Complex& operator[](int i) { return coords_[static_cast<std::size_t>(i)]; }
  const Complex& operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

  const std::vector<Complex>& coords() const { return coords_; }

  /// First coordinate, convenient for one-dimensional domains.
  Complex scalar() const {
    if (coords_.empty()) throw std::invalid_argument("CPoint::scalar: empty point");
    return coords_[0];
  }

  double norm_sq() const {
    double s = 0.0;
    for (const Complex& c : coords_) s += std::norm(c);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  bool is_finite() const {
    for (const Complex& c : coords_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
  }

  /// View as a real 2n-vector (Re z1, Im z1, Re z2, Im z2, ...).
  std::vector<double> real_coords() const {
    std::vector<double> r;
    r.reserve(coords_.size() * 2);
    for (const Complex& c : coords_) {
      r.push_back(c.real());
      r.push_back(c.imag());
    }
    return r;
  }

  static CPoint from_real_coords(const std::vector<double>& r) {
    if (r.size() % 2 != 0) throw std::invalid_argument("from_real_coords: odd length");
    std::vector<Complex> c(r.size() / 2);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = Complex(r[2 * j], r[2 * j + 1]);
    return CPoint(std::move(c));
  }

  friend CPoint operator+(const CPoint& a, const CPoint& b) {
    check_dims(a, b);
    CPoint r = a;
    for (int i = 0; i < r.dim(); ++i) r[i] += b[i];
    return r;
  }
  friend CPoint operator-(const CPoint& a, const CPoint& b) {
    check_dims(a, b);
    CPoint r = a;
    for (int i = 0; i < r.dim(); ++i) r[i] -= b[i];
    return r;
  }
  friend CPoint operator*(Complex s, const CPoint& a) {
    CPoint r = a;
    for (int i = 0; i < r.dim(); ++i) r[i] *= s;
    return r;
  }
  friend CPoint operator*(double s, const CPoint& a) { return Complex(s, 0.0) * a; }

  friend bool operator==(const CPoint& a, const CPoint& b) { return a.coords_ == b.coords_; }

  double distance_to(const CPoint& other) const { return (*this - other).norm(); }

 private:
  static void check_dims(const CPoint& a, const CPoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("CPoint: dimension mismatch");
  }
  std::vector<Complex> coords_;
};

/// Hermitian inner product sum_j z_j * conj(w_j).
inline Complex hermitian_inner(const CPoint& z, const CPoint& w) {
  if (z.dim() != w.dim()) throw std::invalid_argument("hermitian_inner: dimension mismatch");
  Complex s(0.0, 0.0);
  for (int i = 0; i < z.dim(); ++i) s += z[i] * std::conj(w[i]);
  return s;
}

inline CPoint midpoint(const CPoint& a, const CPoint& b) { return 0.5 * (a + b); }

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace horokit
