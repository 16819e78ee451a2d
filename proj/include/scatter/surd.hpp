#pragma once

#include <stdexcept>

#include "scatter/rational.hpp"

namespace scatter {

// Exact scalar of the form q * sqrt(d) with q rational and d a squarefree
// positive integer; q == 0 forces d == 1. Closed under multiplication, so the
// Gaussian prefactors 2^{(k-1)/2}, |Hess W|^{1/2} and transversal factors can
// be carried exactly until they cancel. Sums are only defined within one
// sqrt(d) class; final coefficients must land back in Q (d == 1).
struct SurdScalar {
  Q q = 0;
  std::int64_t d = 1;

  SurdScalar() = default;
  explicit SurdScalar(Q rational) : q(std::move(rational)), d(1) {}
  SurdScalar(Q coeff, std::int64_t radicand) : q(std::move(coeff)), d(radicand) {
    if (d <= 0) throw std::invalid_argument("SurdScalar: nonpositive radicand");
    normalize();
  }

  static std::int64_t square_free_split(std::int64_t n, std::int64_t& root) {
    // n = root^2 * (returned squarefree part); trial division is fine at the
    // magnitudes produced by small Hessians.
    root = 1;
    for (std::int64_t p = 2; p * p <= n; ++p) {
      while (n % (p * p) == 0) {
        n /= p * p;
        root *= p;
      }
    }
    return n;
  }

  void normalize() {
    if (q == 0) {
      d = 1;
      return;
    }
    std::int64_t root = 1;
    d = square_free_split(d, root);
    q *= root;
  }

  // sqrt(v) for v > 0 rational: sqrt(p/r) = sqrt(p*r)/r.
  static SurdScalar sqrt_of(const Q& v) {
    if (v <= 0) throw std::invalid_argument("SurdScalar::sqrt_of: need v > 0");
    Z pn = numerator(v) * denominator(v);
    if (pn > Z(std::int64_t(1) << 62))
      throw std::overflow_error("SurdScalar::sqrt_of: radicand too large");
    return SurdScalar(Q(1, denominator(v)), static_cast<std::int64_t>(pn));
  }

  bool is_rational() const { return d == 1; }
  Q rational_value() const {
    if (!is_rational())
      throw std::logic_error("SurdScalar: irrational where a rational is required");
    return q;
  }

  friend SurdScalar operator*(const SurdScalar& a, const SurdScalar& b) {
    SurdScalar r;
    r.q = a.q * b.q;
    r.d = a.d * b.d;
    r.normalize();
    return r;
  }
  friend SurdScalar operator*(const Q& a, const SurdScalar& b) {
    SurdScalar r = b;
    r.q *= a;
    if (r.q == 0) r.d = 1;
    return r;
  }
  friend SurdScalar operator+(const SurdScalar& a, const SurdScalar& b) {
    if (a.q == 0) return b;
    if (b.q == 0) return a;
    if (a.d != b.d)
      throw std::logic_error("SurdScalar: sum across sqrt classes");
    SurdScalar r;
    r.q = a.q + b.q;
    r.d = r.q == 0 ? 1 : a.d;
    return r;
  }
  friend bool operator==(const SurdScalar& a, const SurdScalar& b) {
    return a.q == b.q && a.d == b.d;
  }
};

}  // namespace scatter
