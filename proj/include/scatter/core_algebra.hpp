#pragma once

#include <map>
#include <stdexcept>

#include "scatter/rational.hpp"

namespace scatter {

// Rank-2 lattice M with skew pairing kappa*(m1*m2' - m2*m1'), a simplicial
// support cone sigma, and a grading covector ell positive on sigma minus 0.
struct Lattice {
  long kappa = 1;
  Vec2 cone_gen0{1, 0};
  Vec2 cone_gen1{0, 1};
  Vec2 grading{1, 1};

  long grade(Vec2 m) const { return grading[0] * m[0] + grading[1] * m[1]; }

  // Membership in sigma: nonnegative rational combination of the generators.
  bool in_cone(Vec2 m) const {
    long det = cross(cone_gen0, cone_gen1);
    if (det == 0) throw std::logic_error("degenerate support cone");
    long a = cross(m, cone_gen1);
    long b = cross(cone_gen0, m);
    if (det < 0) {
      a = -a;
      b = -b;
    }
    return a >= 0 && b >= 0;
  }

  bool in_positive_part(Vec2 m) const { return !is_zero(m) && in_cone(m); }

  void validate() const {
    if (kappa == 0) throw std::logic_error("kappa must be nonzero");
    if (cross(cone_gen0, cone_gen1) == 0) throw std::logic_error("degenerate support cone");
    if (grade(cone_gen0) <= 0 || grade(cone_gen1) <= 0)
      throw std::logic_error("grading not positive on the cone");
  }
};

inline Q skew_pair(const Lattice& lat, Vec2 m, Vec2 mp) { return Q(lat.kappa) * Q(cross(m, mp)); }

// Finite Q-linear combination of monomials x_m with m in the positive part of
// sigma. Invariant: no zero coefficients, no keys outside the cone.
struct GradedSeries {
  std::map<Vec2, Q> coeff;

  bool is_zero() const { return coeff.empty(); }

  bool operator==(const GradedSeries& o) const { return coeff == o.coeff; }

  Q at(Vec2 m) const {
    auto it = coeff.find(m);
    return it == coeff.end() ? Q(0) : it->second;
  }

  void add_term(const Lattice& lat, Vec2 m, const Q& c) {
    if (c == 0) return;
    if (!lat.in_positive_part(m)) throw std::logic_error("monomial outside the support cone");
    auto [it, fresh] = coeff.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) coeff.erase(it);
    }
  }

  GradedSeries& add(const Lattice& lat, const GradedSeries& o) {
    for (const auto& [m, c] : o.coeff) add_term(lat, m, c);
    return *this;
  }

  GradedSeries scaled(const Q& s) const {
    GradedSeries r;
    if (s == 0) return r;
    r.coeff = coeff;
    for (auto& [m, c] : r.coeff) c *= s;
    return r;
  }

  GradedSeries truncated(const Lattice& lat, long order) const {
    GradedSeries r;
    for (const auto& [m, c] : coeff)
      if (lat.grade(m) <= order) r.coeff.emplace(m, c);
    return r;
  }

  long max_grade(const Lattice& lat) const {
    long g = 0;
    for (const auto& [m, c] : coeff) g = std::max(g, lat.grade(m));
    return g;
  }

  // Component of the given grade as a series.
  GradedSeries grade_part(const Lattice& lat, long order) const {
    GradedSeries r;
    for (const auto& [m, c] : coeff)
      if (lat.grade(m) == order) r.coeff.emplace(m, c);
    return r;
  }
};

// {x_m, x_m'} = kappa (m1 m2' - m2 m1') x_{m+m'}, truncated at grade N.
inline GradedSeries lie_bracket(const Lattice& lat, const GradedSeries& a, const GradedSeries& b,
                                long n) {
  GradedSeries r;
  for (const auto& [ma, ca] : a.coeff)
    for (const auto& [mb, cb] : b.coeff) {
      Vec2 m = ma + mb;
      if (lat.grade(m) > n) continue;
      r.add_term(lat, m, ca * cb * skew_pair(lat, ma, mb));
    }
  return r;
}

// Log of the dilogarithm attached to a primitive direction m:
// sum over j >= 1 of (-1)^j x_{j m} / j^2, truncated at grade N.
inline GradedSeries dilog_generator(const Lattice& lat, Vec2 m, long n) {
  if (!lat.in_positive_part(m)) throw std::logic_error("direction outside the support cone");
  if (m != primitive(m)) throw std::logic_error("direction must be primitive");
  GradedSeries g;
  for (long j = 1; lat.grade(m) * j <= n; ++j)
    g.add_term(lat, static_cast<long>(j) * m, Q(j % 2 == 0 ? 1 : -1) / Q(j * j));
  return g;
}

// A single wall-crossing automorphism, stored by its log. The generator is
// supported on positive multiples of one primitive direction, and the covector
// annihilates that direction.
struct WallCrossing {
  GradedSeries log;
  Vec2 direction{0, 0};
  Vec2 covector{0, 0};
};

// Monomial-indexed polynomial, used for crossing multipliers; unlike
// GradedSeries it may contain the constant key (0,0).
using MonomialMap = std::map<Vec2, Q>;

// Applies the crossing automorphism Theta = exp{., log} to the monomial x_m0
// and returns the multiplier f with Theta(x_m0) = x_m0 * f. Because the log is
// supported on multiples of a single direction, f = exp(sum_w skew(m0,w) g_w
// x_w) as a polynomial in the x_w, truncated at multiplier grade N.
inline MonomialMap exp_action(const Lattice& lat, const WallCrossing& w, Vec2 m0, long n) {
  GradedSeries h;
  for (const auto& [mw, c] : w.log.coeff) {
    if (cross(w.direction, mw) != 0)
      throw std::logic_error("crossing log not supported on its direction");
    if (lat.grade(mw) > n) continue;
    h.add_term(lat, mw, c * skew_pair(lat, m0, mw));
  }
  MonomialMap f;
  f[Vec2{0, 0}] = 1;
  MonomialMap pow = f;
  Q fact(1);
  for (long k = 1; k <= n && !h.is_zero(); ++k) {
    // pow <- pow * h, truncated.
    MonomialMap next;
    for (const auto& [ma, ca] : pow)
      for (const auto& [mb, cb] : h.coeff) {
        Vec2 m = ma + mb;
        if (lat.grade(m) > n) continue;
        Q c = ca * cb;
        auto [it, fresh] = next.emplace(m, c);
        if (!fresh) it->second += c;
      }
    if (next.empty()) break;
    pow = std::move(next);
    fact *= Q(k);
    for (const auto& [m, c] : pow) {
      Q add = c / fact;
      auto [it, fresh] = f.emplace(m, add);
      if (!fresh) it->second += add;
    }
  }
  for (auto it = f.begin(); it != f.end();)
    it = it->second == 0 ? f.erase(it) : std::next(it);
  return f;
}

}  // namespace scatter
