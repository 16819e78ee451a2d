#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "scatter/rational.hpp"

namespace scatter {

// Sparse polynomial over Q in a fixed number of variables.
// Invariant: every stored coefficient is nonzero; every exponent vector has
// size nvars.
struct Poly {
  int nvars = 0;
  std::map<std::vector<int>, Q> terms;

  Poly() = default;
  explicit Poly(int n) : nvars(n) {}

  static Poly constant(int n, const Q& c) {
    Poly p(n);
    if (!(c == 0)) p.terms[std::vector<int>(n, 0)] = c;
    return p;
  }

  static Poly variable(int n, int i) {
    Poly p(n);
    std::vector<int> e(n, 0);
    e.at(i) = 1;
    p.terms[e] = 1;
    return p;
  }

  bool is_zero() const { return terms.empty(); }

  bool operator==(const Poly& o) const { return nvars == o.nvars && terms == o.terms; }

  Q coeff(const std::vector<int>& e) const {
    auto it = terms.find(e);
    return it == terms.end() ? Q(0) : it->second;
  }

  Q constant_term() const { return coeff(std::vector<int>(nvars, 0)); }

  void add_term(const std::vector<int>& e, const Q& c) {
    if (c == 0) return;
    auto [it, fresh] = terms.emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms) add_term(e, c);
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms) add_term(e, -c);
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_vars(b);
    Poly r(a.nvars);
    for (const auto& [ea, ca] : a.terms)
      for (const auto& [eb, cb] : b.terms) {
        std::vector<int> e(ea);
        for (int i = 0; i < r.nvars; ++i) e[i] += eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  friend Poly operator*(const Q& s, Poly p) {
    if (s == 0) return Poly(p.nvars);
    for (auto& [e, c] : p.terms) c *= s;
    return p;
  }

  Poly operator-() const { return Q(-1) * (*this); }

  Poly derivative(int var) const {
    Poly r(nvars);
    for (const auto& [e, c] : terms) {
      if (e[var] == 0) continue;
      std::vector<int> d(e);
      d[var] -= 1;
      r.add_term(d, c * Q(e[var]));
    }
    return r;
  }

  Q eval(const std::vector<Q>& x) const {
    if (static_cast<int>(x.size()) != nvars) throw std::logic_error("eval arity mismatch");
    Q acc(0);
    for (const auto& [e, c] : terms) {
      Q t = c;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      acc += t;
    }
    return acc;
  }

  // Substitutes a polynomial (over the same variable set) for one variable.
  Poly substituted(int var, const Poly& value) const {
    check_vars(value);
    Poly r(nvars);
    for (const auto& [e, c] : terms) {
      std::vector<int> rest(e);
      int k = rest[var];
      rest[var] = 0;
      Poly t(nvars);
      t.terms[rest] = c;
      for (int i = 0; i < k; ++i) t = t * value;
      r += t;
    }
    return r;
  }

  // Substitutes rational values for a subset of variables, keeping arity.
  Poly specialized(const std::map<int, Q>& values) const {
    Poly r(nvars);
    for (const auto& [e, c] : terms) {
      Q f = c;
      std::vector<int> rest(e);
      for (const auto& [var, val] : values) {
        for (int k = 0; k < e[var]; ++k) f *= val;
        rest[var] = 0;
      }
      r.add_term(rest, f);
    }
    return r;
  }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms) {
      int t = 0;
      for (int x : e) t += x;
      if (t > d) d = t;
    }
    return d;
  }

  int degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms)
      if (e[var] > d) d = e[var];
    return d;
  }

 private:
  void check_vars(const Poly& o) const {
    if (nvars != o.nvars) throw std::logic_error("polynomial arity mismatch");
  }
};

// Affine functional a·s + b on rational affine space.
struct AffineFunctional {
  std::vector<Q> lin;
  Q cst = 0;

  bool operator==(const AffineFunctional& o) const { return lin == o.lin && cst == o.cst; }

  Q eval(const std::vector<Q>& x) const {
    if (x.size() != lin.size()) throw std::logic_error("affine eval arity mismatch");
    Q acc = cst;
    for (std::size_t i = 0; i < lin.size(); ++i) acc += lin[i] * x[i];
    return acc;
  }

  bool linear_zero() const {
    for (const auto& c : lin)
      if (!(c == 0)) return false;
    return true;
  }
};

// Reads an affine functional off a degree-<=1 polynomial.
inline AffineFunctional affine_of(const Poly& p) {
  if (p.degree() > 1) throw std::logic_error("polynomial is not affine");
  AffineFunctional f;
  f.lin.assign(p.nvars, Q(0));
  for (const auto& [e, c] : p.terms) {
    int var = -1;
    for (int i = 0; i < p.nvars; ++i)
      if (e[i] == 1) var = i;
    if (var < 0)
      f.cst = c;
    else
      f.lin[var] = c;
  }
  return f;
}

}  // namespace scatter
