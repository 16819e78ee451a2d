#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "scatter/linalg.hpp"
#include "scatter/poly.hpp"
#include "scatter/rational.hpp"
#include "scatter/surd.hpp"

namespace scatter {

// One meromorphic summand: prefactor * numerator / prod(denominator), carrying
// the covector and algebra payload that the assembler pairs up afterwards.
struct RationalSection {
  SurdScalar prefactor{Q(1), 1};
  QVec2 covector{Q(0), Q(0)};
  Poly numerator{0};
  std::vector<AffineFunctional> denominator;
  Q weight = Q(1);
  Vec2 degree{0, 0};
};

using Arrangement = std::vector<AffineFunctional>;

namespace detail {

inline int arrangement_dim(const Arrangement& g) {
  if (g.empty()) throw std::invalid_argument("empty arrangement has no dimension");
  int d = static_cast<int>(g.front().lin.size());
  for (const auto& f : g)
    if (static_cast<int>(f.lin.size()) != d)
      throw std::invalid_argument("mixed dimensions in arrangement");
  return d;
}

// Visits index subsets of size k in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline QMat rows_of(const Arrangement& g, const std::vector<std::size_t>& idx, int d) {
  QMat a(static_cast<int>(idx.size()), d);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (int c = 0; c < d; ++c) a.at(static_cast<int>(r), c) = g[idx[r]].lin[c];
  return a;
}

// Membership of v in the positive span of gens, by Caratheodory over
// independent subsets. Sizes are tiny throughout.
inline bool in_positive_span(const std::vector<Q>& v, const std::vector<std::vector<Q>>& gens) {
  int d = static_cast<int>(v.size());
  bool zero = std::all_of(v.begin(), v.end(), [](const Q& q) { return q == 0; });
  if (zero) return true;
  for (std::size_t k = 1; k <= std::min<std::size_t>(gens.size(), d); ++k) {
    bool found = false;
    for_each_subset(gens.size(), k, [&](const std::vector<std::size_t>& idx) {
      if (found) return;
      QMat a(d, static_cast<int>(k));
      for (int r = 0; r < d; ++r)
        for (std::size_t c = 0; c < k; ++c) a.at(r, static_cast<int>(c)) = gens[idx[c]][r];
      AffineSolve sol = solve_affine(a, v);
      if (!sol.consistent) return;
      for (const Q& coord : sol.particular)
        if (coord < 0) return;
      found = true;
    });
    if (found) return true;
  }
  return false;
}

}  // namespace detail

inline bool is_regular_point(const std::vector<Q>& x, const Arrangement& g) {
  for (const auto& f : g)
    if (f.eval(x) == 0) return false;
  return true;
}

// A direction is regular when it avoids the span of every (d-1)-element
// subset of the arrangement's linear parts.
inline bool is_regular_direction(const std::vector<Q>& zeta, const Arrangement& g) {
  int d = detail::arrangement_dim(g);
  bool regular = true;
  detail::for_each_subset(g.size(), static_cast<std::size_t>(d) - 1,
                          [&](const std::vector<std::size_t>& idx) {
                            if (!regular) return;
                            QMat a = detail::rows_of(g, idx, d);
                            QMat b(a.rows + 1, d);
                            for (int r = 0; r < a.rows; ++r)
                              for (int c = 0; c < d; ++c) b.at(r, c) = a.at(r, c);
                            for (int c = 0; c < d; ++c) b.at(a.rows, c) = zeta[c];
                            if (rank_of(b) == rank_of(a)) regular = false;
                          });
  return regular;
}

struct SingularPoint {
  std::vector<Q> point;
  std::vector<std::size_t> vanishing;  // indices into the arrangement
};

// All points lying on at least d hyperplanes, each with the sublist of
// functionals vanishing there. Ordered by point for determinism.
inline std::vector<SingularPoint> singular_points(const Arrangement& g) {
  if (g.empty()) return {};
  int d = detail::arrangement_dim(g);
  std::map<std::vector<Q>, std::vector<std::size_t>> found;
  detail::for_each_subset(g.size(), static_cast<std::size_t>(d),
                          [&](const std::vector<std::size_t>& idx) {
                            QMat a = detail::rows_of(g, idx, d);
                            std::vector<Q> rhs;
                            for (std::size_t i : idx) rhs.push_back(-g[i].cst);
                            auto sol = solve_unique<Q>(a, rhs);
                            if (!sol) return;
                            if (found.count(*sol)) return;
                            std::vector<std::size_t> vanishing;
                            for (std::size_t i = 0; i < g.size(); ++i)
                              if (g[i].eval(*sol) == 0) vanishing.push_back(i);
                            found.emplace(*sol, std::move(vanishing));
                          });
  std::vector<SingularPoint> out;
  for (auto& [pt, vanishing] : found) out.push_back({pt, vanishing});
  return out;
}

// Residue at x, eliminating variables in the given order. For simple
// transverse poles this is numerator-over-Jacobian: the Jacobian rows follow
// the section's own denominator order, the columns the elimination order, so
// permuting the elimination order flips the sign with the volume form.
inline SurdScalar iterated_residue(const RationalSection& f, const std::vector<int>& var_order,
                                   const std::vector<Q>& x) {
  int d = static_cast<int>(x.size());
  std::vector<std::size_t> vanish;
  Q rest(1);
  for (std::size_t i = 0; i < f.denominator.size(); ++i) {
    Q v = f.denominator[i].eval(x);
    if (v == 0)
      vanish.push_back(i);
    else
      rest *= v;
  }
  if (static_cast<int>(vanish.size()) < d) return SurdScalar{};
  if (static_cast<int>(vanish.size()) > d)
    throw std::logic_error("higher-order pole: more than d factors vanish");
  QMat jac(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) jac.at(r, c) = f.denominator[vanish[r]].lin[var_order[c]];
  Q det = det_of(jac);
  if (det == 0) throw std::logic_error("higher-order pole: vanishing factors are dependent");
  return (f.numerator.eval(x) / (rest * det)) * f.prefactor;
}

// Basis case: the chamber must be exactly the positive span of the vanishing
// basis; the value is the canonically ordered iterated residue.
inline SurdScalar jk_local(const RationalSection& f, const std::vector<Q>& x,
                           const Arrangement& g_x, const std::vector<std::vector<Q>>& chamber) {
  int d = static_cast<int>(x.size());
  if (static_cast<int>(g_x.size()) != d)
    throw std::invalid_argument("vanishing sublist is not a basis");
  QMat basis(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) basis.at(r, c) = g_x[r].lin[c];
  if (det_of(basis) == 0) throw std::invalid_argument("vanishing sublist is not a basis");

  std::vector<std::vector<Q>> basis_gens;
  for (const auto& f_x : g_x) basis_gens.push_back(f_x.lin);
  for (const auto& gen : chamber)
    if (!detail::in_positive_span(gen, basis_gens))
      throw std::invalid_argument("chamber is not the positive span of the vanishing basis");
  for (const auto& gen : basis_gens)
    if (!detail::in_positive_span(gen, chamber))
      throw std::invalid_argument("chamber is not the positive span of the vanishing basis");

  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  return iterated_residue(f, order, x);
}

namespace detail {

inline SurdScalar surd_add(const SurdScalar& a, const SurdScalar& b) {
  if (a.q == 0) return b;
  if (b.q == 0) return a;
  return a + b;
}

inline Arrangement dedup(const Arrangement& g) {
  Arrangement out;
  for (const auto& f : g) {
    bool seen = false;
    for (const auto& h : out)
      if (h == f) seen = true;
    if (!seen) out.push_back(f);
  }
  return out;
}

}  // namespace detail

// Sum of local residues over the singular points of f's own arrangement.
inline SurdScalar jk_global(const RationalSection& f, const std::vector<std::vector<Q>>& chamber) {
  if (f.denominator.empty()) return SurdScalar{};
  Arrangement g = detail::dedup(f.denominator);
  SurdScalar total{};
  for (const SingularPoint& sp : singular_points(g)) {
    Arrangement g_x;
    for (std::size_t i : sp.vanishing) g_x.push_back(g[i]);
    total = detail::surd_add(total, jk_local(f, sp.point, g_x, chamber));
  }
  return total;
}

inline std::vector<std::vector<Q>> positive_span_chamber(const Arrangement& g) {
  std::vector<std::vector<Q>> chamber;
  for (const auto& f : detail::dedup(g)) chamber.push_back(f.lin);
  return chamber;
}

}  // namespace scatter
