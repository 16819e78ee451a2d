#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "scatter/completion_oracle.hpp"
#include "scatter/jk_residue.hpp"
#include "scatter/tree_engine.hpp"
#include "scatter/unfolding.hpp"

namespace scatter {

enum class CriticalClass { interior, boundary, outside };

struct Classification {
  CriticalClass cls = CriticalClass::outside;
  int stratum = -1;
};

// Position of the flow critical point relative to the domain, read off the
// tropical cell: an empty cell never meets the domain, a boundary stratum
// pins the critical point to a face, otherwise it is interior over the whole
// relative interior of the cell.
inline Classification classify_critical(const ScatteringDiagram& d, const LabelledTree& t) {
  TropicalCell cell = tropical_support(d, t);
  if (cell.empty) return {CriticalClass::outside, -1};
  if (!cell.boundary_strata.empty()) return {CriticalClass::boundary, cell.boundary_strata.front()};
  return {CriticalClass::interior, -1};
}

// Exact limit of the unit-normalized Gaussian over a line through `at` in
// direction rho: q restricts to a*t^2 there, and the transversal integral
// contributes <r, rho>/sqrt(a). Scale-invariant in rho.
inline SurdScalar gaussian_transversal(const Poly& q, const QVec2& r, const QVec2& rho,
                                       const QVec2& at) {
  for (const auto& [e, c] : q.terms)
    for (std::size_t i = 2; i < e.size(); ++i)
      if (e[i] != 0)
        throw std::invalid_argument("critical value must live in the two position variables");
  std::map<int, Q> at_u{{0, at[0]}, {1, at[1]}};
  if (q.specialized(at_u).constant_term() != 0)
    throw std::invalid_argument("transversal base point is off the zero locus");
  Q a(0), b(0);
  for (const auto& [e, c] : q.terms) {
    int deg = e[0] + e[1];
    if (deg == 2) {
      a += c * (e[0] == 2 ? rho[0] * rho[0] : e[1] == 2 ? rho[1] * rho[1] : rho[0] * rho[1]);
    } else if (deg == 1) {
      b += c * (e[0] == 1 ? rho[0] : rho[1]);
    }
  }
  // Gradient term along rho at the base point: 2*quad(at,rho) + lin(rho).
  Q grad = b;
  for (const auto& [e, c] : q.terms) {
    if (e[0] + e[1] != 2) continue;
    if (e[0] == 2)
      grad += Q(2) * c * at[0] * rho[0];
    else if (e[1] == 2)
      grad += Q(2) * c * at[1] * rho[1];
    else
      grad += c * (at[0] * rho[1] + at[1] * rho[0]);
  }
  if (grad != 0) throw std::invalid_argument("transversal line is not centered on the cell");
  if (a <= 0) throw std::invalid_argument("critical value is not transversally positive");
  return qdot(r, rho) * SurdScalar::sqrt_of(Q(1) / a);
}

namespace detail {

inline Q falling_product(long j, long k) {
  Q out(1);
  for (long i = 0; i < k; ++i) out *= Q(j - i);
  return out;
}

// Fold-back weight: per original wall, |J| choose-ordered over the leaves the
// tree puts on its copies.
inline Q fold_normalizer(const ScatteringDiagram& d_c, const LabelledTree& t) {
  std::map<int, long> leaves_per_wall;
  for (const auto& node : t.nodes) {
    if (node.left >= 0) continue;
    const auto& tag = d_c.walls[node.wall].nilpotent_tag;
    if (!tag) throw std::logic_error("assembly requires an unfolded diagram");
    ++leaves_per_wall[tag->first];
  }
  Q out(1);
  for (const auto& [wall, k] : leaves_per_wall) out *= falling_product(d_c.unfolding_size, k);
  return out;
}

// Interior evaluation point of a germ cell, one unit inside the endpoint.
inline QVec2 cell_point(const TropicalCell& cell) {
  if (cell.t_lo || !cell.t_hi)
    throw std::logic_error("support cell is not a germ toward minus infinity");
  Q t = *cell.t_hi - 1;
  return QVec2{cell.base[0] + t * Q(cell.direction[0]), cell.base[1] + t * Q(cell.direction[1])};
}

// Flow-derivative functionals of the (delta-perturbed) potential at frozen u,
// as affine functionals on the k-1 flow variables.
inline Arrangement flow_functionals(const ScatteringDiagram& d_c, const LabelledTree& t,
                                    const QVec2& u0, const std::vector<QVec2>& delta) {
  Poly w = build_potential(d_c, t, delta);
  std::map<int, Q> at_u{{0, u0[0]}, {1, u0[1]}};
  Arrangement out;
  for (int l = 2; l < w.nvars; ++l) {
    AffineFunctional full = affine_of(w.derivative(l).specialized(at_u));
    AffineFunctional f;
    f.lin.assign(full.lin.begin() + 2, full.lin.end());
    f.cst = full.cst;
    out.push_back(f);
  }
  return out;
}

}  // namespace detail

// One tagged interior tree's folded contribution to the coefficient of x_m,
// by the per-tree residue route (no padding variables).
inline Q tree_coefficient(const ScatteringDiagram& d_c, const LabelledTree& t,
                          const UnfoldingParams& params) {
  TropicalCell cell = tropical_support(d_c, t);
  QVec2 u0 = detail::cell_point(cell);
  TreeAlgebra alg = tree_bracket(d_c, t);

  RationalSection f;
  f.numerator = Poly::constant(t.leaf_count - 1, Q(1));
  f.denominator = detail::flow_functionals(d_c, t, u0, delta_shift(d_c, params));
  f.prefactor = SurdScalar::sqrt_of(Q(1LL << (t.leaf_count - 1)) * hessian_det(d_c, t));
  SurdScalar jk = jk_global(f, positive_span_chamber(f.denominator));

  Vec2 m = t.degree();
  QVec2 rho{Q(m[1]), Q(-m[0])};
  SurdScalar trans = gaussian_transversal(critical_value(d_c, t), alg.r, rho, u0);

  SurdScalar total = (Q(-1) * alg.coeff / detail::fold_normalizer(d_c, t)) * (jk * trans);
  if (!total.is_rational()) throw std::logic_error("wall coefficient failed to rationalize");
  return total.rational_value();
}

namespace detail {

// One summand of the global residue form, stretched to K flow variables by
// literal coordinate factors.
inline RationalSection padded_section(const ScatteringDiagram& d_c, const LabelledTree& t, int K,
                                      const UnfoldingParams& params) {
  QVec2 u0 = cell_point(tropical_support(d_c, t));
  TreeAlgebra alg = tree_bracket(d_c, t);
  RationalSection f;
  f.numerator = Poly::constant(K, Q(1));
  for (const AffineFunctional& g : flow_functionals(d_c, t, u0, delta_shift(d_c, params))) {
    AffineFunctional wide;
    wide.lin.assign(K, Q(0));
    for (std::size_t i = 0; i < g.lin.size(); ++i) wide.lin[i] = g.lin[i];
    wide.cst = g.cst;
    f.denominator.push_back(wide);
  }
  for (int j = t.leaf_count - 1; j < K; ++j) {
    AffineFunctional pad;
    pad.lin.assign(K, Q(0));
    pad.lin[j] = Q(1);
    f.denominator.push_back(pad);
  }
  f.prefactor = SurdScalar::sqrt_of(Q(1LL << (t.leaf_count - 1)) * hessian_det(d_c, t));
  f.covector = alg.r;
  f.weight = alg.coeff / fold_normalizer(d_c, t);
  f.degree = t.degree();
  return f;
}

inline std::vector<const LabelledTree*> interior_trees(const ScatteringDiagram& d_c,
                                                       const std::vector<LabelledTree>& trees,
                                                       Vec2 m) {
  std::vector<const LabelledTree*> out;
  for (const LabelledTree& t : trees) {
    if (t.leaf_count < 2 || t.degree() != m) continue;
    if (classify_critical(d_c, t).cls != CriticalClass::interior) continue;
    TropicalCell cell = tropical_support(d_c, t);
    if (cell.t_lo) continue;  // bounded segment, no asymptotic germ
    out.push_back(&t);
  }
  return out;
}

}  // namespace detail

// The padded sections of the global residue form for degree m.
inline std::vector<RationalSection> build_global_Z(const ScatteringDiagram& d_c,
                                                   const std::vector<LabelledTree>& trees, Vec2 m,
                                                   int K, const UnfoldingParams& params) {
  std::vector<RationalSection> sections;
  for (const LabelledTree* t : detail::interior_trees(d_c, trees, m))
    sections.push_back(detail::padded_section(d_c, *t, K, params));
  return sections;
}

// Folded coefficient of x_m via the global padded form; each summand owns one
// singular point, and the transversal factor pairs its covector with a line
// crossing the cell positively.
inline Q wall_coefficient(const ScatteringDiagram& d_c, const std::vector<LabelledTree>& trees,
                          Vec2 m, int K, const UnfoldingParams& params) {
  QVec2 rho{Q(m[1]), Q(-m[0])};
  SurdScalar acc{};
  for (const LabelledTree* t : detail::interior_trees(d_c, trees, m)) {
    RationalSection f = detail::padded_section(d_c, *t, K, params);
    SurdScalar jk = jk_global(f, positive_span_chamber(f.denominator));
    SurdScalar trans = gaussian_transversal(critical_value(d_c, *t), f.covector, rho,
                                            detail::cell_point(tropical_support(d_c, *t)));
    acc = detail::surd_add(acc, (Q(-1) * f.weight) * (jk * trans));
  }
  if (!acc.is_rational()) throw std::logic_error("wall coefficient failed to rationalize");
  return acc.rational_value();
}

// Full pipeline: deterministic admissible parameters, unfolding, tree
// enumeration, per-tree folded residues, then the completed diagram with one
// outgoing ray per primitive direction.
inline ScatteringDiagram complete_jk(const ScatteringDiagram& d_in, int n, unsigned seed) {
  if (d_in.base_ring != BaseRing::plain)
    throw std::invalid_argument("completion expects a plain initial diagram");
  UnfoldingParams params = pick_parameters(d_in, n, seed);
  ScatteringDiagram d_c = unfold(d_in, params);

  std::map<Vec2, Q> acc;
  for (const LabelledTree& t : enumerate_trees(d_c, n)) {
    if (t.leaf_count < 2) continue;
    Classification cls = classify_critical(d_c, t);
    if (cls.cls == CriticalClass::outside) continue;
    if (cls.cls == CriticalClass::boundary)
      throw std::logic_error("boundary critical point under admissible parameters");
    TropicalCell cell = tropical_support(d_c, t);
    if (cell.t_lo && cell.t_hi) continue;  // bounded segment, no asymptotic germ
    Q v = tree_coefficient(d_c, t, params);
    if (v != 0) acc[t.degree()] += v;
  }

  ScatteringDiagram out;
  out.lattice = d_in.lattice;
  out.order = n;
  out.walls = d_in.walls;
  for (const auto& [m, c] : acc) {
    if (c == 0) continue;
    Vec2 dir = primitive(m);
    Wall* target = nullptr;
    for (Wall& w : out.walls)
      if (w.kind == WallKind::ray && w.based_at_origin() && w.direction() == dir) target = &w;
    if (!target) {
      GradedSeries g;
      out.walls.emplace_back(WallKind::ray, QVec2{Q(0), Q(0)}, dir, canonical_covector(dir), g);
      target = &out.walls.back();
    }
    target->crossing.log.add_term(out.lattice, m, c);
  }
  return out;
}

// Product-of-ratios presentation of a tree's residue form, available when the
// graded pieces are one dimensional: one factor ((f+1)/f)^lambda per internal
// vertex, f its flow derivative, lambda the skew weight of the join.
struct ZhatForm {
  std::vector<std::pair<AffineFunctional, Q>> factors;
  Q leaf_coeff = Q(1);  // product of leaf generator coefficients
  Q hess_det = Q(1);
};

inline ZhatForm one_dim_Z_hat(const ScatteringDiagram& d_c, const LabelledTree& t,
                              const UnfoldingParams& params) {
  TropicalCell cell = tropical_support(d_c, t);
  QVec2 u0 = detail::cell_point(cell);
  Arrangement flows = detail::flow_functionals(d_c, t, u0, delta_shift(d_c, params));

  ZhatForm form;
  form.hess_det = hessian_det(d_c, t);
  std::vector<int> internals = t.internal_post_order();
  for (std::size_t l = 0; l < internals.size(); ++l) {
    const auto& v = t.nodes[internals[l]];
    Q lambda = skew_pair(d_c.lattice, t.nodes[v.left].degree, t.nodes[v.right].degree);
    form.factors.emplace_back(flows[l], lambda);
  }
  for (const auto& node : t.nodes)
    if (node.left < 0)
      form.leaf_coeff *=
          d_c.walls[node.wall].crossing.log.at(node.degree);
  return form;
}

// Residue of the product form. Expanding each ((f+1)/f)^lambda binomially,
// pure higher powers of a linear factor have zero residue, so only the
// all-first-order term survives: prod(lambda)/det. For integral exponents the
// expansion route is exercised directly through jk_global.
inline Q zhat_residue(const ZhatForm& form) {
  Q plain(1);
  bool integral = true;
  for (const auto& [f, lambda] : form.factors) {
    plain *= lambda;
    if (denominator(lambda) != 1) integral = false;
  }
  plain /= form.hess_det;
  if (integral && !form.factors.empty()) {
    RationalSection f;
    int d = static_cast<int>(form.factors.size());
    f.numerator = Poly::constant(d, Q(1));
    Q binom(1);
    for (const auto& [fac, lambda] : form.factors) {
      f.denominator.push_back(fac);
      binom *= lambda;  // C(lambda, 1)
    }
    SurdScalar expanded = binom * jk_global(f, positive_span_chamber(f.denominator));
    if (!(expanded == SurdScalar(plain)))
      throw std::logic_error("product-form residue disagrees with the plain form");
  }
  return plain;
}

}  // namespace scatter
