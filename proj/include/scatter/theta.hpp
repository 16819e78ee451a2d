#pragma once

#include <algorithm>
#include <iterator>
#include <map>
#include <stdexcept>
#include <vector>

#include <scatter/mc_assembler.hpp>

// Theta functions of a rank-2 scattering diagram by two routes: broken-line
// sums inside a consistent diagram, and a marked-tree residue expansion over
// an admissible unfolding of the initial diagram. For a generic endpoint both
// return the same truncated series; their agreement is the strongest
// cross-check of the residue pipeline.

namespace scatter {

// degree -> coefficient of z^degree. The bare z^m term is always present.
using ThetaSeries = std::map<Vec2, Q>;

namespace detail {

inline Q support_pairing(const Wall& w, const QVec2& p) {
  Vec2 nc = w.covector();
  return (p[0] - w.base[0]) * nc[0] + (p[1] - w.base[1]) * nc[1];
}

inline bool on_wall_support(const Wall& w, const QVec2& p) {
  if (support_pairing(w, p) != 0) return false;
  if (w.kind == WallKind::line) return true;
  Vec2 m = w.direction();
  return (p[0] - w.base[0]) * m[0] + (p[1] - w.base[1]) * m[1] >= 0;
}

inline long pair_dir_cov(Vec2 v, Vec2 nc) { return v[0] * nc[0] + v[1] * nc[1]; }

}  // namespace detail

// Truncated theta function at a generic endpoint, as a sum over broken lines:
// piecewise straight paths coming in with velocity m, bending only on walls,
// each bend picking one non-identity term of the crossing multiplier for the
// incoming monomial. Bend times follow from the wall incidences (the system
// is triangular), so a candidate bend sequence either realizes uniquely or
// not at all; realized sequences contribute the product of their bend
// coefficients to the degree they end with.
inline ThetaSeries theta_broken(const ScatteringDiagram& d, const QVec2& endpoint, Vec2 m,
                                long n) {
  if (d.base_ring != BaseRing::plain)
    throw std::invalid_argument("broken lines need a plain diagram");
  if (is_zero(m)) throw std::invalid_argument("theta exponent must be nonzero");
  for (const Wall& w : d.walls)
    if (detail::on_wall_support(w, endpoint))
      throw std::invalid_argument("theta endpoint lies on a wall");

  struct Bend {
    std::size_t wall;
    Vec2 velocity;  // velocity after the bend
  };

  ThetaSeries out;
  out[m] += 1;

  std::vector<Bend> seq;
  // Solves the bend times of the complete line seq + final segment into the
  // endpoint. Row i pins bend i to its wall; only later times enter, and the
  // diagonal entry pairs the incoming velocity with the covector, so the
  // system is triangular with nonzero diagonal.
  auto realizes = [&](void) -> bool {
    const std::size_t k = seq.size();
    QMat a(k, k);
    std::vector<Q> b(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Wall& w = d.walls[seq[i].wall];
      Vec2 nc = w.covector();
      b[i] = detail::support_pairing(w, endpoint);
      for (std::size_t q = i; q < k; ++q)
        a.at(i, q) = Q(detail::pair_dir_cov(seq[q].velocity, nc));
    }
    auto times = solve_unique<Q>(a, b);
    if (!times) return false;
    for (const Q& t : *times)
      if (t <= 0) return false;
    for (std::size_t i = 0; i < k; ++i) {
      QVec2 p = endpoint;
      for (std::size_t q = i; q < k; ++q) p = p - (*times)[q] * to_qvec(seq[q].velocity);
      const Wall& w = d.walls[seq[i].wall];
      if (w.kind == WallKind::ray) {
        Vec2 dir = w.direction();
        Q along = (p[0] - w.base[0]) * dir[0] + (p[1] - w.base[1]) * dir[1];
        if (along < 0) return false;
        if (along == 0)
          throw std::invalid_argument("theta endpoint is not generic: a bend hits a wall endpoint");
      }
      for (std::size_t other = 0; other < d.walls.size(); ++other)
        if (other != seq[i].wall && detail::on_wall_support(d.walls[other], p))
          throw std::invalid_argument("theta endpoint is not generic: a bend meets two walls");
    }
    return true;
  };

  auto extend = [&](auto&& self, Vec2 v_prev, Q coeff_prev) -> void {
    long budget = n - d.lattice.grade(v_prev);
    if (budget < 1) return;
    for (std::size_t wi = 0; wi < d.walls.size(); ++wi) {
      const Wall& w = d.walls[wi];
      long pairing = detail::pair_dir_cov(v_prev, w.covector());
      if (pairing == 0) continue;  // travel parallel to the wall: no crossing
      WallCrossing c = w.crossing;
      // Crossing from {<.,n> > 0} to {<.,n> < 0} applies Theta, the reverse
      // crossing its inverse.
      if (pairing > 0) c.log = c.log.scaled(Q(-1));
      MonomialMap f = exp_action(d.lattice, c, v_prev, budget);
      for (const auto& [off, coeff] : f) {
        if ((off == Vec2{0, 0}) || coeff == 0) continue;
        seq.push_back({wi, v_prev + off});
        if (realizes()) out[v_prev + off] += coeff_prev * coeff;
        self(self, v_prev + off, coeff_prev * coeff);
        seq.pop_back();
      }
    }
  };
  extend(extend, m, Q(1));

  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

namespace detail {

// The picked shifts happened to align a bend with the endpoint or a wall;
// the caller retries with fresh parameters.
struct NonGenericUnfolding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One ordered tuple of tagged trees hung on the straight core through the
// endpoint. Returns its folded contribution to the coefficient of
// z^(m + sum of subtree degrees), zero when the configuration does not
// realize with every flow time negative.
inline Q marked_tuple_term(const ScatteringDiagram& d_c, const QVec2& endpoint, Vec2 m,
                           const std::vector<const LabelledTree*>& chosen,
                           const UnfoldingParams& params) {
  const std::size_t l = chosen.size();
  // Flow variables: core times s_1..s_l first, then each subtree's internal
  // vertices in post order. Leaves and variables are equinumerous.
  std::vector<std::size_t> internal_base(l);
  std::size_t nv = l;
  for (std::size_t i = 0; i < l; ++i) {
    internal_base[i] = nv;
    nv += static_cast<std::size_t>(chosen[i]->leaf_count) - 1;
  }

  // Core degrees after each attachment point.
  std::vector<Vec2> dseq(l + 1);
  dseq[0] = m;
  for (std::size_t i = 0; i < l; ++i) dseq[i + 1] = dseq[i] + chosen[i]->degree();

  std::vector<QVec2> delta = delta_shift(d_c, params);

  // Leaf incidence functionals. The attachment point of subtree i sits at
  // endpoint + sum_{j >= i} s_j d_j; inside the subtree a flow through an
  // internal vertex displaces by +s_v * degree(v). With every flow negative
  // this walks each leaf upstream of its attachment point, so the bend sits
  // on the forward germ of the ray its subtree generates.
  Arrangement eta, eta_delta;
  std::map<int, long> leaves_per_original;
  for (std::size_t i = 0; i < l; ++i) {
    const LabelledTree& t = *chosen[i];
    std::vector<int> internals = t.internal_post_order();
    std::map<int, std::size_t> var_of;
    for (std::size_t p = 0; p < internals.size(); ++p) var_of[internals[p]] = internal_base[i] + p;
    struct Frame {
      int node;
      std::vector<int> path;
    };
    std::vector<Frame> stack{{t.root, {}}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      const auto& node = t.nodes[f.node];
      if (!t.is_leaf(f.node)) {
        std::vector<int> path = f.path;
        path.push_back(f.node);
        stack.push_back({node.left, path});
        stack.push_back({node.right, path});
        continue;
      }
      const Wall& w = d_c.walls[node.wall];
      if (!w.nilpotent_tag) throw std::logic_error("marked tree leaf on an untagged wall");
      ++leaves_per_original[w.nilpotent_tag->first];
      Vec2 nc = w.covector();
      AffineFunctional g;
      g.lin.assign(nv, Q(0));
      for (std::size_t j = i; j < l; ++j) g.lin[j] = Q(pair_dir_cov(dseq[j + 1], nc));
      for (int v : f.path) g.lin[var_of[v]] = Q(pair_dir_cov(t.nodes[v].degree, nc));
      g.cst = support_pairing(w, endpoint);
      eta.push_back(g);
      g.cst -= qdot(delta[node.wall], to_qvec(nc));
      eta_delta.push_back(g);
    }
  }
  if (eta.size() != nv) throw std::logic_error("marked tree leaf count mismatch");

  // Membership: the leaf incidences must vanish at a unique point with every
  // flow strictly negative.
  QMat g(nv, nv);
  std::vector<Q> rhs(nv);
  for (std::size_t q = 0; q < nv; ++q) {
    for (std::size_t a = 0; a < nv; ++a) g.at(q, a) = eta[q].lin[a];
    rhs[q] = -eta[q].cst;
  }
  auto sol = solve_unique<Q>(g, rhs);
  if (!sol) {
    QMat g2(nv, nv);
    for (std::size_t q = 0; q < nv; ++q)
      for (std::size_t a = 0; a < nv; ++a) g2.at(q, a) = eta[q].lin[a];
    std::vector<Q> rhs2 = rhs;
    if (solve_affine(g2, rhs2).consistent)
      throw NonGenericUnfolding("a marked tree degenerates at these shifts");
    return Q(0);
  }
  for (const Q& s : *sol) {
    if (s == 0) throw NonGenericUnfolding("a flow time vanishes at these shifts");
    if (s > 0) return Q(0);
  }

  // Gaussian weight through the residue pipeline: the denominators are the
  // flow derivatives of the delta-shifted potential sum eta^2.
  QMat h(nv, nv);
  for (std::size_t a = 0; a < nv; ++a)
    for (std::size_t b = 0; b < nv; ++b) {
      Q acc(0);
      for (std::size_t q = 0; q < nv; ++q) acc += eta[q].lin[a] * eta[q].lin[b];
      h.at(a, b) = 2 * acc;
    }
  RationalSection f;
  f.numerator = Poly::constant(static_cast<int>(nv), Q(1));
  for (std::size_t a = 0; a < nv; ++a) {
    AffineFunctional dW;
    dW.lin.assign(nv, Q(0));
    for (std::size_t b = 0; b < nv; ++b) dW.lin[b] = h.at(a, b);
    Q acc(0);
    for (std::size_t q = 0; q < nv; ++q) acc += eta_delta[q].lin[a] * eta_delta[q].cst;
    dW.cst = 2 * acc;
    f.denominator.push_back(dW);
  }
  Q pow2(1);
  for (std::size_t a = 0; a < nv; ++a) pow2 *= 2;
  f.prefactor = SurdScalar::sqrt_of(pow2 * det_of(h));
  SurdScalar jk = jk_global(f, positive_span_chamber(f.denominator));

  // Ordered pairing of the subtree brackets along the core, with the sign of
  // reordering the flow variables into per-subtree blocks.
  Q rfac(1), afac(1);
  long sign_exp = 0;
  for (std::size_t i = 0; i < l; ++i) {
    TreeAlgebra alg = tree_bracket(d_c, *chosen[i]);
    rfac *= qdot(alg.r, to_qvec(dseq[i + 1]));
    afac *= alg.coeff * skew_pair(d_c.lattice, alg.degree, dseq[i]);
    sign_exp += static_cast<long>(chosen[i]->leaf_count - 1) * static_cast<long>(l - 1 - i);
  }
  if (sign_exp % 2 != 0) rfac = -rfac;

  Q fold(1);
  for (const auto& [orig, k] : leaves_per_original)
    fold *= falling_product(d_c.unfolding_size, k);

  SurdScalar total = (rfac * afac / fold) * jk;
  if (!total.is_rational()) throw std::logic_error("theta term failed to rationalize");
  return total.rational_value();
}

}  // namespace detail

// Truncated theta function from the initial diagram alone: unfold with
// admissible parameters, then sum over ordered tuples of tagged trees whose
// tag sets are pairwise disjoint, each weighted by a residue. No consistent
// completion is computed on this route.
inline ThetaSeries theta_jk(const ScatteringDiagram& d_in, const QVec2& endpoint, Vec2 m, long n,
                            unsigned seed) {
  if (is_zero(m)) throw std::invalid_argument("theta exponent must be nonzero");
  ThetaSeries out;
  out[m] += 1;
  long budget = n - d_in.lattice.grade(m);
  if (budget < 1) return out;

  // A shift vector can align a bend with the endpoint; such picks are
  // rejected and the search moves to the next seed.
  long attempts = parameter_search_budget();
  for (long attempt = 0; attempt < attempts; ++attempt) {
    UnfoldingParams params = pick_parameters(d_in, std::max(n, budget), seed + attempt);
    ScatteringDiagram d_c = unfold(d_in, params);
    try {
      for (const Wall& w : d_c.walls)
        if (detail::on_wall_support(w, endpoint))
          throw detail::NonGenericUnfolding("endpoint lies on a shifted wall");

      std::vector<LabelledTree> pool = enumerate_trees(d_c, budget);
      std::vector<std::vector<std::size_t>> tags(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        detail::collect_tagged_walls(pool[i], pool[i].root, d_c, tags[i]);
        std::sort(tags[i].begin(), tags[i].end());
      }

      ThetaSeries acc = out;
      std::vector<const LabelledTree*> chosen;
      std::vector<std::size_t> used;  // sorted tagged wall indices in use
      auto disjoint = [&](const std::vector<std::size_t>& s) {
        for (std::size_t w : s)
          if (std::binary_search(used.begin(), used.end(), w)) return false;
        return true;
      };
      auto rec = [&](auto&& self, long left) -> void {
        if (!chosen.empty()) {
          Vec2 mu = m;
          for (const LabelledTree* t : chosen) mu = mu + t->degree();
          acc[mu] += detail::marked_tuple_term(d_c, endpoint, m, chosen, params);
        }
        for (std::size_t i = 0; i < pool.size(); ++i) {
          long gr = d_c.lattice.grade(pool[i].degree());
          if (gr > left || !disjoint(tags[i])) continue;
          chosen.push_back(&pool[i]);
          used.insert(used.end(), tags[i].begin(), tags[i].end());
          std::sort(used.begin(), used.end());
          self(self, left - gr);
          chosen.pop_back();
          for (std::size_t w : tags[i]) used.erase(std::find(used.begin(), used.end(), w));
        }
      };
      rec(rec, budget);

      for (auto it = acc.begin(); it != acc.end();)
        it = (it->second == 0) ? acc.erase(it) : std::next(it);
      return acc;
    } catch (const detail::NonGenericUnfolding&) {
      continue;
    }
  }
  throw std::invalid_argument("theta endpoint is not generic for any admissible unfolding tried");
}

}  // namespace scatter
