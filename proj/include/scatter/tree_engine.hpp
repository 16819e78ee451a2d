#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scatter/diagram_model.hpp"
#include "scatter/linalg.hpp"
#include "scatter/poly.hpp"

namespace scatter {

// Rooted trivalent tree whose leaves carry (wall index, multiplicity).
// Children are kept in canonical encoding order; that order is the ribbon
// used for brackets and wedge factors.
struct LabelledTree {
  struct Node {
    int left = -1;
    int right = -1;
    std::size_t wall = 0;
    long mult = 1;
    Vec2 degree{0, 0};
  };
  std::vector<Node> nodes;
  int root = -1;
  int leaf_count = 0;
  long aut = 1;

  bool is_leaf(int i) const { return nodes[i].left < 0; }
  Vec2 degree() const { return nodes[root].degree; }

  // Internal vertices in post order; position in this list is the vertex's
  // flow variable index.
  std::vector<int> internal_post_order() const {
    std::vector<int> order;
    post_order(root, order);
    return order;
  }

 private:
  void post_order(int v, std::vector<int>& order) const {
    if (is_leaf(v)) return;
    post_order(nodes[v].left, order);
    post_order(nodes[v].right, order);
    order.push_back(v);
  }
};

namespace detail {

inline std::string tree_encoding(const LabelledTree& t, int v) {
  const auto& n = t.nodes[v];
  if (t.is_leaf(v))
    return "L" + std::to_string(n.wall) + ":" + std::to_string(n.mult);
  return "(" + tree_encoding(t, n.left) + "|" + tree_encoding(t, n.right) + ")";
}

inline long tree_aut(const LabelledTree& t, int v) {
  if (t.is_leaf(v)) return 1;
  const auto& n = t.nodes[v];
  long a = tree_aut(t, n.left) * tree_aut(t, n.right);
  if (tree_encoding(t, n.left) == tree_encoding(t, n.right)) a *= 2;
  return a;
}

inline void collect_tagged_walls(const LabelledTree& t, int v, const ScatteringDiagram& d,
                                 std::vector<std::size_t>& out) {
  if (t.is_leaf(v)) {
    if (d.walls[t.nodes[v].wall].nilpotent_tag) out.push_back(t.nodes[v].wall);
    return;
  }
  collect_tagged_walls(t, t.nodes[v].left, d, out);
  collect_tagged_walls(t, t.nodes[v].right, d, out);
}

}  // namespace detail

// All isomorphism classes of labelled trees with total degree of grade <= N,
// each with its automorphism order. Leaves range over walls and
// multiplicities with nonzero generator coefficient; subtrees joining
// parallel degrees are skipped (zero bracket), as is any reuse of a nilpotent
// tag (t^2 = 0).
inline std::vector<LabelledTree> enumerate_trees(const ScatteringDiagram& d, long n) {
  std::vector<LabelledTree> out;
  std::set<std::string> seen;

  for (std::size_t w = 0; w < d.walls.size(); ++w) {
    Vec2 dir = d.walls[w].direction();
    for (long j = 1; d.lattice.grade(dir) * j <= n; ++j) {
      if (d.walls[w].crossing.log.at(static_cast<long>(j) * dir) == 0) continue;
      LabelledTree t;
      t.nodes.push_back({-1, -1, w, j, static_cast<long>(j) * dir});
      t.root = 0;
      t.leaf_count = 1;
      t.aut = 1;
      if (seen.insert(detail::tree_encoding(t, t.root)).second) out.push_back(std::move(t));
    }
  }

  // Grow by grade; out is scanned pairwise, so it must stay sorted by grade.
  std::stable_sort(out.begin(), out.end(), [&](const LabelledTree& a, const LabelledTree& b) {
    return d.lattice.grade(a.degree()) < d.lattice.grade(b.degree());
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const LabelledTree& a = out[i];
      const LabelledTree& b = out[j];
      if (d.lattice.grade(a.degree()) + d.lattice.grade(b.degree()) > n) continue;
      if (cross(a.degree(), b.degree()) == 0) continue;

      std::vector<std::size_t> tags;
      detail::collect_tagged_walls(a, a.root, d, tags);
      detail::collect_tagged_walls(b, b.root, d, tags);
      std::sort(tags.begin(), tags.end());
      if (std::adjacent_find(tags.begin(), tags.end()) != tags.end()) continue;

      LabelledTree t;
      t.nodes = a.nodes;
      int root_a = a.root;
      int offset = static_cast<int>(t.nodes.size());
      for (auto nd : b.nodes) {
        if (nd.left >= 0) {
          nd.left += offset;
          nd.right += offset;
        }
        t.nodes.push_back(nd);
      }
      int root_b = b.root + offset;
      std::string ea = detail::tree_encoding(t, root_a);
      std::string eb = detail::tree_encoding(t, root_b);
      LabelledTree::Node join;
      join.left = ea <= eb ? root_a : root_b;
      join.right = ea <= eb ? root_b : root_a;
      join.degree = a.degree() + b.degree();
      t.nodes.push_back(join);
      t.root = static_cast<int>(t.nodes.size()) - 1;
      t.leaf_count = a.leaf_count + b.leaf_count;
      if (!seen.insert(detail::tree_encoding(t, t.root)).second) continue;
      t.aut = detail::tree_aut(t, t.root);
      out.push_back(std::move(t));
    }
  }

  std::stable_sort(out.begin(), out.end(), [&](const LabelledTree& a, const LabelledTree& b) {
    return d.lattice.grade(a.degree()) < d.lattice.grade(b.degree());
  });
  return out;
}

// Bracket and wedge data of a tree in its canonical ribbon. The generator is
// coeff * x_degree; the covector r flips sign together with coeff under a
// ribbon flip, so their pairing is ribbon independent.
struct TreeAlgebra {
  Q coeff = 0;
  Q lambda_product = 1;
  Vec2 degree{0, 0};
  QVec2 r{Q(0), Q(0)};
};

namespace detail {

inline TreeAlgebra bracket_rec(const ScatteringDiagram& d, const LabelledTree& t, int v) {
  const auto& n = t.nodes[v];
  TreeAlgebra a;
  if (t.is_leaf(v)) {
    a.degree = n.degree;
    a.lambda_product = d.walls[n.wall].crossing.log.at(n.degree);
    a.coeff = a.lambda_product;
    a.r = to_qvec(canonical_covector(d.walls[n.wall].direction()));
    return a;
  }
  TreeAlgebra l = bracket_rec(d, t, n.left);
  TreeAlgebra r = bracket_rec(d, t, n.right);
  a.degree = n.degree;
  a.lambda_product = l.lambda_product * r.lambda_product;
  a.coeff = l.coeff * r.coeff * skew_pair(d.lattice, l.degree, r.degree);
  a.r = qcross(l.r, r.r) * to_qvec(canonical_covector(n.degree));
  return a;
}

}  // namespace detail

inline TreeAlgebra tree_bracket(const ScatteringDiagram& d, const LabelledTree& t) {
  return detail::bracket_rec(d, t, t.root);
}

inline QVec2 r_factor(const ScatteringDiagram& d, const LabelledTree& t) {
  return tree_bracket(d, t).r;
}

// Potential W = sum over leaves of (eta_leaf at the flowed position)^2, in
// variables (u1, u2, s_1..s_{k-1}). Flow through an internal vertex displaces
// by -s_v * degree(v). extra_shift moves wall base points (for the
// denominators' delta perturbation); it may be empty for none.
inline Poly build_potential(const ScatteringDiagram& d, const LabelledTree& t,
                            const std::vector<QVec2>& extra_shift = {}) {
  std::vector<int> internals = t.internal_post_order();
  std::map<int, int> var_of;
  for (std::size_t i = 0; i < internals.size(); ++i) var_of[internals[i]] = 2 + static_cast<int>(i);
  const int nvars = 2 + static_cast<int>(internals.size());

  Poly w(nvars);
  // Walk every root-to-leaf path, tracking the internal vertices passed.
  struct Frame {
    int node;
    std::vector<int> path;
  };
  std::vector<Frame> stack{{t.root, {}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const auto& n = t.nodes[f.node];
    if (!t.is_leaf(f.node)) {
      std::vector<int> path = f.path;
      path.push_back(f.node);
      stack.push_back({n.left, path});
      stack.push_back({n.right, path});
      continue;
    }
    const Wall& wall = d.walls[n.wall];
    Vec2 nc = canonical_covector(wall.direction());
    QVec2 base = wall.base;
    if (!extra_shift.empty()) base = base + extra_shift.at(n.wall);
    Poly eta(nvars);
    eta += Q(nc[0]) * Poly::variable(nvars, 0);
    eta += Q(nc[1]) * Poly::variable(nvars, 1);
    eta += Poly::constant(nvars, -(base[0] * Q(nc[0]) + base[1] * Q(nc[1])));
    for (int v : f.path) {
      Q pair = Q(t.nodes[v].degree[0] * nc[0] + t.nodes[v].degree[1] * nc[1]);
      eta += (-pair) * Poly::variable(nvars, var_of[v]);
    }
    w += eta * eta;
  }
  return w;
}

// s-Hessian of the potential; exact, independent of u and of base shifts.
inline QMat potential_hessian(const ScatteringDiagram& d, const LabelledTree& t) {
  Poly w = build_potential(d, t);
  const int k = t.leaf_count;
  QMat h(k - 1, k - 1);
  for (int i = 0; i < k - 1; ++i) {
    Poly di = w.derivative(2 + i);
    for (int j = 0; j < k - 1; ++j) {
      Poly dij = di.derivative(2 + j);
      if (dij.degree() > 0) throw std::logic_error("potential is not quadratic in flow variables");
      h.at(i, j) = dij.constant_term();
    }
  }
  return h;
}

inline Q hessian_det(const ScatteringDiagram& d, const LabelledTree& t) {
  if (t.leaf_count == 1) return Q(1);
  return det_of(potential_hessian(d, t));
}

// Critical point of W in the flow variables, as affine polynomials in u.
inline std::vector<Poly> critical_point(const ScatteringDiagram& d, const LabelledTree& t,
                                        const std::vector<QVec2>& extra_shift = {}) {
  Poly w = build_potential(d, t, extra_shift);
  const int k = t.leaf_count;
  if (k == 1) return {};
  QMat h = potential_hessian(d, t);
  std::vector<Poly> rhs;
  std::map<int, Q> flow_zero;
  for (int i = 0; i < k - 1; ++i) flow_zero[2 + i] = Q(0);
  for (int i = 0; i < k - 1; ++i)
    rhs.push_back(-(w.derivative(2 + i).specialized(flow_zero)));
  auto sol = solve_unique(h, rhs);
  if (!sol) throw std::logic_error("degenerate flow Hessian");
  return *sol;
}

// Critical value W(p(u)): a rank-one quadratic in u.
inline Poly critical_value(const ScatteringDiagram& d, const LabelledTree& t,
                           const std::vector<QVec2>& extra_shift = {}) {
  Poly w = build_potential(d, t, extra_shift);
  std::vector<Poly> p = critical_point(d, t, extra_shift);
  for (std::size_t i = 0; i < p.size(); ++i) w = w.substituted(2 + static_cast<int>(i), p[i]);
  return w;
}

// Oriented tropical cell of a tree: the locus where the critical value
// vanishes and the critical point stays in the flow orthant (-inf, 0]^{k-1}.
struct TropicalCell {
  Vec2 direction{0, 0};      // primitive direction of the supporting line
  Vec2 degree{0, 0};         // total tree degree (orientation data)
  QVec2 alpha{Q(0), Q(0)};   // integer primitive normal, alpha = canonical covector
  Q beta = 0;                // supporting line is alpha . u + beta = 0
  Q gamma = 0;               // critical value = gamma * (alpha . u + beta)^2
  QVec2 base{Q(0), Q(0)};    // rational point on the line (t = 0)
  std::optional<Q> t_lo;     // cell = { base + t * direction }, t in [t_lo, t_hi]
  std::optional<Q> t_hi;
  std::vector<int> boundary_strata;  // flow variables identically zero on the line
  bool empty = false;
};

inline TropicalCell tropical_support(const ScatteringDiagram& d, const LabelledTree& t,
                                     const std::vector<QVec2>& extra_shift = {}) {
  TropicalCell cell;
  cell.degree = t.degree();
  cell.direction = primitive(cell.degree);
  Vec2 alpha = canonical_covector(cell.direction);
  cell.alpha = to_qvec(alpha);

  Poly q = critical_value(d, t, extra_shift);
  // Decompose q = gamma (alpha.u + beta)^2 and verify the decomposition.
  std::vector<int> e20(q.nvars, 0), e02(q.nvars, 0), e10(q.nvars, 0);
  e20[0] = 2;
  e02[1] = 2;
  e10[0] = 1;
  Q quu = q.coeff(e20);
  Q qvv = q.coeff(e02);
  if (alpha[0] != 0)
    cell.gamma = quu / Q(alpha[0] * alpha[0]);
  else
    cell.gamma = qvv / Q(alpha[1] * alpha[1]);
  if (cell.gamma <= 0) throw std::logic_error("critical value is not a positive rank-one square");
  Q lin0 = q.coeff(e10);
  if (alpha[0] != 0)
    cell.beta = lin0 / (Q(2) * cell.gamma * Q(alpha[0]));
  else {
    std::vector<int> e01(q.nvars, 0);
    e01[1] = 1;
    cell.beta = q.coeff(e01) / (Q(2) * cell.gamma * Q(alpha[1]));
  }
  {
    Poly check(q.nvars);
    check += Q(alpha[0]) * Poly::variable(q.nvars, 0);
    check += Q(alpha[1]) * Poly::variable(q.nvars, 1);
    check += Poly::constant(q.nvars, cell.beta);
    check = cell.gamma * (check * check);
    if (!(check == q)) throw std::logic_error("critical value is not rank one");
  }

  Q a2 = Q(alpha[0] * alpha[0] + alpha[1] * alpha[1]);
  cell.base = QVec2{-cell.beta * Q(alpha[0]) / a2, -cell.beta * Q(alpha[1]) / a2};

  // Restrict each critical coordinate to the line base + t * direction.
  std::vector<Poly> p = critical_point(d, t, extra_shift);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::map<int, Q> at_base{{0, cell.base[0]}, {1, cell.base[1]}};
    Q c0 = p[i].specialized(at_base).constant_term();
    std::vector<int> eu(p[i].nvars, 0), ev(p[i].nvars, 0);
    eu[0] = 1;
    ev[1] = 1;
    Q slope = p[i].coeff(eu) * Q(cell.direction[0]) + p[i].coeff(ev) * Q(cell.direction[1]);
    if (slope == 0) {
      if (c0 > 0) cell.empty = true;
      if (c0 == 0) cell.boundary_strata.push_back(static_cast<int>(i));
      continue;
    }
    Q bound = -c0 / slope;
    if (slope > 0) {
      if (!cell.t_hi || bound < *cell.t_hi) cell.t_hi = bound;
    } else {
      if (!cell.t_lo || bound > *cell.t_lo) cell.t_lo = bound;
    }
  }
  if (cell.t_lo && cell.t_hi && *cell.t_lo > *cell.t_hi) cell.empty = true;
  return cell;
}

}  // namespace scatter
