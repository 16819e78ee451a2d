// Acceptance gate: one line per criterion, exit status counts the failures.
// Every comparison is exact; timing bounds use wall-clock milliseconds.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scatter/theta.hpp"
#include "scatter/unfolding.hpp"

using namespace scatter;

namespace {

struct Checker {
  std::ostringstream log;
  void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
  }
};

int failures = 0;

void criterion(int idx, const std::string& label, const std::function<void(Checker&)>& body) {
  Checker c;
  auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    body(c);
  } catch (const std::exception& e) {
    error = e.what();
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  if (error.empty()) {
    std::cout << "PASS criterion " << idx << ": " << label << " (" << ms << " ms)\n";
  } else {
    ++failures;
    std::cout << "FAIL criterion " << idx << ": " << label << " (" << ms << " ms): " << error
              << "\n";
  }
}

long elapsed_ms(const std::chrono::steady_clock::time_point& from) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               from)
      .count();
}

AffineFunctional fun(std::vector<Q> lin, Q cst) {
  AffineFunctional f;
  f.lin = std::move(lin);
  f.cst = std::move(cst);
  return f;
}

RationalSection section(std::vector<AffineFunctional> den, int nvars) {
  RationalSection f;
  f.numerator = Poly::constant(nvars, Q(1));
  f.denominator = std::move(den);
  return f;
}

const LabelledTree* find_tree(const std::vector<LabelledTree>& trees, Vec2 degree, int leaves) {
  for (const auto& t : trees)
    if (t.degree() == degree && t.leaf_count == leaves) return &t;
  return nullptr;
}

// Horizontal wall through the origin plus two parallel vertical copies at
// x = c1 and x = c2, the worked unfolding picture.
ScatteringDiagram shifted_copies(const Q& c1, const Q& c2) {
  Lattice lat;
  ScatteringDiagram d;
  d.lattice = lat;
  d.order = 3;
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, 1},
                       dilog_generator(lat, Vec2{1, 0}, 3).scaled(Q(-1)));
  d.walls.emplace_back(WallKind::line, QVec2{c1, Q(0)}, Vec2{0, 1}, Vec2{-1, 0},
                       dilog_generator(lat, Vec2{0, 1}, 3).scaled(Q(-1)));
  d.walls.emplace_back(WallKind::line, QVec2{c2, Q(0)}, Vec2{0, 1}, Vec2{-1, 0},
                       dilog_generator(lat, Vec2{0, 1}, 3).scaled(Q(-1)));
  return d;
}

const LabelledTree* interior_shifted_tree(const std::vector<LabelledTree>& trees) {
  for (const auto& t : trees) {
    if (t.degree() != Vec2{1, 2} || t.leaf_count != 3) continue;
    const auto& root = t.nodes[t.root];
    if (!t.is_leaf(root.left) && !t.is_leaf(root.right)) continue;
    int shallow = t.is_leaf(root.left) ? root.left : root.right;
    int inner = t.is_leaf(root.left) ? root.right : root.left;
    if (t.is_leaf(inner)) continue;
    std::set<std::size_t> leaf_walls{t.nodes[shallow].wall, t.nodes[t.nodes[inner].left].wall,
                                     t.nodes[t.nodes[inner].right].wall};
    if (leaf_walls == std::set<std::size_t>{0, 1, 2} && t.nodes[shallow].wall == 1) return &t;
  }
  return nullptr;
}

}  // namespace

int main() {
  criterion(1, "residue completion finds the first diagonal ray for kappa = 1, 2, 3",
            [](Checker& c) {
              for (long k : {1L, 2L, 3L}) {
                auto start = std::chrono::steady_clock::now();
                ScatteringDiagram d = complete_jk(kronecker_diagram(k, 2), 2, 1);
                GradedSeries g = wall_function(d, Vec2{1, 1});
                c.require(g.coeff.size() == 1, "extra terms on the diagonal ray");
                c.require(g.at(Vec2{1, 1}) == Q(k), "wrong diagonal coefficient");
                c.require(elapsed_ms(start) < 1000, "over the 1 s budget");
              }
            });

  criterion(2, "residue completion finds the grade three rays for kappa = 1, 2, 3",
            [](Checker& c) {
              for (long k : {1L, 2L, 3L}) {
                auto start = std::chrono::steady_clock::now();
                ScatteringDiagram d = complete_jk(kronecker_diagram(k, 3), 3, 1);
                Q expected = Q(k * k - k) / Q(2);
                c.require(wall_function(d, Vec2{1, 2}).at(Vec2{1, 2}) == expected,
                          "wrong (1,2) coefficient");
                c.require(wall_function(d, Vec2{2, 1}).at(Vec2{2, 1}) == expected,
                          "wrong (2,1) coefficient");
                c.require(elapsed_ms(start) < 5000, "over the 5 s budget");
              }
            });

  criterion(3, "residue and inductive completions agree through order four", [](Checker& c) {
    auto start = std::chrono::steady_clock::now();
    for (long k : {1L, 2L}) {
      ScatteringDiagram a = complete_inductive(kronecker_diagram(k, 4), 4);
      ScatteringDiagram b = complete_jk(kronecker_diagram(k, 4), 4, 1);
      c.require(equivalent(a, b, 4), "routes disagree at kappa " + std::to_string(k));
    }
    c.require(elapsed_ms(start) < 300000, "over the 5 min budget");
  });

  criterion(4, "completed diagrams have exactly vanishing consistency defect", [](Checker& c) {
    std::vector<std::pair<ScatteringDiagram, long>> fixtures;
    for (long k : {1L, 2L, 3L})
      fixtures.emplace_back(complete_inductive(kronecker_diagram(k, 3), 3), 3);
    for (long k : {1L, 2L}) fixtures.emplace_back(complete_jk(kronecker_diagram(k, 3), 3, 1), 3);
    fixtures.emplace_back(complete_inductive(kronecker_diagram(1, 4), 4), 4);
    for (const auto& [d, n] : fixtures)
      c.require(consistency_defect(d, n).is_zero(), "nonzero defect");
  });

  criterion(5, "worked potentials, critical data, residues, and the folded weight",
            [](Checker& c) {
              // Two leaf join of the coordinate walls.
              {
                ScatteringDiagram d = kronecker_diagram(1, 4);
                auto trees = enumerate_trees(d, 2);
                const LabelledTree* t = find_tree(trees, Vec2{1, 1}, 2);
                c.require(t != nullptr, "missing the two leaf tree");
                Poly u1 = Poly::variable(3, 0), u2 = Poly::variable(3, 1),
                     s = Poly::variable(3, 2);
                c.require(build_potential(d, *t) == (u1 - s) * (u1 - s) + (u2 - s) * (u2 - s),
                          "two leaf potential");
                auto p = critical_point(d, *t);
                c.require(p.size() == 1 && p[0] == Q(1, 2) * (u1 + u2), "two leaf critical point");
                c.require(critical_value(d, *t) == Q(1, 2) * ((u1 - u2) * (u1 - u2)),
                          "two leaf critical value");
                c.require(hessian_det(d, *t) == 4, "two leaf hessian");
                RationalSection z = section({fun({Q(4)}, Q(0))}, 1);
                c.require(iterated_residue(z, {0}, {Q(0)}) == SurdScalar{Q(1, 4), 1},
                          "residue of 1/(4 z)");
                c.require(jk_global(z, positive_span_chamber(z.denominator)) ==
                              SurdScalar{Q(1, 4), 1},
                          "global residue of 1/(4 z)");
              }
              // Three leaf tree with a doubled wall.
              {
                ScatteringDiagram d = kronecker_diagram(2, 3);
                auto trees = enumerate_trees(d, 3);
                const LabelledTree* t = find_tree(trees, Vec2{1, 2}, 3);
                c.require(t != nullptr, "missing the three leaf tree");
                Poly u1 = Poly::variable(4, 0), u2 = Poly::variable(4, 1);
                Poly s1 = Poly::variable(4, 2), s2 = Poly::variable(4, 3);
                Poly w = (u1 - s2) * (u1 - s2) + (u1 - s1 - s2) * (u1 - s1 - s2) +
                         (u2 - s1 - Q(2) * s2) * (u2 - s1 - Q(2) * s2);
                c.require(build_potential(d, *t) == w, "three leaf potential");
                QMat h = potential_hessian(d, *t);
                c.require(h.at(0, 0) == 4 && h.at(0, 1) == 6 && h.at(1, 0) == 6 &&
                              h.at(1, 1) == 12,
                          "three leaf hessian entries");
                c.require(hessian_det(d, *t) == 12, "three leaf hessian determinant");
                auto p = critical_point(d, *t);
                c.require(p.size() == 2 && p[0].is_zero() && p[1] == Q(1, 3) * (u1 + u2),
                          "three leaf critical point");
                Poly ell = Q(2) * u1 - u2;
                c.require(critical_value(d, *t) == Q(1, 3) * (ell * ell),
                          "three leaf critical value");
              }
              // Parallel copies shifted to x = c1 and x = c2.
              {
                Q c1(1, 4), c2(1, 2);
                ScatteringDiagram d = shifted_copies(c1, c2);
                auto trees = enumerate_trees(d, 3);
                const LabelledTree* t = interior_shifted_tree(trees);
                c.require(t != nullptr, "missing the interior shifted tree");
                Poly u1 = Poly::variable(4, 0), u2 = Poly::variable(4, 1);
                Poly s1 = Poly::variable(4, 2), s2 = Poly::variable(4, 3);
                Poly a = u1 - Poly::constant(4, c1) - s2;
                Poly b = u1 - Poly::constant(4, c2) - s1 - s2;
                Poly e = u2 - s1 - Q(2) * s2;
                c.require(build_potential(d, *t) == a * a + b * b + e * e, "shifted potential");
                Poly d1 = build_potential(d, *t).derivative(2);
                Poly d2 = build_potential(d, *t).derivative(3);
                Poly exp1 = Q(2) * (Poly::constant(4, c2) + Q(2) * s1 + Q(3) * s2 - u1 - u2);
                Poly exp2 = Q(2) * (Poly::constant(4, c1 + c2) + Q(3) * s1 + Q(6) * s2 -
                                    Q(2) * u1 - Q(2) * u2);
                c.require(d1 == exp1, "first flow derivative");
                c.require(d2 == exp2, "second flow derivative");
                auto p = critical_point(d, *t);
                c.require(p.size() == 2, "shifted critical point arity");
                c.require(p[0] == Poly::constant(4, c1 - c2), "shifted critical point, flow one");
                c.require(p[1] == Q(1, 3) * (u1 + u2) + Poly::constant(4, (c2 - Q(2) * c1) / Q(3)),
                          "shifted critical point, flow two");
                Poly ell = Q(2) * u1 - u2 - Poly::constant(4, c1 + c2);
                c.require(critical_value(d, *t) == Q(1, 3) * (ell * ell),
                          "shifted critical value");
                c.require(hessian_det(d, *t) == 12, "shifted hessian determinant");
                RationalSection z = section({fun({Q(12), Q(0)}, Q(0)), fun({Q(0), Q(1)}, Q(0))}, 2);
                c.require(iterated_residue(z, {0, 1}, {Q(0), Q(0)}) == SurdScalar{Q(1, 12), 1},
                          "residue of 1/(12 z1 z2)");
                c.require(jk_global(z, positive_span_chamber(z.denominator)) ==
                              SurdScalar{Q(1, 12), 1},
                          "global residue of 1/(12 z1 z2)");
                // Folding the two parallel copies weights each tagged leaf by
                // 1/2, so the leaf coefficient product drops to a quarter.
                Q g_plain = tree_bracket(d, *t).lambda_product;
                ScatteringDiagram folded = d;
                folded.walls[1].crossing.log = folded.walls[1].crossing.log.scaled(Q(1, 2));
                folded.walls[2].crossing.log = folded.walls[2].crossing.log.scaled(Q(1, 2));
                auto folded_trees = enumerate_trees(folded, 3);
                const LabelledTree* ft = interior_shifted_tree(folded_trees);
                c.require(ft != nullptr, "missing the folded interior tree");
                c.require(tree_bracket(folded, *ft).lambda_product == g_plain / Q(4),
                          "folded weight is not a quarter of the plain one");
              }
            });

  criterion(6, "residue calculator invariances", [](Checker& c) {
    // Shifting the affine constants never changes the global sum while the
    // arrangement stays simple.
    for (const Q& delta : {Q(1), Q(2, 7), Q(-3, 5)}) {
      RationalSection f1 = section({fun({Q(4)}, delta)}, 1);
      c.require(jk_global(f1, positive_span_chamber(f1.denominator)) == SurdScalar{Q(1, 4), 1},
                "one variable shift invariance");
      RationalSection f2 =
          section({fun({Q(4), Q(6)}, delta), fun({Q(6), Q(12)}, -delta / Q(3))}, 2);
      c.require(jk_global(f2, positive_span_chamber(f2.denominator)) == SurdScalar{Q(1, 12), 1},
                "two variable shift invariance");
      RationalSection f3 = section({fun({Q(4), Q(6), Q(1)}, Q(-2) + delta),
                                    fun({Q(6), Q(12), Q(0)}, Q(1) - delta),
                                    fun({Q(0), Q(0), Q(5)}, Q(-5) + Q(2) * delta)},
                                   3);
      c.require(jk_global(f3, positive_span_chamber(f3.denominator)) == SurdScalar{Q(1, 60), 1},
                "three variable shift invariance");
    }
    // Every elimination order reproduces the local residue up to the
    // orientation sign.
    RationalSection f = section({fun({Q(4), Q(6), Q(1)}, Q(-2)), fun({Q(6), Q(12), Q(0)}, Q(1)),
                                 fun({Q(0), Q(0), Q(5)}, Q(-5))},
                                3);
    auto sp = singular_points(f.denominator);
    c.require(sp.size() == 1, "expected a single singular point");
    SurdScalar local =
        jk_local(f, sp[0].point, f.denominator, positive_span_chamber(f.denominator));
    c.require(local == SurdScalar{Q(1, 60), 1}, "local residue value");
    const std::vector<std::pair<std::vector<int>, int>> orders{
        {{0, 1, 2}, 1}, {{1, 0, 2}, -1}, {{2, 1, 0}, -1},
        {{1, 2, 0}, 1}, {{2, 0, 1}, 1},  {{0, 2, 1}, -1}};
    for (const auto& [order, sign] : orders)
      c.require(Q(sign) * iterated_residue(f, order, sp[0].point) == local,
                "elimination order sign reconciliation");
    // Holomorphic or empty input: zero.
    RationalSection flat = section({fun({Q(1), Q(1)}, Q(0))}, 2);
    c.require(jk_global(flat, positive_span_chamber(flat.denominator)) == SurdScalar{},
              "rank one arrangement has no singular points");
    RationalSection none;
    none.numerator = Poly::constant(1, Q(7));
    c.require(jk_global(none, {}) == SurdScalar{}, "empty denominator");
  });

  criterion(7, "marked tree and broken line theta functions agree on every chamber",
            [](Checker& c) {
              auto start = std::chrono::steady_clock::now();
              ScatteringDiagram initial = kronecker_diagram(1, 3);
              ScatteringDiagram completed = complete_inductive(initial, 3);
              const std::vector<QVec2> points{
                  // Three per chamber: the four sectors cut out of the first
                  // quadrant by the (2,1), (1,1), (1,2) rays, then the other
                  // three quadrants.
                  {Q(5), Q(1)},   {Q(7), Q(2)},   {Q(9), Q(4)},  {Q(5), Q(3)},  {Q(7), Q(4)},
                  {Q(8), Q(5)},   {Q(3), Q(5)},   {Q(4), Q(5)},  {Q(5), Q(7)},  {Q(1), Q(5)},
                  {Q(2), Q(7)},   {Q(3), Q(7)},   {Q(-5), Q(3)}, {Q(-4), Q(7)}, {Q(-1), Q(2)},
                  {Q(-5), Q(-3)}, {Q(-2), Q(-7)}, {Q(-3), Q(-1)}, {Q(3), Q(-5)}, {Q(7), Q(-2)},
                  {Q(1), Q(-6)}};
              for (const QVec2& endpoint : points) {
                for (Vec2 m : {Vec2{1, 0}, Vec2{0, 1}}) {
                  ThetaSeries broken = theta_broken(completed, endpoint, m, 3);
                  ThetaSeries jk = theta_jk(initial, endpoint, m, 3, 1);
                  c.require(broken == jk, "theta mismatch");
                }
              }
              c.require(elapsed_ms(start) < 120000, "over the 2 min budget");
            });

  criterion(8, "folded completions are seed independent", [](Checker& c) {
    for (long k : {1L, 2L}) {
      std::vector<ScatteringDiagram> runs;
      for (unsigned seed : {1u, 5u, 9u})
        runs.push_back(complete_jk(kronecker_diagram(k, 3), 3, seed));
      for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j)
          c.require(equivalent(runs[i], runs[j], 3), "seeds disagree");
    }
  });

  std::cout << (8 - failures) << " of 8 criteria passed\n";
  return failures;
}
