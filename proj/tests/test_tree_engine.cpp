#include <catch2/catch_amalgamated.hpp>

#include <set>
#include "scatter/completion_oracle.hpp"
#include "scatter/tree_engine.hpp"

using namespace scatter;

namespace {

const LabelledTree* find_tree(const std::vector<LabelledTree>& trees, Vec2 degree, int leaves) {
  for (const auto& t : trees)
    if (t.degree() == degree && t.leaf_count == leaves) return &t;
  return nullptr;
}

LabelledTree flipped_at_root(const LabelledTree& t) {
  LabelledTree f = t;
  std::swap(f.nodes[f.root].left, f.nodes[f.root].right);
  return f;
}

}  // namespace

TEST_CASE("tree enumeration counts and automorphisms") {
  ScatteringDiagram d = kronecker_diagram(1, 4);

  auto small = enumerate_trees(d, 2);
  CHECK(small.size() == 5);

  auto mid = enumerate_trees(d, 3);
  CHECK(mid.size() == 11);

  // Identical siblings would join parallel degrees, so every join has
  // non-proportional children and every tree has a trivial symmetry group.
  auto big = enumerate_trees(d, 4);
  for (const auto& t : big) {
    CHECK(t.aut == 1);
    for (int i = 0; i < static_cast<int>(t.nodes.size()); ++i) {
      if (t.is_leaf(i)) continue;
      CHECK(cross(t.nodes[t.nodes[i].left].degree, t.nodes[t.nodes[i].right].degree) != 0);
    }
  }
  bool balanced_found = false;
  for (const auto& t : big) {
    if (t.degree() != Vec2{2, 2} || t.leaf_count != 4) continue;
    const auto& root = t.nodes[t.root];
    if (!t.is_leaf(root.left) && !t.is_leaf(root.right) &&
        t.nodes[root.left].degree == Vec2{1, 1} && t.nodes[root.right].degree == Vec2{1, 1})
      balanced_found = true;
  }
  CHECK(!balanced_found);
}

TEST_CASE("two leaf tree matches the first worked example") {
  ScatteringDiagram d = kronecker_diagram(1, 4);
  auto trees = enumerate_trees(d, 2);
  const LabelledTree* t = find_tree(trees, Vec2{1, 1}, 2);
  REQUIRE(t);

  TreeAlgebra alg = tree_bracket(d, *t);
  CHECK(alg.coeff == 1);
  CHECK(alg.r == (QVec2{Q(-1), Q(1)}));

  Poly u1 = Poly::variable(3, 0), u2 = Poly::variable(3, 1), s = Poly::variable(3, 2);
  Poly expected = (u1 - s) * (u1 - s) + (u2 - s) * (u2 - s);
  CHECK(build_potential(d, *t) == expected);

  CHECK(hessian_det(d, *t) == 4);

  auto p = critical_point(d, *t);
  REQUIRE(p.size() == 1);
  CHECK(p[0] == Q(1, 2) * (u1 + u2));

  Poly w_half = Q(1, 2) * ((u1 - u2) * (u1 - u2));
  CHECK(critical_value(d, *t) == w_half);

  TropicalCell cell = tropical_support(d, *t);
  CHECK(cell.direction == Vec2{1, 1});
  CHECK(cell.alpha == (QVec2{Q(-1), Q(1)}));
  CHECK(cell.beta == 0);
  CHECK(cell.gamma == Q(1, 2));
  CHECK(!cell.empty);
  CHECK(cell.boundary_strata.empty());
  REQUIRE(cell.t_hi.has_value());
  CHECK(*cell.t_hi == 0);
  CHECK(!cell.t_lo.has_value());
}

TEST_CASE("three leaf tree pins the boundary stratum") {
  ScatteringDiagram d = kronecker_diagram(2, 3);
  auto trees = enumerate_trees(d, 3);
  const LabelledTree* t = find_tree(trees, Vec2{1, 2}, 3);
  REQUIRE(t);

  TreeAlgebra alg = tree_bracket(d, *t);
  CHECK(alg.coeff == 4);  // kappa^2
  CHECK((alg.r == QVec2{Q(-2), Q(1)} || alg.r == QVec2{Q(2), Q(-1)}));

  Poly u1 = Poly::variable(4, 0), u2 = Poly::variable(4, 1);
  Poly s1 = Poly::variable(4, 2), s2 = Poly::variable(4, 3);
  Poly expected = (u1 - s2) * (u1 - s2) + (u1 - s1 - s2) * (u1 - s1 - s2) +
                  (u2 - s1 - Q(2) * s2) * (u2 - s1 - Q(2) * s2);
  CHECK(build_potential(d, *t) == expected);

  QMat h = potential_hessian(d, *t);
  CHECK(h.at(0, 0) == 4);
  CHECK(h.at(0, 1) == 6);
  CHECK(h.at(1, 0) == 6);
  CHECK(h.at(1, 1) == 12);
  CHECK(hessian_det(d, *t) == 12);

  auto p = critical_point(d, *t);
  REQUIRE(p.size() == 2);
  CHECK(p[0].is_zero());
  CHECK(p[1] == Q(1, 3) * (u1 + u2));

  Poly q = Q(1, 3) * ((Q(2) * u1 - u2) * (Q(2) * u1 - u2));
  CHECK(critical_value(d, *t) == q);

  TropicalCell cell = tropical_support(d, *t);
  CHECK(cell.boundary_strata == std::vector<int>{0});
  CHECK(cell.gamma == Q(1, 3));

  // The companion tree of the same degree: one leaf of multiplicity two.
  const LabelledTree* t2 = find_tree(trees, Vec2{1, 2}, 2);
  REQUIRE(t2);
  TreeAlgebra alg2 = tree_bracket(d, *t2);
  CHECK(alg2.lambda_product == Q(-1, 4));
  CHECK(alg2.coeff == -1);  // (-1/4) * kappa * 2
  CHECK(hessian_det(d, *t2) == 10);
  TropicalCell cell2 = tropical_support(d, *t2);
  CHECK(cell2.gamma == Q(1, 5));
  CHECK(cell2.boundary_strata.empty());
  CHECK(!cell2.empty);
}

TEST_CASE("shifted copies split the boundary tree") {
  // Two parallel copies of the vertical wall, shifted to x = 1/4 and x = 1/2,
  // with the horizontal wall through the origin.
  Lattice lat;
  ScatteringDiagram d;
  d.lattice = lat;
  d.order = 3;
  Q c1(1, 4), c2(1, 2);
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, 1},
                       dilog_generator(lat, Vec2{1, 0}, 3).scaled(Q(-1)));
  d.walls.emplace_back(WallKind::line, QVec2{c1, Q(0)}, Vec2{0, 1}, Vec2{-1, 0},
                       dilog_generator(lat, Vec2{0, 1}, 3).scaled(Q(-1)));
  d.walls.emplace_back(WallKind::line, QVec2{c2, Q(0)}, Vec2{0, 1}, Vec2{-1, 0},
                       dilog_generator(lat, Vec2{0, 1}, 3).scaled(Q(-1)));

  auto trees = enumerate_trees(d, 3);
  const LabelledTree* interior = nullptr;
  const LabelledTree* outside = nullptr;
  for (const auto& t : trees) {
    if (t.degree() != Vec2{1, 2} || t.leaf_count != 3) continue;
    // Pick the trees using both parallel copies, keyed by which copy sits at
    // the shallow leaf (the root's leaf child).
    const auto& root = t.nodes[t.root];
    int shallow = t.is_leaf(root.left) ? root.left : root.right;
    int inner = t.is_leaf(root.left) ? root.right : root.left;
    std::set<std::size_t> leaf_walls{t.nodes[shallow].wall,
                                     t.nodes[t.nodes[inner].left].wall,
                                     t.nodes[t.nodes[inner].right].wall};
    if (leaf_walls != std::set<std::size_t>{0, 1, 2}) continue;
    if (t.nodes[shallow].wall == 1)
      interior = &t;
    else if (t.nodes[shallow].wall == 2)
      outside = &t;
  }
  REQUIRE(interior);
  REQUIRE(outside);

  auto p = critical_point(d, *interior);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == Poly::constant(4, c1 - c2));

  Poly u1 = Poly::variable(4, 0), u2 = Poly::variable(4, 1);
  Poly ell = Q(2) * u1 - u2 - Poly::constant(4, c1 + c2);
  CHECK(critical_value(d, *interior) == Q(1, 3) * (ell * ell));
  CHECK(hessian_det(d, *interior) == 12);

  TropicalCell cell = tropical_support(d, *interior);
  CHECK(!cell.empty);
  CHECK(cell.boundary_strata.empty());
  CHECK(cell.t_hi.has_value());
  CHECK(!cell.t_lo.has_value());
  CHECK(cell.beta == c1 + c2);

  TropicalCell bad = tropical_support(d, *outside);
  CHECK(bad.empty);
}

TEST_CASE("ribbon flip leaves the weighted covector invariant") {
  ScatteringDiagram d = kronecker_diagram(2, 4);
  for (const auto& t : enumerate_trees(d, 4)) {
    if (t.leaf_count < 2) continue;
    TreeAlgebra a = tree_bracket(d, t);
    TreeAlgebra b = tree_bracket(d, flipped_at_root(t));
    CHECK(a.coeff == -b.coeff);
    CHECK(a.coeff * a.r[0] == b.coeff * b.r[0]);
    CHECK(a.coeff * a.r[1] == b.coeff * b.r[1]);
  }
}

TEST_CASE("hessians are constant and positive") {
  ScatteringDiagram d = kronecker_diagram(3, 4);
  for (const auto& t : enumerate_trees(d, 4)) {
    Q det = hessian_det(d, t);
    CHECK(det > 0);
    if (t.leaf_count == 1) CHECK(det == 1);
  }
}

TEST_CASE("single leaf trees recover their wall") {
  ScatteringDiagram d = kronecker_diagram(1, 3);
  auto trees = enumerate_trees(d, 3);
  const LabelledTree* t = find_tree(trees, Vec2{1, 0}, 1);
  REQUIRE(t);
  TropicalCell cell = tropical_support(d, *t);
  CHECK(cell.direction == Vec2{1, 0});
  CHECK(cell.alpha == (QVec2{Q(0), Q(1)}));
  CHECK(cell.gamma == 1);
  CHECK(!cell.t_lo.has_value());
  CHECK(!cell.t_hi.has_value());
}
