#include <catch2/catch_amalgamated.hpp>

#include "scatter/diagram_model.hpp"

using namespace scatter;

namespace {

// Initial diagram: the two coordinate lines, each carrying the dilogarithm
// crossing for its direction. Generators are handed in with the covector
// orientation that the constructor normalizes away.
ScatteringDiagram kronecker_initial(long kappa, long n) {
  Lattice lat;
  lat.kappa = kappa;
  ScatteringDiagram d;
  d.lattice = lat;
  d.order = n;
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, -1},
                       dilog_generator(lat, Vec2{1, 0}, n));
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{0, 1}, Vec2{1, 0},
                       dilog_generator(lat, Vec2{0, 1}, n));
  return d;
}

}  // namespace

TEST_CASE("wall constructor canonicalizes the covector") {
  Lattice lat;
  GradedSeries g = dilog_generator(lat, Vec2{1, 0}, 4);

  Wall w1(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, 1}, g);
  CHECK(w1.covector() == Vec2{0, 1});
  CHECK(w1.crossing.log == g);

  Wall w2(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, -3}, g);
  CHECK(w2.covector() == Vec2{0, 1});
  CHECK(w2.crossing.log == g.scaled(Q(-1)));

  // Non-primitive directions are reduced.
  Wall w3(WallKind::ray, QVec2{Q(0), Q(0)}, Vec2{2, 2}, Vec2{-1, 1},
          dilog_generator(lat, Vec2{1, 1}, 4));
  CHECK(w3.direction() == Vec2{1, 1});

  CHECK_THROWS_AS(Wall(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{1, 0}, g),
                  std::logic_error);
  CHECK_THROWS_AS(Wall(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{0, 1}, Vec2{1, 0}, g),
                  std::logic_error);
}

TEST_CASE("empty loop gives the identity") {
  Lattice lat;
  ScatteringDiagram d;
  d.lattice = lat;
  Automorphism a = path_ordered_product(d, {}, 4);
  CHECK(a.log.is_zero());
  MonomialMap img = a.apply(Vec2{0, 1}, 4);
  CHECK(img.size() == 1);
  CHECK(img[Vec2{0, 1}] == 1);
}

TEST_CASE("crossing a wall both ways cancels") {
  ScatteringDiagram d = kronecker_initial(1, 5);
  Automorphism a = path_ordered_product(d, {{0, 1}, {0, -1}}, 5);
  CHECK(a.log.is_zero());
}

TEST_CASE("reversed loop inverts the product") {
  ScatteringDiagram d = kronecker_initial(2, 4);
  std::vector<std::pair<std::size_t, int>> loop{{0, 1}, {1, -1}, {0, -1}, {1, 1}};
  std::vector<std::pair<std::size_t, int>> rev{{1, -1}, {0, 1}, {1, 1}, {0, -1}};
  Automorphism fwd = path_ordered_product(d, loop, 4);
  Automorphism bwd = path_ordered_product(d, rev, 4);
  CHECK(bwd.log == fwd.log.scaled(Q(-1)));
  CHECK(!fwd.log.is_zero());
}

TEST_CASE("initial diagram monodromy at low order") {
  for (long kappa : {1L, 2L, 3L}) {
    ScatteringDiagram d = kronecker_initial(kappa, 2);
    GradedSeries defect = consistency_defect(d, 2);
    CHECK(defect.coeff.size() == 1);
    CHECK(defect.at(Vec2{1, 1}) == Q(-kappa));
  }
}

TEST_CASE("single wall diagrams are consistent") {
  Lattice lat;
  ScatteringDiagram d;
  d.lattice = lat;
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, 1},
                       dilog_generator(lat, Vec2{1, 0}, 6));
  CHECK(consistency_defect(d, 6).is_zero());

  d.walls[0].base = QVec2{Q(1), Q(1)};
  CHECK_THROWS_AS(consistency_defect(d, 6), std::logic_error);
}

TEST_CASE("defect survives splitting a wall into coincident pieces") {
  ScatteringDiagram d = kronecker_initial(1, 3);
  GradedSeries whole = consistency_defect(d, 3);

  ScatteringDiagram split = d;
  GradedSeries g = d.walls[0].crossing.log;
  split.walls[0].crossing.log = g.scaled(Q(1, 3));
  split.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, 1},
                           g.scaled(Q(2, 3)));
  CHECK(consistency_defect(split, 3) == whole);
  CHECK(equivalent(split, d, 3));
}

TEST_CASE("automorphism action on a monomial") {
  Lattice lat;
  ScatteringDiagram d;
  d.lattice = lat;
  // Raw dilogarithm crossing on the x-axis: acting once on y multiplies by
  // (1+x); the stored canonical generator is its inverse orientation.
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(0)}, Vec2{1, 0}, Vec2{0, -1},
                       dilog_generator(lat, Vec2{1, 0}, 6));
  Automorphism a = path_ordered_product(d, {{0, -1}}, 6);
  MonomialMap img = a.apply(Vec2{0, 1}, 6);
  CHECK(img.size() == 2);
  CHECK(img[Vec2{0, 1}] == 1);
  CHECK(img[Vec2{1, 1}] == 1);

  // Monomials outside the cone transform too.
  MonomialMap img2 = a.apply(Vec2{-1, 2}, 6);
  CHECK(img2[Vec2{-1, 2}] == 1);
  CHECK(img2[Vec2{0, 2}] == 2);
}

TEST_CASE("equivalence merges coincident walls and drops zeros") {
  ScatteringDiagram d = kronecker_initial(1, 4);

  ScatteringDiagram padded = d;
  GradedSeries zero;
  padded.walls.emplace_back(WallKind::ray, QVec2{Q(0), Q(0)}, Vec2{1, 1}, Vec2{-1, 1}, zero);
  CHECK(equivalent(padded, d, 4));

  ScatteringDiagram bumped = d;
  GradedSeries ray;
  ray.add_term(d.lattice, Vec2{1, 1}, Q(1));
  bumped.walls.emplace_back(WallKind::ray, QVec2{Q(0), Q(0)}, Vec2{1, 1}, Vec2{-1, 1}, ray);
  CHECK(!equivalent(bumped, d, 4));

  // Same geometry, shifted germ: not equivalent.
  ScatteringDiagram shifted = bumped;
  shifted.walls.back().base = QVec2{Q(1), Q(1)};
  CHECK(!equivalent(shifted, bumped, 4));
}

TEST_CASE("asymptotic reduction translates supports to the origin") {
  Lattice lat;
  ScatteringDiagram d;
  d.lattice = lat;
  GradedSeries ray;
  ray.add_term(lat, Vec2{1, 1}, Q(1));
  d.walls.emplace_back(WallKind::ray, QVec2{Q(1), Q(1)}, Vec2{1, 1}, Vec2{-1, 1}, ray);
  d.walls.emplace_back(WallKind::line, QVec2{Q(0), Q(5)}, Vec2{1, 0}, Vec2{0, 1},
                       dilog_generator(lat, Vec2{1, 0}, 4));

  ScatteringDiagram a = asymptotic(d);
  CHECK(a.walls[0].base == (QVec2{Q(0), Q(0)}));
  CHECK(a.walls[0].direction() == Vec2{1, 1});
  CHECK(a.walls[1].base == (QVec2{Q(0), Q(0)}));

  ScatteringDiagram b = asymptotic(a);
  CHECK(equivalent(a, b, 4));
}
