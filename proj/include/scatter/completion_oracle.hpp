#pragma once

#include <stdexcept>

#include "scatter/diagram_model.hpp"

namespace scatter {

// Initial diagram of Kronecker type: the two coordinate lines carrying the
// dilogarithm crossings for the cone generators.
inline ScatteringDiagram kronecker_diagram(long kappa, long n) {
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

// Merged generator of all origin-based walls in the given direction.
inline GradedSeries wall_function(const ScatteringDiagram& d, Vec2 direction) {
  Vec2 w = primitive(direction);
  GradedSeries g;
  for (const Wall& wall : d.walls) {
    if (!wall.based_at_origin() || wall.direction() != w) continue;
    g.add(d.lattice, wall.crossing.log);
  }
  return g;
}

// Degree-by-degree completion: at each order the graded defect component is
// cancelled by a ray in each offending direction carrying minus that
// component. Existing rays in the same direction absorb the correction.
inline ScatteringDiagram complete_inductive(const ScatteringDiagram& d_in, long n) {
  if (d_in.base_ring != BaseRing::plain)
    throw std::logic_error("inductive completion needs the plain base ring");
  ScatteringDiagram d = d_in;
  d.order = n;
  for (Wall& w : d.walls)
    if (!w.based_at_origin())
      throw std::logic_error("initial walls must pass through the origin");
  for (long k = 2; k <= n; ++k) {
    GradedSeries defect = consistency_defect(d, k).grade_part(d.lattice, k);
    for (const auto& [m, c] : defect.coeff) {
      Vec2 dir = primitive(m);
      Wall* target = nullptr;
      for (Wall& w : d.walls)
        if (w.kind == WallKind::ray && w.based_at_origin() && w.direction() == dir) {
          target = &w;
          break;
        }
      if (!target) {
        d.walls.emplace_back(WallKind::ray, QVec2{Q(0), Q(0)}, dir, canonical_covector(dir),
                             GradedSeries{});
        target = &d.walls.back();
      }
      target->crossing.log.add_term(d.lattice, m, -c);
    }
  }
  return d;
}

}  // namespace scatter
