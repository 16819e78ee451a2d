#pragma once

#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatter/diagram_model.hpp"
#include "scatter/tree_engine.hpp"

namespace scatter {

// Shift and perturbation data for one unfolding. shifts[i][j] displaces copy j
// of wall i; deltas has the same shape and enters residue denominators only.
struct UnfoldingParams {
  long j_size = 1;
  std::vector<std::vector<QVec2>> shifts;
  std::vector<std::vector<QVec2>> deltas;
  unsigned seed = 0;
};

inline ScatteringDiagram unfold(const ScatteringDiagram& d_in, const UnfoldingParams& params) {
  if (d_in.base_ring != BaseRing::plain) throw std::invalid_argument("diagram already unfolded");
  if (params.shifts.size() != d_in.walls.size())
    throw std::invalid_argument("shift table does not match wall count");
  ScatteringDiagram out;
  out.lattice = d_in.lattice;
  out.base_ring = BaseRing::nilpotent;
  out.unfolding_size = params.j_size;
  out.order = d_in.order;
  for (std::size_t i = 0; i < d_in.walls.size(); ++i) {
    const Wall& w = d_in.walls[i];
    if (static_cast<long>(params.shifts[i].size()) != params.j_size)
      throw std::invalid_argument("shift table does not match copy count");
    for (long j = 0; j < params.j_size; ++j)
      out.walls.emplace_back(w.kind, w.base + params.shifts[i][j], w.direction(), w.covector(),
                             w.crossing.log,
                             std::make_pair(static_cast<int>(i), static_cast<int>(j)));
  }
  return out;
}

// Per-wall delta displacements for one tree's denominator arrangement,
// indexed like extra_shift in build_potential.
inline std::vector<QVec2> delta_shift(const ScatteringDiagram& d_c, const UnfoldingParams& params) {
  std::vector<QVec2> out(d_c.walls.size(), QVec2{Q(0), Q(0)});
  if (params.deltas.empty()) return out;
  for (std::size_t w = 0; w < d_c.walls.size(); ++w) {
    const auto& tag = d_c.walls[w].nilpotent_tag;
    if (tag) out[w] = params.deltas.at(tag->first).at(tag->second);
  }
  return out;
}

struct AdmissibilityReport {
  bool ok = true;
  // On failure: index into the tree list plus the degenerate relation.
  int tree_index = -1;
  std::string reason;
};

// A parameter choice is admissible when every tree's critical value is a
// positive rank-one square and no nonempty support cell lies inside a
// boundary stratum of the flow domain. Trees with empty cells contribute
// nothing and cannot obstruct.
inline AdmissibilityReport admissible_unfolding(const ScatteringDiagram& d_c,
                                                const std::vector<LabelledTree>& trees) {
  AdmissibilityReport rep;
  for (std::size_t idx = 0; idx < trees.size(); ++idx) {
    const LabelledTree& t = trees[idx];
    if (t.leaf_count < 2) continue;
    TropicalCell cell;
    try {
      cell = tropical_support(d_c, t);
    } catch (const std::logic_error& e) {
      rep.ok = false;
      rep.tree_index = static_cast<int>(idx);
      rep.reason = e.what();
      return rep;
    }
    if (cell.empty) continue;
    if (!cell.boundary_strata.empty()) {
      rep.ok = false;
      rep.tree_index = static_cast<int>(idx);
      std::ostringstream os;
      os << "critical coordinate s_" << (cell.boundary_strata.front() + 1)
         << " vanishes identically on the support cell";
      rep.reason = os.str();
      return rep;
    }
  }
  return rep;
}

inline long parameter_search_budget() {
  if (const char* env = std::getenv("SCATTER_SEARCH_BUDGET")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0') return v;
    throw std::invalid_argument("SCATTER_SEARCH_BUDGET is not an integer");
  }
  return 64;
}

// Deterministic search for admissible shifts: candidates are perpendicular
// offsets with denominators growing per attempt, numerators drawn from the
// seeded generator. Perturbations delta reuse the same stream at a finer
// scale; they only ever enter denominator constants.
inline UnfoldingParams pick_parameters(const ScatteringDiagram& d_in, int n, unsigned seed) {
  long budget = parameter_search_budget();
  std::vector<std::string> failures;
  for (long attempt = 0; attempt < budget; ++attempt) {
    std::mt19937_64 rng(1000003ull * seed + static_cast<unsigned long long>(attempt));
    long denom = 3 + attempt;
    UnfoldingParams params;
    params.seed = seed;
    params.j_size = std::max(2, n);
    for (const Wall& w : d_in.walls) {
      Vec2 nc = w.covector();
      std::vector<QVec2> row, drow;
      for (long j = 0; j < params.j_size; ++j) {
        Q h(static_cast<long>(rng() % (2 * denom + 1)) - denom, denom);
        row.push_back(QVec2{h * Q(nc[0]), h * Q(nc[1])});
        Q e(static_cast<long>(rng() % (2 * denom + 1)) - denom, denom * 9973);
        drow.push_back(QVec2{e * Q(nc[0]), e * Q(nc[1])});
      }
      params.shifts.push_back(row);
      params.deltas.push_back(drow);
    }
    ScatteringDiagram d_c = unfold(d_in, params);
    auto trees = enumerate_trees(d_c, n);
    AdmissibilityReport rep = admissible_unfolding(d_c, trees);
    if (rep.ok) return params;
    std::ostringstream os;
    os << "attempt " << attempt << ": tree " << rep.tree_index << ": " << rep.reason;
    failures.push_back(os.str());
  }
  std::ostringstream os;
  os << "parameter search budget exhausted after " << budget << " attempts";
  for (const auto& f : failures) os << "\n  " << f;
  throw std::runtime_error(os.str());
}

// Evaluates the formal copy weights at 1/|J| and collapses the copies back
// onto their asymptotic germs. Applied to unfolded initial walls this
// recovers the original diagram.
inline ScatteringDiagram fold(const ScatteringDiagram& d_c) {
  if (d_c.base_ring != BaseRing::nilpotent) throw std::invalid_argument("diagram is not unfolded");
  ScatteringDiagram flat;
  flat.lattice = d_c.lattice;
  flat.order = d_c.order;
  for (const Wall& w : d_c.walls) {
    GradedSeries log = w.crossing.log;
    if (w.nilpotent_tag) log = log.scaled(Q(1, d_c.unfolding_size));
    flat.walls.emplace_back(w.kind, w.base, w.direction(), w.covector(), log);
  }
  ScatteringDiagram germ = asymptotic(flat);
  ScatteringDiagram out;
  out.lattice = germ.lattice;
  out.order = germ.order;
  for (const auto& [key, log] : detail::merged_walls(germ, germ.order)) {
    if (log.is_zero()) continue;
    out.walls.emplace_back(key.kind, key.base, key.dir, canonical_covector(key.dir), log);
  }
  return out;
}

}  // namespace scatter
