#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scatter/core_algebra.hpp"
#include "scatter/linalg.hpp"
#include "scatter/rational.hpp"

namespace scatter {

enum class WallKind { line, ray };
enum class BaseRing { plain, nilpotent };

// Canonical primitive covector annihilating m, oriented so that (m, n) is a
// positively oriented pair.
inline Vec2 canonical_covector(Vec2 m) { return Vec2{-m[1], m[0]}; }

// A wall: polyhedral support (full line or ray in direction m), a crossing
// automorphism stored by its log, and an optional nilpotent tag (i, j) marking
// a factor t_{i,j} with t_{i,j}^2 = 0.
struct Wall {
  WallKind kind = WallKind::line;
  QVec2 base{Q(0), Q(0)};
  WallCrossing crossing;
  std::optional<std::pair<int, int>> nilpotent_tag;

  Wall() = default;

  // Normalizes (n, g) ~ (-n, -g) so the stored covector is canonical.
  Wall(WallKind k, QVec2 base_point, Vec2 m, Vec2 n, GradedSeries log_gen,
       std::optional<std::pair<int, int>> tag = std::nullopt)
      : kind(k), base(std::move(base_point)), nilpotent_tag(tag) {
    if (is_zero(m)) throw std::logic_error("wall direction must be nonzero");
    m = primitive(m);
    if (m[0] * n[0] + m[1] * n[1] != 0) throw std::logic_error("wall covector must annihilate m");
    if (is_zero(n)) throw std::logic_error("wall covector must be nonzero");
    Vec2 nc = canonical_covector(m);
    bool flip = !positive_multiple(primitive(n), nc);
    crossing.direction = m;
    crossing.covector = nc;
    crossing.log = flip ? log_gen.scaled(Q(-1)) : std::move(log_gen);
    for (const auto& [mm, c] : crossing.log.coeff)
      if (!positive_multiple(mm, m)) throw std::logic_error("wall log not supported on direction");
  }

  Vec2 direction() const { return crossing.direction; }
  Vec2 covector() const { return crossing.covector; }

  bool based_at_origin() const { return base[0] == 0 && base[1] == 0; }
};

struct ScatteringDiagram {
  Lattice lattice;
  std::vector<Wall> walls;
  BaseRing base_ring = BaseRing::plain;
  int unfolding_size = 0;
  long order = 0;
};

namespace detail {

// Clockwise visit order around the origin for a loop that starts just above
// the positive x-axis: +x first, then the lower half plane, then -x, then the
// upper half plane, the 45-degree diagonal last.
inline int cw_half(Vec2 d) {
  Vec2 e{d[0], -d[1]};
  if (e[1] == 0 && e[0] > 0) return 0;
  if (e[1] > 0) return 1;
  if (e[1] == 0) return 2;
  return 3;
}

inline bool cw_before(Vec2 a, Vec2 b) {
  int ha = cw_half(a), hb = cw_half(b);
  if (ha != hb) return ha < hb;
  Vec2 ea{a[0], -a[1]}, eb{b[0], -b[1]};
  return cross(ea, eb) > 0;
}

struct CrossEvent {
  Vec2 dir;           // direction of travel where the loop meets the wall
  std::size_t wall;   // index into diagram walls
  int sign;           // +1 applies Theta, -1 applies Theta^{-1}
};

// Sign rule: crossing from {<.,n> > 0} to {<.,n> < 0} applies Theta. For the
// clockwise loop the tangent at crossing direction d is (d2, -d1), so Theta is
// applied exactly when cross(d, n) > 0.
inline int crossing_sign(Vec2 d, Vec2 n) { return cross(d, n) > 0 ? 1 : -1; }

// Basis of cone monomials with grade <= cap, indexed for matrix work.
struct ConeBasis {
  std::vector<Vec2> points;
  std::map<Vec2, std::size_t> index;

  ConeBasis(const Lattice& lat, long cap) {
    long r = 0;
    for (Vec2 g : {lat.cone_gen0, lat.cone_gen1})
      r = std::max({r, std::abs(g[0]), std::abs(g[1])});
    r *= cap;
    for (long x = -r; x <= r; ++x)
      for (long y = -r; y <= r; ++y) {
        Vec2 m{x, y};
        if (!lat.in_positive_part(m) || lat.grade(m) > cap) continue;
        points.push_back(m);
      }
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) index.emplace(points[i], i);
  }
};

// Matrix of the derivation a -> {a, g} on the cone basis, entries truncated to
// the basis cap.
inline QMat derivation_matrix(const Lattice& lat, const ConeBasis& basis, const GradedSeries& g) {
  QMat d(basis.points.size(), basis.points.size());
  for (std::size_t j = 0; j < basis.points.size(); ++j) {
    Vec2 e = basis.points[j];
    for (const auto& [w, c] : g.coeff) {
      auto it = basis.index.find(e + w);
      if (it == basis.index.end()) continue;
      d.at(it->second, j) += c * skew_pair(lat, e, w);
    }
  }
  return d;
}

// Reads a generator h off the matrix of a -> {a, h} using the cone generators
// as probes; the two probes cross-check each other where both apply.
inline GradedSeries recover_generator(const Lattice& lat, const ConeBasis& basis, const QMat& l,
                                      long n) {
  GradedSeries h;
  for (Vec2 w : basis.points) {
    if (lat.grade(w) > n) continue;
    std::optional<Q> value;
    for (Vec2 probe : {lat.cone_gen0, lat.cone_gen1}) {
      Q sk = skew_pair(lat, probe, w);
      if (sk == 0) continue;
      auto row = basis.index.find(probe + w);
      auto col = basis.index.find(probe);
      if (row == basis.index.end() || col == basis.index.end())
        throw std::logic_error("probe outside basis cap");
      Q v = l.at(row->second, col->second) / sk;
      if (value && !(*value == v)) throw std::logic_error("inconsistent generator recovery");
      value = v;
    }
    if (!value) throw std::logic_error("no probe pairs with monomial");
    h.add_term(lat, w, *value);
  }
  return h;
}

}  // namespace detail

// An automorphism of the truncated algebra, stored by the log of its action.
struct Automorphism {
  Lattice lattice;
  GradedSeries log;
  long order = 0;

  // Image of x_{m0}, as an absolute monomial map; m0 may lie outside the cone.
  MonomialMap apply(Vec2 m0, long n) const {
    MonomialMap img;
    img[m0] = 1;
    MonomialMap layer = img;
    for (long k = 1; k <= n; ++k) {
      MonomialMap next;
      bool any = false;
      for (const auto& [a, ca] : layer)
        for (const auto& [w, cw] : log.coeff) {
          if (lattice.grade(a + w) > lattice.grade(m0) + n) continue;
          Q c = ca * cw * skew_pair(lattice, a, w);
          if (c == 0) continue;
          next[a + w] += c;
          any = true;
        }
      if (!any) break;
      for (auto& [m, c] : next) {
        c /= Q(k);
        img[m] += c;
      }
      layer = std::move(next);
      for (auto it = layer.begin(); it != layer.end();)
        it = it->second == 0 ? layer.erase(it) : std::next(it);
    }
    for (auto it = img.begin(); it != img.end();)
      it = it->second == 0 ? img.erase(it) : std::next(it);
    return img;
  }
};

// Path-ordered product over an explicit combinatorial loop: a list of
// (wall index, sign) in the order crossed. Signs follow the crossing rule.
inline Automorphism path_ordered_product(const ScatteringDiagram& d,
                                         const std::vector<std::pair<std::size_t, int>>& loop,
                                         long n) {
  if (d.base_ring != BaseRing::plain)
    throw std::logic_error("path-ordered products need the plain base ring");
  d.lattice.validate();
  long cap = n + std::max(d.lattice.grade(d.lattice.cone_gen0), d.lattice.grade(d.lattice.cone_gen1));
  detail::ConeBasis basis(d.lattice, cap);
  QMat m = QMat::identity(basis.points.size());
  for (const auto& [idx, sign] : loop) {
    if (idx >= d.walls.size()) throw std::logic_error("loop references missing wall");
    if (sign != 1 && sign != -1) throw std::logic_error("crossing sign must be +1 or -1");
    const GradedSeries& g = d.walls[idx].crossing.log;
    QMat step = nilpotent_exp(
        detail::derivation_matrix(d.lattice, basis, g.truncated(d.lattice, cap).scaled(Q(sign))));
    m = step * m;
  }
  Automorphism a;
  a.lattice = d.lattice;
  a.order = n;
  a.log = detail::recover_generator(d.lattice, basis, nilpotent_log(m), n);
  return a;
}

// Log of the monodromy around the origin along the canonical clockwise loop,
// truncated at order N. Zero iff the diagram is consistent to that order.
inline GradedSeries consistency_defect(const ScatteringDiagram& d, long n) {
  std::vector<detail::CrossEvent> events;
  for (std::size_t i = 0; i < d.walls.size(); ++i) {
    const Wall& w = d.walls[i];
    if (!w.based_at_origin())
      throw std::logic_error("monodromy loop would cross a wall endpoint; reduce to the origin");
    Vec2 m = w.direction();
    Vec2 n_cov = w.covector();
    events.push_back({m, i, detail::crossing_sign(m, n_cov)});
    if (w.kind == WallKind::line)
      events.push_back({-m, i, detail::crossing_sign(-m, n_cov)});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const detail::CrossEvent& a, const detail::CrossEvent& b) {
                     return detail::cw_before(a.dir, b.dir);
                   });
  std::vector<std::pair<std::size_t, int>> loop;
  loop.reserve(events.size());
  for (const auto& e : events) loop.emplace_back(e.wall, e.sign);
  return path_ordered_product(d, loop, n).log;
}

// Translates every wall support to the origin, keeping direction and log.
inline ScatteringDiagram asymptotic(const ScatteringDiagram& d) {
  if (d.base_ring != BaseRing::plain)
    throw std::logic_error("asymptotic reduction needs the plain base ring");
  ScatteringDiagram out = d;
  for (Wall& w : out.walls) w.base = QVec2{Q(0), Q(0)};
  return out;
}

namespace detail {

struct WallKey {
  WallKind kind;
  QVec2 base;
  Vec2 dir;

  bool operator<(const WallKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (base != o.base) return base < o.base;
    return dir < o.dir;
  }
};

// Support germ: rays keep their base, lines are keyed by the point closest to
// the origin so coincident lines compare equal.
inline WallKey key_of(const Wall& w) {
  if (w.kind == WallKind::ray) return {w.kind, w.base, w.direction()};
  Vec2 m = w.direction();
  Q m2 = Q(m[0] * m[0] + m[1] * m[1]);
  Q t = (w.base[0] * Q(m[0]) + w.base[1] * Q(m[1])) / m2;
  QVec2 foot{w.base[0] - t * Q(m[0]), w.base[1] - t * Q(m[1])};
  return {w.kind, foot, m};
}

inline std::map<WallKey, GradedSeries> merged_walls(const ScatteringDiagram& d, long n) {
  std::map<WallKey, GradedSeries> acc;
  for (const Wall& w : d.walls) {
    GradedSeries g = w.crossing.log.truncated(d.lattice, n);
    acc[key_of(w)].add(d.lattice, g);
  }
  for (auto it = acc.begin(); it != acc.end();)
    it = it->second.is_zero() ? acc.erase(it) : std::next(it);
  return acc;
}

}  // namespace detail

// Equivalence: merge walls with identical support germ and direction, discard
// zero generators, compare truncations.
inline bool equivalent(const ScatteringDiagram& d1, const ScatteringDiagram& d2, long n) {
  if (!(d1.lattice.kappa == d2.lattice.kappa && d1.lattice.cone_gen0 == d2.lattice.cone_gen0 &&
        d1.lattice.cone_gen1 == d2.lattice.cone_gen1 && d1.lattice.grading == d2.lattice.grading))
    return false;
  auto m1 = detail::merged_walls(d1, n);
  auto m2 = detail::merged_walls(d2, n);
  if (m1.size() != m2.size()) return false;
  for (const auto& [k, g] : m1) {
    auto it = m2.find(k);
    if (it == m2.end() || !(it->second == g)) return false;
  }
  return true;
}

}  // namespace scatter
