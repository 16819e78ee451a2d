#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <scatter/completion_oracle.hpp>
#include <scatter/theta.hpp>

// Configuration parsing, JSON serialization, the standalone residue
// calculator's text formats, SVG rendering, and the command driver. All
// numeric output is exact: rationals serialize as "p/q" strings and surd
// scalars as {"q": "p/q", "d": n}; nothing is ever printed as a float.

namespace scatter::cli {

using Json = nlohmann::ordered_json;

inline std::string q_str(const Q& v) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(v) << "/" << boost::multiprecision::denominator(v);
  return os.str();
}

inline Q parse_q(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  std::size_t slash = s.find('/');
  try {
    if (slash == std::string::npos) return Q(boost::multiprecision::cpp_int(s));
    boost::multiprecision::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Q(num) / Q(den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational '" + s + "'");
  }
}

inline Json surd_json(const SurdScalar& s) { return Json{{"q", q_str(s.q)}, {"d", s.d}}; }

// ---------------------------------------------------------------------------
// Configuration: a flat key-value file, one `key = value` per line, comments
// from '#' to end of line. Keys: kappa, order (both required), seed, grading,
// cone, viewport, scale, and one `wall = ...` line per initial wall:
//   wall = <kind> <base_x> <base_y> dir <m1> <m2> cov <n1> <n2> gen dilog
//   wall = ... gen list <d1> <d2> <p/q> [<d1> <d2> <p/q> ...]
// with kind `line` or `ray`, rational base coordinates, integer direction and
// covector, and generator either the dilogarithm series for the direction or
// an explicit list of degree/coefficient terms.

struct RenderOptions {
  Q min_x = -6, min_y = -6, max_x = 6, max_y = 6;
  Q scale = 40;
};

struct Config {
  ScatteringDiagram diagram;
  unsigned seed = 1;
  RenderOptions render;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& name, std::size_t line, const std::string& msg) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + msg);
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> tokens_of(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

inline long parse_long(const std::string& name, std::size_t line, const std::string& tok) {
  try {
    std::size_t used = 0;
    long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(name, line, "expected an integer, got '" + tok + "'");
  }
}

inline Q parse_q_at(const std::string& name, std::size_t line, const std::string& tok) {
  try {
    return parse_q(tok);
  } catch (const std::invalid_argument& e) {
    fail(name, line, e.what());
  }
}

struct RawWall {
  std::size_t line = 0;
  std::string value;
};

inline Wall parse_wall(const std::string& name, const RawWall& raw, const Lattice& lat,
                       long order) {
  std::vector<std::string> t = tokens_of(raw.value);
  std::size_t ln = raw.line;
  auto need = [&](std::size_t i, const std::string& what) -> const std::string& {
    if (i >= t.size()) fail(name, ln, "wall is missing its " + what);
    return t[i];
  };
  WallKind kind;
  if (need(0, "kind") == "line")
    kind = WallKind::line;
  else if (t[0] == "ray")
    kind = WallKind::ray;
  else
    fail(name, ln, "wall kind must be 'line' or 'ray', got '" + t[0] + "'");
  QVec2 base{parse_q_at(name, ln, need(1, "base point")), parse_q_at(name, ln, need(2, "base point"))};
  if (need(3, "'dir' marker") != "dir") fail(name, ln, "expected 'dir', got '" + t[3] + "'");
  Vec2 m{parse_long(name, ln, need(4, "direction")), parse_long(name, ln, need(5, "direction"))};
  if (is_zero(m)) fail(name, ln, "wall direction must be nonzero");
  if (primitive(m) != m)
    fail(name, ln,
         "wall direction (" + std::to_string(m[0]) + "," + std::to_string(m[1]) +
             ") is not primitive");
  if (!lat.in_cone(m)) fail(name, ln, "wall direction is outside the support cone");
  if (need(6, "'cov' marker") != "cov") fail(name, ln, "expected 'cov', got '" + t[6] + "'");
  Vec2 n{parse_long(name, ln, need(7, "covector")), parse_long(name, ln, need(8, "covector"))};
  if (m[0] * n[0] + m[1] * n[1] != 0)
    fail(name, ln, "wall covector does not annihilate the direction");
  if (is_zero(n)) fail(name, ln, "wall covector must be nonzero");
  if (need(9, "'gen' marker") != "gen") fail(name, ln, "expected 'gen', got '" + t[9] + "'");

  GradedSeries g;
  const std::string& spec = need(10, "generator");
  if (spec == "dilog") {
    if (t.size() != 11) fail(name, ln, "'gen dilog' takes no further tokens");
    g = dilog_generator(lat, m, order);
  } else if (spec == "list") {
    if (t.size() == 11) fail(name, ln, "'gen list' needs at least one degree/coefficient term");
    if ((t.size() - 11) % 3 != 0)
      fail(name, ln, "'gen list' takes degree/coefficient triples <d1> <d2> <p/q>");
    for (std::size_t i = 11; i < t.size(); i += 3) {
      Vec2 deg{parse_long(name, ln, t[i]), parse_long(name, ln, t[i + 1])};
      if (!positive_multiple(deg, m))
        fail(name, ln,
             "generator degree (" + std::to_string(deg[0]) + "," + std::to_string(deg[1]) +
                 ") is not a positive multiple of the wall direction");
      Q c = parse_q_at(name, ln, t[i + 2]);
      if (c == 0) fail(name, ln, "generator coefficient must be nonzero");
      g.add_term(lat, deg, c);
    }
  } else {
    fail(name, ln, "generator must be 'dilog' or 'list', got '" + spec + "'");
  }
  return Wall(kind, base, m, n, std::move(g));
}

}  // namespace detail

inline Config parse_config(std::istream& in, const std::string& name) {
  std::map<std::string, std::pair<std::size_t, std::string>> scalar;
  std::vector<detail::RawWall> raw_walls;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) detail::fail(name, ln, "expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) detail::fail(name, ln, "empty key");
    if (key == "wall") {
      raw_walls.push_back({ln, value});
      continue;
    }
    if (scalar.count(key)) detail::fail(name, ln, "duplicate key: " + key);
    scalar[key] = {ln, value};
  }

  auto take = [&](const std::string& key) -> std::optional<std::pair<std::size_t, std::string>> {
    auto it = scalar.find(key);
    if (it == scalar.end()) return std::nullopt;
    auto v = it->second;
    scalar.erase(it);
    return v;
  };
  auto required = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw std::invalid_argument(name + ": missing required key: " + key);
    return *v;
  };

  Config cfg;
  Lattice lat;
  {
    auto [l, v] = required("kappa");
    lat.kappa = detail::parse_long(name, l, v);
    if (lat.kappa == 0) detail::fail(name, l, "kappa must be nonzero");
  }
  long order = 0;
  {
    auto [l, v] = required("order");
    order = detail::parse_long(name, l, v);
    if (order < 0) detail::fail(name, l, "order must be nonnegative");
  }
  if (auto s = take("seed")) {
    long v = detail::parse_long(name, s->first, s->second);
    if (v < 0) detail::fail(name, s->first, "seed must be nonnegative");
    cfg.seed = static_cast<unsigned>(v);
  }
  if (auto s = take("cone")) {
    std::vector<std::string> t = detail::tokens_of(s->second);
    if (t.size() != 4) detail::fail(name, s->first, "cone takes four integers");
    lat.cone_gen0 = {detail::parse_long(name, s->first, t[0]),
                     detail::parse_long(name, s->first, t[1])};
    lat.cone_gen1 = {detail::parse_long(name, s->first, t[2]),
                     detail::parse_long(name, s->first, t[3])};
    if (cross(lat.cone_gen0, lat.cone_gen1) == 0)
      detail::fail(name, s->first, "cone generators must be independent");
  }
  if (auto s = take("grading")) {
    std::vector<std::string> t = detail::tokens_of(s->second);
    if (t.size() != 2) detail::fail(name, s->first, "grading takes two integers");
    lat.grading = {detail::parse_long(name, s->first, t[0]),
                   detail::parse_long(name, s->first, t[1])};
  }
  if (lat.grade(lat.cone_gen0) <= 0 || lat.grade(lat.cone_gen1) <= 0)
    throw std::invalid_argument(name + ": grading must be positive on the cone generators");
  if (auto s = take("viewport")) {
    std::vector<std::string> t = detail::tokens_of(s->second);
    if (t.size() != 4) detail::fail(name, s->first, "viewport takes four rationals");
    cfg.render.min_x = detail::parse_q_at(name, s->first, t[0]);
    cfg.render.min_y = detail::parse_q_at(name, s->first, t[1]);
    cfg.render.max_x = detail::parse_q_at(name, s->first, t[2]);
    cfg.render.max_y = detail::parse_q_at(name, s->first, t[3]);
    if (!(cfg.render.min_x < cfg.render.max_x && cfg.render.min_y < cfg.render.max_y))
      detail::fail(name, s->first, "viewport corners must be increasing");
  }
  if (auto s = take("scale")) {
    cfg.render.scale = detail::parse_q_at(name, s->first, s->second);
    if (cfg.render.scale <= 0) detail::fail(name, s->first, "scale must be positive");
  }
  if (!scalar.empty())
    detail::fail(name, scalar.begin()->second.first, "unknown key: " + scalar.begin()->first);

  cfg.diagram.lattice = lat;
  cfg.diagram.order = order;
  for (const auto& raw : raw_walls)
    cfg.diagram.walls.push_back(detail::parse_wall(name, raw, lat, order));
  return cfg;
}

inline Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in, path);
}

// ---------------------------------------------------------------------------
// Diagram JSON. Serialization order is storage order, so output is
// byte-identical across runs for the same inputs.

inline Json series_json(const GradedSeries& g) {
  Json terms = Json::array();
  for (const auto& [m, c] : g.coeff)
    terms.push_back(Json{{"degree", Json::array({m[0], m[1]})}, {"coefficient", q_str(c)}});
  return terms;
}

inline Json diagram_json(const ScatteringDiagram& d) {
  Json walls = Json::array();
  for (const Wall& w : d.walls) {
    walls.push_back(Json{{"kind", w.kind == WallKind::line ? "line" : "ray"},
                         {"base", Json::array({q_str(w.base[0]), q_str(w.base[1])})},
                         {"direction", Json::array({w.direction()[0], w.direction()[1]})},
                         {"covector", Json::array({w.covector()[0], w.covector()[1]})},
                         {"generator", series_json(w.crossing.log)}});
  }
  return Json{{"kappa", d.lattice.kappa},
              {"cone", Json::array({Json::array({d.lattice.cone_gen0[0], d.lattice.cone_gen0[1]}),
                                    Json::array({d.lattice.cone_gen1[0], d.lattice.cone_gen1[1]})})},
              {"grading", Json::array({d.lattice.grading[0], d.lattice.grading[1]})},
              {"order", d.order},
              {"walls", walls}};
}

inline ScatteringDiagram diagram_from_json(const Json& j) {
  ScatteringDiagram d;
  d.lattice.kappa = j.at("kappa").get<long>();
  d.lattice.cone_gen0 = {j.at("cone")[0][0].get<long>(), j.at("cone")[0][1].get<long>()};
  d.lattice.cone_gen1 = {j.at("cone")[1][0].get<long>(), j.at("cone")[1][1].get<long>()};
  d.lattice.grading = {j.at("grading")[0].get<long>(), j.at("grading")[1].get<long>()};
  d.order = j.at("order").get<long>();
  for (const Json& wj : j.at("walls")) {
    GradedSeries g;
    for (const Json& t : wj.at("generator"))
      g.add_term(d.lattice,
                 Vec2{t.at("degree")[0].get<long>(), t.at("degree")[1].get<long>()},
                 parse_q(t.at("coefficient").get<std::string>()));
    d.walls.emplace_back(wj.at("kind").get<std::string>() == "line" ? WallKind::line
                                                                    : WallKind::ray,
                         QVec2{parse_q(wj.at("base")[0].get<std::string>()),
                               parse_q(wj.at("base")[1].get<std::string>())},
                         Vec2{wj.at("direction")[0].get<long>(), wj.at("direction")[1].get<long>()},
                         Vec2{wj.at("covector")[0].get<long>(), wj.at("covector")[1].get<long>()},
                         std::move(g));
  }
  return d;
}

inline Json theta_json(const ThetaSeries& s) {
  Json terms = Json::array();
  for (const auto& [m, c] : s)
    terms.push_back(Json{{"degree", Json::array({m[0], m[1]})}, {"coefficient", q_str(c)}});
  return terms;
}

// ---------------------------------------------------------------------------
// Standalone residue calculator file formats.
//
// Arrangement file: one affine functional per line,
//   <a_1> <a_2> ... <a_d> | <c>
// meaning a_1 s_1 + ... + a_d s_d + c, all entries rational. Every line must
// have the same arity d.
//
// Function file: lines of the forms
//   numerator <p/q>            (optional, default 1)
//   prefactor <p/q> <d>        (optional surd multiplier, default 1, d = 1)
//   denominator <i> <j> ...    (required: indices into the arrangement file)
//   chamber <v_1> ... <v_d>    (optional, repeatable: chamber generators;
//                               default is the span of the denominators)

inline Arrangement parse_arrangement(std::istream& in, const std::string& name) {
  Arrangement out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::size_t bar = line.find('|');
    if (bar == std::string::npos) detail::fail(name, ln, "expected '<coeffs> | <constant>'");
    AffineFunctional f;
    for (const std::string& t : detail::tokens_of(line.substr(0, bar)))
      f.lin.push_back(detail::parse_q_at(name, ln, t));
    std::vector<std::string> rhs = detail::tokens_of(line.substr(bar + 1));
    if (rhs.size() != 1) detail::fail(name, ln, "expected exactly one constant after '|'");
    f.cst = detail::parse_q_at(name, ln, rhs[0]);
    if (f.lin.empty()) detail::fail(name, ln, "functional needs at least one coefficient");
    if (!out.empty() && out.front().lin.size() != f.lin.size())
      detail::fail(name, ln, "inconsistent arity across the arrangement");
    out.push_back(std::move(f));
  }
  if (out.empty()) throw std::invalid_argument(name + ": empty arrangement");
  return out;
}

struct ResidueProblem {
  RationalSection section;
  std::vector<std::vector<Q>> chamber;  // empty: use the denominator span
};

inline ResidueProblem parse_function(std::istream& in, const std::string& name,
                                     const Arrangement& arrangement) {
  ResidueProblem out;
  const std::size_t arity = arrangement.front().lin.size();
  Q numerator(1);
  out.section.prefactor = SurdScalar{Q(1), 1};
  bool have_denominator = false;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::vector<std::string> t = detail::tokens_of(line);
    if (t[0] == "numerator") {
      if (t.size() != 2) detail::fail(name, ln, "numerator takes one rational");
      numerator = detail::parse_q_at(name, ln, t[1]);
    } else if (t[0] == "prefactor") {
      if (t.size() != 3) detail::fail(name, ln, "prefactor takes '<p/q> <d>'");
      long d = detail::parse_long(name, ln, t[2]);
      if (d < 1) detail::fail(name, ln, "radicand must be positive");
      out.section.prefactor = SurdScalar{detail::parse_q_at(name, ln, t[1]), d};
    } else if (t[0] == "denominator") {
      if (have_denominator) detail::fail(name, ln, "duplicate denominator line");
      have_denominator = true;
      for (std::size_t i = 1; i < t.size(); ++i) {
        long idx = detail::parse_long(name, ln, t[i]);
        if (idx < 0 || static_cast<std::size_t>(idx) >= arrangement.size())
          detail::fail(name, ln, "denominator index out of range: " + t[i]);
        out.section.denominator.push_back(arrangement[idx]);
      }
      if (out.section.denominator.empty())
        detail::fail(name, ln, "denominator needs at least one index");
    } else if (t[0] == "chamber") {
      if (t.size() != arity + 1)
        detail::fail(name, ln, "chamber generator needs " + std::to_string(arity) + " entries");
      std::vector<Q> v;
      for (std::size_t i = 1; i < t.size(); ++i) v.push_back(detail::parse_q_at(name, ln, t[i]));
      out.chamber.push_back(std::move(v));
    } else {
      detail::fail(name, ln, "unknown directive: " + t[0]);
    }
  }
  if (!have_denominator) throw std::invalid_argument(name + ": missing denominator line");
  out.section.numerator = Poly::constant(static_cast<int>(arity), numerator);
  return out;
}

// ---------------------------------------------------------------------------
// SVG rendering: walls drawn as segments clipped to the viewport, each with a
// label carrying the direction and the leading generator term. Coordinates
// are computed exactly and printed with three decimals.

namespace detail {

inline std::string svg_num(const Q& v) {
  using boost::multiprecision::cpp_int;
  Q milli = v * Q(1000);
  cpp_int scaled = boost::multiprecision::numerator(milli) /
                   boost::multiprecision::denominator(milli);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  cpp_int whole = scaled / 1000, frac = scaled % 1000;
  std::ostringstream os;
  if (neg) os << '-';
  os << whole << '.';
  std::string f = frac.str();
  os << std::string(3 - f.size(), '0') << f;
  return os.str();
}

// Clip {base + t*dir} to the viewport box; returns the t-interval, empty when
// the support misses the box. Rays restrict to t >= 0.
inline std::optional<std::pair<Q, Q>> clip_wall(const Wall& w, const RenderOptions& r) {
  QVec2 base = w.base;
  Vec2 dir = w.direction();
  std::optional<Q> lo, hi;
  if (w.kind == WallKind::ray) lo = Q(0);
  for (int axis = 0; axis < 2; ++axis) {
    Q bmin = axis == 0 ? r.min_x : r.min_y, bmax = axis == 0 ? r.max_x : r.max_y;
    if (dir[axis] == 0) {
      if (base[axis] < bmin || base[axis] > bmax) return std::nullopt;
      continue;
    }
    Q t0 = (bmin - base[axis]) / dir[axis], t1 = (bmax - base[axis]) / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    if (!lo || *lo < t0) lo = t0;
    if (!hi || t1 < *hi) hi = t1;
  }
  if (!lo || !hi || *hi < *lo) return std::nullopt;
  return std::make_pair(*lo, *hi);
}

inline std::string leading_term(const Lattice& lat, const GradedSeries& g) {
  if (g.coeff.empty()) return "0";
  auto best = g.coeff.begin();
  for (auto it = g.coeff.begin(); it != g.coeff.end(); ++it)
    if (lat.grade(it->first) < lat.grade(best->first)) best = it;
  std::ostringstream os;
  os << q_str(best->second) << " x^(" << best->first[0] << "," << best->first[1] << ")";
  return os.str();
}

}  // namespace detail

inline std::string render_svg(const ScatteringDiagram& d, const RenderOptions& r) {
  Q width = (r.max_x - r.min_x) * r.scale, height = (r.max_y - r.min_y) * r.scale;
  auto px = [&](const QVec2& p) {
    return QVec2{(p[0] - r.min_x) * r.scale, (r.max_y - p[1]) * r.scale};
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(width)
     << "\" height=\"" << detail::svg_num(height) << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Wall& w : d.walls) {
    auto span = detail::clip_wall(w, r);
    if (!span) continue;
    Vec2 dir = w.direction();
    QVec2 a = px(QVec2{w.base[0] + span->first * dir[0], w.base[1] + span->first * dir[1]});
    QVec2 b = px(QVec2{w.base[0] + span->second * dir[0], w.base[1] + span->second * dir[1]});
    os << "  <line x1=\"" << detail::svg_num(a[0]) << "\" y1=\"" << detail::svg_num(a[1])
       << "\" x2=\"" << detail::svg_num(b[0]) << "\" y2=\"" << detail::svg_num(b[1])
       << "\" stroke=\"#334\" stroke-width=\"1.5\"/>\n";
    Q tl = span->first + (span->second - span->first) * Q(17, 20);
    QVec2 lp = px(QVec2{w.base[0] + tl * dir[0], w.base[1] + tl * dir[1]});
    os << "  <text x=\"" << detail::svg_num(lp[0] + 4) << "\" y=\"" << detail::svg_num(lp[1] - 4)
       << "\" font-size=\"11\" font-family=\"monospace\">(" << dir[0] << "," << dir[1] << ") "
       << detail::leading_term(d.lattice, w.crossing.log) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Command driver. Returns the process exit status; all results go to `out` as
// a single JSON document. Failures print {"error": ...} and return 1;
// `complete --method both`, `theta --method both`, and `check` return 1 when
// their equivalence or consistency verdict is negative.

namespace detail {

struct Flags {
  std::map<std::string, std::string> value;
  const std::string& require(const std::string& key) const {
    auto it = value.find(key);
    if (it == value.end()) throw std::invalid_argument("missing required flag --" + key);
    return it->second;
  }
  std::optional<std::string> get(const std::string& key) const {
    auto it = value.find(key);
    if (it == value.end()) return std::nullopt;
    return it->second;
  }
};

inline Flags parse_flags(const std::vector<std::string>& args, std::size_t from) {
  Flags f;
  for (std::size_t i = from; i < args.size(); i += 2) {
    if (args[i].rfind("--", 0) != 0) throw std::invalid_argument("expected a flag, got " + args[i]);
    if (i + 1 >= args.size()) throw std::invalid_argument("flag " + args[i] + " needs a value");
    std::string key = args[i].substr(2);
    if (f.value.count(key)) throw std::invalid_argument("duplicate flag --" + key);
    f.value[key] = args[i + 1];
  }
  return f;
}

inline std::pair<Q, Q> parse_pair_q(const std::string& s) {
  std::size_t comma = s.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("expected 'x,y' coordinates, got '" + s + "'");
  return {parse_q(s.substr(0, comma)), parse_q(s.substr(comma + 1))};
}

inline Vec2 parse_pair_long(const std::string& s) {
  std::size_t comma = s.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("expected 'a,b' integers, got '" + s + "'");
  std::string a = s.substr(0, comma), b = s.substr(comma + 1);
  try {
    std::size_t ua = 0, ub = 0;
    Vec2 v{std::stol(a, &ua), std::stol(b, &ub)};
    if (ua != a.size() || ub != b.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("expected 'a,b' integers, got '" + s + "'");
  }
}

inline Config load_config(const Flags& f) {
  Config cfg = parse_config_file(f.require("config"));
  if (auto s = f.get("order")) {
    long v = std::stol(*s);
    if (v < 0) throw std::invalid_argument("order must be nonnegative");
    cfg.diagram.order = v;
    for (Wall& w : cfg.diagram.walls)
      w.crossing.log = w.crossing.log.truncated(cfg.diagram.lattice, v);
  }
  if (auto s = f.get("seed")) cfg.seed = static_cast<unsigned>(std::stoul(*s));
  return cfg;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out) {
  auto emit = [&](const Json& j) { out << j.dump(2) << "\n"; };
  try {
    if (args.empty())
      throw std::invalid_argument(
          "usage: scatter-cli <complete|theta|jk-residue|check|render> [flags]");
    const std::string& cmd = args[0];
    detail::Flags flags = detail::parse_flags(args, 1);

    if (cmd == "complete") {
      Config cfg = detail::load_config(flags);
      std::string method = flags.get("method").value_or("both");
      Json j{{"command", "complete"}, {"method", method}, {"order", cfg.diagram.order}};
      if (method == "inductive") {
        j["diagram"] = diagram_json(complete_inductive(cfg.diagram, cfg.diagram.order));
      } else if (method == "jk") {
        j["seed"] = cfg.seed;
        j["diagram"] = diagram_json(complete_jk(cfg.diagram, cfg.diagram.order, cfg.seed));
      } else if (method == "both") {
        j["seed"] = cfg.seed;
        ScatteringDiagram a = complete_inductive(cfg.diagram, cfg.diagram.order);
        ScatteringDiagram b = complete_jk(cfg.diagram, cfg.diagram.order, cfg.seed);
        bool eq = equivalent(a, b, cfg.diagram.order);
        j["equivalence"] = eq ? "equal" : "unequal";
        if (eq) {
          j["diagram"] = diagram_json(b);
        } else {
          j["inductive"] = diagram_json(a);
          j["jk"] = diagram_json(b);
        }
        emit(j);
        return eq ? 0 : 1;
      } else {
        throw std::invalid_argument("complete --method must be inductive, jk, or both");
      }
      emit(j);
      return 0;
    }

    if (cmd == "theta") {
      Config cfg = detail::load_config(flags);
      auto [qx, qy] = detail::parse_pair_q(flags.require("Q"));
      QVec2 endpoint{qx, qy};
      Vec2 m = detail::parse_pair_long(flags.require("m"));
      std::string method = flags.get("method").value_or("both");
      Json j{{"command", "theta"},
             {"Q", Json::array({q_str(endpoint[0]), q_str(endpoint[1])})},
             {"m", Json::array({m[0], m[1]})},
             {"order", cfg.diagram.order},
             {"method", method}};
      long n = cfg.diagram.order;
      if (method == "broken") {
        j["series"] = theta_json(theta_broken(complete_inductive(cfg.diagram, n), endpoint, m, n));
      } else if (method == "jk") {
        j["seed"] = cfg.seed;
        j["series"] = theta_json(theta_jk(cfg.diagram, endpoint, m, n, cfg.seed));
      } else if (method == "both") {
        j["seed"] = cfg.seed;
        ThetaSeries broken = theta_broken(complete_inductive(cfg.diagram, n), endpoint, m, n);
        ThetaSeries jk = theta_jk(cfg.diagram, endpoint, m, n, cfg.seed);
        bool eq = broken == jk;
        j["equivalence"] = eq ? "equal" : "unequal";
        if (eq) {
          j["series"] = theta_json(jk);
        } else {
          j["broken"] = theta_json(broken);
          j["jk"] = theta_json(jk);
        }
        emit(j);
        return eq ? 0 : 1;
      } else {
        throw std::invalid_argument("theta --method must be broken, jk, or both");
      }
      emit(j);
      return 0;
    }

    if (cmd == "jk-residue") {
      std::ifstream arr_in(flags.require("arrangement"));
      if (!arr_in)
        throw std::invalid_argument("cannot open arrangement file: " + flags.require("arrangement"));
      Arrangement arrangement = parse_arrangement(arr_in, flags.require("arrangement"));
      std::ifstream fun_in(flags.require("function"));
      if (!fun_in)
        throw std::invalid_argument("cannot open function file: " + flags.require("function"));
      ResidueProblem p = parse_function(fun_in, flags.require("function"), arrangement);
      std::vector<std::vector<Q>> chamber =
          p.chamber.empty() ? positive_span_chamber(p.section.denominator) : p.chamber;
      SurdScalar value = jk_global(p.section, chamber);
      emit(Json{{"command", "jk-residue"}, {"value", surd_json(value)}});
      return 0;
    }

    if (cmd == "check") {
      Config cfg = detail::load_config(flags);
      GradedSeries defect = consistency_defect(cfg.diagram, cfg.diagram.order);
      bool consistent = defect.is_zero();
      emit(Json{{"command", "check"},
                {"order", cfg.diagram.order},
                {"consistent", consistent},
                {"defect", series_json(defect)}});
      return consistent ? 0 : 1;
    }

    if (cmd == "render") {
      Config cfg = detail::load_config(flags);
      const std::string& path = flags.require("out");
      ScatteringDiagram completed = complete_inductive(cfg.diagram, cfg.diagram.order);
      std::ofstream svg(path);
      if (!svg) throw std::invalid_argument("cannot open output file: " + path);
      svg << render_svg(completed, cfg.render);
      emit(Json{{"command", "render"},
                {"out", path},
                {"walls", completed.walls.size()}});
      return 0;
    }

    throw std::invalid_argument("unknown command: " + cmd);
  } catch (const std::exception& e) {
    emit(Json{{"error", e.what()}});
    return 1;
  }
}

}  // namespace scatter::cli
