#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace scatter {

using Z = boost::multiprecision::cpp_int;
using Q = boost::multiprecision::cpp_rational;

// Lattice vectors and covectors. Degrees stay tiny (bounded by the truncation
// order), so 64-bit components are ample.
using Vec2 = std::array<std::int64_t, 2>;

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(std::int64_t t, Vec2 v) { return {t * v[0], t * v[1]}; }
inline Vec2 operator-(Vec2 v) { return {-v[0], -v[1]}; }

inline std::int64_t cross(Vec2 a, Vec2 b) { return a[0] * b[1] - a[1] * b[0]; }
inline std::int64_t dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

inline bool is_zero(Vec2 v) { return v[0] == 0 && v[1] == 0; }

// v / gcd(components), keeping orientation. Rejects the zero vector.
inline Vec2 primitive(Vec2 v) {
  if (is_zero(v)) throw std::invalid_argument("primitive: zero vector");
  std::int64_t g = std::gcd(std::abs(v[0]), std::abs(v[1]));
  return {v[0] / g, v[1] / g};
}

// True if b is a positive rational multiple of a (both nonzero).
inline bool positive_multiple(Vec2 a, Vec2 b) {
  return cross(a, b) == 0 && dot(a, b) > 0;
}

// Rational points of M_R.
using QVec2 = std::array<Q, 2>;

inline QVec2 operator+(const QVec2& a, const QVec2& b) {
  return {a[0] + b[0], a[1] + b[1]};
}
inline QVec2 operator-(const QVec2& a, const QVec2& b) {
  return {a[0] - b[0], a[1] - b[1]};
}
inline QVec2 operator*(const Q& t, const QVec2& v) { return {t * v[0], t * v[1]}; }
inline QVec2 to_qvec(Vec2 v) { return {Q(v[0]), Q(v[1])}; }

inline Q qdot(const QVec2& a, const QVec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Q qdot(Vec2 a, const QVec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Q qcross(const QVec2& a, const QVec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Serialized form: "p" when the value is integral, otherwise "p/q" reduced
// with q > 0. parse_q accepts both spellings.
inline std::string format_q(const Q& v) {
  const Z num = numerator(v);
  const Z den = denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Q parse_q(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_q: empty string");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Q(Z(s));
    Z num(s.substr(0, slash));
    Z den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Q(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_q: bad rational '" + s + "'");
  }
}

inline int sign_of(const Q& v) {
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

}  // namespace scatter
