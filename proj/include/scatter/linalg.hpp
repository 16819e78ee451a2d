#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "scatter/rational.hpp"

namespace scatter {

// Dense matrix over an exact field, row-major.
template <class T>
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}

  T& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = T(1);
    return m;
  }

  bool is_zero() const {
    for (const auto& x : a)
      if (!(x == T(0))) return false;
    return true;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::logic_error("matrix shape mismatch");
    Mat r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        const T& v = x.at(i, k);
        if (v == T(0)) continue;
        for (std::size_t j = 0; j < y.cols; ++j) {
          const T& w = y.at(k, j);
          if (w == T(0)) continue;
          r.at(i, j) += v * w;
        }
      }
    return r;
  }

  friend Mat operator+(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::logic_error("matrix shape mismatch");
    Mat r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
  }

  friend Mat operator-(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::logic_error("matrix shape mismatch");
    Mat r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
  }

  Mat scaled(const T& s) const {
    Mat r = *this;
    for (auto& x : r.a) x *= s;
    return r;
  }
};

using QMat = Mat<Q>;

// exp(M) for nilpotent M; the series terminates within dim steps.
template <class T>
Mat<T> nilpotent_exp(const Mat<T>& m) {
  Mat<T> acc = Mat<T>::identity(m.rows);
  Mat<T> pow = Mat<T>::identity(m.rows);
  T fact(1);
  for (std::size_t j = 1; j <= m.rows + 1; ++j) {
    pow = pow * m;
    if (pow.is_zero()) break;
    fact *= T(static_cast<long>(j));
    acc = acc + pow.scaled(T(1) / fact);
  }
  return acc;
}

// log(U) for unipotent U = I + X with X nilpotent.
template <class T>
Mat<T> nilpotent_log(const Mat<T>& u) {
  Mat<T> x = u - Mat<T>::identity(u.rows);
  Mat<T> acc(u.rows, u.rows);
  Mat<T> pow = Mat<T>::identity(u.rows);
  for (std::size_t j = 1; j <= u.rows + 1; ++j) {
    pow = pow * x;
    if (pow.is_zero()) break;
    T c = T(j % 2 == 1 ? 1 : -1) / T(static_cast<long>(j));
    acc = acc + pow.scaled(c);
  }
  return acc;
}

// Row-echelon rank over Q.
inline std::size_t rank_of(QMat m) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t piv = rank;
    while (piv < m.rows && m.at(piv, col) == 0) ++piv;
    if (piv == m.rows) continue;
    for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(rank, j), m.at(piv, j));
    Q inv = Q(1) / m.at(rank, col);
    for (std::size_t j = col; j < m.cols; ++j) m.at(rank, j) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == rank || m.at(i, col) == 0) continue;
      Q f = m.at(i, col);
      for (std::size_t j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(rank, j);
    }
    ++rank;
  }
  return rank;
}

inline Q det_of(QMat m) {
  if (m.rows != m.cols) throw std::logic_error("determinant of non-square matrix");
  Q det(1);
  for (std::size_t col = 0; col < m.cols; ++col) {
    std::size_t piv = col;
    while (piv < m.rows && m.at(piv, col) == 0) ++piv;
    if (piv == m.rows) return Q(0);
    if (piv != col) {
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(col, j), m.at(piv, j));
      det = -det;
    }
    det *= m.at(col, col);
    Q inv = Q(1) / m.at(col, col);
    for (std::size_t i = col + 1; i < m.rows; ++i) {
      if (m.at(i, col) == 0) continue;
      Q f = m.at(i, col) * inv;
      for (std::size_t j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(col, j);
    }
  }
  return det;
}

// Solves A x = b where A is square over Q and the right-hand side lives in a
// Q-module R (R = Q, or a polynomial ring for right-hand sides depending on
// symbolic parameters). Returns nullopt when A is singular.
template <class R>
std::optional<std::vector<R>> solve_unique(QMat a, std::vector<R> b) {
  if (a.rows != a.cols || a.rows != b.size()) throw std::logic_error("solve shape mismatch");
  const std::size_t n = a.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a.at(piv, col) == 0) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(col, j), a.at(piv, j));
      std::swap(b[col], b[piv]);
    }
    Q inv = Q(1) / a.at(col, col);
    for (std::size_t j = col; j < n; ++j) a.at(col, j) *= inv;
    b[col] = inv * b[col];
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a.at(i, col) == 0) continue;
      Q f = a.at(i, col);
      for (std::size_t j = col; j < n; ++j) a.at(i, j) -= f * a.at(col, j);
      b[i] = b[i] - f * b[col];
    }
  }
  return b;
}

// General rectangular solve over Q; reports consistency and one particular
// solution (free variables set to zero).
struct AffineSolve {
  bool consistent = false;
  std::size_t rank = 0;
  std::vector<Q> particular;
};

inline AffineSolve solve_affine(QMat a, std::vector<Q> b) {
  const std::size_t n = a.cols;
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < a.rows; ++col) {
    std::size_t piv = row;
    while (piv < a.rows && a.at(piv, col) == 0) ++piv;
    if (piv == a.rows) continue;
    if (piv != row) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(row, j), a.at(piv, j));
      std::swap(b[row], b[piv]);
    }
    Q inv = Q(1) / a.at(row, col);
    for (std::size_t j = col; j < n; ++j) a.at(row, j) *= inv;
    b[row] *= inv;
    for (std::size_t i = 0; i < a.rows; ++i) {
      if (i == row || a.at(i, col) == 0) continue;
      Q f = a.at(i, col);
      for (std::size_t j = col; j < n; ++j) a.at(i, j) -= f * a.at(row, j);
      b[i] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  AffineSolve out;
  out.rank = row;
  for (std::size_t i = row; i < a.rows; ++i)
    if (!(b[i] == 0)) return out;
  out.consistent = true;
  out.particular.assign(n, Q(0));
  for (std::size_t i = 0; i < pivot_col.size(); ++i) out.particular[pivot_col[i]] = b[i];
  return out;
}

}  // namespace scatter
