// SPDX-License-Identifier: Apache-2.0
//
// Complex vector/matrix primitives and the small set of numerical kernels
// the beamforming algorithms need. Not a general linear-algebra library:
// sizes here are at most a few hundred, so everything is plain loops over
// contiguous storage.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rislink/errors.hpp"

namespace rislink::numerics {

using cplx = std::complex<double>;

inline constexpr double kUnitNormTol = 1e-12;   // |v|^2 within this of 1
inline constexpr double kPowerIterTol = 1e-10;  // successive-iterate distance
inline constexpr int kPowerIterMaxIters = 1000;

// Dense complex vector with an immutable length. Orientation (row vs
// column) is carried by the operation names, not the type.
class CVector {
 public:
  CVector() = default;
  explicit CVector(std::size_t n) : v_(n) {}
  CVector(std::initializer_list<cplx> init) : v_(init) {}
  explicit CVector(std::vector<cplx> values) : v_(std::move(values)) {}

  static CVector ones(std::size_t n) { return CVector(std::vector<cplx>(n, cplx{1.0, 0.0})); }
  static CVector basis(std::size_t n, std::size_t i) {
    CVector e(n);
    e[i] = 1.0;
    return e;
  }

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  std::span<const cplx> span() const noexcept { return {v_.data(), v_.size()}; }

  double squared_norm() const {
    double s = 0.0;
    for (const cplx& x : v_) s += std::norm(x);
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  bool is_unit(double tol = kUnitNormTol) const {
    return std::abs(squared_norm() - 1.0) <= tol;
  }
  bool all_zero() const {
    for (const cplx& x : v_)
      if (x != cplx{}) return false;
    return true;
  }

 private:
  std::vector<cplx> v_;
};

// Dense row-major complex matrix with immutable dimensions.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }

  std::span<const cplx> row_span(std::size_t r) const {
    return {a_.data() + r * cols_, cols_};
  }
  CVector row(std::size_t r) const {
    return CVector(std::vector<cplx>(a_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                                     a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)));
  }

  bool all_zero() const {
    for (const cplx& x : a_)
      if (x != cplx{}) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

namespace detail {
inline void require_same_size(const CVector& a, const CVector& b,
                              const char* what) {
  if (a.size() != b.size())
    throw DimensionError(std::string(what) + ": " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
}
}  // namespace detail

// Bilinear product sum_i a_i * b_i (row times column, no conjugation).
inline cplx dot(const CVector& a, const CVector& b) {
  detail::require_same_size(a, b, "dot");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline CVector conj(const CVector& a) {
  CVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]);
  return out;
}

inline CVector operator*(cplx s, const CVector& a) {
  CVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

inline CVector operator+(const CVector& a, const CVector& b) {
  detail::require_same_size(a, b, "operator+");
  CVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline CVector operator-(const CVector& a, const CVector& b) {
  detail::require_same_size(a, b, "operator-");
  CVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// A * x (column result).
inline CVector matvec(const CMatrix& A, const CVector& x) {
  if (A.cols() != x.size())
    throw DimensionError("matvec: " + std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()) + " times " +
                         std::to_string(x.size()));
  CVector out(A.rows());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    cplx s{};
    const auto row = A.row_span(r);
    for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return out;
}

// x^T * A (row result).
inline CVector vecmat(const CVector& x, const CMatrix& A) {
  if (x.size() != A.rows())
    throw DimensionError("vecmat: " + std::to_string(x.size()) + " times " +
                         std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()));
  CVector out(A.cols());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    const cplx xr = x[r];
    if (xr == cplx{}) continue;
    const auto row = A.row_span(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += xr * row[c];
  }
  return out;
}

// A^H * y.
inline CVector hermitian_matvec(const CMatrix& A, const CVector& y) {
  if (y.size() != A.rows())
    throw DimensionError("hermitian_matvec: " + std::to_string(y.size()) +
                         " vs " + std::to_string(A.rows()) + " rows");
  CVector out(A.cols());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    const cplx yr = y[r];
    if (yr == cplx{}) continue;
    const auto row = A.row_span(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += std::conj(row[c]) * yr;
  }
  return out;
}

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;  // fmod can land exactly on 2*pi after rounding
  return w;
}

// dB -> linear power ratio.
inline double db_to_linear(double x_db) {
  if (!std::isfinite(x_db)) throw DomainError("db_to_linear: non-finite input");
  return std::pow(10.0, x_db / 10.0);
}

inline double linear_to_db(double x) {
  if (!(x > 0.0)) throw DomainError("linear_to_db: input must be > 0");
  return 10.0 * std::log10(x);
}

// Maximum-ratio transmission: unit column matched to the row channel h,
// w = h^H / |h|. The inner product h*w then equals |h| (real, positive).
inline CVector mrt(const CVector& h) {
  const double n = h.norm();
  if (n == 0.0) throw DegenerateChannelError("mrt: all-zero channel");
  CVector w(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) w[i] = std::conj(h[i]) / n;
  return w;
}

// Power iteration failed to settle; carries the last iterate so callers
// can inspect or reuse it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& message, CVector last_iterate)
      : std::runtime_error(message), last_(std::move(last_iterate)) {}
  const CVector& last_iterate() const noexcept { return last_; }

 private:
  CVector last_;
};

// Dominant right singular direction of a 1xM row map: reduces to MRT,
// the unique unit vector maximizing |g w|.
inline CVector dominant_right_eigvec(const CVector& g_row) { return mrt(g_row); }

// Dominant right singular vector of a general matrix via power iteration
// on g^H g. Stops when successive unit iterates differ by less than tol.
inline CVector dominant_right_eigvec(const CMatrix& g,
                                     int max_iters = kPowerIterMaxIters,
                                     double tol = kPowerIterTol) {
  if (g.all_zero())
    throw DegenerateChannelError("dominant_right_eigvec: zero matrix");
  const std::size_t k = g.cols();

  auto strongest_column = [&]() {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < g.rows(); ++r) s += std::norm(g(r, c));
      if (s > best_norm) {
        best_norm = s;
        best = c;
      }
    }
    return CVector::basis(k, best);
  };

  CVector v = (1.0 / std::sqrt(static_cast<double>(k))) * CVector::ones(k);
  for (int it = 0; it < max_iters; ++it) {
    CVector w = hermitian_matvec(g, matvec(g, v));
    const double wn = w.norm();
    if (wn == 0.0) {
      // started in the null space; restart from the strongest column
      v = strongest_column();
      continue;
    }
    w = (1.0 / wn) * w;
    const double diff = (w - v).norm();
    v = std::move(w);
    if (diff < tol) return v;
  }
  throw ConvergenceError("dominant_right_eigvec: no convergence after " +
                             std::to_string(max_iters) + " iterations",
                         v);
}

}  // namespace rislink::numerics
