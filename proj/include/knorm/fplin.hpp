#pragma once

// Exact linear algebra over a prime field F_p, p < 2^16.
//
// Subspaces are always held as the rows of their reduced row-echelon basis,
// so two Subspace values describing the same space compare equal.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "knorm/errors.hpp"

namespace knorm::fplin {

using Residue = std::uint32_t;
using Vec = std::vector<Residue>;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline Residue pow_mod(Residue b, std::uint64_t e, Residue p) {
  std::uint64_t r = 1 % p, x = b % p;
  while (e) {
    if (e & 1) r = r * x % p;
    x = x * x % p;
    e >>= 1;
  }
  return static_cast<Residue>(r);
}

inline Residue inv_mod(Residue a, Residue p) {
  if (a % p == 0) throw InternalError("inverse of zero residue");
  return pow_mod(a, p - 2, p);
}

inline void check_modulus(Residue p) {
  if (p >= (1u << 16) || !is_prime(p))
    throw InputError("modulus must be a prime below 2^16, got " + std::to_string(p));
}

inline bool is_zero(const Vec& v) {
  for (auto x : v)
    if (x) return false;
  return true;
}

class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(Residue p, std::size_t rows, std::size_t cols)
      : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {
    check_modulus(p);
  }

  static FpMatrix identity(Residue p, std::size_t n) {
    FpMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  /// Matrix whose j-th column is cols[j] (each of length `rows`).
  static FpMatrix from_columns(Residue p, std::size_t rows, const std::vector<Vec>& cols) {
    FpMatrix m(p, rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw InternalError("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m.set(i, j, cols[j][i]);
    }
    return m;
  }

  static FpMatrix from_rows(Residue p, std::size_t cols, const std::vector<Vec>& rows) {
    FpMatrix m(p, rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw InternalError("row length mismatch");
      for (std::size_t j = 0; j < cols; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
  }

  Residue p() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Residue at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint64_t v) {
    data_[r * cols_ + c] = static_cast<Residue>(v % p_);
  }

  Vec row(std::size_t r) const {
    return Vec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
               data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }
  Vec column(std::size_t c) const {
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, c);
    return v;
  }

  Vec apply(const Vec& x) const {
    if (x.size() != cols_) throw InternalError("apply: dimension mismatch");
    Vec y(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < cols_; ++j) acc = (acc + std::uint64_t{at(i, j)} * x[j]) % p_;
      y[i] = static_cast<Residue>(acc);
    }
    return y;
  }

  FpMatrix operator*(const FpMatrix& o) const {
    if (cols_ != o.rows_ || p_ != o.p_) throw InternalError("matrix product: shape mismatch");
    FpMatrix r(p_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        std::uint64_t a = at(i, k);
        if (!a) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          r.data_[i * o.cols_ + j] =
              static_cast<Residue>((r.data_[i * o.cols_ + j] + a * o.at(k, j)) % p_);
      }
    return r;
  }

  FpMatrix operator+(const FpMatrix& o) const {
    check_same_shape(o);
    FpMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = (data_[i] + o.data_[i]) % p_;
    return r;
  }

  FpMatrix operator-(const FpMatrix& o) const {
    check_same_shape(o);
    FpMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = (data_[i] + p_ - o.data_[i]) % p_;
    return r;
  }

  FpMatrix scaled(Residue s) const {
    FpMatrix r = *this;
    for (auto& x : r.data_) x = static_cast<Residue>(std::uint64_t{x} * s % p_);
    return r;
  }

  FpMatrix transpose() const {
    FpMatrix r(p_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r.set(j, i, at(i, j));
    return r;
  }

  FpMatrix pow(std::size_t k) const {
    if (rows_ != cols_) throw InternalError("pow of non-square matrix");
    FpMatrix r = identity(p_, rows_);
    for (std::size_t i = 0; i < k; ++i) r = r * (*this);
    return r;
  }

  bool is_zero() const {
    for (auto x : data_)
      if (x) return false;
    return true;
  }

  std::size_t rank() const;

  bool operator==(const FpMatrix& o) const {
    return p_ == o.p_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  void check_same_shape(const FpMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || p_ != o.p_)
      throw InternalError("matrix shape mismatch");
  }

  Residue p_ = 2;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Residue> data_;
};

namespace detail {

// In-place reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> rref(std::vector<Vec>& rows, std::size_t ncols, Residue p) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    Residue inv = inv_mod(rows[r][c], p);
    for (auto& x : rows[r]) x = static_cast<Residue>(std::uint64_t{x} * inv % p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      std::uint64_t f = rows[i][c];
      for (std::size_t j = 0; j < ncols; ++j)
        rows[i][j] = static_cast<Residue>((rows[i][j] + (p - f) * rows[r][j]) % p);
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

}  // namespace detail

inline std::size_t FpMatrix::rank() const {
  std::vector<Vec> rs;
  rs.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) rs.push_back(row(i));
  return detail::rref(rs, cols_, p_).size();
}

/// A subspace of F_p^n stored as its reduced row-echelon basis.
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(Residue p, std::size_t n) { return Subspace(p, n, {}); }

  static Subspace full(Residue p, std::size_t n) {
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < n; ++i) {
      Vec v(n, 0);
      v[i] = 1;
      rows.push_back(std::move(v));
    }
    return Subspace(p, n, std::move(rows));
  }

  static Subspace span(Residue p, std::size_t n, std::vector<Vec> vectors) {
    for (auto& v : vectors) {
      if (v.size() != n) throw InternalError("span: vector length mismatch");
      for (auto& x : v) x %= p;
    }
    return Subspace(p, n, std::move(vectors));
  }

  Residue p() const { return p_; }
  std::size_t ambient_dim() const { return n_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Vec>& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Coordinates of v in the echelon basis, if v lies in the space.
  std::optional<Vec> coordinates(const Vec& v) const {
    if (v.size() != n_) throw InternalError("coordinates: length mismatch");
    Vec c(basis_.size());
    Vec rest = v;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      Residue f = rest[pivots_[i]];
      c[i] = f;
      if (!f) continue;
      for (std::size_t j = 0; j < n_; ++j)
        rest[j] = static_cast<Residue>((rest[j] + std::uint64_t{p_ - f} * basis_[i][j]) % p_);
    }
    if (!is_zero(rest)) return std::nullopt;
    return c;
  }

  bool contains(const Vec& v) const { return coordinates(v).has_value(); }

  bool contains(const Subspace& s) const {
    check_compatible(s);
    for (const auto& b : s.basis_)
      if (!contains(b)) return false;
    return true;
  }

  /// Echelon basis as a dim x n matrix.
  FpMatrix as_rows() const { return FpMatrix::from_rows(p_, n_, basis_); }
  /// Echelon basis as the columns of an n x dim matrix.
  FpMatrix as_columns() const { return FpMatrix::from_columns(p_, n_, basis_); }

  bool operator==(const Subspace& o) const {
    return p_ == o.p_ && n_ == o.n_ && basis_ == o.basis_;
  }

  void check_compatible(const Subspace& o) const {
    if (p_ != o.p_ || n_ != o.n_)
      throw InputError("subspaces live in different ambient spaces (" + std::to_string(n_) +
                       " vs " + std::to_string(o.n_) + ")");
  }

 private:
  Subspace(Residue p, std::size_t n, std::vector<Vec> rows) : p_(p), n_(n), basis_(std::move(rows)) {
    check_modulus(p);
    pivots_ = detail::rref(basis_, n_, p_);
  }

  Residue p_ = 2;
  std::size_t n_ = 0;
  std::vector<Vec> basis_;
  std::vector<std::size_t> pivots_;
};

inline std::ostream& operator<<(std::ostream& os, const Subspace& s) {
  os << "span{";
  for (std::size_t i = 0; i < s.dim(); ++i) {
    os << (i ? ", " : "") << "(";
    for (std::size_t j = 0; j < s.ambient_dim(); ++j) os << (j ? "," : "") << s.basis()[i][j];
    os << ")";
  }
  return os << "} in F_" << s.p() << "^" << s.ambient_dim();
}

/// (null space, column space) of m.
inline std::pair<Subspace, Subspace> kernel_image(const FpMatrix& m) {
  const Residue p = m.p();
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  auto piv = detail::rref(rows, m.cols(), p);

  std::vector<bool> is_piv(m.cols(), false);
  for (auto c : piv) is_piv[c] = true;
  std::vector<Vec> kernel;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_piv[free]) continue;
    Vec v(m.cols(), 0);
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = (p - rows[r][free]) % p;
    kernel.push_back(std::move(v));
  }

  std::vector<Vec> cols;
  for (std::size_t j = 0; j < m.cols(); ++j) cols.push_back(m.column(j));
  return {Subspace::span(p, m.cols(), std::move(kernel)),
          Subspace::span(p, m.rows(), std::move(cols))};
}

inline Subspace kernel(const FpMatrix& m) { return kernel_image(m).first; }
inline Subspace image(const FpMatrix& m) { return kernel_image(m).second; }

/// (a ∩ b, a + b), intersection by the Zassenhaus construction.
inline std::pair<Subspace, Subspace> intersect_and_sum(const Subspace& a, const Subspace& b) {
  a.check_compatible(b);
  const std::size_t n = a.ambient_dim();
  const Residue p = a.p();
  std::vector<Vec> rows;
  for (const auto& v : a.basis()) {
    Vec r(2 * n);
    std::copy(v.begin(), v.end(), r.begin());
    std::copy(v.begin(), v.end(), r.begin() + static_cast<std::ptrdiff_t>(n));
    rows.push_back(std::move(r));
  }
  for (const auto& v : b.basis()) {
    Vec r(2 * n, 0);
    std::copy(v.begin(), v.end(), r.begin());
    rows.push_back(std::move(r));
  }
  detail::rref(rows, 2 * n, p);
  std::vector<Vec> sum, inter;
  for (auto& r : rows) {
    Vec left(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n));
    Vec right(r.begin() + static_cast<std::ptrdiff_t>(n), r.end());
    if (is_zero(left))
      inter.push_back(std::move(right));
    else
      sum.push_back(std::move(left));
  }
  return {Subspace::span(p, n, std::move(inter)), Subspace::span(p, n, std::move(sum))};
}

inline Subspace intersect(const Subspace& a, const Subspace& b) { return intersect_and_sum(a, b).first; }
inline Subspace sum(const Subspace& a, const Subspace& b) { return intersect_and_sum(a, b).second; }

/// Deterministic complement of `inner` in `outer`: walk the echelon basis of
/// `outer` in order and keep each vector not already spanned.
inline Subspace complement(const Subspace& inner, const Subspace& outer) {
  inner.check_compatible(outer);
  if (!outer.contains(inner)) throw InputError("complement: inner space is not contained in outer");
  std::vector<Vec> current = inner.basis();
  std::vector<Vec> chosen;
  Subspace span_now = inner;
  for (const auto& v : outer.basis()) {
    if (span_now.contains(v)) continue;
    chosen.push_back(v);
    current.push_back(v);
    span_now = Subspace::span(outer.p(), outer.ambient_dim(), current);
  }
  return Subspace::span(outer.p(), outer.ambient_dim(), std::move(chosen));
}

inline std::size_t quotient_dim(const Subspace& inner, const Subspace& outer) {
  inner.check_compatible(outer);
  if (!outer.contains(inner)) throw InputError("quotient_dim: inner space is not contained in outer");
  return outer.dim() - inner.dim();
}

/// m(s) for a subspace s of the source of m.
inline Subspace image_of(const FpMatrix& m, const Subspace& s) {
  if (s.ambient_dim() != m.cols()) throw InternalError("image_of: dimension mismatch");
  std::vector<Vec> imgs;
  for (const auto& v : s.basis()) imgs.push_back(m.apply(v));
  return Subspace::span(m.p(), m.rows(), std::move(imgs));
}

/// Some x with m x = b, or nothing.
inline std::optional<Vec> solve(const FpMatrix& m, const Vec& b) {
  if (b.size() != m.rows()) throw InternalError("solve: dimension mismatch");
  const Residue p = m.p();
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Vec r = m.row(i);
    r.push_back(b[i] % p);
    rows.push_back(std::move(r));
  }
  auto piv = detail::rref(rows, m.cols() + 1, p);
  Vec x(m.cols(), 0);
  for (std::size_t r = 0; r < piv.size(); ++r) {
    if (piv[r] == m.cols()) return std::nullopt;
    x[piv[r]] = rows[r][m.cols()];
  }
  return x;
}

/// Inverse of a square matrix; throws if singular.
inline FpMatrix inverse(const FpMatrix& m) {
  if (m.rows() != m.cols()) throw InternalError("inverse of non-square matrix");
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Vec e(m.rows(), 0);
    e[j] = 1;
    auto x = solve(m, e);
    if (!x) throw InputError("matrix is singular");
    cols.push_back(std::move(*x));
  }
  return FpMatrix::from_columns(m.p(), m.rows(), cols);
}

/// Preimage m^{-1}(s) of a subspace of the target.
inline Subspace preimage(const FpMatrix& m, const Subspace& s) {
  if (s.ambient_dim() != m.rows()) throw InternalError("preimage: dimension mismatch");
  // x is in the preimage iff m x lies in s, i.e. (annihilator rows of s) * m * x = 0.
  const Residue p = m.p();
  auto ann = kernel(s.as_rows());  // vectors orthogonal to s
  if (ann.dim() == 0) return Subspace::full(p, m.cols());
  FpMatrix constraints = ann.as_rows() * m;
  return kernel(constraints);
}

}  // namespace knorm::fplin
