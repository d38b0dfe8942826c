#pragma once

#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "relsheaf/error.hpp"
#include "relsheaf/rational.hpp"

namespace relsheaf {

// Dense matrix over Q, row major. Everything downstream is small enough that
// sparsity is not worth the bookkeeping.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
  Matrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = int(rows.size());
    cols_ = rows_ ? int(rows.begin()->size()) : 0;
    a_.reserve(size_t(rows_) * cols_);
    for (const auto& r : rows) {
      check(int(r.size()) == cols_, errc::shape, "ragged initializer");
      for (const auto& v : r) a_.push_back(v);
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int r, int c) { return a_[size_t(r) * cols_ + c]; }
  const Rational& operator()(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& v : a_)
      if (v != 0) return false;
    return true;
  }

  Matrix operator-() const {
    Matrix m(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = -a_[i];
    return m;
  }
  Matrix operator+(const Matrix& o) const {
    check(rows_ == o.rows_ && cols_ == o.cols_, errc::shape, "add shape mismatch");
    Matrix m(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
    return m;
  }
  Matrix operator-(const Matrix& o) const {
    check(rows_ == o.rows_ && cols_ == o.cols_, errc::shape, "sub shape mismatch");
    Matrix m(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
    return m;
  }
  Matrix operator*(const Matrix& o) const {
    check(cols_ == o.rows_, errc::shape, "mul shape mismatch");
    Matrix m(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Rational& v = (*this)(i, k);
        if (v == 0) continue;
        for (int j = 0; j < o.cols_; ++j) {
          const Rational& w = o(k, j);
          if (w != 0) m(i, j) += v * w;
        }
      }
    return m;
  }
  Matrix operator*(const Rational& c) const {
    Matrix m(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * c;
    return m;
  }

  Matrix transpose() const {
    Matrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  std::vector<Rational> apply(const std::vector<Rational>& x) const {
    check(int(x.size()) == cols_, errc::shape, "apply shape mismatch");
    std::vector<Rational> y(rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0 && x[j] != 0) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  Matrix col(int j) const {
    Matrix m(rows_, 1);
    for (int i = 0; i < rows_; ++i) m(i, 0) = (*this)(i, j);
    return m;
  }
  std::vector<Rational> col_vec(int j) const {
    std::vector<Rational> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(int j, const std::vector<Rational>& v) {
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  static Matrix hcat(const Matrix& a, const Matrix& b) {
    check(a.rows_ == b.rows_, errc::shape, "hcat shape mismatch");
    Matrix m(a.rows_, a.cols_ + b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < a.cols_; ++j) m(i, j) = a(i, j);
      for (int j = 0; j < b.cols_; ++j) m(i, a.cols_ + j) = b(i, j);
    }
    return m;
  }
  static Matrix vcat(const Matrix& a, const Matrix& b) {
    check(a.cols_ == b.cols_, errc::shape, "vcat shape mismatch");
    Matrix m(a.rows_ + b.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) m(i, j) = a(i, j);
    for (int i = 0; i < b.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) m(a.rows_ + i, j) = b(i, j);
    return m;
  }

  // Writes src into this at offset (r0, c0).
  void set_block(int r0, int c0, const Matrix& src) {
    check(r0 + src.rows_ <= rows_ && c0 + src.cols_ <= cols_, errc::shape, "block out of range");
    for (int i = 0; i < src.rows_; ++i)
      for (int j = 0; j < src.cols_; ++j) (*this)(r0 + i, c0 + j) = src(i, j);
  }
  Matrix block(int r0, int c0, int nr, int nc) const {
    check(r0 + nr <= rows_ && c0 + nc <= cols_, errc::shape, "block out of range");
    Matrix m(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<Rational> a_;
};

// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<int> rref(Matrix& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m(i, c) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = Rational(1) / m(r, c);
    for (int j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int rank(Matrix m) { return int(rref(m).size()); }

// A linear subspace of Q^ambient, held by a canonical basis: the columns of
// `basis` span it and basis^T is in reduced row echelon form. Two subspaces
// are equal iff their canonical data compare equal.
struct Subspace {
  int ambient = 0;
  Matrix basis;  // ambient x dim

  int dim() const { return basis.cols(); }
  bool operator==(const Subspace& o) const { return ambient == o.ambient && basis == o.basis; }
  bool operator!=(const Subspace& o) const { return !(*this == o); }

  static Subspace zero(int ambient) { return Subspace{ambient, Matrix(ambient, 0)}; }
  static Subspace full(int ambient) { return Subspace{ambient, Matrix::identity(ambient)}; }
};

// Canonicalizes a spanning set of column vectors.
inline Subspace span(const Matrix& gens) {
  Matrix t = gens.transpose();
  auto pivots = rref(t);
  int d = int(pivots.size());
  Matrix basis(gens.rows(), d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < gens.rows(); ++i) basis(i, k) = t(k, i);
  return Subspace{gens.rows(), basis};
}

inline Subspace image(const Matrix& m) { return span(m); }

inline Subspace kernel(const Matrix& m) {
  Matrix r = m;
  auto pivots = rref(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : pivots) is_pivot[c] = true;
  int d = m.cols() - int(pivots.size());
  Matrix gens(m.cols(), d);
  int k = 0;
  for (int c = 0; c < m.cols(); ++c) {
    if (is_pivot[c]) continue;
    gens(c, k) = 1;
    for (size_t i = 0; i < pivots.size(); ++i) gens(pivots[i], k) = -r(int(i), c);
    ++k;
  }
  return span(gens);
}

// One elimination of [m | rhs]; solutions take free variables = 0.
inline std::optional<Matrix> solve_matrix(const Matrix& m, const Matrix& rhs) {
  check(m.rows() == rhs.rows(), errc::shape, "solve shape mismatch");
  Matrix aug = Matrix::hcat(m, rhs);
  auto pivots = rref(aug);
  // A pivot in the rhs part means some column is inconsistent; locate it.
  for (int c : pivots)
    if (c >= m.cols()) return std::nullopt;
  Matrix x(m.cols(), rhs.cols());
  for (size_t i = 0; i < pivots.size(); ++i)
    for (int j = 0; j < rhs.cols(); ++j) x(pivots[i], j) = aug(int(i), m.cols() + j);
  // Rows of aug below the pivots must be zero on the rhs side.
  for (int i = int(pivots.size()); i < aug.rows(); ++i)
    for (int j = 0; j < rhs.cols(); ++j)
      if (aug(i, m.cols() + j) != 0) return std::nullopt;
  return x;
}

inline std::optional<std::vector<Rational>> solve(const Matrix& m, const std::vector<Rational>& b) {
  check(int(b.size()) == m.rows(), errc::shape, "solve: rhs length");
  Matrix rhs(m.rows(), 1);
  for (int i = 0; i < m.rows(); ++i) rhs(i, 0) = b[i];
  auto x = solve_matrix(m, rhs);
  if (!x) return std::nullopt;
  return x->col_vec(0);
}

inline bool contains(const Subspace& s, const Matrix& vectors) {
  return solve_matrix(s.basis, vectors).has_value();
}

inline bool subspace_leq(const Subspace& a, const Subspace& b) { return contains(b, a.basis); }

// Left inverse of a full-column-rank matrix: L with L*e = I.
inline Matrix left_inverse(const Matrix& e) {
  Matrix aug = Matrix::hcat(e, Matrix::identity(e.rows()));
  auto pivots = rref(aug);
  check(int(pivots.size()) >= e.cols() && (e.cols() == 0 || pivots[e.cols() - 1] < e.cols()),
        errc::shape, "left_inverse: columns not independent");
  Matrix l(e.cols(), e.rows());
  for (int i = 0; i < e.cols(); ++i)
    for (int j = 0; j < e.rows(); ++j) l(i, j) = aug(i, e.cols() + j);
  return l;
}

inline bool is_invertible(const Matrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

inline Matrix inverse(const Matrix& m) {
  check(m.rows() == m.cols(), errc::shape, "inverse of non-square matrix");
  Matrix aug = Matrix::hcat(m, Matrix::identity(m.rows()));
  auto pivots = rref(aug);
  check(int(pivots.size()) == m.rows() && (m.rows() == 0 || pivots.back() == m.rows() - 1),
        errc::not_invertible, "singular matrix");
  return aug.block(0, m.cols(), m.rows(), m.rows());
}

// num/den with a projector to quotient coordinates. The projector vanishes on
// den and, within num, only on den; reps gives a section: proj * reps = id.
struct QuotientData {
  int dim = 0;
  Matrix projector;  // dim x ambient
  Matrix reps;       // ambient x dim, columns lie in num
};

inline QuotientData quotient(const Subspace& num, const Subspace& den) {
  check(num.ambient == den.ambient, errc::shape, "quotient ambient mismatch");
  check(subspace_leq(den, num), errc::containment, "quotient: den not contained in num");
  int n = num.ambient;
  // Complete den's basis to num's by greedily taking num basis columns, then
  // complete to the whole ambient space with standard vectors.
  Matrix acc = den.basis;
  int r = rank(acc);
  std::vector<int> complement;
  for (int j = 0; j < num.basis.cols(); ++j) {
    Matrix cand = Matrix::hcat(acc, num.basis.col(j));
    int r2 = rank(cand);
    if (r2 > r) {
      acc = cand;
      r = r2;
      complement.push_back(j);
    }
  }
  QuotientData out;
  out.dim = int(complement.size());
  out.reps = Matrix(n, out.dim);
  for (int k = 0; k < out.dim; ++k)
    for (int i = 0; i < n; ++i) out.reps(i, k) = num.basis(i, complement[k]);
  Matrix full = acc;
  for (int i = 0; i < n && full.cols() < n; ++i) {
    Matrix e(n, 1);
    e(i, 0) = 1;
    Matrix cand = Matrix::hcat(full, e);
    if (rank(cand) > full.cols()) full = cand;
  }
  Matrix inv = inverse(full);
  out.projector = Matrix(out.dim, n);
  for (int k = 0; k < out.dim; ++k)
    for (int j = 0; j < n; ++j) out.projector(k, j) = inv(den.dim() + k, j);
  return out;
}

}  // namespace relsheaf
