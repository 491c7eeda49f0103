#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

#include "gptlab/scalar.hpp"

namespace gptlab {

template <class S>
using Vec = std::vector<S>;

template <class S>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, S(0)) {}
  Mat(int rows, int cols, std::initializer_list<S> vals) : Mat(rows, cols) {
    assert(static_cast<int>(vals.size()) == rows * cols);
    size_t k = 0;
    for (const S& v : vals) a_[k++] = v;
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  static Mat from_rows(const std::vector<Vec<S>>& rows) {
    Mat m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
  }

  static Mat from_cols(const std::vector<Vec<S>>& cols) {
    Mat m(cols.empty() ? 0 : static_cast<int>(cols[0].size()), static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols(); ++j)
      for (int i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  Vec<S> row(int i) const {
    Vec<S> r(cols_);
    for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

  Vec<S> col(int j) const {
    Vec<S> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

  const std::vector<S>& data() const { return a_; }
  std::vector<S>& data() { return a_; }

 private:
  int rows_, cols_;
  std::vector<S> a_;
};

template <class S>
Mat<S> operator*(const Mat<S>& a, const Mat<S>& b) {
  assert(a.cols() == b.rows());
  Mat<S> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (ScalarOps<S>::is_zero(a(i, k))) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

template <class S>
Mat<S> operator*(const S& s, const Mat<S>& m) {
  Mat<S> c = m;
  for (S& v : c.data()) v *= s;
  return c;
}

template <class S>
Mat<S> operator+(const Mat<S>& a, const Mat<S>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Mat<S> c = a;
  for (size_t k = 0; k < c.data().size(); ++k) c.data()[k] += b.data()[k];
  return c;
}

template <class S>
Mat<S> operator-(const Mat<S>& a, const Mat<S>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Mat<S> c = a;
  for (size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

template <class S>
Vec<S> mul(const Mat<S>& m, const Vec<S>& v) {
  assert(static_cast<int>(v.size()) == m.cols());
  Vec<S> r(m.rows(), S(0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

template <class S>
S dot(const Vec<S>& a, const Vec<S>& b) {
  assert(a.size() == b.size());
  S s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class S>
Vec<S> vadd(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

template <class S>
Vec<S> vsub(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

template <class S>
Vec<S> vscale(const S& s, const Vec<S>& a) {
  Vec<S> r = a;
  for (S& v : r) v *= s;
  return r;
}

template <class S>
bool vec_eq(const Vec<S>& a, const Vec<S>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!ScalarOps<S>::eq(a[i], b[i])) return false;
  return true;
}

template <class S>
bool is_zero_vec(const Vec<S>& a) {
  for (const S& v : a)
    if (!ScalarOps<S>::is_zero(v)) return false;
  return true;
}

// Flattened tensor product; index of (i, j) is i * b.size() + j.
template <class S>
Vec<S> tensor_vec(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r;
  r.reserve(a.size() * b.size());
  for (const S& x : a)
    for (const S& y : b) r.push_back(x * y);
  return r;
}

// Row-major reshape; inverse of flattening with index(i, j) = i*cols + j.
template <class S>
Mat<S> mat_from_vec(const Vec<S>& v, int rows, int cols) {
  assert(static_cast<int>(v.size()) == rows * cols);
  Mat<S> m(rows, cols);
  m.data() = v;
  return m;
}

template <class S>
Vec<S> vec_from_mat(const Mat<S>& m) {
  return m.data();
}

template <class S>
Mat<S> outer(const Vec<S>& col, const Vec<S>& row) {
  Mat<S> m(static_cast<int>(col.size()), static_cast<int>(row.size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = col[i] * row[j];
  return m;
}

namespace detail {

// Gauss-Jordan to reduced row echelon form. Returns rank and pivot columns.
template <class S>
int rref(Mat<S>& m, std::vector<int>* pivot_cols = nullptr) {
  int rank = 0;
  if (pivot_cols) pivot_cols->clear();
  for (int col = 0; col < m.cols() && rank < m.rows(); ++col) {
    int piv = -1;
    if constexpr (ScalarOps<S>::exact) {
      for (int i = rank; i < m.rows(); ++i)
        if (!ScalarOps<S>::is_zero(m(i, col))) {
          piv = i;
          break;
        }
    } else {
      S best(0);
      for (int i = rank; i < m.rows(); ++i) {
        S a = ScalarOps<S>::abs(m(i, col));
        if (!ScalarOps<S>::is_zero(m(i, col)) && (piv < 0 || a > best)) {
          piv = i;
          best = a;
        }
      }
    }
    if (piv < 0) continue;
    for (int j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(rank, j));
    S inv = S(1) / m(rank, col);
    for (int j = 0; j < m.cols(); ++j) m(rank, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == rank || ScalarOps<S>::is_zero(m(i, col))) continue;
      S f = m(i, col);
      for (int j = 0; j < m.cols(); ++j) m(i, j) -= f * m(rank, j);
    }
    if (pivot_cols) pivot_cols->push_back(col);
    ++rank;
  }
  return rank;
}

}  // namespace detail

template <class S>
int rank(Mat<S> m) {
  return detail::rref(m);
}

template <class S>
int rank_of_rows(const std::vector<Vec<S>>& rows) {
  if (rows.empty()) return 0;
  return rank(Mat<S>::from_rows(rows));
}

// One solution of A x = b with free variables set to zero.
template <class S>
std::optional<Vec<S>> solve(const Mat<S>& a, const Vec<S>& b) {
  Mat<S> aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  std::vector<int> piv;
  detail::rref(aug, &piv);
  for (int c : piv)
    if (c == a.cols()) return std::nullopt;
  Vec<S> x(a.cols(), S(0));
  for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(static_cast<int>(r), a.cols());
  return x;
}

template <class S>
std::optional<Mat<S>> inverse(const Mat<S>& a) {
  assert(a.rows() == a.cols());
  int n = a.rows();
  Mat<S> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = S(1);
  }
  std::vector<int> piv;
  int rk = detail::rref(aug, &piv);
  if (rk < n) return std::nullopt;
  for (int r = 0; r < rk; ++r)
    if (piv[r] >= n) return std::nullopt;
  Mat<S> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

// Basis of {x : A x = 0}.
template <class S>
std::vector<Vec<S>> kernel_basis(Mat<S> a) {
  std::vector<int> piv;
  detail::rref(a, &piv);
  std::vector<bool> is_piv(a.cols(), false);
  for (int c : piv) is_piv[c] = true;
  std::vector<Vec<S>> basis;
  for (int free = 0; free < a.cols(); ++free) {
    if (is_piv[free]) continue;
    Vec<S> v(a.cols(), S(0));
    v[free] = S(1);
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -a(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Indices of a maximal linearly independent subset, scanned in order.
template <class S>
std::vector<int> independent_subset(const std::vector<Vec<S>>& vecs, int stop_at_rank = -1) {
  std::vector<int> chosen;
  std::vector<Vec<S>> rows;
  int rk = 0;
  for (size_t i = 0; i < vecs.size(); ++i) {
    rows.push_back(vecs[i]);
    int r = rank_of_rows(rows);
    if (r > rk) {
      rk = r;
      chosen.push_back(static_cast<int>(i));
      if (stop_at_rank > 0 && rk == stop_at_rank) break;
    } else {
      rows.pop_back();
    }
  }
  return chosen;
}

}  // namespace gptlab
