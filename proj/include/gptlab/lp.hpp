#pragma once

#include <optional>
#include <vector>

#include "gptlab/linalg.hpp"

namespace gptlab {

enum class LPStatus { Optimal, Infeasible, Unbounded };

// minimize c.x  subject to  eqA x = eqb,  geA x >= geb,  x[i] >= 0 where nonneg[i].
template <class S>
struct LinearProgram {
  int nvars = 0;
  Mat<S> eqA;
  Vec<S> eqb;
  Mat<S> geA;
  Vec<S> geb;
  std::vector<bool> nonneg;

  explicit LinearProgram(int n) : nvars(n), eqA(0, n), geA(0, n), nonneg(n, true) {}

  void add_eq(const Vec<S>& row, const S& rhs) {
    append_row(eqA, row);
    eqb.push_back(rhs);
  }
  void add_ge(const Vec<S>& row, const S& rhs) {
    append_row(geA, row);
    geb.push_back(rhs);
  }
  void add_le(const Vec<S>& row, const S& rhs) {
    Vec<S> neg = row;
    for (S& v : neg) v = -v;
    add_ge(neg, -rhs);
  }

 private:
  static void append_row(Mat<S>& m, const Vec<S>& row) {
    Mat<S> next(m.rows() + 1, m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) next(i, j) = m(i, j);
    for (int j = 0; j < m.cols(); ++j) next(m.rows(), j) = row[j];
    m = next;
  }
};

// Infeasible certificates satisfy  y_eq'eqA + y_ge'geA <= 0 componentwise on
// nonnegative variables (= 0 on free ones), y_ge >= 0, y_eq'eqb + y_ge'geb > 0.
template <class S>
struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Vec<S> x;
  S value = S(0);
  Vec<S> y_eq;
  Vec<S> y_ge;
  Vec<S> ray;
};

namespace detail {

// Dense tableau simplex on  min c.x, A x = b, x >= 0  with Bland's rule.
template <class S>
class SimplexTableau {
 public:
  SimplexTableau(const Mat<S>& a, const Vec<S>& b) : m_(a.rows()), n_(a.cols()), t_(a.rows(), a.cols() + a.rows()), rhs_(b), basis_(a.rows()) {
    for (int i = 0; i < m_; ++i) {
      bool neg = sgn(rhs_[i]) < 0;
      for (int j = 0; j < n_; ++j) t_(i, j) = neg ? S(-a(i, j)) : a(i, j);
      if (neg) rhs_[i] = -rhs_[i];
      t_(i, n_ + i) = S(1);
      basis_[i] = n_ + i;
    }
  }

  // Phase 1. Returns min sum of artificials.
  S phase1() {
    Vec<S> cost(n_ + m_, S(0));
    for (int j = n_; j < n_ + m_; ++j) cost[j] = S(1);
    run(cost, /*allow_artificial=*/true);
    S v(0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) v += rhs_[i];
    return v;
  }

  // Pivot basic artificials onto original columns where possible.
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (int j = 0; j < n_; ++j) {
        if (!ScalarOps<S>::is_zero(t_(i, j)) && !is_basic(j)) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 on original columns. Returns false when unbounded.
  bool phase2(const Vec<S>& c) {
    Vec<S> cost(n_ + m_, S(0));
    for (int j = 0; j < n_; ++j) cost[j] = c[j];
    return run(cost, /*allow_artificial=*/false);
  }

  Vec<S> solution() const {
    Vec<S> x(n_, S(0));
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = rhs_[i];
    return x;
  }

  // y = c_B B^{-1}, read off the artificial columns (they carry B^{-1}).
  Vec<S> duals(const Vec<S>& c_phase) const {
    Vec<S> y(m_, S(0));
    for (int i = 0; i < m_; ++i) {
      int sign_flip = row_negated_[i] ? -1 : 1;
      for (int k = 0; k < m_; ++k) {
        const S& ck = c_phase[basis_[k]];
        if (!ScalarOps<S>::is_zero(ck)) y[i] += ck * t_(k, n_ + i);
      }
      if (sign_flip < 0) y[i] = -y[i];
    }
    return y;
  }

  Vec<S> phase1_cost() const {
    Vec<S> cost(n_ + m_, S(0));
    for (int j = n_; j < n_ + m_; ++j) cost[j] = S(1);
    return cost;
  }

  Vec<S> extend_cost(const Vec<S>& c) const {
    Vec<S> cost(n_ + m_, S(0));
    for (int j = 0; j < n_; ++j) cost[j] = c[j];
    return cost;
  }

  int unbounded_col() const { return unbounded_col_; }

  Vec<S> unbounded_ray() const {
    Vec<S> d(n_, S(0));
    d[unbounded_col_] = S(1);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) d[basis_[i]] = -t_(i, unbounded_col_);
    return d;
  }

  void record_row_signs(const Vec<S>& original_b) {
    row_negated_.assign(m_, false);
    for (int i = 0; i < m_; ++i) row_negated_[i] = sgn(original_b[i]) < 0;
  }

 private:
  bool is_basic(int col) const {
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == col) return true;
    return false;
  }

  void pivot(int row, int col) {
    S inv = S(1) / t_(row, col);
    for (int j = 0; j < n_ + m_; ++j) t_(row, j) *= inv;
    rhs_[row] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row || ScalarOps<S>::is_zero(t_(i, col))) continue;
      S f = t_(i, col);
      for (int j = 0; j < n_ + m_; ++j) t_(i, j) -= f * t_(row, j);
      rhs_[i] -= f * rhs_[row];
    }
    basis_[row] = col;
  }

  bool run(const Vec<S>& cost, bool allow_artificial) {
    int limit = allow_artificial ? n_ + m_ : n_;
    while (true) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (is_basic(j)) continue;
        S red = cost[j];
        for (int i = 0; i < m_; ++i) {
          const S& cb = cost[basis_[i]];
          if (!ScalarOps<S>::is_zero(cb)) red -= cb * t_(i, j);
        }
        if (sgn(red) < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      S best_ratio(0);
      for (int i = 0; i < m_; ++i) {
        if (sgn(t_(i, enter)) <= 0) continue;
        S ratio = rhs_[i] / t_(i, enter);
        if (leave < 0 || ScalarOps<S>::lt(ratio, best_ratio) ||
            (ScalarOps<S>::eq(ratio, best_ratio) && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) {
        unbounded_col_ = enter;
        return false;
      }
      pivot(leave, enter);
    }
  }

  int m_, n_;
  Mat<S> t_;
  Vec<S> rhs_;
  std::vector<int> basis_;
  std::vector<bool> row_negated_;
  int unbounded_col_ = -1;
};

}  // namespace detail

template <class S>
LPResult<S> lp_minimize(const LinearProgram<S>& lp, const Vec<S>& c) {
  int me = lp.eqA.rows(), mg = lp.geA.rows();
  // Column layout: one column per nonnegative variable, a +/- pair per free
  // variable, then one surplus column per >= row.
  std::vector<int> col_var;
  std::vector<int> col_sign;
  for (int v = 0; v < lp.nvars; ++v) {
    col_var.push_back(v);
    col_sign.push_back(1);
    if (!lp.nonneg[v]) {
      col_var.push_back(v);
      col_sign.push_back(-1);
    }
  }
  int nx = static_cast<int>(col_var.size());
  int ncols = nx + mg;
  Mat<S> a(me + mg, ncols);
  Vec<S> b(me + mg, S(0));
  for (int i = 0; i < me; ++i) {
    for (int k = 0; k < nx; ++k) a(i, k) = S(col_sign[k]) * lp.eqA(i, col_var[k]);
    b[i] = lp.eqb[i];
  }
  for (int i = 0; i < mg; ++i) {
    for (int k = 0; k < nx; ++k) a(me + i, k) = S(col_sign[k]) * lp.geA(i, col_var[k]);
    a(me + i, nx + i) = S(-1);
    b[me + i] = lp.geb[i];
  }
  Vec<S> cost(ncols, S(0));
  for (int k = 0; k < nx; ++k) cost[k] = S(col_sign[k]) * c[col_var[k]];

  detail::SimplexTableau<S> tab(a, b);
  tab.record_row_signs(b);
  LPResult<S> res;
  S p1 = tab.phase1();
  if (sgn(p1) > 0) {
    res.status = LPStatus::Infeasible;
    Vec<S> y = tab.duals(tab.phase1_cost());
    res.y_eq.assign(y.begin(), y.begin() + me);
    res.y_ge.assign(y.begin() + me, y.end());
    return res;
  }
  tab.drive_out_artificials();
  if (!tab.phase2(cost)) {
    res.status = LPStatus::Unbounded;
    Vec<S> dcols = tab.unbounded_ray();
    res.ray.assign(lp.nvars, S(0));
    for (int k = 0; k < nx; ++k) res.ray[col_var[k]] += S(col_sign[k]) * dcols[k];
    return res;
  }
  res.status = LPStatus::Optimal;
  Vec<S> xs = tab.solution();
  res.x.assign(lp.nvars, S(0));
  for (int k = 0; k < nx; ++k) res.x[col_var[k]] += S(col_sign[k]) * xs[k];
  res.value = dot(c, res.x);
  Vec<S> y = tab.duals(tab.extend_cost(cost));
  res.y_eq.assign(y.begin(), y.begin() + me);
  res.y_ge.assign(y.begin() + me, y.end());
  return res;
}

template <class S>
LPResult<S> lp_maximize(const LinearProgram<S>& lp, const Vec<S>& c) {
  Vec<S> neg = c;
  for (S& v : neg) v = -v;
  LPResult<S> res = lp_minimize(lp, neg);
  if (res.status == LPStatus::Optimal) res.value = -res.value;
  return res;
}

template <class S>
LPResult<S> lp_feasible(const LinearProgram<S>& lp) {
  return lp_minimize(lp, Vec<S>(lp.nvars, S(0)));
}

// Substitution check of an infeasibility certificate.
template <class S>
bool check_farkas(const LinearProgram<S>& lp, const Vec<S>& y_eq, const Vec<S>& y_ge) {
  for (const S& z : y_ge)
    if (sgn(z) < 0) return false;
  S rhs(0);
  for (int i = 0; i < lp.eqA.rows(); ++i) rhs += y_eq[i] * lp.eqb[i];
  for (int i = 0; i < lp.geA.rows(); ++i) rhs += y_ge[i] * lp.geb[i];
  if (sgn(rhs) <= 0) return false;
  for (int v = 0; v < lp.nvars; ++v) {
    S comb(0);
    for (int i = 0; i < lp.eqA.rows(); ++i) comb += y_eq[i] * lp.eqA(i, v);
    for (int i = 0; i < lp.geA.rows(); ++i) comb += y_ge[i] * lp.geA(i, v);
    if (lp.nonneg[v] ? sgn(comb) > 0 : sgn(comb) != 0) return false;
  }
  return true;
}

}  // namespace gptlab
