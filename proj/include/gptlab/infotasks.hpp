#pragma once
// Decision procedures for joint distinguishability, cloning and broadcasting,
// irreducible direct-sum decomposition of cones, and the classification of
// nondisturbing maps (scalings per irreducible summand).

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gptlab/composite.hpp"

namespace gptlab {

// Feasibility system for effects a_i with a_i(s_j) = delta_ij, sum a_i = u,
// and positivity on every cone ray; a_i <= u follows from the sum. Exposed so
// certificates can be re-verified against the same system.
template <class S>
LinearProgram<S> distinguishability_lp(const StateSpace<S>& a, const std::vector<Vec<S>>& states) {
  int d = a.dim();
  size_t n = states.size();
  LinearProgram<S> lp(n * d);
  lp.nonneg.assign(n * d, false);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Vec<S> row(n * d, S(0));
      for (int k = 0; k < d; ++k) row[i * d + k] = states[j][k];
      lp.add_eq(row, i == j ? S(1) : S(0));
    }
  for (int k = 0; k < d; ++k) {
    Vec<S> row(n * d, S(0));
    for (size_t i = 0; i < n; ++i) row[i * d + k] = S(1);
    lp.add_eq(row, a.unit[k]);
  }
  for (size_t i = 0; i < n; ++i)
    for (const auto& r : a.cone.rays()) {
      Vec<S> row(n * d, S(0));
      for (int k = 0; k < d; ++k) row[i * d + k] = r[k];
      lp.add_ge(row, S(0));
    }
  return lp;
}

template <class S>
struct DistinguishVerdict {
  bool distinguishable = false;
  std::vector<Vec<S>> observable;  // a_i(s_j) = delta_ij, summing to the unit
  Vec<S> farkas_eq, farkas_ge;     // infeasibility certificate otherwise
};

template <class S>
DistinguishVerdict<S> jointly_distinguishable(const StateSpace<S>& a, const std::vector<Vec<S>>& states) {
  if (states.empty()) throw UsageError("jointly_distinguishable: empty state list");
  for (const auto& s : states)
    if (!scalar_eq(dot(a.unit, s), S(1)))
      throw UsageError("jointly_distinguishable: states must be normalized");
  auto lp = distinguishability_lp(a, states);
  auto res = lp_feasible(lp);
  DistinguishVerdict<S> out;
  if (res.status == LPStatus::Optimal) {
    out.distinguishable = true;
    int d = a.dim();
    for (size_t i = 0; i < states.size(); ++i)
      out.observable.emplace_back(res.x.begin() + i * d, res.x.begin() + (i + 1) * d);
  } else {
    out.farkas_eq = res.y_eq;
    out.farkas_ge = res.y_ge;
  }
  return out;
}

// phi(x) = sum_i a_i(x) s_i (x) s_i duplicates each s_i and is norm-preserving.
template <class S>
Mat<S> build_cloner(const StateSpace<S>& a, const std::vector<Vec<S>>& states,
                    const std::vector<Vec<S>>& observable) {
  if (observable.size() != states.size())
    throw ObservableMismatchError("cloner: observable size differs from state count");
  if (!validate_observable(a, observable).ok)
    throw ObservableMismatchError("cloner: effect list is not an observable");
  for (size_t i = 0; i < states.size(); ++i)
    for (size_t j = 0; j < states.size(); ++j)
      if (!scalar_eq(dot(observable[i], states[j]), i == j ? S(1) : S(0)))
        throw ObservableMismatchError("cloner: observable does not distinguish the states");
  int d = a.dim();
  Mat<S> phi(d * d, d);
  for (size_t i = 0; i < states.size(); ++i)
    phi = phi + outer(tensor_vec(states[i], states[i]), observable[i]);
  return phi;
}

template <class S>
struct BroadcastVerdict {
  bool broadcastable = false;
  // True when no certificate was found and the candidate pool exceeded the
  // subset budget, so the failure is not exhaustive.
  bool budget_limited = false;
  std::vector<Vec<S>> simplex;  // jointly distinguishable states covering the input
  std::vector<Vec<S>> observable;
  std::vector<Vec<S>> hull_weights;  // per input state, convex weights over simplex
  Mat<S> broadcaster;                // cloner of the simplex vertices
};

namespace detail {

// Conic (hence convex, for normalized data) hull membership.
template <class S>
std::optional<Vec<S>> hull_weights_for(const std::vector<Vec<S>>& hull, const Vec<S>& v) {
  LinearProgram<S> lp(hull.size());
  for (size_t d = 0; d < v.size(); ++d) {
    Vec<S> row(hull.size());
    for (size_t k = 0; k < hull.size(); ++k) row[k] = hull[k][d];
    lp.add_eq(row, v[d]);
  }
  auto r = lp_feasible(lp);
  if (r.status != LPStatus::Optimal) return std::nullopt;
  return r.x;
}

}  // namespace detail

// Searches subsets of the extreme points (plus caller-supplied candidates)
// for a jointly distinguishable set whose hull covers the inputs; subsets are
// tried smallest-first in lexicographic order, so the result is deterministic.
template <class S>
BroadcastVerdict<S> is_broadcastable(const StateSpace<S>& a, const std::vector<Vec<S>>& gamma,
                                     const std::vector<Vec<S>>& extra_candidates = {},
                                     size_t budget = 8) {
  for (const auto& g : gamma)
    if (!scalar_eq(dot(a.unit, g), S(1))) throw UsageError("is_broadcastable: states must be normalized");
  std::vector<Vec<S>> pool = a.omega_vertices;
  pool.insert(pool.end(), extra_candidates.begin(), extra_candidates.end());
  pool = canonical_dedupe(pool);
  for (auto& p : pool) p = vscale(S(1) / dot(a.unit, p), p);

  BroadcastVerdict<S> out;
  size_t cap = std::min(pool.size(), budget);
  std::vector<int> comb;
  auto try_subset = [&](const std::vector<int>& idx) -> bool {
    std::vector<Vec<S>> subset;
    for (int k : idx) subset.push_back(pool[k]);
    std::vector<Vec<S>> weights;
    for (const auto& g : gamma) {
      auto w = detail::hull_weights_for(subset, g);
      if (!w) return false;
      weights.push_back(*w);
    }
    auto dist = jointly_distinguishable(a, subset);
    if (!dist.distinguishable) return false;
    out.broadcastable = true;
    out.simplex = subset;
    out.observable = dist.observable;
    out.hull_weights = std::move(weights);
    out.broadcaster = build_cloner(a, subset, dist.observable);
    return true;
  };
  // all subsets of size s in lexicographic index order
  for (size_t s = 1; s <= cap; ++s) {
    comb.assign(s, 0);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      if (try_subset(comb)) return out;
      int i = static_cast<int>(s) - 1;
      while (i >= 0 && comb[i] == static_cast<int>(pool.size() - s + i)) --i;
      if (i < 0) break;
      ++comb[i];
      for (size_t j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  out.budget_limited = pool.size() > budget;
  return out;
}

template <class S>
struct BroadcastSet {
  std::vector<Vec<S>> vertices;  // vertices of the broadcast polytope
  bool simplex = false;
  bool distinguishable = false;
  std::vector<Vec<S>> observable;
};

namespace detail {

// Vertex of a finite point set: not in the hull of the others.
template <class S>
bool hull_vertex(const std::vector<Vec<S>>& pts, size_t i) {
  std::vector<Vec<S>> others;
  for (size_t k = 0; k < pts.size(); ++k)
    if (k != i) others.push_back(pts[k]);
  if (others.empty()) return true;
  return !hull_weights_for(others, pts[i]).has_value();
}

}  // namespace detail

// The broadcast set of a map into the composite of two copies: all normalized
// states both of whose marginals come back unchanged. The fixed-point
// conditions are linear, so the set is a face-like polytope returned by its
// vertices; the advertised theorem content (simplex with distinguishable
// vertices) is verified, not assumed.
template <class S>
BroadcastSet<S> broadcast_set_of_map(const StateSpace<S>& a, const Mat<S>& phi) {
  int d = a.dim();
  if (phi.rows() != d * d || phi.cols() != d) throw UsageError("broadcast_set_of_map: wrong shape");
  Vec<S> uu = tensor_vec(a.unit, a.unit);
  for (const auto& w : a.omega_vertices) {
    if (!scalar_eq(dot(uu, mul(phi, w)), S(1)))
      throw UsageError("broadcast_set_of_map: map is not norm-preserving");
  }

  // marginal extractors as matrices on the flattened composite
  Mat<S> marg_a(d, d * d), marg_b(d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      marg_a(i, i * d + j) = a.unit[j];
      marg_b(j, i * d + j) = a.unit[i];
    }
  Mat<S> la = marg_a * phi - Mat<S>::identity(d);
  Mat<S> lb = marg_b * phi - Mat<S>::identity(d);

  // Solve in barycentric coordinates over Omega's vertices: basic feasible
  // solutions of {lambda >= 0, A lambda = 0, sum lambda = 1} cover all
  // vertices of the solution polytope; prune images to hull vertices.
  const auto& verts = a.omega_vertices;
  size_t m = verts.size();
  Mat<S> sys(2 * d + 1, static_cast<int>(m));
  for (size_t k = 0; k < m; ++k) {
    Vec<S> va = mul(la, verts[k]), vb = mul(lb, verts[k]);
    for (int i = 0; i < d; ++i) {
      sys(i, static_cast<int>(k)) = va[i];
      sys(d + i, static_cast<int>(k)) = vb[i];
    }
    sys(2 * d, static_cast<int>(k)) = S(1);
  }
  Vec<S> rhs(2 * d + 1, S(0));
  rhs[2 * d] = S(1);
  int r = rank(sys);
  std::vector<Vec<S>> points;
  std::vector<int> comb(r);
  std::iota(comb.begin(), comb.end(), 0);
  bool more = r <= static_cast<int>(m);
  while (more) {
    Mat<S> sub(2 * d + 1, r);
    for (int c = 0; c < r; ++c)
      for (int i = 0; i < 2 * d + 1; ++i) sub(i, c) = sys(i, comb[c]);
    if (rank(sub) == r) {
      auto sol = solve(sub, rhs);
      if (sol) {
        bool nonneg = true;
        for (const S& x : *sol)
          if (sgn(x) < 0) nonneg = false;
        if (nonneg) {
          Vec<S> p(d, S(0));
          for (int c = 0; c < r; ++c) p = vadd(p, vscale((*sol)[c], verts[comb[c]]));
          points.push_back(std::move(p));
        }
      }
    }
    int i = r - 1;
    while (i >= 0 && comb[i] == static_cast<int>(m) - r + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < r; ++j) comb[j] = comb[j - 1] + 1;
  }

  BroadcastSet<S> out;
  points = canonical_dedupe(points);
  for (auto& p : points) p = vscale(S(1) / dot(a.unit, p), p);
  for (size_t i = 0; i < points.size(); ++i)
    if (detail::hull_vertex(points, i)) out.vertices.push_back(points[i]);

  // normalized points are affinely independent iff linearly independent
  out.simplex = rank_of_rows(out.vertices) == static_cast<int>(out.vertices.size());
  if (out.vertices.empty()) {
    out.distinguishable = true;
  } else {
    auto dist = jointly_distinguishable(a, out.vertices);
    out.distinguishable = dist.distinguishable;
    out.observable = dist.observable;
  }
  return out;
}

template <class S>
struct ConeSummand {
  std::vector<int> ray_indices;  // indices into the parent cone's ray list
  std::vector<Vec<S>> basis;     // parent-space basis of the summand's span
  Cone<S> cone;                  // the summand expressed in that basis
};

template <class S>
struct Decomposition {
  std::vector<ConeSummand<S>> summands;
};

// Finest direct-sum split of a pointed generating cone. Rays are grouped by
// the fundamental circuits of the linear matroid relative to one fixed basis;
// circuit-connected components give exactly the matroid components, whose
// spans are independent.
template <class S>
Decomposition<S> irreducible_decomposition(const Cone<S>& c) {
  const auto& rays = c.rays();
  int d = c.dim();
  size_t m = rays.size();
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int x, int y) { parent[find(x)] = find(y); };

  std::vector<int> bidx = independent_subset(rays, d);
  Mat<S> b = Mat<S>::from_cols([&] {
    std::vector<Vec<S>> cols;
    for (int i : bidx) cols.push_back(rays[i]);
    return cols;
  }());
  Mat<S> binv = *inverse(b);
  std::vector<bool> in_basis(m, false);
  for (int i : bidx) in_basis[i] = true;
  std::vector<Vec<S>> coords(m);
  for (size_t i = 0; i < m; ++i) {
    coords[i] = mul(binv, rays[i]);
    if (in_basis[i]) continue;
    for (int k = 0; k < d; ++k)
      if (sgn(coords[i][k]) != 0) unite(static_cast<int>(i), bidx[k]);
  }

  std::vector<int> roots;
  std::vector<std::vector<int>> blocks;
  for (size_t i = 0; i < m; ++i) {
    int r = find(static_cast<int>(i));
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      roots.push_back(r);
      blocks.emplace_back();
      it = roots.end() - 1;
    }
    blocks[it - roots.begin()].push_back(static_cast<int>(i));
  }

  Decomposition<S> out;
  int total_rank = 0;
  for (const auto& block : blocks) {
    std::vector<int> bpos;  // positions within bidx spanned by this block
    for (int k = 0; k < d; ++k)
      if (std::find(block.begin(), block.end(), bidx[k]) != block.end()) bpos.push_back(k);
    std::vector<Vec<S>> basis;
    for (int k : bpos) basis.push_back(rays[bidx[k]]);
    std::vector<Vec<S>> sub;
    for (int i : block) {
      Vec<S> v;
      for (int k : bpos) v.push_back(coords[i][k]);
      sub.push_back(std::move(v));
    }
    total_rank += static_cast<int>(bpos.size());
    out.summands.push_back(ConeSummand<S>{
        block, std::move(basis), Cone<S>::from_rays(static_cast<int>(bpos.size()), sub)});
  }
  if (total_rank != d) throw Error("irreducible_decomposition: rank bookkeeping failed");
  return out;
}

// The projections id_i: identity on summand i, zero on the others, written in
// parent coordinates. Nondisturbing maps are exactly their nonnegative span.
template <class S>
std::vector<Mat<S>> nondisturbing_basis(const Cone<S>& c) {
  auto dec = irreducible_decomposition(c);
  std::vector<Vec<S>> cols;
  std::vector<std::pair<size_t, size_t>> ranges;  // column span per summand
  for (const auto& s : dec.summands) {
    ranges.emplace_back(cols.size(), cols.size() + s.basis.size());
    cols.insert(cols.end(), s.basis.begin(), s.basis.end());
  }
  Mat<S> b = Mat<S>::from_cols(cols);
  Mat<S> binv = *inverse(b);
  std::vector<Mat<S>> out;
  for (auto [lo, hi] : ranges) {
    Mat<S> diag(c.dim(), c.dim());
    for (size_t k = lo; k < hi; ++k) diag(static_cast<int>(k), static_cast<int>(k)) = S(1);
    out.push_back(b * diag * binv);
  }
  return out;
}

template <class S>
struct NondisturbVerdict {
  bool nondisturbing = false;
  std::vector<S> constants;  // one scaling per irreducible summand
  std::optional<Vec<S>> violating_ray;
};

// A map is nondisturbing iff it scales every extreme ray nonnegatively with a
// constant factor per irreducible summand.
template <class S>
NondisturbVerdict<S> is_nondisturbing(const Cone<S>& c, const Mat<S>& t, const Decomposition<S>& dec) {
  NondisturbVerdict<S> out;
  const auto& rays = c.rays();
  for (const auto& s : dec.summands) {
    bool have_const = false;
    S cs(0);
    for (int i : s.ray_indices) {
      const Vec<S>& r = rays[i];
      Vec<S> w = mul(t, r);
      int k = 0;
      if constexpr (!ScalarOps<S>::exact) {
        for (size_t j = 1; j < r.size(); ++j)
          if (ScalarOps<S>::abs(r[j]) > ScalarOps<S>::abs(r[k])) k = static_cast<int>(j);
      } else {
        while (sgn(r[k]) == 0) ++k;
      }
      S lam = w[k] / r[k];
      if (sgn(lam) < 0 || !vec_eq(w, vscale(lam, r))) {
        out.violating_ray = r;
        return out;
      }
      if (!have_const) {
        cs = lam;
        have_const = true;
      } else if (!scalar_eq(cs, lam)) {
        out.violating_ray = r;
        return out;
      }
    }
    out.constants.push_back(cs);
  }
  out.nondisturbing = true;
  return out;
}

template <class S>
NondisturbVerdict<S> is_nondisturbing(const Cone<S>& c, const Mat<S>& t) {
  return is_nondisturbing(c, t, irreducible_decomposition(c));
}

// Membership of t in the nonnegative span of the given maps (LP over matrix
// entries); the independent classifier behind the Theorem-1 agreement check.
template <class S>
bool in_nonneg_span(const std::vector<Mat<S>>& basis, const Mat<S>& t) {
  if (basis.empty()) return false;
  LinearProgram<S> lp(basis.size());
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) {
      Vec<S> row(basis.size());
      for (size_t k = 0; k < basis.size(); ++k) row[k] = basis[k](i, j);
      lp.add_eq(row, t(i, j));
    }
  return lp_feasible(lp).status == LPStatus::Optimal;
}

}  // namespace gptlab
