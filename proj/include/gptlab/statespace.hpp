#pragma once
// Abstract state spaces: an ordered vector space whose positive cone is
// generating and pointed, with a strictly positive order unit u selecting the
// normalized states Omega = {x in cone : u(x) = 1}.

#include <bit>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gptlab/cone.hpp"
#include "gptlab/errors.hpp"
#include "gptlab/lp.hpp"

namespace gptlab {

template <class S>
struct StateSpace {
  Cone<S> cone;
  Vec<S> unit;                         // order unit, a functional on the space
  std::vector<Vec<S>> omega_vertices;  // cone rays rescaled so unit(v) = 1
  std::string label;

  int dim() const { return cone.dim(); }
};

template <class S>
StateSpace<S> make_state_space(Cone<S> cone, Vec<S> unit, std::string label) {
  StateSpace<S> a{std::move(cone), std::move(unit), {}, std::move(label)};
  if (static_cast<int>(a.unit.size()) != a.dim()) throw UsageError("state space: unit dimension mismatch");
  for (const Vec<S>& r : a.cone.rays()) {
    S h = dot(a.unit, r);
    if (sgn(h) <= 0) throw NotPositiveError("order unit is not strictly positive on the cone: " + a.label);
    a.omega_vertices.push_back(vscale(S(1) / h, r));
  }
  return a;
}

template <class S>
Vec<S> barycenter(const StateSpace<S>& a) {
  Vec<S> c(a.dim(), S(0));
  for (const auto& v : a.omega_vertices) c = vadd(c, v);
  return vscale(S(1) / S(static_cast<int>(a.omega_vertices.size())), c);
}

template <class S>
StateSpace<S> make_classical(int n) {
  if (n < 1) throw UsageError("classical(n) needs n >= 1");
  std::vector<Vec<S>> rays;
  for (int i = 0; i < n; ++i) {
    Vec<S> e(n, S(0));
    e[i] = S(1);
    rays.push_back(std::move(e));
  }
  return make_state_space(Cone<S>::from_rays(n, rays), Vec<S>(n, S(1)), "classical(" + std::to_string(n) + ")");
}

// Omega is a regular n-gon at unit height, vertices in counterclockwise order.
// Exact frames for n in {3,4,6} are invertible linear images of the regular
// polygon (so the same space up to order isomorphism) with rational vertices;
// other n have irrational vertex coordinates and need floating mode.
template <class S>
StateSpace<S> make_polygon(int n) {
  if (n < 3) throw UsageError("polygon(n) needs n >= 3");
  std::vector<Vec<S>> rays;
  if constexpr (ScalarOps<S>::exact) {
    std::vector<std::pair<int, int>> pts;
    switch (n) {
      case 3: pts = {{2, 0}, {-1, 1}, {-1, -1}}; break;
      case 4: pts = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}; break;
      case 6: pts = {{2, 0}, {1, 1}, {-1, 1}, {-2, 0}, {-1, -1}, {1, -1}}; break;
      default: throw UsageError("exact polygon(n) exists only for n in {3,4,6}; use floating mode");
    }
    for (auto [x, y] : pts) rays.push_back({S(x), S(y), S(1)});
  } else {
    for (int k = 0; k < n; ++k)
      rays.push_back({std::cos(2 * M_PI * k / n), std::sin(2 * M_PI * k / n), 1.0});
  }
  return make_state_space(Cone<S>::from_rays(3, rays), Vec<S>{S(0), S(0), S(1)},
                          "polygon(" + std::to_string(n) + ")");
}

// Base norm: min u(x) + u(y) over decompositions v = x - y with x, y in the
// cone. Equals u(v) on the cone itself.
template <class S>
S base_norm(const StateSpace<S>& a, const Vec<S>& v) {
  if (static_cast<int>(v.size()) != a.dim()) throw UsageError("base_norm: dimension mismatch");
  const auto& rays = a.cone.rays();
  size_t m = rays.size();
  LinearProgram<S> lp(2 * m);
  for (int d = 0; d < a.dim(); ++d) {
    Vec<S> row(2 * m, S(0));
    for (size_t i = 0; i < m; ++i) {
      row[i] = rays[i][d];
      row[m + i] = -rays[i][d];
    }
    lp.add_eq(row, v[d]);
  }
  Vec<S> c(2 * m, S(0));
  for (size_t i = 0; i < m; ++i) c[i] = c[m + i] = dot(a.unit, rays[i]);
  auto r = lp_minimize(lp, c);
  if (r.status != LPStatus::Optimal) throw Error("base_norm: decomposition LP failed");
  return r.value;
}

// Effects evaluate in [0, 1] on Omega; checking the vertices suffices since
// Omega is their convex hull.
template <class S>
bool is_effect(const StateSpace<S>& a, const Vec<S>& f) {
  for (const auto& w : a.omega_vertices) {
    S p = dot(f, w);
    if (sgn(p) < 0 || sgn(p - S(1)) > 0) return false;
  }
  return true;
}

template <class S>
struct ObservableCheck {
  bool ok = false;
  std::string reason;
  Vec<S> residual;  // unit minus the effect sum
};

template <class S>
ObservableCheck<S> validate_observable(const StateSpace<S>& a, const std::vector<Vec<S>>& effects) {
  ObservableCheck<S> out;
  out.residual = a.unit;
  if (effects.empty()) {
    out.reason = "observable has no effects";
    return out;
  }
  for (const auto& f : effects) {
    if (!is_effect(a, f)) {
      out.reason = "list entry is not an effect";
      return out;
    }
    out.residual = vsub(out.residual, f);
  }
  if (!is_zero_vec(out.residual)) {
    out.reason = "effects do not sum to the unit";
    return out;
  }
  out.ok = true;
  return out;
}

// Positivity on extreme rays extends to the whole cone by convexity.
template <class S>
bool is_positive_map(const Mat<S>& t, const StateSpace<S>& a, const StateSpace<S>& b) {
  for (const auto& r : a.cone.rays())
    if (!b.cone.contains(mul(t, r)).inside) return false;
  return true;
}

// For positive maps the base norm of the image is u_B, so contractivity
// reduces to u_B(t(w)) <= 1 on Omega's vertices.
template <class S>
bool is_norm_contractive(const Mat<S>& t, const StateSpace<S>& a, const StateSpace<S>& b) {
  for (const auto& w : a.omega_vertices)
    if (sgn(dot(b.unit, mul(t, w)) - S(1)) > 0) return false;
  return true;
}

// The dual cone carries no canonical order unit; the default is evaluation at
// the barycenter of Omega's vertices, an interior point of the primal cone.
// Weak self-duality is a cone property and does not depend on this choice.
template <class S>
StateSpace<S> dual_space_with_unit(const StateSpace<S>& a, Vec<S> unit) {
  return make_state_space(dual_cone(a.cone), std::move(unit), a.label + "*");
}

template <class S>
StateSpace<S> dual_space(const StateSpace<S>& a) {
  return dual_space_with_unit(a, barycenter(a));
}

namespace detail {

// Facet incidence and ray adjacency. Extreme rays are adjacent iff no third
// ray's incident-facet set contains the facets tight at both (combinatorial
// adjacency, exact for pointed full-dimensional polyhedral cones).
struct RayGraph {
  std::vector<Bits> zero;
  std::vector<size_t> degree;
  std::vector<std::vector<bool>> adj;
};

template <class S>
RayGraph ray_graph(const Cone<S>& c) {
  const auto& rays = c.rays();
  const auto& facets = c.facets();
  size_t m = rays.size(), nf = facets.size();
  RayGraph g;
  g.zero.resize(m);
  g.degree.assign(m, 0);
  for (size_t i = 0; i < m; ++i) {
    bits_resize(g.zero[i], nf);
    for (size_t f = 0; f < nf; ++f)
      if (sgn(dot(facets[f], rays[i])) == 0) bits_set(g.zero[i], f);
    for (std::uint64_t w : g.zero[i]) g.degree[i] += std::popcount(w);
  }
  g.adj.assign(m, std::vector<bool>(m, false));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      Bits meet = bits_and(g.zero[i], g.zero[j]);
      bool adjacent = true;
      for (size_t k = 0; k < m && adjacent; ++k)
        if (k != i && k != j && bits_subset(meet, g.zero[k])) adjacent = false;
      g.adj[i][j] = g.adj[j][i] = adjacent;
    }
  return g;
}

// Given a ray bijection, solve T r_i = lambda_i s_{sigma(i)} for T and all
// lambda_i >= 1 jointly (homogeneous kernel + LP over its coordinates).
template <class S>
std::optional<Mat<S>> iso_from_bijection(const Cone<S>& a, const Cone<S>& b, const std::vector<int>& sigma) {
  int d = a.dim();
  size_t m = a.rays().size();
  size_t cols = static_cast<size_t>(d) * d + m;
  Mat<S> sys(m * d, cols);
  for (size_t i = 0; i < m; ++i) {
    const Vec<S>& r = a.rays()[i];
    const Vec<S>& s = b.rays()[sigma[i]];
    for (int k = 0; k < d; ++k) {
      size_t row = i * d + k;
      for (int l = 0; l < d; ++l) sys(row, static_cast<size_t>(k) * d + l) = r[l];
      sys(row, static_cast<size_t>(d) * d + i) = -s[k];
    }
  }
  auto kern = kernel_basis(sys);
  if (kern.empty()) return std::nullopt;
  LinearProgram<S> lp(kern.size());
  lp.nonneg.assign(kern.size(), false);
  for (size_t i = 0; i < m; ++i) {
    Vec<S> row(kern.size());
    for (size_t j = 0; j < kern.size(); ++j) row[j] = kern[j][static_cast<size_t>(d) * d + i];
    lp.add_ge(row, S(1));
  }
  auto res = lp_feasible(lp);
  if (res.status != LPStatus::Optimal) return std::nullopt;
  Mat<S> t(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      S v(0);
      for (size_t j = 0; j < kern.size(); ++j)
        v = v + res.x[j] * kern[j][static_cast<size_t>(k) * d + l];
      t(k, l) = v;
    }
  if (rank(t) != d) return std::nullopt;
  return t;
}

}  // namespace detail

// Searches for an invertible linear map carrying the first cone exactly onto
// the second. Complete for polyhedral cones: any order isomorphism must map
// extreme rays to extreme rays and preserve facet incidence, so backtracking
// over adjacency-respecting ray bijections covers all candidates.
template <class S>
std::optional<Mat<S>> cone_order_isomorphism(const Cone<S>& a, const Cone<S>& b, size_t budget = 12) {
  if (a.dim() != b.dim()) return std::nullopt;
  size_t m = a.rays().size();
  if (b.rays().size() != m) return std::nullopt;
  if (m > budget)
    throw SearchBudgetExceededError("order-isomorphism search over " + std::to_string(m) +
                                    " rays exceeds budget " + std::to_string(budget));
  if (a.facets().size() != b.facets().size()) return std::nullopt;
  detail::RayGraph ga = detail::ray_graph(a), gb = detail::ray_graph(b);

  std::vector<int> sigma(m, -1);
  std::vector<bool> used(m, false);
  std::optional<Mat<S>> found;
  auto rec = [&](auto&& self, size_t i) -> bool {
    if (i == m) {
      found = detail::iso_from_bijection(a, b, sigma);
      return found.has_value();
    }
    for (size_t j = 0; j < m; ++j) {
      if (used[j] || ga.degree[i] != gb.degree[j]) continue;
      bool ok = true;
      for (size_t k = 0; k < i && ok; ++k)
        if (ga.adj[i][k] != gb.adj[j][sigma[k]]) ok = false;
      if (!ok) continue;
      sigma[i] = static_cast<int>(j);
      used[j] = true;
      if (self(self, i + 1)) return true;
      used[j] = false;
      sigma[i] = -1;
    }
    return false;
  };
  rec(rec, 0);
  return found;
}

// Enumerates every order isomorphism from the first cone onto the second, one
// per ray bijection that extends linearly. The family is finite and complete
// for polyhedral cones by the argument above.
template <class S>
std::vector<Mat<S>> cone_order_isomorphisms(const Cone<S>& a, const Cone<S>& b, size_t budget = 12) {
  std::vector<Mat<S>> out;
  if (a.dim() != b.dim()) return out;
  size_t m = a.rays().size();
  if (b.rays().size() != m) return out;
  if (m > budget)
    throw SearchBudgetExceededError("order-isomorphism enumeration over " + std::to_string(m) +
                                    " rays exceeds budget " + std::to_string(budget));
  if (a.facets().size() != b.facets().size()) return out;
  detail::RayGraph ga = detail::ray_graph(a), gb = detail::ray_graph(b);

  std::vector<int> sigma(m, -1);
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == m) {
      if (std::optional<Mat<S>> iso = detail::iso_from_bijection(a, b, sigma)) out.push_back(*iso);
      return;
    }
    for (size_t j = 0; j < m; ++j) {
      if (used[j] || ga.degree[i] != gb.degree[j]) continue;
      bool ok = true;
      for (size_t k = 0; k < i && ok; ++k)
        if (ga.adj[i][k] != gb.adj[j][sigma[k]]) ok = false;
      if (!ok) continue;
      sigma[i] = static_cast<int>(j);
      used[j] = true;
      self(self, i + 1);
      used[j] = false;
      sigma[i] = -1;
    }
  };
  rec(rec, 0);
  return out;
}

template <class S>
std::optional<Mat<S>> find_order_isomorphism(const StateSpace<S>& a, const StateSpace<S>& b,
                                             size_t budget = 12) {
  return cone_order_isomorphism(a.cone, b.cone, budget);
}

template <class S>
struct SelfDualityVerdict {
  bool weakly_self_dual = false;
  std::optional<Mat<S>> iso;  // maps the state cone onto its dual cone
};

template <class S>
SelfDualityVerdict<S> is_weakly_self_dual(const StateSpace<S>& a, size_t budget = 12) {
  SelfDualityVerdict<S> v;
  v.iso = cone_order_isomorphism(a.cone, dual_cone(a.cone), budget);
  v.weakly_self_dual = v.iso.has_value();
  return v;
}

}  // namespace gptlab
