#pragma once
// Composites of state spaces on the flattened tensor space, row-major:
// index(i, j) = i*dimB + j, associative across nestings. The minimal cone is
// generated by product states; the maximal cone is cut out by product effects.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "gptlab/statespace.hpp"

namespace gptlab {

template <class S>
struct CompositeSpace {
  StateSpace<S> space;  // cone on the flattened tensor space
  StateSpace<S> factor_a, factor_b;
  std::vector<StateSpace<S>> parts;  // leaf factors in flattening order
  std::string kind;                  // "min" or "max"
};

namespace detail {

template <class S>
CompositeSpace<S> make_composite(const StateSpace<S>& a, const StateSpace<S>& b,
                                 std::vector<StateSpace<S>> parts, const std::string& kind) {
  int dim = a.dim() * b.dim();
  Cone<S> cone = [&] {
    if (kind == "min") {
      std::vector<Vec<S>> rays;
      for (const auto& ra : a.cone.rays())
        for (const auto& rb : b.cone.rays()) rays.push_back(tensor_vec(ra, rb));
      return Cone<S>::from_rays(dim, rays);
    }
    std::vector<Vec<S>> facets;
    for (const auto& fa : a.cone.facets())
      for (const auto& fb : b.cone.facets()) facets.push_back(tensor_vec(fa, fb));
    return Cone<S>::from_facets(dim, facets);
  }();
  std::string label = kind + "(" + a.label + ", " + b.label + ")";
  return CompositeSpace<S>{make_state_space(std::move(cone), tensor_vec(a.unit, b.unit), label),
                           a, b, std::move(parts), kind};
}

template <class S>
std::vector<StateSpace<S>> cons_parts(const StateSpace<S>& head, const std::vector<StateSpace<S>>& tail) {
  std::vector<StateSpace<S>> out{head};
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace detail

template <class S>
CompositeSpace<S> min_tensor(const StateSpace<S>& a, const StateSpace<S>& b) {
  return detail::make_composite(a, b, {a, b}, "min");
}

template <class S>
CompositeSpace<S> max_tensor(const StateSpace<S>& a, const StateSpace<S>& b) {
  return detail::make_composite(a, b, {a, b}, "max");
}

// Nested association, e.g. A (x)min (B (x)max C); the flattening index stays
// row-major over the leaf list.
template <class S>
CompositeSpace<S> min_tensor(const StateSpace<S>& a, const CompositeSpace<S>& bc) {
  return detail::make_composite(a, bc.space, detail::cons_parts(a, bc.parts), "min");
}

template <class S>
CompositeSpace<S> max_tensor(const StateSpace<S>& a, const CompositeSpace<S>& bc) {
  return detail::make_composite(a, bc.space, detail::cons_parts(a, bc.parts), "max");
}

// A bipartite state is the bilinear form omega(a, b) = a^T m b on A* x B*.
template <class S>
struct BipartiteState {
  Mat<S> m;
};

template <class S>
BipartiteState<S> bipartite_from_vec(const Vec<S>& v, int dim_a, int dim_b) {
  return BipartiteState<S>{mat_from_vec(v, dim_a, dim_b)};
}

template <class S>
Vec<S> bipartite_to_vec(const BipartiteState<S>& w) {
  return vec_from_mat(w.m);
}

template <class S>
S bilinear(const BipartiteState<S>& w, const Vec<S>& a, const Vec<S>& b) {
  return dot(a, mul(w.m, b));
}

// Positivity on all product effects; extreme dual rays suffice by bilinearity.
template <class S>
bool positive_on_products(const BipartiteState<S>& w, const StateSpace<S>& a, const StateSpace<S>& b) {
  for (const auto& fa : a.cone.facets())
    for (const auto& fb : b.cone.facets())
      if (sgn(bilinear(w, fa, fb)) < 0) return false;
  return true;
}

template <class S>
bool is_normalized(const BipartiteState<S>& w, const StateSpace<S>& a, const StateSpace<S>& b) {
  return scalar_eq(bilinear(w, a.unit, b.unit), S(1));
}

template <class S>
Vec<S> marginal_a(const BipartiteState<S>& w, const StateSpace<S>& b) {
  return mul(w.m, b.unit);
}

template <class S>
Vec<S> marginal_b(const BipartiteState<S>& w, const StateSpace<S>& a) {
  return mul(w.m.transpose(), a.unit);
}

// Conditioning on an effect of the A factor: returns the normalized state of
// B and the outcome probability; zero probability yields the zero state.
template <class S>
std::pair<Vec<S>, S> conditional_on_a(const BipartiteState<S>& w, const Vec<S>& effect_a,
                                      const StateSpace<S>& b) {
  S p = dot(effect_a, mul(w.m, b.unit));
  if (sgn(p) == 0) return {Vec<S>(w.m.cols(), S(0)), S(0)};
  return {vscale(S(1) / p, mul(w.m.transpose(), effect_a)), p};
}

template <class S>
std::pair<Vec<S>, S> conditional_on_b(const BipartiteState<S>& w, const Vec<S>& effect_b,
                                      const StateSpace<S>& a) {
  S p = dot(a.unit, mul(w.m, effect_b));
  if (sgn(p) == 0) return {Vec<S>(w.m.rows(), S(0)), S(0)};
  return {vscale(S(1) / p, mul(w.m, effect_b)), p};
}

// omega_hat : A* -> B, a |-> omega(a, -); the un-normalized conditional.
template <class S>
Mat<S> omega_hat(const BipartiteState<S>& w) {
  return w.m.transpose();
}

// f_hat : A -> B* for an effect f on the composite, f_hat(x)(y) = f(x (x) y).
template <class S>
Mat<S> f_hat(const Vec<S>& f, int dim_a, int dim_b) {
  return mat_from_vec(f, dim_a, dim_b).transpose();
}

template <class S>
struct SeparabilityVerdict {
  bool separable = false;
  // Convex weights over normalized vertex products, aligned with `support`.
  std::vector<S> weights;
  std::vector<std::pair<int, int>> support;
  Vec<S> witness;  // nonnegative on every product state, negative on the input
};

template <class S>
SeparabilityVerdict<S> is_separable(const StateSpace<S>& a, const StateSpace<S>& b, const Vec<S>& v) {
  std::vector<Vec<S>> products;
  std::vector<std::pair<int, int>> idx;
  for (size_t i = 0; i < a.omega_vertices.size(); ++i)
    for (size_t j = 0; j < b.omega_vertices.size(); ++j) {
      products.push_back(tensor_vec(a.omega_vertices[i], b.omega_vertices[j]));
      idx.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  int dim = a.dim() * b.dim();
  LinearProgram<S> lp(products.size());
  for (int d = 0; d < dim; ++d) {
    Vec<S> row(products.size());
    for (size_t k = 0; k < products.size(); ++k) row[k] = products[k][d];
    lp.add_eq(row, v[d]);
  }
  auto r = lp_feasible(lp);
  SeparabilityVerdict<S> out;
  if (r.status == LPStatus::Optimal) {
    out.separable = true;
    for (size_t k = 0; k < products.size(); ++k)
      if (sgn(r.x[k]) != 0) {
        out.weights.push_back(r.x[k]);
        out.support.push_back(idx[k]);
      }
  } else {
    out.witness = vscale(S(-1), r.y_eq);
  }
  return out;
}

template <class S>
SeparabilityVerdict<S> is_separable(const CompositeSpace<S>& c, const Vec<S>& v) {
  return is_separable(c.factor_a, c.factor_b, v);
}

// Sandwich test: the minimal cone embeds in the candidate, the candidate
// obeys every product-effect inequality of the maximal cone.
template <class S>
bool is_composite(const Cone<S>& c, const StateSpace<S>& a, const StateSpace<S>& b) {
  if (c.dim() != a.dim() * b.dim()) return false;
  for (const auto& ra : a.cone.rays())
    for (const auto& rb : b.cone.rays())
      if (!c.contains(tensor_vec(ra, rb)).inside) return false;
  for (const auto& r : c.rays())
    for (const auto& fa : a.cone.facets())
      for (const auto& fb : b.cone.facets())
        if (sgn(dot(tensor_vec(fa, fb), r)) < 0) return false;
  return true;
}

namespace detail {

// Contracts the out-parts of a flattened multipartite vector against fixed
// functionals, leaving a flattened vector over the kept parts.
template <class S>
Vec<S> contract_parts(const Vec<S>& v, const std::vector<int>& dims, const std::vector<int>& keep,
                      const std::vector<Vec<S>>& out_functionals, const std::vector<int>& out) {
  int keep_dim = 1;
  for (int p : keep) keep_dim *= dims[p];
  Vec<S> res(keep_dim, S(0));
  std::vector<int> idx(dims.size(), 0);
  size_t total = v.size();
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int p = static_cast<int>(dims.size()) - 1; p >= 0; --p) {
      idx[p] = static_cast<int>(rem % dims[p]);
      rem /= dims[p];
    }
    S coeff = v[flat];
    if (sgn(coeff) == 0) continue;
    for (size_t q = 0; q < out.size(); ++q) coeff = coeff * out_functionals[q][idx[out[q]]];
    if (sgn(coeff) == 0) continue;
    int kflat = 0;
    for (int p : keep) kflat = kflat * dims[p] + idx[p];
    res[kflat] = res[kflat] + coeff;
  }
  return res;
}

}  // namespace detail

// States reachable by conditioning on product effects of the parts outside
// `keep`; the result is the conditional state space of the kept parts.
template <class S>
StateSpace<S> conditional_state_space(const CompositeSpace<S>& c, const std::vector<int>& keep) {
  size_t nparts = c.parts.size();
  std::vector<bool> kept(nparts, false);
  for (int p : keep) {
    if (p < 0 || p >= static_cast<int>(nparts) || kept[p]) throw UsageError("conditional_state_space: bad part subset");
    kept[p] = true;
  }
  std::vector<int> out;
  for (size_t p = 0; p < nparts; ++p)
    if (!kept[p]) out.push_back(static_cast<int>(p));
  if (keep.empty() || out.empty()) throw UsageError("conditional_state_space: need a proper nonempty part subset");

  std::vector<int> dims;
  for (const auto& part : c.parts) dims.push_back(part.dim());
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());

  // One extreme effect per out-part, all combinations.
  std::vector<std::vector<Vec<S>>> choices;
  for (int p : out) choices.push_back(c.parts[p].cone.facets());
  std::vector<Vec<S>> gens;
  std::vector<size_t> pick(out.size(), 0);
  for (const auto& ray : c.space.cone.rays()) {
    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      std::vector<Vec<S>> funcs;
      for (size_t q = 0; q < out.size(); ++q) funcs.push_back(choices[q][pick[q]]);
      Vec<S> g = detail::contract_parts(ray, dims, keep_sorted, funcs, out);
      if (!is_zero_vec(g)) gens.push_back(std::move(g));
      size_t q = 0;
      for (; q < out.size(); ++q) {
        if (++pick[q] < choices[q].size()) break;
        pick[q] = 0;
      }
      if (q == out.size()) break;
    }
  }

  int keep_dim = 1;
  Vec<S> unit{S(1)};
  for (int p : keep_sorted) {
    keep_dim *= dims[p];
    unit = tensor_vec(unit, c.parts[p].unit);
  }
  std::string label = "cond(" + c.space.label + ")";
  return make_state_space(Cone<S>::from_rays(keep_dim, gens), std::move(unit), std::move(label));
}

}  // namespace gptlab
