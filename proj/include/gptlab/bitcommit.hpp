#pragma once
// Bit commitment without entanglement: a state with two disjoint convex
// decompositions into exposed extreme points gives a perfectly sound,
// perfectly hiding, exponentially binding protocol.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "gptlab/statespace.hpp"

namespace gptlab {

template <class S>
struct Exposer {
  Vec<S> effect;  // value 1 on the vertex, at most 1 - gap elsewhere
  S gap;
};

// Max-gap effect exposing one extreme point. The unit effect is always
// feasible with gap 0, so the program is feasible and bounded; a zero optimum
// means the vertex is not exposed.
template <class S>
std::optional<Exposer<S>> exposing_effect(const StateSpace<S>& a, const Vec<S>& vertex) {
  const auto& verts = a.omega_vertices;
  if (std::none_of(verts.begin(), verts.end(), [&](const Vec<S>& v) { return vec_eq(v, vertex); }))
    throw UsageError("exposing_effect: not an extreme point of the state space");
  int d = a.dim();
  // variables: effect entries (free) then the gap
  LinearProgram<S> lp(d + 1);
  for (int k = 0; k < d; ++k) lp.nonneg[k] = false;
  Vec<S> row(d + 1, S(0));
  for (int k = 0; k < d; ++k) row[k] = vertex[k];
  lp.add_eq(row, S(1));
  for (const auto& v : verts) {
    if (vec_eq(v, vertex)) continue;
    Vec<S> r(d + 1, S(0));
    for (int k = 0; k < d; ++k) r[k] = v[k];
    r[d] = S(1);
    lp.add_le(r, S(1));  // a(v) + gap <= 1
  }
  for (const auto& r : a.cone.rays()) {
    Vec<S> lo(d + 1, S(0)), hi(d + 1, S(0));
    for (int k = 0; k < d; ++k) {
      lo[k] = r[k];
      hi[k] = -r[k];
    }
    lp.add_ge(lo, S(0));
    lp.add_ge(hi, -dot(a.unit, r));  // a(r) <= u(r)
  }
  Vec<S> cap(d + 1, S(0));
  cap[d] = S(1);
  lp.add_le(cap, S(1));  // keeps the program bounded even with no rival vertex
  Vec<S> obj(d + 1, S(0));
  obj[d] = S(1);
  auto res = lp_maximize(lp, obj);
  if (res.status != LPStatus::Optimal) throw Error("exposing_effect: unexpected LP status");
  if (sgn(res.x[d]) <= 0) return std::nullopt;
  return Exposer<S>{Vec<S>(res.x.begin(), res.x.begin() + d), res.x[d]};
}

template <class S>
struct WeightedState {
  S p;
  Vec<S> state;
};

template <class S>
struct CommitmentScheme {
  StateSpace<S> space;
  Vec<S> omega;  // the doubly decomposed state
  std::vector<WeightedState<S>> decomp0, decomp1;
  std::vector<Vec<S>> exposers0, exposers1;
  // Bob's two-outcome verification observables (exposer, unit - exposer)
  std::vector<std::vector<Vec<S>>> observables0, observables1;

  const std::vector<WeightedState<S>>& decomp(int b) const { return b ? decomp1 : decomp0; }
  const std::vector<Vec<S>>& exposers(int b) const { return b ? exposers1 : exposers0; }
  size_t cardinality() const { return decomp0.size() + decomp1.size(); }
};

namespace detail {

// Minimal dependent subsets have a one-dimensional kernel with full support.
template <class S>
std::optional<Vec<S>> circuit_dependence(const std::vector<Vec<S>>& pts) {
  Mat<S> m = Mat<S>::from_cols(pts);
  auto ker = kernel_basis(m);
  if (ker.size() != 1) return std::nullopt;
  for (const S& c : ker[0])
    if (sgn(c) == 0) return std::nullopt;
  return ker[0];
}

}  // namespace detail

// Finds a state with two disjoint convex decompositions by scanning minimal
// affinely dependent vertex subsets in ascending size; the sign split of the
// dependence is the Radon partition. Simplices have no dependent subsets.
template <class S>
std::optional<CommitmentScheme<S>> find_double_decomposition(const StateSpace<S>& a,
                                                             bool minimize = true) {
  (void)minimize;  // ascending-size scan already returns a minimum-cardinality scheme
  const auto& verts = a.omega_vertices;
  size_t m = verts.size();
  int d = a.dim();
  for (size_t s = 3; s <= std::min(m, static_cast<size_t>(d) + 1); ++s) {
    std::vector<int> comb(s);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      std::vector<Vec<S>> pts;
      for (int i : comb) pts.push_back(verts[i]);
      auto dep = detail::circuit_dependence(pts);
      if (dep) {
        Vec<S> c = *dep;
        if (sgn(c[0]) < 0)
          for (S& x : c) x = -x;
        CommitmentScheme<S> sch{a, Vec<S>{}, {}, {}, {}, {}, {}, {}};
        S total(0);
        for (size_t k = 0; k < s; ++k)
          if (sgn(c[k]) > 0) total += c[k];
        sch.omega = Vec<S>(d, S(0));
        for (size_t k = 0; k < s; ++k) {
          S w = c[k] / total;
          if (sgn(c[k]) > 0) {
            sch.decomp0.push_back({w, pts[k]});
            sch.omega = vadd(sch.omega, vscale(w, pts[k]));
          } else {
            sch.decomp1.push_back({-w, pts[k]});
          }
        }
        for (int b = 0; b < 2; ++b)
          for (const auto& ws : (b ? sch.decomp1 : sch.decomp0)) {
            auto ex = exposing_effect(a, ws.state);
            if (!ex) throw Error("double decomposition: vertex unexpectedly not exposed");
            auto& exps = b ? sch.exposers1 : sch.exposers0;
            auto& obs = b ? sch.observables1 : sch.observables0;
            exps.push_back(ex->effect);
            obs.push_back({ex->effect, vsub(a.unit, ex->effect)});
          }

        // construction-time invariants, asserted rather than assumed
        Vec<S> other(d, S(0));
        S p0(0), p1(0);
        for (const auto& ws : sch.decomp0) p0 += ws.p;
        for (const auto& ws : sch.decomp1) {
          other = vadd(other, vscale(ws.p, ws.state));
          p1 += ws.p;
        }
        if (!vec_eq(sch.omega, other) || !scalar_eq(p0, S(1)) || !scalar_eq(p1, S(1)))
          throw Error("double decomposition: mixture bookkeeping failed");
        for (const auto& w0 : sch.decomp0)
          for (const auto& w1 : sch.decomp1)
            if (vec_eq(w0.state, w1.state)) throw Error("double decomposition: sets not disjoint");
        return sch;
      }
      int i = static_cast<int>(s) - 1;
      while (i >= 0 && comb[i] == static_cast<int>(m - s) + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (size_t j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  return std::nullopt;
}

struct Transcript {
  std::vector<int> x;  // indices sampled from p^b
  bool accept = false;
  int revealed = 0;
};

namespace detail {

inline double as_double(double x) { return x; }
inline double as_double(const Rat& x) { return x.convert_to<double>(); }

}  // namespace detail

// Honest commitment round: sample the index string, send the matching product
// state, reveal, and let Bob run each per-subsystem verification observable.
template <class S>
Transcript run_honest(const CommitmentScheme<S>& sch, int b, int n, std::uint64_t seed) {
  if (b != 0 && b != 1) throw UsageError("run_honest: bit must be 0 or 1");
  if (n < 1) throw UsageError("run_honest: need n >= 1");
  const auto& dec = sch.decomp(b);
  const auto& exps = sch.exposers(b);
  std::vector<double> cum;
  double acc = 0;
  for (const auto& ws : dec) {
    acc += detail::as_double(ws.p);
    cum.push_back(acc);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Transcript t;
  t.revealed = b;
  t.accept = true;
  for (int i = 0; i < n; ++i) {
    double r = uni(rng);
    size_t k = 0;
    while (k + 1 < cum.size() && r >= cum[k]) ++k;
    t.x.push_back(static_cast<int>(k));
    double hit = detail::as_double(dot(exps[k], dec[k].state));
    if (!(uni(rng) < hit)) t.accept = false;
  }
  return t;
}

// Exact acceptance probability of the honest protocol: the per-subsystem
// average of a_i(mu_i), raised to the n-th power.
template <class S>
S honest_acceptance_exact(const CommitmentScheme<S>& sch, int b, int n) {
  const auto& dec = sch.decomp(b);
  const auto& exps = sch.exposers(b);
  S per(0);
  for (size_t k = 0; k < dec.size(); ++k) per += dec[k].p * dot(exps[k], dec[k].state);
  S out(1);
  for (int i = 0; i < n; ++i) out *= per;
  return out;
}

template <class S>
struct HidingVerdict {
  bool hiding = false;
  std::optional<size_t> differing_entry;  // first index where the n-fold tensors differ
};

// Expands both committed mixtures of n-fold product states string by string
// and compares them entrywise against the n-fold power of omega.
template <class S>
HidingVerdict<S> hiding_check(const CommitmentScheme<S>& sch, int n) {
  if (n < 1) throw UsageError("hiding_check: need n >= 1");
  Vec<S> target{S(1)};
  for (int i = 0; i < n; ++i) target = tensor_vec(target, sch.omega);
  for (int b = 0; b < 2; ++b) {
    const auto& dec = sch.decomp(b);
    Vec<S> mix(target.size(), S(0));
    std::vector<size_t> idx(n, 0);
    while (true) {
      S p(1);
      Vec<S> prod{S(1)};
      for (int i = 0; i < n; ++i) {
        p *= dec[idx[i]].p;
        prod = tensor_vec(prod, dec[idx[i]].state);
      }
      mix = vadd(mix, vscale(p, prod));
      int i = n - 1;
      while (i >= 0 && idx[i] + 1 == dec.size()) idx[i--] = 0;
      if (i < 0) break;
      ++idx[i];
    }
    for (size_t e = 0; e < target.size(); ++e)
      if (!scalar_eq(mix[e], target[e])) return {false, e};
  }
  return {true, std::nullopt};
}

// Optimal product-state cheat: commit copies of one state and later claim the
// best index string for whichever bit is revealed. The simultaneous-opening
// value per subsystem is max over extreme points of min over b of
// max_i a_i^b(v); extreme points suffice because the n-run advantage
// s_0(sigma)^n + s_1(sigma)^n is convex in sigma, so its maximum over the
// state space is attained at a vertex.
template <class S>
S cheat_binding_base(const CommitmentScheme<S>& sch) {
  S best(0);
  for (const auto& v : sch.space.omega_vertices) {
    S worst(-1);
    bool first_b = true;
    for (int b = 0; b < 2; ++b) {
      S sb(0);
      for (const auto& a : sch.exposers(b)) sb = std::max(sb, dot(a, v));
      if (first_b || sb < worst) worst = sb;
      first_b = false;
    }
    best = std::max(best, worst);
  }
  return best;
}

template <class S>
S cheat_binding(const CommitmentScheme<S>& sch, int n) {
  if (n < 1) throw UsageError("cheat_binding: need n >= 1");
  S base = cheat_binding_base(sch);
  S out(1);
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

}  // namespace gptlab
