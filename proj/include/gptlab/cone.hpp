#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "gptlab/lp.hpp"

namespace gptlab {

// Positive-scale canonical form: exact rays become integer vectors with gcd 1,
// floating rays are scaled so the largest |coordinate| is 1.
template <class S>
Vec<S> canonical_ray(Vec<S> v) {
  if constexpr (ScalarOps<S>::exact) {
    BigInt l(1);
    for (const S& x : v) l = lcm(l, denominator(x));
    BigInt g(0);
    for (S& x : v) {
      x *= Rat(l);
      g = gcd(g, numerator(x));
    }
    if (g != 0)
      for (S& x : v) x /= Rat(g);
  } else {
    double m = 0;
    for (const S& x : v) m = std::max(m, ScalarOps<S>::abs(x));
    if (m > 0)
      for (S& x : v) x /= m;
  }
  return v;
}

template <class S>
std::vector<Vec<S>> canonical_dedupe(const std::vector<Vec<S>>& vecs) {
  std::vector<Vec<S>> out;
  for (const Vec<S>& v : vecs) {
    if (is_zero_vec(v)) continue;
    Vec<S> c = canonical_ray(v);
    bool seen = false;
    for (const Vec<S>& o : out)
      if (vec_eq(o, c)) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(std::move(c));
  }
  return out;
}

// Unordered equality of canonicalized ray sets.
template <class S>
bool ray_sets_equal(const std::vector<Vec<S>>& a, const std::vector<Vec<S>>& b) {
  std::vector<Vec<S>> ca = canonical_dedupe(a), cb = canonical_dedupe(b);
  if (ca.size() != cb.size()) return false;
  std::vector<bool> used(cb.size(), false);
  for (const Vec<S>& v : ca) {
    bool found = false;
    for (size_t j = 0; j < cb.size(); ++j) {
      if (!used[j] && vec_eq(v, cb[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace detail {

using Bits = std::vector<std::uint64_t>;

inline void bits_resize(Bits& b, size_t nbits) { b.assign((nbits + 63) / 64, 0); }
inline void bits_set(Bits& b, size_t i) { b[i / 64] |= (std::uint64_t{1} << (i % 64)); }
inline bool bits_subset(const Bits& a, const Bits& b) {
  for (size_t k = 0; k < a.size(); ++k)
    if ((a[k] & ~b[k]) != 0) return false;
  return true;
}
inline Bits bits_and(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = a[k] & b[k];
  return r;
}

}  // namespace detail

// Double description: extreme rays of {x : f.x >= 0 for every f in halfspaces}.
// Throws DegenerateError unless the result is pointed and full-dimensional.
template <class S>
std::vector<Vec<S>> extreme_rays(int dim, const std::vector<Vec<S>>& halfspaces_in) {
  std::vector<Vec<S>> hs = canonical_dedupe(halfspaces_in);
  if (rank_of_rows(hs) < dim)
    throw DegenerateError("halfspace system has rank below the ambient dimension (cone contains a line)");
  std::vector<int> base = independent_subset(hs, dim);
  Mat<S> m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = hs[base[i]][j];
  Mat<S> minv = *inverse(m);

  size_t nh = hs.size();
  std::vector<int> order = base;
  for (size_t i = 0; i < nh; ++i)
    if (std::find(base.begin(), base.end(), static_cast<int>(i)) == base.end())
      order.push_back(static_cast<int>(i));

  struct Ray {
    Vec<S> v;
    detail::Bits zero;
  };
  std::vector<Ray> rays;
  auto zero_set = [&](const Vec<S>& v, size_t processed) {
    detail::Bits z;
    detail::bits_resize(z, nh);
    for (size_t k = 0; k < processed; ++k)
      if (ScalarOps<S>::is_zero(dot(hs[order[k]], v))) detail::bits_set(z, k);
    return z;
  };
  for (int j = 0; j < dim; ++j) {
    Ray r{canonical_ray(minv.col(j)), {}};
    r.zero = zero_set(r.v, dim);
    rays.push_back(std::move(r));
  }

  for (size_t step = dim; step < nh; ++step) {
    const Vec<S>& f = hs[order[step]];
    std::vector<int> pos, zer, neg;
    std::vector<S> val(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) {
      val[i] = dot(f, rays[i].v);
      int s = sgn(val[i]);
      (s > 0 ? pos : (s < 0 ? neg : zer)).push_back(static_cast<int>(i));
    }
    if (neg.empty()) {
      for (Ray& r : rays) r.zero = zero_set(r.v, step + 1);
      continue;
    }
    std::vector<Ray> next;
    for (int i : pos) next.push_back(rays[i]);
    for (int i : zer) next.push_back(rays[i]);
    for (int p : pos) {
      for (int n : neg) {
        detail::Bits common = detail::bits_and(rays[p].zero, rays[n].zero);
        bool adjacent = true;
        for (size_t t = 0; t < rays.size(); ++t) {
          if (static_cast<int>(t) == p || static_cast<int>(t) == n) continue;
          if (detail::bits_subset(common, rays[t].zero)) {
            adjacent = false;
            break;
          }
        }
        if (!adjacent) continue;
        Vec<S> w = vsub(vscale(val[p], rays[n].v), vscale(val[n], rays[p].v));
        next.push_back(Ray{canonical_ray(std::move(w)), {}});
      }
    }
    for (Ray& r : next) r.zero = zero_set(r.v, step + 1);
    rays = std::move(next);
  }

  std::vector<Vec<S>> out;
  for (Ray& r : rays) out.push_back(std::move(r.v));
  out = canonical_dedupe(out);
  if (rank_of_rows(out) < dim)
    throw DegenerateError("cone is not full-dimensional");
  return out;
}

template <class S>
struct ConeMembership {
  bool inside = false;
  Vec<S> coefficients;  // inside: v = sum coefficients[i] * rays[i]
  Vec<S> witness;       // outside: witness.r >= 0 on all rays, witness.v < 0
};

template <class S>
class Cone {
 public:
  // Generators may be redundant; they are pruned to the extreme rays.
  static Cone from_rays(int dim, const std::vector<Vec<S>>& generators) {
    std::vector<Vec<S>> gens = canonical_dedupe(generators);
    if (rank_of_rows(gens) < dim) throw DegenerateError("generators do not span the ambient space");
    {
      LinearProgram<S> lp(static_cast<int>(gens.size()));
      for (int d = 0; d < dim; ++d) {
        Vec<S> row(gens.size());
        for (size_t i = 0; i < gens.size(); ++i) row[i] = gens[i][d];
        lp.add_eq(row, S(0));
      }
      lp.add_eq(Vec<S>(gens.size(), S(1)), S(1));
      if (lp_feasible(lp).status == LPStatus::Optimal)
        throw DegenerateError("generated cone is not pointed");
    }
    for (size_t i = 0; i < gens.size();) {
      std::vector<Vec<S>> others;
      for (size_t j = 0; j < gens.size(); ++j)
        if (j != i) others.push_back(gens[j]);
      if (in_span_of(dim, others, gens[i]))
        gens.erase(gens.begin() + static_cast<long>(i));
      else
        ++i;
    }
    return Cone(dim, std::move(gens));
  }

  // Halfspaces may be redundant; rays are computed by double description and
  // the retained facet list is irredundant.
  static Cone from_facets(int dim, const std::vector<Vec<S>>& halfspaces) {
    std::vector<Vec<S>> hs = canonical_dedupe(halfspaces);
    std::vector<Vec<S>> rays = extreme_rays(dim, hs);
    std::vector<Vec<S>> kept;
    for (const Vec<S>& h : hs) {
      std::vector<Vec<S>> on_facet;
      for (const Vec<S>& r : rays)
        if (ScalarOps<S>::is_zero(dot(h, r))) on_facet.push_back(r);
      if (rank_of_rows(on_facet) == dim - 1) kept.push_back(h);
    }
    Cone c(dim, std::move(rays));
    c.cache_->facets = std::move(kept);
    return c;
  }

  int dim() const { return dim_; }
  const std::vector<Vec<S>>& rays() const { return rays_; }

  // Irredundant supporting halfspaces; computed once by double description.
  const std::vector<Vec<S>>& facets() const {
    std::scoped_lock lock(cache_->mu);
    if (!cache_->facets) cache_->facets = extreme_rays(dim_, rays_);
    return *cache_->facets;
  }

  bool facets_computed() const {
    std::scoped_lock lock(cache_->mu);
    return cache_->facets.has_value();
  }

  ConeMembership<S> contains(const Vec<S>& v) const {
    ConeMembership<S> res;
    LinearProgram<S> lp(static_cast<int>(rays_.size()));
    for (int d = 0; d < dim_; ++d) {
      Vec<S> row(rays_.size());
      for (size_t i = 0; i < rays_.size(); ++i) row[i] = rays_[i][d];
      lp.add_eq(row, v[d]);
    }
    LPResult<S> r = lp_feasible(lp);
    if (r.status == LPStatus::Optimal) {
      res.inside = true;
      res.coefficients = r.x;
    } else {
      res.inside = false;
      res.witness.resize(dim_);
      for (int d = 0; d < dim_; ++d) res.witness[d] = -r.y_eq[d];
    }
    return res;
  }

  bool operator==(const Cone& o) const { return dim_ == o.dim_ && ray_sets_equal(rays_, o.rays_); }

 private:
  Cone(int dim, std::vector<Vec<S>> rays) : dim_(dim), rays_(std::move(rays)), cache_(std::make_shared<FacetCache>()) {}

  static bool in_span_of(int dim, const std::vector<Vec<S>>& gens, const Vec<S>& v) {
    LinearProgram<S> lp(static_cast<int>(gens.size()));
    for (int d = 0; d < dim; ++d) {
      Vec<S> row(gens.size());
      for (size_t i = 0; i < gens.size(); ++i) row[i] = gens[i][d];
      lp.add_eq(row, v[d]);
    }
    return lp_feasible(lp).status == LPStatus::Optimal;
  }

  struct FacetCache {
    std::mutex mu;
    std::optional<std::vector<Vec<S>>> facets;
  };

  int dim_;
  std::vector<Vec<S>> rays_;
  std::shared_ptr<FacetCache> cache_;
};

// Recomputes the dual's facets from scratch so dual(dual(c)) exercises the
// full double-description round trip.
template <class S>
Cone<S> dual_cone(const Cone<S>& c) {
  return Cone<S>::from_rays(c.dim(), c.facets());
}

}  // namespace gptlab
