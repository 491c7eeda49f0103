#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gptlab/teleport.hpp"

using namespace gptlab;

namespace {

Vec<Rat> qv(std::initializer_list<Rat> xs) { return Vec<Rat>(xs); }

// Hexagon frame with one vertex displaced; not weakly self-dual.
StateSpace<Rat> skew_hexagon() {
  std::vector<Vec<Rat>> rays = {qv({2, 0, 1}),  qv({1, 1, 1}),   qv({-1, 2, 1}),
                                qv({-2, 0, 1}), qv({-1, -1, 1}), qv({1, -1, 1})};
  return make_state_space(Cone<Rat>::from_rays(3, rays), qv({0, 0, 1}), "hexagon-skew");
}

// Carries the square's state cone onto its dual cone.
Mat<Rat> square_self_duality() {
  return Mat<Rat>(3, 3, {Rat(1), Rat(-1), Rat(0), Rat(1), Rat(1), Rat(0), Rat(0), Rat(0), Rat(2)});
}

Mat<Rat> rot90() {
  return Mat<Rat>(3, 3, {Rat(0), Rat(-1), Rat(0), Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)});
}

std::vector<Mat<Rat>> z4_group() {
  Mat<Rat> r = rot90();
  return {Mat<Rat>::identity(3), r, r * r, r * r * r};
}

}  // namespace

TEST_CASE("conclusive teleportation through the classical correlated resource") {
  for (int n : {2, 3}) {
    auto c = make_classical<Rat>(n);
    BipartiteState<Rat> omega{Rat(1, n) * Mat<Rat>::identity(n)};
    CHECK(is_normalized(omega, c, c));
    Vec<Rat> f = vec_from_mat(Mat<Rat>::identity(n));  // "outputs agree"
    auto v = verify_conclusive(c, c, f, omega, Mat<Rat>::identity(n));
    CHECK(v.valid);
    CHECK(v.min_success == Rat(1, n));
    CHECK(v.max_success == Rat(1, n));
    CHECK(!v.failing_state.has_value());
  }
}

TEST_CASE("conclusive teleportation on the square via its self-duality map") {
  auto sq = make_polygon<Rat>(4);
  Mat<Rat> t = square_self_duality();
  Mat<Rat> oh = Rat(2) * *inverse(t);
  // oh carries the dual cone onto the state cone and fixes the unit's mass.
  CHECK(oh == Mat<Rat>(3, 3, {Rat(1), Rat(1), Rat(0), Rat(-1), Rat(1), Rat(0), Rat(0), Rat(0), Rat(1)}));
  BipartiteState<Rat> omega{oh.transpose()};
  CHECK(is_normalized(omega, sq, sq));
  CHECK(positive_on_products(omega, sq, sq));
  // The resource is entangled: it lies outside the minimal tensor cone.
  auto mn = min_tensor(sq, sq);
  CHECK(!mn.space.cone.contains(bipartite_to_vec(omega)).inside);

  Vec<Rat> f = vec_from_mat((Rat(1, 4) * t).transpose());
  auto v = verify_conclusive(sq, sq, f, omega, Mat<Rat>::identity(3));
  CHECK(v.valid);
  CHECK(v.min_success == Rat(1, 2));
  CHECK(v.max_success == Rat(1, 2));

  // A wrong correction leaves a rotated copy and fails the identity.
  auto bad = verify_conclusive(sq, sq, f, omega, rot90());
  CHECK(!bad.valid);
  CHECK(bad.failing_state.has_value());
}

TEST_CASE("conclusive verification rejects malformed inputs") {
  auto sq = make_polygon<Rat>(4);
  Mat<Rat> t = square_self_duality();
  BipartiteState<Rat> omega{(Rat(2) * *inverse(t)).transpose()};
  Vec<Rat> f = vec_from_mat((Rat(1, 4) * t).transpose());
  Mat<Rat> id3 = Mat<Rat>::identity(3);

  Vec<Rat> uu = tensor_vec(sq.unit, sq.unit);
  CHECK_THROWS_AS(verify_conclusive(sq, sq, vscale(Rat(2), uu), omega, id3), InvalidEffectError);
  CHECK_THROWS_AS(verify_conclusive(sq, sq, vscale(Rat(-1), uu), omega, id3), InvalidEffectError);

  auto c2 = make_classical<Rat>(2);
  Vec<Rat> agree = vec_from_mat(Mat<Rat>::identity(2));
  // Normalized but negative on a product effect.
  BipartiteState<Rat> signed_state{Mat<Rat>(2, 2, {Rat(2), Rat(-1), Rat(-1), Rat(1)})};
  CHECK_THROWS_AS(verify_conclusive(c2, c2, agree, signed_state, Mat<Rat>::identity(2)),
                  InvalidStateError);
  BipartiteState<Rat> unnormalized{Mat<Rat>::identity(2)};
  CHECK_THROWS_AS(verify_conclusive(c2, c2, agree, unnormalized, Mat<Rat>::identity(2)),
                  InvalidStateError);

  CHECK_THROWS_AS(verify_conclusive(sq, sq, f, omega, Rat(2) * id3), CorrectionNotContractiveError);
  CHECK_THROWS_AS(verify_conclusive(sq, sq, f, omega, Rat(-1) * id3), CorrectionNotContractiveError);
  CHECK_THROWS_AS(verify_conclusive(sq, sq, f, omega, id3, std::optional<Mat<Rat>>(Rat(2) * id3)), UsageError);
  CHECK_THROWS_AS(verify_conclusive(sq, sq, qv({1, 0, 0}), omega, id3), UsageError);
}

TEST_CASE("every space teleports conclusively through a copy of its dual") {
  // Even without weak self-duality: the evaluation resource pairs the space
  // with its dual, and a scaled evaluation effect succeeds uniformly.
  auto foil = skew_hexagon();
  CHECK(!is_weakly_self_dual(foil).weakly_self_dual);
  auto dual = dual_space(foil);

  BipartiteState<Rat> omega{Mat<Rat>::identity(3)};
  CHECK(is_normalized(omega, dual, foil));
  CHECK(positive_on_products(omega, dual, foil));

  // Largest evaluation value over vertex products fixes the effect scale.
  Rat mx(0);
  for (const auto& va : foil.omega_vertices)
    for (const auto& vb : dual.omega_vertices) mx = std::max(mx, Rat(dot(va, vb)));
  Rat lam = Rat(1) / mx;
  Vec<Rat> f = vec_from_mat((lam * Mat<Rat>::identity(3)).transpose());
  auto v = verify_conclusive(foil, dual, f, omega, Mat<Rat>::identity(3));
  CHECK(v.valid);
  CHECK(v.min_success == lam);
  CHECK(v.max_success == lam);
}

TEST_CASE("compression verdicts and the range isomorphism criterion") {
  auto sq = make_polygon<Rat>(4);
  Mat<Rat> id3 = Mat<Rat>::identity(3);

  auto full = compression_check(sq, id3);
  CHECK(full.compression);

  auto scaled = compression_check(sq, Rat(2) * id3);
  CHECK(!scaled.idempotent);
  CHECK(!scaled.compression);

  // Projects the square's effect cone onto the classical(2) slice spanned by
  // the two horizontal facet effects.
  Mat<Rat> proj(3, 3, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)});
  auto pc = compression_check(sq, proj);
  CHECK(pc.idempotent);
  CHECK(pc.positive);
  CHECK(pc.compression);

  // Idempotent but aimed outside the effect cone.
  Mat<Rat> bad = outer(qv({1, 0, 0}), qv({1, 0, 0}));
  auto bc = compression_check(sq, bad);
  CHECK(bc.idempotent);
  CHECK(!bc.positive);
  CHECK_THROWS_AS(range_iso_check(sq, sq, bad), UsageError);

  // classical(2) is order-isomorphic to proj's range; the embedding lands on
  // the cone spanned by the two fixed dual rays.
  auto c2 = make_classical<Rat>(2);
  auto emb = range_iso_check(c2, sq, proj);
  REQUIRE(emb.has_value());
  CHECK(detail::mat_eq(proj * *emb, *emb));
  Cone<Rat> dual = dual_cone(sq.cone);
  std::vector<Vec<Rat>> images;
  for (const auto& r : c2.cone.rays()) {
    Vec<Rat> img = mul(*emb, r);
    CHECK(detail::in_cone_by_facets(dual, img));
    images.push_back(img);
  }
  CHECK(ray_sets_equal(images, {qv({1, 0, 1}), qv({-1, 0, 1})}));

  // Wrong dimension: the range has rank 2.
  CHECK(!range_iso_check(make_classical<Rat>(3), sq, proj).has_value());

  // Full-range compressions decide weak self-duality.
  CHECK(range_iso_check(sq, sq, id3).has_value());
  auto foil = skew_hexagon();
  CHECK(!range_iso_check(foil, foil, Mat<Rat>::identity(3)).has_value());
}

TEST_CASE("symmetric resource and deterministic scheme on the square") {
  auto sq = make_polygon<Rat>(4);
  auto group = z4_group();
  BipartiteState<Rat> res = symmetric_resource(sq, group);
  CHECK(is_normalized(res, sq, sq));
  CHECK(positive_on_products(res, sq, sq));
  Mat<Rat> oh = omega_hat(res);
  for (const auto& g : group) CHECK(detail::mat_eq(g * oh * g.transpose(), oh));

  auto scheme = build_deterministic_from_group(sq, group, res);
  REQUIRE(scheme.effects.size() == 4);
  Vec<Rat> total(9, Rat(0));
  for (const auto& f : scheme.effects) total = vadd(total, f);
  CHECK(vec_eq(total, tensor_vec(sq.unit, sq.unit)));

  auto verdict = verify_deterministic(sq, sq, scheme.effects, scheme.omega);
  CHECK(verdict.valid);
  REQUIRE(verdict.probabilities.size() == 4);
  for (const auto& p : verdict.probabilities) CHECK(p == Rat(1, 4));

  // Every vertex returns exactly through every outcome after correction.
  for (size_t g = 0; g < scheme.effects.size(); ++g) {
    Mat<Rat> mu = oh * f_hat(scheme.effects[g], 3, 3);
    for (const auto& v : sq.omega_vertices)
      CHECK(vec_eq(mul(scheme.corrections[g], mul(mu, v)), vscale(Rat(1, 4), v)));
  }
}

TEST_CASE("deterministic schemes from the triangle and hexagon rotation groups") {
  // Full permutation group of the triangle frame, conjugated into frame coords.
  auto tri = make_polygon<Rat>(3);
  Mat<Rat> frame = Mat<Rat>::from_cols(tri.cone.rays());
  Mat<Rat> frame_inv = *inverse(frame);
  std::vector<Mat<Rat>> s3;
  std::vector<int> perm = {0, 1, 2};
  do {
    Mat<Rat> p(3, 3);
    for (int i = 0; i < 3; ++i) p(perm[i], i) = Rat(1);
    s3.push_back(frame * p * frame_inv);
  } while (std::next_permutation(perm.begin(), perm.end()));
  REQUIRE(s3.size() == 6);

  auto tri_res = symmetric_resource(tri, s3);
  auto tri_scheme = build_deterministic_from_group(tri, s3, tri_res);
  auto tri_verdict = verify_deterministic(tri, tri, tri_scheme.effects, tri_scheme.omega);
  CHECK(tri_verdict.valid);
  REQUIRE(tri_verdict.probabilities.size() == 6);
  for (const auto& p : tri_verdict.probabilities) CHECK(p == Rat(1, 6));

  // Hexagon rotation by one step, exact in the skew frame.
  auto hex = make_polygon<Rat>(6);
  Mat<Rat> r(3, 3, {Rat(1, 2), Rat(-3, 2), Rat(0), Rat(1, 2), Rat(1, 2), Rat(0), Rat(0), Rat(0), Rat(1)});
  for (size_t i = 0; i < 6; ++i)
    CHECK(vec_eq(mul(r, hex.omega_vertices[i]), hex.omega_vertices[(i + 1) % 6]));
  std::vector<Mat<Rat>> z6{Mat<Rat>::identity(3)};
  for (int k = 1; k < 6; ++k) z6.push_back(r * z6.back());

  auto hex_res = symmetric_resource(hex, z6);
  auto hex_scheme = build_deterministic_from_group(hex, z6, hex_res);
  auto hex_verdict = verify_deterministic(hex, hex, hex_scheme.effects, hex_scheme.omega);
  CHECK(hex_verdict.valid);
  REQUIRE(hex_verdict.probabilities.size() == 6);
  for (const auto& p : hex_verdict.probabilities) CHECK(p == Rat(1, 6));
  Mat<Rat> hoh = omega_hat(hex_res);
  for (size_t g = 0; g < z6.size(); ++g) {
    Mat<Rat> mu = hoh * f_hat(hex_scheme.effects[g], 3, 3);
    for (const auto& v : hex.omega_vertices)
      CHECK(vec_eq(mul(hex_scheme.corrections[g], mul(mu, v)), vscale(Rat(1, 6), v)));
  }
}

TEST_CASE("the classical bit scheme is the one-time pad") {
  auto c2 = make_classical<Rat>(2);
  Mat<Rat> swap(2, 2, {Rat(0), Rat(1), Rat(1), Rat(0)});
  std::vector<Mat<Rat>> z2 = {Mat<Rat>::identity(2), swap};

  BipartiteState<Rat> res{Rat(1, 2) * Mat<Rat>::identity(2)};
  auto scheme = build_deterministic_from_group(c2, z2, res);
  // Outcome effects read "bits agree" and "bits differ"; corrections are the
  // matching identity and flip.
  CHECK(vec_eq(scheme.effects[0], vec_from_mat(Mat<Rat>::identity(2))));
  CHECK(vec_eq(scheme.effects[1], vec_from_mat(swap)));
  CHECK(scheme.corrections[0] == Mat<Rat>::identity(2));
  CHECK(scheme.corrections[1] == swap);

  auto verdict = verify_deterministic(c2, c2, scheme.effects, scheme.omega);
  CHECK(verdict.valid);
  for (const auto& p : verdict.probabilities) CHECK(p == Rat(1, 2));

  // The anti-correlated resource works with the same observable.
  BipartiteState<Rat> anti{Rat(1, 2) * swap};
  auto verdict2 = verify_deterministic(c2, c2, scheme.effects, anti);
  CHECK(verdict2.valid);
  for (const auto& p : verdict2.probabilities) CHECK(p == Rat(1, 2));
}

TEST_CASE("group construction rejects bad groups, actions, and resources") {
  auto sq = make_polygon<Rat>(4);
  Mat<Rat> id3 = Mat<Rat>::identity(3);
  Mat<Rat> r = rot90();
  BipartiteState<Rat> res = symmetric_resource(sq, z4_group());

  CHECK_THROWS_AS(build_deterministic_from_group(sq, {id3, r}, res), NotAGroupError);
  CHECK_THROWS_AS(build_deterministic_from_group(sq, {r, r * r, r * r * r}, res), NotAGroupError);
  CHECK_THROWS_AS(build_deterministic_from_group(sq, {id3, id3}, res), NotAGroupError);
  Mat<Rat> stretch(3, 3, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(0), Rat(0), Rat(0), Rat(2)});
  CHECK_THROWS_AS(build_deterministic_from_group(sq, {id3, stretch}, res), NotAGroupError);

  CHECK_THROWS_AS(build_deterministic_from_group(sq, {id3, r * r}, res), NotTransitiveError);

  // Reflecting the resource correlator breaks equivariance but nothing else.
  Mat<Rat> reflect(3, 3, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(-1), Rat(0), Rat(0), Rat(0), Rat(1)});
  Mat<Rat> oh = Rat(2) * *inverse(square_self_duality()) * reflect;
  BipartiteState<Rat> skewed{oh.transpose()};
  CHECK(is_normalized(skewed, sq, sq));
  CHECK(positive_on_products(skewed, sq, sq));
  CHECK_THROWS_AS(build_deterministic_from_group(sq, z4_group(), skewed), EquivarianceError);

  // A product resource has a rank-one correlator.
  Vec<Rat> v0 = sq.omega_vertices[0];
  BipartiteState<Rat> product{outer(v0, v0).transpose()};
  CHECK_THROWS_AS(build_deterministic_from_group(sq, z4_group(), product), InvalidStateError);
}

TEST_CASE("deterministic verification explains each failure mode") {
  auto c2 = make_classical<Rat>(2);
  BipartiteState<Rat> res{Rat(1, 2) * Mat<Rat>::identity(2)};
  Vec<Rat> ones = tensor_vec(c2.unit, c2.unit);

  auto verdict = verify_deterministic(c2, c2, {vec_from_mat(Mat<Rat>::identity(2))}, res);
  CHECK(!verdict.valid);
  CHECK(verdict.reason == "effects do not sum to the composite unit");

  Vec<Rat> signed_f = qv({1, -1, 0, 1});
  Vec<Rat> rest = vsub(ones, signed_f);
  auto neg = verify_deterministic(c2, c2, {signed_f, rest}, res);
  CHECK(!neg.valid);
  CHECK(neg.failing_outcome == size_t{0});
  CHECK(neg.reason == "outcome effect is negative on a product state");

  // Unequal column masses make the success probability input-dependent.
  Vec<Rat> skew = qv({1, 0, 0, Rat(1, 2)});
  auto varies = verify_deterministic(c2, c2, {skew, vsub(ones, skew)}, res);
  CHECK(!varies.valid);
  CHECK(varies.failing_outcome == size_t{0});
  CHECK(varies.reason == "success mass varies across inputs");

  Vec<Rat> half = vscale(Rat(1, 2), ones);
  auto flat = verify_deterministic(c2, c2, {half, half}, res);
  CHECK(!flat.valid);
  CHECK(flat.failing_outcome == size_t{0});
  CHECK(flat.reason == "conditional map is not invertible");

  // Invertible with constant mass, but the inverse leaves the cone.
  Vec<Rat> mixing = qv({Rat(1, 3), Rat(1, 6), Rat(1, 6), Rat(1, 3)});
  auto blur = verify_deterministic(c2, c2, {mixing, vsub(ones, mixing)}, res);
  CHECK(!blur.valid);
  CHECK(blur.failing_outcome == size_t{0});
  CHECK(blur.reason == "correction is not positive");

  auto ok = verify_deterministic(c2, c2,
                                 {vec_from_mat(Mat<Rat>::identity(2)),
                                  vec_from_mat(Mat<Rat>(2, 2, {Rat(0), Rat(1), Rat(1), Rat(0)}))},
                                 res);
  CHECK(ok.valid);
  CHECK(ok.reason.empty());
}

TEST_CASE("necessity search: square finds a protocol, classical extremes do not") {
  auto sq = make_polygon<Rat>(4);
  auto rep = weak_self_duality_necessity(sq);
  CHECK(rep.weakly_self_dual);
  CHECK(rep.protocol_found);
  CHECK(rep.consistent);
  CHECK(rep.states_searched == 24);
  CHECK(rep.effects_searched == 24);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.pairs_searched <= 24 * 24);

  // Weak self-duality holds classically, yet every extreme resource of the
  // max tensor is a product state, so the search (documented as refutation
  // only) finds nothing; the correlated mixture that works is not extreme.
  auto c2 = make_classical<Rat>(2);
  auto crep = weak_self_duality_necessity(c2);
  CHECK(crep.weakly_self_dual);
  CHECK(!crep.protocol_found);
  CHECK(crep.consistent);
  CHECK(crep.pairs_searched == 16);
}

TEST_CASE("necessity search: the skew hexagon admits no scheme through itself") {
  auto foil = skew_hexagon();
  CHECK_THROWS_AS(weak_self_duality_necessity(foil), SearchBudgetExceededError);

  auto rep = weak_self_duality_necessity(foil, 2100000);
  CHECK(!rep.weakly_self_dual);
  CHECK(!rep.protocol_found);
  CHECK(rep.consistent);
  CHECK(rep.states_searched == 1416);
  CHECK(rep.effects_searched == 1412);
  CHECK(rep.pairs_searched == size_t{1416} * 1412);
  CHECK(!rep.witness.has_value());
}

TEST_CASE("floating pentagon deterministic scheme within tolerance") {
  auto pent = make_polygon<double>(5);
  std::vector<Mat<double>> z5;
  for (int k = 0; k < 5; ++k) {
    double c = std::cos(2 * M_PI * k / 5), s = std::sin(2 * M_PI * k / 5);
    z5.push_back(Mat<double>(3, 3, {c, -s, 0, s, c, 0, 0, 0, 1}));
  }
  auto res = symmetric_resource(pent, z5);
  auto scheme = build_deterministic_from_group(pent, z5, res);
  auto verdict = verify_deterministic(pent, pent, scheme.effects, scheme.omega);
  CHECK(verdict.valid);
  REQUIRE(verdict.probabilities.size() == 5);
  for (double p : verdict.probabilities) CHECK(std::abs(p - 0.2) < 1e-9);

  Mat<double> oh = omega_hat(res);
  for (size_t g = 0; g < z5.size(); ++g) {
    Mat<double> mu = oh * f_hat(scheme.effects[g], 3, 3);
    for (const auto& v : pent.omega_vertices) {
      Vec<double> back = mul(scheme.corrections[g], mul(mu, v));
      for (size_t i = 0; i < back.size(); ++i)
        CHECK(std::abs(back[i] - verdict.probabilities[g] * v[i]) < 1e-9);
    }
  }
}
