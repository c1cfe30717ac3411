#include <doctest.h>

#include <cmath>

#include "rsft/cones.hpp"
#include "rsft/model.hpp"
#include "rsft/util.hpp"

using namespace rsft;

namespace {
FiberPoint X0{0, 0};
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("density estimates: full shift and golden mean oracles") {
  ModelSpec f2 = builtin("full2");
  ShiftContext c2(f2, f2.default_trunc);
  OrbitData o2(c2, X0, 0, 2, 16, 16);
  for (int k : {4, 9, 16}) {
    DepthFunction rho = rho_estimate(c2, X0, k, o2.lambdas());
    for (std::size_t i = 0; i < rho.size(); ++i) CHECK(rho[i] == doctest::Approx(1.0));
  }

  ModelSpec gm = builtin("golden_mean");
  ShiftContext cg(gm, gm.default_trunc);
  OrbitData og(cg, X0, 0, 2, 40, 30);
  const DepthFunction& rho = og.rho(0);
  CHECK(rho.sup_on_letter(0) == doctest::Approx(1.17082039325).epsilon(1e-7));
  CHECK(rho.sup_on_letter(1) == doctest::Approx(0.72360679775).epsilon(1e-7));
  CHECK(og.nu(0).integrate(rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.min_value() > 0.0);
}

TEST_CASE("density increments are Cauchy in the Hoelder norm") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  OrbitMeasures om = orbit_measures(ctx, X0, -45, 2, 30);
  double prev = -1.0;
  const double alpha = 1.0;
  for (int k : {10, 15, 20, 25}) {
    DepthFunction a = rho_estimate(ctx, X0, k, om.lambdas);
    DepthFunction b = rho_estimate(ctx, X0, k + 5, om.lambdas);
    double inc = (a - b).holder_norm(alpha);
    if (prev >= 0.0) {
      // geometric decay at rate theta^5 ~ 0.38^5 = 0.008
      CHECK(inc <= 0.02 * prev + 1e-14);
    }
    prev = inc;
  }
}

TEST_CASE("fixed point residual shrinks with pullback depth") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  OrbitMeasures om = orbit_measures(ctx, X0, -40, 2, 30);
  double res30 = 0.0, res10 = 0.0;
  for (int k : {10, 30}) {
    DepthFunction rho_x = rho_estimate(ctx, X0, k, om.lambdas);
    DepthFunction rho_t = rho_estimate(ctx, advance(X0, 1), k, om.lambdas);
    double r = fixed_point_residual(ctx, X0, rho_x, rho_t, om.lambdas.at(0));
    (k == 10 ? res10 : res30) = r;
  }
  CHECK(res30 < res10);
  CHECK(res30 <= 1e-8);
}

TEST_CASE("invariant measure: Parry masses and pushforward consistency") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  OrbitData orbit(ctx, X0, 0, 2, 40, 40);
  const RandomMeasureApprox& mu = orbit.mu(0);
  int w0[1] = {0}, w1[1] = {1};
  CHECK(mu.mass_of_prefix(std::span<const int>(w0, 1)) ==
        doctest::Approx(0.72360679775).epsilon(1e-8));
  CHECK(mu.mass_of_prefix(std::span<const int>(w1, 1)) ==
        doctest::Approx(0.27639320225).epsilon(1e-8));
  CHECK(invariance_residual(ctx, X0, mu, orbit.mu(1)) <= 1e-7);

  ModelSpec f2 = builtin("full2");
  ShiftContext c2(f2, f2.default_trunc);
  OrbitData o2(c2, X0, 0, 2, 12, 12);
  const RandomMeasureApprox& mu2 = o2.mu(0);
  for (double m : mu2.masses) CHECK(m == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(invariance_residual(c2, X0, mu2, o2.mu(1)) <= 1e-12);
}

TEST_CASE("two density estimates from different anchors stay close") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  // pull lambda windows from the two anchors; the densities must agree up to
  // the contraction at depth k
  OrbitMeasures a = orbit_measures(ctx, X0, -30, 1, 25, AnchorPolicy{0});
  OrbitMeasures b = orbit_measures(ctx, X0, -30, 1, 25, AnchorPolicy{1});
  DepthFunction ra = rho_estimate(ctx, X0, 25, a.lambdas);
  DepthFunction rb = rho_estimate(ctx, X0, 25, b.lambdas);
  CHECK((ra - rb).holder_norm(1.0) <= 1e-8);
}

TEST_CASE("cone membership: constants, witnesses and scaled indicators") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  OrbitData orbit(ctx, X0, 0, 40, 40, 40);
  ConeConstants cc;
  cc.alpha = 1.0;
  cc.norm_iter_bound = 1.2;
  cc.cone_sup_factor = 2.0;
  cc.cone_var_factor = 8.0;
  DepthFunction ref = normalized_one_step_back(ctx, X0, orbit.lambdas().at(-1));

  DepthFunction one = DepthFunction::constant(ctx, X0, 1.0);
  ConeMembership m1 = cone_membership(one, orbit.nu(0), ref, cc);
  CHECK(m1.in_cone);  // the constant function always joins the cone

  // indicator scaled to unit integral: sup = 1/nu(w) defeats a small A
  Symbols w{0, 1, 0};
  DepthFunction ind = DepthFunction::indicator_prefix(ctx, X0, w);
  double mass = orbit.nu(0).mass_at(w);
  REQUIRE(mass > 0.0);
  ind *= 1.0 / mass;
  ConeMembership m2 = cone_membership(ind, orbit.nu(0), ref, cc);
  CHECK_FALSE(m2.in_cone);  // 1/mass is far above A = 2
  CHECK(m2.integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("derived constants: full shift pipeline hits the documented numbers") {
  ModelSpec f2 = builtin("full2");
  ShiftContext ctx(f2, f2.default_trunc);
  OrbitData orbit(ctx, X0, 0, 40, 20, 20);
  ConeDerivation cd = derive_cone_constants(ctx, orbit);
  REQUIRE(cd.ok);
  CHECK(cd.constants.norm_iter_bound == doctest::Approx(1.0).epsilon(1e-9));
  // smallest k with 1/2 + 6 e^-k <= 1 at alpha = 1
  CHECK(cd.constants.tail_cut == 3);
  CHECK(cd.constants.ratio_bound == doctest::Approx(1.0));
  CHECK(cd.constants.cone_sup_factor >= 2.0);
  CHECK(cd.constants.cone_var_factor ==
        doctest::Approx(2.0 * cd.constants.norm_iter_bound * cd.constants.cone_sup_factor + 4.0));
  // Mh H e^{-alpha N0} <= 1
  CHECK(cd.constants.norm_iter_bound * cd.constants.cone_var_factor *
            std::exp(-cd.constants.min_push) <=
        1.0 + 1e-9);
  // eta <= min{1/3, 1/H, a/(2 Mh)}
  CHECK(cd.constants.log_peel <= std::log(1.0 / 3.0) + 1e-12);
  CHECK(cd.constants.log_peel <= -std::log(cd.constants.cone_var_factor) + 1e-12);
  CHECK(std::isfinite(cd.constants.log_peel_effective));
}

TEST_CASE("derived constants and the invariance of the cones: golden mean") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  OrbitData orbit(ctx, X0, 0, 80, 40, 40);
  ConeDerivation cd = derive_cone_constants(ctx, orbit);
  REQUIRE(cd.ok);
  const ConeConstants& cc = cd.constants;
  // the invariant 1/2 + (2 Mh + 4) e^{-alpha k} <= 1 for the stored k
  CHECK(0.5 + (2.0 * cc.norm_iter_bound + 4.0) * std::exp(-cc.alpha * cc.tail_cut) <=
        1.0 + 1e-12);
  // pushing a cone element N0 steps lands in the slice cone
  int n0 = cc.min_push;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    DepthFunction g = random_cone_element(ctx, orbit, 0, s);
    DepthFunction pushed = normalized_iterate(ctx, X0, g, n0, orbit.lambdas());
    DepthFunction ref = normalized_one_step_back(ctx, advance(X0, n0),
                                                 orbit.lambdas().at(n0 - 1));
    ConeMembership m = cone_membership(pushed, orbit.nu(n0), ref, cc);
    CHECK(m.in_cone0);
    CHECK(m.in_cone);
  }
}

TEST_CASE("bowen contraction: peel stays in the cone, blocks contract") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  OrbitData orbit(ctx, X0, 0, 120, 40, 40);
  ConeDerivation cd = derive_cone_constants(ctx, orbit);
  REQUIRE(cd.ok);
  const ConeConstants& cc = cd.constants;
  // slice-cone pair through the N0 push
  DepthFunction g = random_cone_element(ctx, orbit, 0, 11);
  DepthFunction h = random_cone_element(ctx, orbit, 0, 12);
  g = normalized_iterate(ctx, X0, g, cc.min_push, orbit.lambdas());
  h = normalized_iterate(ctx, X0, h, cc.min_push, orbit.lambdas());
  g *= 1.0 / orbit.nu(cc.min_push).integrate(g);
  h *= 1.0 / orbit.nu(cc.min_push).integrate(h);
  BowenReport rep = bowen_contraction_check(ctx, orbit, cc, g, h, 3);
  CHECK(rep.peel_in_cone);
  CHECK(rep.factors_below_bound);
  CHECK(rep.bound_factor < 1.0);
  CHECK(rep.bound_factor > 0.0);
  REQUIRE(rep.block_norms.size() == 4);
  for (std::size_t i = 1; i < rep.block_norms.size(); ++i)
    CHECK(rep.block_norms[i] <= rep.bound_factor * rep.block_norms[i - 1] + 1e-14);
  // trivial pair: identical functions stay identical
  BowenReport same = bowen_contraction_check(ctx, orbit, cc, g, g, 2);
  for (double n : same.block_norms) CHECK(n == 0.0);
}
