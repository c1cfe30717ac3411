#include <doctest.h>

#include <cmath>

#include "rsft/conformal.hpp"
#include "rsft/model.hpp"
#include "rsft/potential_ops.hpp"
#include "rsft/util.hpp"

using namespace rsft;

namespace {
FiberPoint X0{0, 0};
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

RandomMeasureApprox uniform_measure(const ShiftContext& ctx, const FiberPoint& x) {
  RandomMeasureApprox nu;
  nu.fiber = x;
  nu.words = ctx.words(x);
  nu.masses.assign(nu.words->size(), 1.0 / static_cast<double>(nu.words->size()));
  return nu;
}
}  // namespace

TEST_CASE("phi map fixes the Bernoulli measure on the full shift") {
  ModelSpec m = builtin("full2");
  ShiftContext ctx(m, m.default_trunc);
  RandomMeasureApprox nu = uniform_measure(ctx, advance(X0, 1));
  double norm = 0.0;
  RandomMeasureApprox pulled = phi_map(ctx, nu, X0, &norm);
  CHECK(norm == doctest::Approx(1.0));
  CHECK(pulled.total() == doctest::Approx(1.0));
  for (double mass : pulled.masses) CHECK(mass == doctest::Approx(0.125));
}

TEST_CASE("phi map fixes the left-Perron masses on the golden mean") {
  ModelSpec m = builtin("golden_mean");
  ShiftContext ctx(m, m.default_trunc);
  // start from the conformal masses themselves (computed by pullback), one
  // application must reproduce them to high accuracy
  ConformalEstimate est = estimate_conformal(ctx, advance(X0, 1), 45);
  RandomMeasureApprox pulled = phi_map(ctx, est.nu, X0);
  CHECK(pulled.total() == doctest::Approx(1.0).epsilon(1e-12));
  int w0[1] = {0};
  CHECK(pulled.mass_of_prefix(std::span<const int>(w0, 1)) ==
        doctest::Approx(1.0 / kGolden).epsilon(1e-10));
}

TEST_CASE("conformal estimate: golden mean eigendata at pullback 30") {
  ModelSpec m = builtin("golden_mean");
  ShiftContext ctx(m, m.default_trunc);
  ConformalEstimate est = estimate_conformal(ctx, X0, 30);
  CHECK(est.lambda == doctest::Approx(kGolden).epsilon(1e-8));
  int w0[1] = {0}, w1[1] = {1};
  CHECK(est.nu.mass_of_prefix(std::span<const int>(w0, 1)) ==
        doctest::Approx(1.0 / kGolden).epsilon(1e-8));
  CHECK(est.nu.mass_of_prefix(std::span<const int>(w1, 1)) ==
        doctest::Approx(1.0 / (kGolden * kGolden)).epsilon(1e-8));
  CHECK(est.converged);

  // exact depth-3 cylinder masses: nu[w] = lambda^-2 nu(last letter)
  Symbols w010{0, 1, 0};
  CHECK(est.nu.mass_at(w010) ==
        doctest::Approx(std::pow(kGolden, -2.0) / kGolden).epsilon(1e-8));
  Symbols w001{0, 0, 1};
  CHECK(est.nu.mass_at(w001) ==
        doctest::Approx(std::pow(kGolden, -2.0) / (kGolden * kGolden)).epsilon(1e-8));
}

TEST_CASE("full shift conformal estimate is exact at any depth") {
  ModelSpec m = builtin("full2");
  ShiftContext ctx(m, TruncationParams{1, 2});
  ConformalEstimate est = estimate_conformal(ctx, X0, 5);
  for (double mass : est.nu.masses) CHECK(mass == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(est.lambda == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lambda estimate brackets and errors") {
  ModelSpec m = builtin("growing_walk");
  ShiftContext ctx(m, m.default_trunc);
  ConformalEstimate est = estimate_conformal(ctx, advance(X0, 1), 40, {}, 1e-6);
  double err = 0.0;
  double lam = lambda_estimate(ctx, X0, est.nu, &err);
  // lambda lies between the extreme values of L1
  DepthFunction l1 = apply_transfer(ctx, X0, DepthFunction::constant(ctx, X0, 1.0));
  CHECK(lam >= l1.min_value() - 1e-12);
  CHECK(lam <= l1.sup_norm() + ctx.tail_weight(X0) + 1e-12);
  CHECK(err > 0.0);
  CHECK(err < 0.05);
}

TEST_CASE("conformality residual: fixed point exact, pullback monotone") {
  ModelSpec f2 = builtin("full2");
  ShiftContext c2(f2, f2.default_trunc);
  ConformalEstimate e2 = estimate_conformal(c2, X0, 8);
  ConformalEstimate e2t = estimate_conformal(c2, advance(X0, 1), 8);
  CHECK(conformality_residual(c2, X0, e2.nu, e2t.nu, 1.0) <= 1e-12);

  ModelSpec gm = builtin("golden_mean");
  ShiftContext cg(gm, gm.default_trunc);
  double prev = 1.0;
  for (int n : {5, 10, 20, 30}) {
    ConformalEstimate ex = estimate_conformal(cg, X0, n);
    ConformalEstimate et = estimate_conformal(cg, advance(X0, 1), n);
    double res = conformality_residual(cg, X0, ex.nu, et.nu, ex.lambda);
    CHECK(res <= prev + 1e-12);
    prev = res;
  }
  CHECK(prev <= 1e-8);  // eigen-gap 0.382^30
}

TEST_CASE("phi-map recursion matches the sweep exactly") {
  ModelSpec m = builtin("periodic2");
  ShiftContext ctx(m, m.default_trunc);
  // nu^(n+1) at x vs phi applied to nu^(n) at theta x, same anchor fiber
  for (int n : {4, 9}) {
    ConformalEstimate deeper = estimate_conformal(ctx, X0, n + 1);
    ConformalEstimate at_theta = estimate_conformal(ctx, advance(X0, 1), n);
    RandomMeasureApprox pulled = phi_map(ctx, at_theta.nu, X0);
    CHECK(deeper.nu.tv_distance(pulled) <= 1e-12);
  }
}

TEST_CASE("anchor independence decays with depth") {
  ModelSpec m = builtin("golden_mean");
  ShiftContext ctx(m, m.default_trunc);
  double last = 1.0;
  for (int n : {6, 12, 24}) {
    ConformalEstimate a = estimate_conformal(ctx, X0, n, AnchorPolicy{0});
    ConformalEstimate b = estimate_conformal(ctx, X0, n, AnchorPolicy{1});
    double tv = a.nu.tv_distance(b.nu);
    CHECK(tv < last + 1e-12);
    last = tv;
  }
  CHECK(last < 1e-7);
}

TEST_CASE("cylinder masses: transport along the orbit") {
  ModelSpec m = builtin("golden_mean");
  ShiftContext ctx(m, m.default_trunc);
  OrbitMeasures om = orbit_measures(ctx, X0, 0, 8, 40);
  Symbols w01{0, 1};
  CHECK(cylinder_mass(ctx, X0, w01, om) ==
        doctest::Approx(0.2360679775).epsilon(1e-8));  // nu(1)/lambda
  Symbols w11{1, 1};
  CHECK(cylinder_mass(ctx, X0, w11, om) == 0.0);
  // length-5 word: two transport steps, then the depth-3 mass; each unit of
  // length costs one lambda factor, so nu = lambda^-4 nu([1])
  Symbols w5{0, 0, 0, 0, 1};
  double direct = std::pow(kGolden, -4.0) / (kGolden * kGolden);
  CHECK(cylinder_mass(ctx, X0, w5, om) == doctest::Approx(direct).epsilon(1e-8));

  ModelSpec f2 = builtin("full2");
  ShiftContext c2(f2, f2.default_trunc);
  OrbitMeasures om2 = orbit_measures(c2, X0, 0, 8, 20);
  Symbols w3{1, 0, 1};
  CHECK(cylinder_mass(c2, X0, w3, om2) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("cylinder additivity within the ledger") {
  ModelSpec m = builtin("growing_walk");
  ShiftContext ctx(m, m.default_trunc);
  OrbitMeasures om = orbit_measures(ctx, X0, 0, 6, 40);
  const RandomMeasureApprox& nu = om.nu(0);
  auto ws2 = ctx.words_len(X0, 2);
  for (const Symbols& w : ws2->words) {
    double lhs = nu.mass_of_prefix(w);
    double rhs = 0.0;
    for (int e : ctx.out_set(advance(X0, 1), w.back())) {
      Symbols we = w;
      we.push_back(e);
      rhs += nu.mass_at(we);
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("conformality transport of integrals") {
  // integral of hat L g against nu at theta(x) equals the integral of g at x
  for (const char* name : {"golden_mean", "growing_walk"}) {
    ModelSpec m = builtin(name);
    ShiftContext ctx(m, m.default_trunc);
    OrbitMeasures om = orbit_measures(ctx, X0, 0, 2, 40);
    CounterRng rng(0xfeed);
    for (int it = 0; it < 10; ++it) {
      DepthFunction g = DepthFunction::constant(ctx, X0, 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.next_unit();
      DepthFunction pushed = apply_transfer(ctx, X0, g);
      pushed *= 1.0 / om.lambdas.at(0);
      double lhs = om.nu(1).integrate(pushed);
      double rhs = om.nu(0).integrate(g);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("tightness diagnostic: full shift trivial, growing walk margins") {
  ModelSpec f2 = builtin("full2");
  ShiftContext c2(f2, f2.default_trunc);
  SummabilityReport s2 = check_summability(c2);
  ConditionCReport cc2 = check_condition_c(c2, {0, 1});
  OrbitMeasures om2 = orbit_measures(c2, X0, 0, 4, 16);
  TightnessReport t2 = tightness_diagnostic(c2, X0, om2.nu(0), s2, cc2, {0, 0, 0}, 8,
                                            {0, 1}, 1, om2.lambdas);
  CHECK(t2.certified);
  for (double mgn : t2.mass_margins) CHECK(mgn >= -1e-12);
  CHECK(t2.margin_step0 >= -1e-12);
  CHECK(t2.beta_ok);

  ModelSpec gw = builtin("growing_walk");
  ShiftContext cg(gw, gw.default_trunc);
  SummabilityReport sg = check_summability(cg);
  ConditionCReport ccg = check_condition_c(cg, gw.cylinder_set);
  OrbitMeasures omg = orbit_measures(cg, X0, 0, 4, 40);
  ConformalEstimate eg = estimate_conformal(cg, X0, 40, {}, 1e-6);
  TightnessReport tg = tightness_diagnostic(cg, X0, eg.nu, sg, ccg, eg.anchor_word, 8,
                                            gw.cylinder_set, 1, omg.lambdas);
  CHECK(tg.certified);
  // the step-0 margin is the (1/4 - kappa) inf L1|F - M gamma_1 positivity
  CHECK(tg.margin_step0 >= -1e-12);
  CHECK(tg.gammas.front() == 0.5);
  for (std::size_t i = 1; i < tg.gammas.size(); ++i) CHECK(tg.gammas[i] < tg.gammas[i - 1]);
  CHECK(tg.beta_ok);
}
