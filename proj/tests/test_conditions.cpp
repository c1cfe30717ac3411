#include <doctest.h>

#include <cmath>

#include "rsft/conditions.hpp"
#include "rsft/model.hpp"

using namespace rsft;

TEST_CASE("finite range: nn walk and growing walk out-sets") {
  ModelSpec m = builtin("nn_walk", {{"eta", 2}});
  ShiftContext ctx(m, m.default_trunc);
  FiniteRangeReport rep = check_finite_range(ctx, {0, 1, 2, 3, 4});
  REQUIRE(rep.certified);
  for (int e = 0; e <= 4; ++e) {
    // decoded |j - e| <= 2: at most 5 successors
    CHECK(rep.out_sets.at(e).size() <= 5);
    for (int j : rep.out_sets.at(e))
      CHECK(std::abs(m.codec.decode(j) - m.codec.decode(e)) <= 2);
  }

  ModelSpec gw = builtin("growing_walk");
  ShiftContext cgw(gw, gw.default_trunc);
  FiniteRangeReport rgw = check_finite_range(cgw, {0, 1, 2});
  REQUIRE(rgw.certified);
  // decoded out-set of i is the interval |j - i| <= 4^{|i|}
  CHECK(rgw.out_sets.at(0).size() == 3);   // eta(0) = 1
  CHECK(rgw.out_sets.at(1).size() == 9);   // eta(1) = 4
  CHECK(rgw.out_sets.at(2).size() == 9);   // eta(-1) = 4
}

TEST_CASE("finite range: full shift and level chain") {
  ModelSpec m = builtin("full2");
  ShiftContext ctx(m, m.default_trunc);
  FiniteRangeReport rep = check_finite_range(ctx, {0, 1});
  REQUIRE(rep.certified);
  CHECK(rep.out_sets.at(0) == std::vector<int>{0, 1});
  CHECK(rep.out_sets.at(1) == std::vector<int>{0, 1});
  CHECK(rep.level_hat.at(1) == 1);
}

TEST_CASE("bounded access: deterministic columns have bounded predecessors") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  BoundedAccessReport rep = check_bounded_access(ctx, {0, 1});
  REQUIRE(rep.certified);
  CHECK(rep.b_star.at(1) == 0);  // A_01 = 1
  CHECK(rep.b_star.at(0) == 0);  // A_00 = 1

  // growing walk: site b is reachable from itself, b* <= encode(b)
  ModelSpec gw = builtin("growing_walk");
  ShiftContext cgw(gw, gw.default_trunc);
  BoundedAccessReport rgw = check_bounded_access(cgw, {0, 1, 2, 5, 6});
  REQUIRE(rgw.certified);
  for (auto [b, bstar] : rgw.b_star) CHECK(bstar <= b);
}

TEST_CASE("mixing N on the solvable models") {
  ModelSpec gm = builtin("golden_mean");
  ShiftContext ctx(gm, gm.default_trunc);
  MixingReport rep = mixing_n(ctx, 1, 1, 12);
  REQUIRE(rep.certified);
  CHECK(rep.n_mix == 0);  // the all-zero interior word always connects

  ModelSpec f2 = builtin("full2");
  ShiftContext c2(f2, f2.default_trunc);
  CHECK(mixing_n(c2, 0, 1, 8).n_mix == 0);
  CHECK(mixing_n(c2, 1, 0, 8).n_mix == 0);

  // sparse model: mixing with some finite N, value from reachability
  ModelSpec sp = builtin("sparse_deterministic");
  ShiftContext cs(sp, sp.default_trunc);
  MixingReport rs = mixing_n(cs, 0, 0, 40);
  REQUIRE(rs.certified);
  CHECK(rs.n_mix >= 0);
  CHECK(rs.n_mix <= 40);
}

TEST_CASE("mixing implies every letter keeps a predecessor in the window") {
  for (const char* name : {"golden_mean", "growing_walk", "periodic2"}) {
    ModelSpec m = builtin(name);
    ShiftContext ctx(m, m.default_trunc);
    for (const FiberPoint& x : ctx.audit_fibers())
      for (int b = 0; b <= ctx.max_letter(); ++b) CHECK(!ctx.in_set(x, b).empty());
  }
}
