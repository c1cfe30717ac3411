#include <doctest.h>

#include <cmath>

#include "rsft/conditions.hpp"
#include "rsft/model.hpp"
#include "rsft/potential_ops.hpp"
#include "rsft/transfer.hpp"

using namespace rsft;

namespace {
FiberPoint X0{0, 0};
}

TEST_CASE("gallery names and parameter validation") {
  for (const std::string& name : builtin_names()) CHECK_NOTHROW(builtin(name));
  CHECK_THROWS(builtin("no_such_model"));
  CHECK_THROWS(builtin("nn_walk", {{"eta", 0}}));
  CHECK_THROWS(builtin("growing_walk", {{"beta", -1.0}}));
}

TEST_CASE("documented gallery facts") {
  ModelSpec gw = builtin("growing_walk", {{"beta", 1.0}});
  // F = encode({-1,0,1}) = {0,1,2}
  CHECK(gw.cylinder_set == std::vector<int>{0, 1, 2});
  CHECK(gw.documented.at("fine"));

  ModelSpec sp = builtin("sparse_deterministic");
  IncidenceSlice s = matrix_at(sp.env, X0);
  CHECK(s.entry(1, 0));
  CHECK_FALSE(s.entry(0, 0));
  CHECK(s.entry(0, 1));   // 0 = 0 + 0^2
  CHECK(s.entry(16, 1));  // 16 = 4^2
  CHECK_FALSE(sp.documented.at("condition_C"));
  CHECK(sp.documented.at("summable"));

  ModelSpec gm = builtin("golden_mean");
  REQUIRE(gm.oracle.has_value());
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(gm.oracle->lambda[0] == doctest::Approx(g));
  CHECK(gm.oracle->nu[0][0] == doctest::Approx(1.0 / g));
  CHECK(gm.oracle->nu[0][1] == doctest::Approx(1.0 / (g * g)));
}

TEST_CASE("oracle closed forms survive the dense eigensolver cross-check") {
  for (const char* name : {"full2", "golden_mean"}) {
    std::string msg;
    CHECK_MESSAGE(verify_oracle(builtin(name), 1e-12, &msg), msg);
  }
}

TEST_CASE("every builtin passes its documented properties at default truncation") {
  for (const std::string& name : builtin_names()) {
    ModelSpec m = builtin(name);
    CAPTURE(name);
    ShiftContext ctx(m, m.default_trunc);
    SummabilityReport su = check_summability(ctx);
    CHECK(su.certifiable == m.documented.at("summable"));
    ConditionAReport ca = check_condition_a(ctx);
    CHECK(ca.certified == m.documented.at("condition_A"));
    ConditionBReport cb = check_condition_b(ctx);
    CHECK(cb.certified == m.documented.at("condition_B"));
    ConditionCReport cc = check_condition_c(ctx, m.cylinder_set);
    CHECK(cc.certified == m.documented.at("condition_C"));
    MixingReport mx = mixing_n(ctx, m.cylinder_set.front(), m.cylinder_set.front(), 40);
    CHECK(mx.certified == m.documented.at("mixing"));
    std::vector<int> letters;
    for (int e = 0; e <= std::min(2, ctx.max_letter()); ++e) letters.push_back(e);
    FiniteRangeReport fr = check_finite_range(ctx, letters);
    CHECK(fr.certified == m.documented.at("finite_range"));
    BoundedAccessReport ba = check_bounded_access(ctx, letters);
    CHECK(ba.certified == m.documented.at("bounded_access"));
    bool fine = su.certifiable && ca.certified && cb.certified && cc.certified && mx.certified;
    CHECK(fine == m.documented.at("fine"));
  }
}

TEST_CASE("model serialization carries full provenance") {
  ModelSpec m = builtin("growing_walk", {{"beta", 1.0}, {"window", 8}});
  nlohmann::json j = m.to_json();
  CHECK(j["name"] == "growing_walk");
  CHECK(j["codec"] == "zigzag");
  CHECK(j["environment"]["kind"] == "deterministic");
  CHECK(j["default_truncation"]["max_letter"] == 16);
  CHECK(j["params"]["beta"] == 1.0);
  CHECK(j["documented"]["fine"] == true);
}

TEST_CASE("random eta redraws eta per fiber while keeping the decay scale") {
  ModelSpec m = builtin("random_eta");
  // the eta value at site i stays within {4^|i|, 2*4^|i|}
  auto fibers = sample_fibers(m.env, 8, 17);
  int doubled = 0, base = 0;
  for (const FiberPoint& x : fibers) {
    IncidenceSlice s = matrix_at(m.env, x);
    // reach of site 1 tells eta(1): interval [1-eta, 1+eta]
    bool far = s.entry(m.codec.encode(1), m.codec.encode(1 + 8));
    bool near = s.entry(m.codec.encode(1), m.codec.encode(1 + 4));
    CHECK(near);
    far ? ++doubled : ++base;
  }
  CHECK(doubled > 0);
  CHECK(base > 0);
}
