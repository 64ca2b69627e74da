#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pdmp/audit.hpp"
#include "pdmp/builtin_models.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/model.hpp"
#include "pdmp/quadrature_rules.hpp"

using namespace pdmp;

TEST_CASE("contraction condition") {
  const ModelSpec a = builtin::make_model_a();
  // L = 1, L_w = 0.5, alpha = -1: 0.5 - 1/lambda < 1 for every positive rate.
  CHECK(check_contractivity(a, 0.5));
  CHECK(check_contractivity(a, 4.0));
  CHECK_FALSE(check_contractivity(a, 0.0));
  CHECK(check_contractivity_interval(a));

  ModelSpec expanding = a;
  expanding.flow.growth = 0.5;
  expanding.jumps.lipschitz_w = 0.25;
  // 0.25 + 0.5/lambda < 1 needs lambda > 2/3.
  CHECK_FALSE(check_contractivity(expanding, 0.6));
  CHECK(check_contractivity(expanding, 0.7));
  expanding.lambda_min = 0.6;
  CHECK_FALSE(check_contractivity_interval(expanding));

  CHECK(jump_operator_factor(a, 2.0) == doctest::Approx(1.0 / 3.0));
  const ModelSpec b = builtin::make_model_b();
  CHECK(jump_operator_factor(b, 2.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("decay flow: identity at zero, semigroup, time regularity") {
  const SemiFlow f = builtin::decay_flow(1.5);
  const StatePoint x(2.0);
  CHECK(f(0.0, x)[0] == 2.0);
  CHECK(f(0.7, f(0.4, x))[0] == doctest::Approx(f(1.1, x)[0]).epsilon(1e-14));
  CHECK(f(1.0, x)[0] == doctest::Approx(2.0 * std::exp(-1.5)));
  CHECK(f.growth == -1.5);
  CHECK(f.lipschitz == 1.0);
}

TEST_CASE("built-in densities integrate to one") {
  const ModelSpec b = builtin::make_model_b();
  for (double x : {0.0, 0.5, 3.0, 40.0}) {
    const double mass = oracle::simpson([&](double t) { return b.jumps.density(StatePoint(x), t); }, 0.0, 1.0, 200);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  const ModelSpec a = builtin::make_model_a();
  CHECK(a.jumps.density(StatePoint(5.0), 0.3) == 1.0);
  CHECK_FALSE(a.jumps.place_dependent);
  CHECK(b.jumps.place_dependent);
  CHECK(b.jumps.lipschitz_p == 0.5);
  CHECK(b.jumps.overlap_pbar == 0.5);
}

TEST_CASE("parameter validation") {
  builtin::DecayBurstParams p;
  p.beta = 1.0;
  CHECK_THROWS_AS(builtin::make_model_a(p), std::invalid_argument);
  p.beta = 0.0;
  CHECK_NOTHROW(builtin::make_model_a(p));
  p.a = 0.0;
  CHECK_THROWS_AS(builtin::make_model_b(p), std::invalid_argument);
  CHECK_THROWS_AS(builtin::make_builtin("modelC"), ConfigError);
}

TEST_CASE("closed-form moments match the moment recursion") {
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    const auto chain = oracle::decay_burst_chain_moments(1.0, 0.5, lambda);
    const auto flow = oracle::decay_burst_flow_moments(1.0, 0.5, lambda);
    CHECK(builtin::model_a_chain_mean(1.0, 0.5, lambda) == doctest::Approx(chain.m1).epsilon(1e-9));
    CHECK(builtin::model_a_chain_second_moment(1.0, 0.5, lambda) == doctest::Approx(chain.m2).epsilon(1e-9));
    CHECK(builtin::model_a_flow_mean(1.0, 0.5, lambda) == doctest::Approx(flow.m1).epsilon(1e-9));
    CHECK(builtin::model_a_flow_second_moment(1.0, 0.5, lambda) == doctest::Approx(flow.m2).epsilon(1e-9));
  }
  CHECK(builtin::model_a_chain_mean(1.0, 0.5, 2.0) == doctest::Approx(0.75));
  CHECK(builtin::model_a_flow_mean(1.0, 0.5, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("audits pass for both built-in models") {
  for (const char* name : {"modelA", "modelB"}) {
    const ModelSpec spec = builtin::make_builtin(name);
    const AuditReport r = audit_model(spec, 10000, 5.0, 64, 11);
    CHECK(r.passed());
    for (const auto& row : r.rows) {
      if (row.required) CHECK(row.max_violation <= 1e-9);
    }
    REQUIRE(r.find("jump_overlap") != nullptr);
    CHECK(r.observed_pbar >= spec.jumps.overlap_pbar - 1e-12);
  }
}

TEST_CASE("misdeclared constants are caught") {
  ModelSpec a = builtin::make_model_a();
  a.jumps.lipschitz_w = 0.25;
  const AuditReport r = audit_model(a, 2000, 5.0, 32, 3);
  CHECK_FALSE(r.passed());
  REQUIRE(r.find("jump_lipschitz") != nullptr);
  CHECK_FALSE(r.find("jump_lipschitz")->passed);

  ModelSpec b = builtin::make_model_b();
  b.jumps.lipschitz_p = 0.1;
  CHECK_FALSE(audit_model(b, 2000, 5.0, 32, 3).find("density_lipschitz")->passed);

  ModelSpec c = builtin::make_model_a();
  c.flow.growth = -2.0;
  CHECK_FALSE(audit_model(c, 2000, 5.0, 32, 3).find("flow_lipschitz")->passed);

  ModelSpec d = builtin::make_model_b();
  d.jumps.overlap_pbar = 0.9;
  CHECK_FALSE(audit_model(d, 2000, 5.0, 32, 3).find("jump_overlap")->passed);
}

TEST_CASE("negative density is a model error") {
  ModelSpec a = builtin::make_model_a();
  a.jumps.density = [](const StatePoint&, double theta) { return 2.0 - 4.0 * theta; };
  CHECK_THROWS_AS(audit_jumps(a.jumps, a.space, 100, 32, 1), ModelError);
}

TEST_CASE("Gauss-Laguerre integrates polynomials against e^{-u} exactly") {
  const QuadratureRule r = gauss_laguerre(20);
  double factorial = 1.0;
  for (int k = 0; k <= 20; ++k) {
    if (k > 0) factorial *= k;
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
    CHECK(s == doctest::Approx(factorial).epsilon(1e-10));
  }
  const QuadratureRule e = exponential_rule(r, 4.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) mean += e.weights[i] * e.nodes[i];
  CHECK(mean == doctest::Approx(0.25).epsilon(1e-13));

  const QuadratureRule m = midpoint_rule(0.0, 2.0, 4);
  CHECK(m.nodes == std::vector<double>{0.25, 0.75, 1.25, 1.75});
  CHECK(m.weights == std::vector<double>{0.5, 0.5, 0.5, 0.5});
}
