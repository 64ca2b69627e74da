#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pdmp/builtin_models.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/quadrature.hpp"

using namespace pdmp;

TEST_CASE("linear binning keeps mass and first moment") {
  const Grid1D g = Grid1D::uniform(4.0, 9);
  std::vector<double> row(g.size(), 0.0);
  CHECK(g.deposit(1.3, 2.0, row));
  CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(2.0));
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m += g[i] * row[i];
  CHECK(m == doctest::Approx(2.6));
  CHECK(row[2] == doctest::Approx(0.8));
  CHECK(row[3] == doctest::Approx(1.2));

  std::vector<double> hit(g.size(), 0.0);
  CHECK(g.deposit(1.5, 1.0, hit));
  CHECK(hit[3] == 1.0);
  CHECK_FALSE(g.deposit(4.5, 1.0, hit));
  CHECK_FALSE(g.deposit(-0.1, 1.0, hit));
  CHECK(g.binned_dirac(4.0).back() == 1.0);
  CHECK_THROWS(Grid1D({0.0, 1.0, 1.0}));
}

TEST_CASE("power iteration on a matrix with identical rows") {
  KernelMatrix P(3);
  const double r[3] = {0.2, 0.5, 0.3};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) P.row(i)[j] = r[j];
  }
  P.normalize_rows();
  const PowerResult res = power_iterate(P, 1e-14, 10);
  for (std::size_t j = 0; j < 3; ++j) CHECK(res.vector[j] == doctest::Approx(r[j]).epsilon(1e-15));
  CHECK(res.iterations <= 2);
  CHECK(res.residual <= 1e-14);
}

TEST_CASE("power iteration reports non-convergence") {
  KernelMatrix P(2);
  P.row(0)[1] = 1.0;
  P.row(1)[0] = 1.0;
  const std::vector<double> start = {1.0, 0.0};
  try {
    power_iterate(P, 1e-12, 25, start);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_residual() == doctest::Approx(2.0));
  }
}

TEST_CASE("identity kernel leaves measures fixed") {
  const KernelMatrix I = KernelMatrix::identity(5);
  const std::vector<double> mu = {0.1, 0.2, 0.3, 0.25, 0.15};
  CHECK(I.left_multiply(mu) == mu);
  CHECK(I.max_defect() == 0.0);
}

TEST_CASE("transition matrix of the decay-burst chain") {
  const ModelSpec a = builtin::make_model_a();
  const Grid1D g = Grid1D::uniform(8.0, 400);
  const KernelMatrix P = build_P_matrix(a, 2.0, g);
  CHECK(P.max_defect() < 1e-12);
  for (std::size_t i = 0; i < g.size(); i += 50) {
    double s = 0.0, m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      s += P(i, j);
      m += P(i, j) * g[j];
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    // E[X_1 | X_0 = x] = beta * lambda/(lambda+a) * x + 1/2.
    CHECK(m == doctest::Approx(g[i] / 3.0 + 0.5).epsilon(1e-9));
  }
  CHECK_THROWS_AS(build_P_matrix(a, 2.0, Grid1D::uniform(0.5, 50)), DefectError);
  ModelSpec bad = a;
  bad.jumps.lipschitz_w = 5.0;
  CHECK_THROWS_AS(build_P_matrix(bad, 2.0, g), ContractivityError);
}

TEST_CASE("grid invariant measures reproduce the moment recursion") {
  const ModelSpec a = builtin::make_model_a();
  for (double lambda : {1.0, 2.0, 4.0}) {
    QuadratureInvariantOptions o;
    o.grid_size = 1000;
    const QuadratureInvariant q = estimate_invariant_quadrature(a, lambda, o);
    const auto chain = oracle::decay_burst_chain_moments(1.0, 0.5, lambda);
    const auto flow = oracle::decay_burst_flow_moments(1.0, 0.5, lambda);
    CHECK(std::abs(grid_mean(q.grid, q.mu) - chain.m1) < 2e-3);
    CHECK(std::abs(grid_mean(q.grid, q.nu) - flow.m1) < 2e-3);
    CHECK(std::abs(q.mu_measure().moment(2) - chain.m2) < 5e-3);
    CHECK(q.residual <= 1e-12);
  }
}

TEST_CASE("atom pushforwards through the jump kernels") {
  const ModelSpec a = builtin::make_model_a();
  const auto d1 = EmpiricalMeasure::dirac(StatePoint(1.0));
  const EmpiricalMeasure pi = push_through_pi(a, d1, 0.0, 64);
  CHECK(pi.size() == 64);
  CHECK(pi.total_mass() == doctest::Approx(1.0));
  CHECK(pi.mean() == doctest::Approx(1.0));  // 0.5 * 1 + 0.5
  const EmpiricalMeasure p = push_through_p(a, d1, 2.0, 32, 16);
  CHECK(p.size() == 32 * 16);
  CHECK(p.mean() == doctest::Approx(1.0 / 3.0 + 0.5).epsilon(1e-12));
  const double v = integrate_against_p(a.flow, a.jumps, 2.0, StatePoint(1.0),
                                       [](const StatePoint& z) { return z[0]; }, 32, 16);
  CHECK(v == doctest::Approx(p.mean()).epsilon(1e-13));
}

TEST_CASE("flow kernel matrix matches the exponential time law") {
  const SemiFlow f = builtin::decay_flow(1.0);
  const Grid1D g = Grid1D::uniform(4.0, 200);
  const KernelMatrix G = build_G_matrix(f, 2.0, g);
  double m = 0.0;
  const std::size_t i = 100;
  for (std::size_t j = 0; j < g.size(); ++j) m += G(i, j) * g[j];
  CHECK(m == doctest::Approx(g[i] * 2.0 / 3.0).epsilon(1e-10));
}
