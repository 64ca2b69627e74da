#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdmp/flat_metric.hpp"
#include "pdmp/measure.hpp"
#include "pdmp/model.hpp"
#include "pdmp/quadrature.hpp"
#include "pdmp/simulate.hpp"

namespace pdmp {

/// One numerically checked inequality lhs <= rhs + tolerance.
struct BoundReport {
  std::string bound_id;
  /// Parameters as "key=value;key=value".
  std::string inputs;
  double lhs = 0.0;
  /// Statistical error bar of lhs (0 for deterministic computations).
  double lhs_err = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  double slack = 0.0;
  bool pass = false;
  /// Failing a non-required report is a warning only.
  bool required = true;
};

BoundReport make_report(std::string bound_id, std::string inputs, double lhs, double rhs, double tolerance,
                        double lhs_err = 0.0, bool required = true);

/// True when every required report passes.
bool all_required_pass(const std::vector<BoundReport>& reports);

void write_reports_csv(std::ostream& out, const std::vector<BoundReport>& reports);

/// Exact integral of |l1 e^{-l1 t} - l2 e^{-l2 t}| over [0, inf).
double mvt_exact(double lambda1, double lambda2);

/// |l1 - l2| (1/l1 + 1/l2).
double mvt_bound(double lambda1, double lambda2);

/// One report per unordered pair of grid rates (a single rate yields the pair (l, l)); zero tolerance.
std::vector<BoundReport> verify_mvt(const std::vector<double>& lambdas);

struct VerifyOptions {
  /// Deterministic quadrature allowance added to every tolerance.
  double tolerance = 1e-3;
  std::size_t support_cap = 2000;
  int t_nodes = 64;
  int theta_nodes = 64;
};

/// fm(mu1 Pi_t, mu2 Pi_t) <= (1 + (L_w + L_p) L e^{alpha t}) fm(mu1, mu2) for each t.
std::vector<BoundReport> verify_equicnt(const ModelSpec& spec, const EmpiricalMeasure& mu1,
                                        const EmpiricalMeasure& mu2, const std::vector<double>& t_grid,
                                        const VerifyOptions& options = {});

/// fm(mu1 P_l1, mu2 P_l2) <= |mu1|_TV |l1 - l2|(1/l1 + 1/l2) + fm(mu1, mu2)(1 + (L_w + L_p) L l2 / (l2 - alpha)).
BoundReport verify_joint_continuity(const ModelSpec& spec, double lambda1, double lambda2,
                                    const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                    const VerifyOptions& options = {});

struct RateFit {
  double C = 0.0;
  double q = 0.0;
  double r_squared = 0.0;
  /// d_n = fm(mu P^n, mu*) for n = 1..N.
  std::vector<double> distances;
  /// Indices n (1-based) that entered the fit.
  std::vector<int> used;
};

struct RateFitOptions {
  int steps = 40;
  /// Only d_n above this enter the fit.
  double floor = 1e-7;
  double power_tolerance = 1e-13;
  int power_max_iter = 100000;
  KernelOptions kernel;
};

/// Least-squares fit of log d_n = log C + n log q on the grid chain started at
/// the binned Dirac mass at `x0`. Throws EstimationError with fewer than 3 usable points.
RateFit fit_ergodic_rate(const ModelSpec& spec, double lambda, const Grid1D& grid, double x0,
                         const RateFitOptions& options = {});

/// Bounded Lipschitz functions used by the rescaling check.
struct TestFunction {
  std::string name;
  std::function<double(const StatePoint&)> f;
};

std::vector<TestFunction> default_test_functions();

/// Max over test points and functions of |<f, delta_x P_lambda> - <f, delta_x P_lambda>'| where the
/// primed side uses rate lambda_max and the time-rescaled flow S((lambda_max / lambda) u, x).
/// Throws std::invalid_argument for an expansive flow (alpha > 0).
BoundReport verify_rescaling_identity(const ModelSpec& spec, double lambda, const std::vector<StatePoint>& points,
                                      const std::vector<TestFunction>& functions, int t_nodes = 64,
                                      int theta_nodes = 64, double tolerance = 1e-6);

enum class Backend { kMonteCarlo, kQuadrature };

Backend parse_backend(const std::string& name);
std::string backend_name(Backend backend);

struct SweepOptions {
  Backend backend = Backend::kQuadrature;
  QuadratureInvariantOptions quadrature;
  ChainEstimateOptions chain;
  /// Exp(lambda) draws per particle for the Monte Carlo G_lambda.
  int g_draws = 1;
  std::size_t support_cap = 2000;
  double lp_tolerance = 1e-8;
  /// Largest D_mu, D_nu allowed at the grid points adjacent to lambda_bar.
  double continuity_threshold = 0.05;
  /// Parallel workers across sweep points (0 = hardware concurrency).
  unsigned threads = 0;
};

struct SweepRow {
  double lambda = 0.0;
  double d_mu = 0.0;
  double d_nu = 0.0;
  double bound = 0.0;
  double err = 0.0;
  bool pass = false;
  double mean_mu = 0.0;
  double mean_nu = 0.0;
  /// Non-empty when this rate could not be evaluated.
  std::string error;
};

struct SweepResult {
  double lambda_bar = 0.0;
  double c = 0.0;
  std::vector<SweepRow> rows;
  std::vector<BoundReport> reports;
};

/// Invariant measures across a rate grid compared with those at lambda_bar.
/// Rows are sorted by lambda; per-rate failures are recorded and the sweep continues.
SweepResult sweep_invariant(const ModelSpec& spec, double lambda_bar, std::vector<double> lambdas,
                            const SweepOptions& options = {});

void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Invariant estimates of the chain and flow laws with a statistical error bar for FM comparisons.
struct InvariantPair {
  EmpiricalMeasure mu;
  EmpiricalMeasure nu;
  /// Half-sample FM noise estimate of mu and nu (0 for quadrature).
  double err_mu = 0.0;
  double err_nu = 0.0;
  /// Quadrature defect and residual, or 0.
  double defect = 0.0;
};

InvariantPair estimate_invariant_pair(const ModelSpec& spec, double lambda, const SweepOptions& options);

/// FM distance with coalescing beyond `cap`; error_bound carries the coalescing bound.
struct CappedDistance {
  double value = 0.0;
  double error_bound = 0.0;
};

CappedDistance fm_capped(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap,
                         double lp_tolerance = 1e-8);

}  // namespace pdmp
