#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdmp/measure.hpp"
#include "pdmp/model.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

/// Logged realization of the post-jump chain: X_0..X_n, tau_0 = 0 < tau_1 < ... < tau_n,
/// and marks theta_1..theta_n.
struct ChainSample {
  std::vector<StatePoint> states;
  std::vector<double> jump_times;
  std::vector<double> marks;

  std::size_t steps() const noexcept { return marks.size(); }
};

/// Exp(lambda) variate by inverse CDF: -ln(u) / lambda for u in (0, 1].
double holding_time_from_uniform(double lambda, double u);
double sample_holding_time(double lambda, RngStream& rng);

/// Draws marks from p(x, .) by inverse CDF on a fixed grid of `grid_size`
/// cells (trapezoid CDF, linear interpolation). Place-independent densities
/// are tabulated once.
class MarkSampler {
 public:
  explicit MarkSampler(const JumpFamily& jumps, int grid_size = 1024);

  /// Mark with CDF value u in [0, 1] at pre-jump state x. Throws ModelError
  /// if p(x, .) is negative or not normalizable.
  double inverse_cdf(const StatePoint& x, double u);
  double sample(const StatePoint& x, RngStream& rng) { return inverse_cdf(x, rng.uniform()); }

 private:
  void tabulate(const StatePoint& x);

  JumpFamily jumps_;
  int grid_size_;
  double cell_;
  std::vector<double> cdf_;
  bool cached_ = false;
};

double sample_mark(const StatePoint& x, const JumpFamily& jumps, RngStream& rng, int grid_size = 1024);

struct StepResult {
  StatePoint next;
  double holding_time = 0.0;
  double mark = 0.0;
};

/// Deterministic part of one chain step: w_theta(S(holding_time, x)).
StatePoint jump_after(const ModelSpec& spec, const StatePoint& x, double holding_time, double mark);

/// Per-rate chain transition sampler. Construction checks the contraction condition.
class ChainStepper {
 public:
  ChainStepper(const ModelSpec& spec, double lambda, int mark_grid = 1024);

  /// Draws the holding time first, then the mark at the pre-jump state S(dt, x).
  StepResult step(const StatePoint& x, RngStream& rng);

  const ModelSpec& spec() const noexcept { return spec_; }
  double lambda() const noexcept { return lambda_; }

 private:
  ModelSpec spec_;
  double lambda_;
  MarkSampler marks_;
};

/// One chain step from x; throws ContractivityError if lambda is not admissible.
StepResult step_chain(const StatePoint& x, double lambda, const ModelSpec& spec, RngStream& rng, int mark_grid = 1024);

/// Iterates the chain n times from x0, logging states, cumulative jump times and marks.
/// The stream is advanced in place, so consecutive calls continue the same realization.
ChainSample run_chain(const StatePoint& x0, int n, double lambda, const ModelSpec& spec, RngStream& rng,
                      int mark_grid = 1024);

/// X(t) = S(t - tau_n, X_n) for tau_n <= t < tau_{n+1}. Throws std::out_of_range for
/// times outside [0, last jump time).
std::vector<StatePoint> interpolate_path(const ChainSample& chain, const SemiFlow& flow,
                                         std::span<const double> t_grid);

struct ChainEstimateOptions {
  int burn_in = 1000;
  /// Retained states per replica.
  int samples = 125000;
  int replicas = 8;
  int mark_grid = 1024;
  std::uint64_t seed = 1;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Pooled invariant-measure estimate with per-replica bookkeeping.
struct InvariantEstimate {
  /// Equal-weight pooled measure of mass 1; replica r owns the particles
  /// [r * samples, (r + 1) * samples).
  EmpiricalMeasure measure;
  int replicas = 0;
  int samples_per_replica = 0;
  std::vector<double> replica_means;

  /// Standard error of the pooled mean from the spread of replica means.
  double mean_standard_error() const;
  /// Particles of replicas with the given parity pooled and renormalized; used
  /// to estimate the statistical noise of distances between estimates.
  EmpiricalMeasure replica_half(int parity) const;
};

/// Runs `replicas` independent chains from xbar (replica r uses stream (seed, r)),
/// discards burn_in steps and pools the following `samples` states of each.
/// Replicas run in parallel; the result does not depend on scheduling.
InvariantEstimate estimate_invariant_chain(const ModelSpec& spec, double lambda, const ChainEstimateOptions& options);

/// How the Exp(lambda) time integral of G_lambda is evaluated.
struct GMode {
  enum class Kind { kMonteCarlo, kQuadrature };
  Kind kind = Kind::kQuadrature;
  /// Draws per particle (Monte Carlo) or Gauss-Laguerre nodes (quadrature).
  int count = 64;

  static GMode monte_carlo(int per_particle) { return {Kind::kMonteCarlo, per_particle}; }
  static GMode quadrature(int nodes) { return {Kind::kQuadrature, nodes}; }
};

/// mu G_lambda: each atom x is pushed to S(t, x) with t ~ Exp(lambda), either
/// by k sampled times (weights split evenly) or by Gauss-Laguerre nodes.
EmpiricalMeasure apply_G_lambda(const EmpiricalMeasure& mu, double lambda, const SemiFlow& flow, GMode mode,
                                RngStream& rng);

}  // namespace pdmp
