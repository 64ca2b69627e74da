#include "pdmp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pdmp/errors.hpp"
#include "pdmp/format.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/quadrature_rules.hpp"

namespace pdmp {

double holding_time_from_uniform(double lambda, double u) {
  if (!(lambda > 0.0)) throw std::invalid_argument("holding time: lambda must be positive");
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("holding time: u must lie in (0, 1]");
  return -std::log(u) / lambda;
}

double sample_holding_time(double lambda, RngStream& rng) {
  return holding_time_from_uniform(lambda, rng.uniform_open_closed());
}

MarkSampler::MarkSampler(const JumpFamily& jumps, int grid_size)
    : jumps_(jumps), grid_size_(grid_size), cdf_(static_cast<std::size_t>(std::max(grid_size, 1)) + 1) {
  if (grid_size < 1) throw std::invalid_argument("MarkSampler: grid size must be >= 1");
  if (!(jumps.theta_hi > jumps.theta_lo)) throw std::invalid_argument("MarkSampler: empty mark interval");
  cell_ = (jumps.theta_hi - jumps.theta_lo) / grid_size;
}

void MarkSampler::tabulate(const StatePoint& x) {
  double prev = jumps_.density(x, jumps_.theta_lo);
  if (!(prev >= 0.0)) throw ModelError("negative or undefined mark density");
  cdf_[0] = 0.0;
  for (int k = 1; k <= grid_size_; ++k) {
    const double cur = jumps_.density(x, jumps_.theta_lo + k * cell_);
    if (!(cur >= 0.0)) throw ModelError("negative or undefined mark density");
    cdf_[k] = cdf_[k - 1] + 0.5 * (prev + cur) * cell_;
    prev = cur;
  }
  const double total = cdf_.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ModelError("mark density is not normalizable at x = " + format_double(x[0]));
  }
}

double MarkSampler::inverse_cdf(const StatePoint& x, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("MarkSampler: u must lie in [0, 1]");
  if (jumps_.place_dependent || !cached_) {
    tabulate(x);
    cached_ = !jumps_.place_dependent;
  }
  const double target = u * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  if (it == cdf_.end()) return jumps_.theta_hi;
  const auto k = static_cast<int>(std::distance(cdf_.begin(), it)) - 1;
  const double lo = cdf_[k];
  const double hi = cdf_[k + 1];
  const double frac = hi > lo ? (target - lo) / (hi - lo) : 0.0;
  return jumps_.theta_lo + (k + frac) * cell_;
}

double sample_mark(const StatePoint& x, const JumpFamily& jumps, RngStream& rng, int grid_size) {
  MarkSampler sampler(jumps, grid_size);
  return sampler.sample(x, rng);
}

StatePoint jump_after(const ModelSpec& spec, const StatePoint& x, double holding_time, double mark) {
  return spec.jumps.apply(mark, spec.flow(holding_time, x));
}

ChainStepper::ChainStepper(const ModelSpec& spec, double lambda, int mark_grid)
    : spec_(spec), lambda_(lambda), marks_(spec.jumps, mark_grid) {
  if (!check_contractivity(spec, lambda)) {
    throw ContractivityError("rate " + format_double(lambda) +
                             " violates L*L_w + alpha/lambda < 1 with lambda > max(0, alpha)");
  }
}

StepResult ChainStepper::step(const StatePoint& x, RngStream& rng) {
  StepResult r;
  r.holding_time = sample_holding_time(lambda_, rng);
  const StatePoint pre_jump = spec_.flow(r.holding_time, x);
  r.mark = marks_.sample(pre_jump, rng);
  r.next = spec_.jumps.apply(r.mark, pre_jump);
  return r;
}

StepResult step_chain(const StatePoint& x, double lambda, const ModelSpec& spec, RngStream& rng, int mark_grid) {
  ChainStepper stepper(spec, lambda, mark_grid);
  return stepper.step(x, rng);
}

ChainSample run_chain(const StatePoint& x0, int n, double lambda, const ModelSpec& spec, RngStream& rng,
                      int mark_grid) {
  if (n < 0) throw std::invalid_argument("run_chain: n must be >= 0");
  ChainStepper stepper(spec, lambda, mark_grid);
  ChainSample chain;
  chain.states.reserve(static_cast<std::size_t>(n) + 1);
  chain.jump_times.reserve(static_cast<std::size_t>(n) + 1);
  chain.marks.reserve(static_cast<std::size_t>(n));
  chain.states.push_back(x0);
  chain.jump_times.push_back(0.0);
  for (int k = 0; k < n; ++k) {
    const StepResult r = stepper.step(chain.states.back(), rng);
    chain.states.push_back(r.next);
    chain.jump_times.push_back(chain.jump_times.back() + r.holding_time);
    chain.marks.push_back(r.mark);
  }
  return chain;
}

std::vector<StatePoint> interpolate_path(const ChainSample& chain, const SemiFlow& flow,
                                         std::span<const double> t_grid) {
  std::vector<StatePoint> path;
  path.reserve(t_grid.size());
  const double horizon = chain.jump_times.back();
  for (double t : t_grid) {
    if (!(t >= 0.0) || t >= horizon) {
      throw std::out_of_range("interpolate_path: t = " + format_double(t) + " is outside [0, " +
                              format_double(horizon) + ")");
    }
    auto it = std::upper_bound(chain.jump_times.begin(), chain.jump_times.end(), t);
    const auto n = static_cast<std::size_t>(std::distance(chain.jump_times.begin(), it)) - 1;
    path.push_back(flow(t - chain.jump_times[n], chain.states[n]));
  }
  return path;
}

double InvariantEstimate::mean_standard_error() const {
  const auto r = replica_means.size();
  if (r < 2) return 0.0;
  const double m = std::accumulate(replica_means.begin(), replica_means.end(), 0.0) / static_cast<double>(r);
  double ss = 0.0;
  for (double v : replica_means) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r));
}

EmpiricalMeasure InvariantEstimate::replica_half(int parity) const {
  EmpiricalMeasure half;
  const auto per = static_cast<std::size_t>(samples_per_replica);
  for (int r = 0; r < replicas; ++r) {
    if (r % 2 != parity) continue;
    for (std::size_t i = 0; i < per; ++i) {
      const std::size_t idx = static_cast<std::size_t>(r) * per + i;
      half.add(measure.support()[idx], measure.weights()[idx]);
    }
  }
  return half.normalized();
}

InvariantEstimate estimate_invariant_chain(const ModelSpec& spec, double lambda, const ChainEstimateOptions& options) {
  if (options.burn_in < 0 || options.samples < 1 || options.replicas < 1) {
    throw std::invalid_argument("estimate_invariant_chain: need burn_in >= 0, samples >= 1, replicas >= 1");
  }
  if (!check_contractivity(spec, lambda)) {
    throw ContractivityError("rate " + format_double(lambda) + " violates the contraction condition");
  }
  const auto per = static_cast<std::size_t>(options.samples);
  const auto replicas = static_cast<std::size_t>(options.replicas);
  std::vector<StatePoint> particles(per * replicas);
  std::vector<double> means(replicas, 0.0);

  parallel_for(replicas, options.threads, [&](std::size_t r) {
    RngStream rng(options.seed, r);
    ChainStepper stepper(spec, lambda, options.mark_grid);
    StatePoint x = spec.xbar;
    for (int k = 0; k < options.burn_in; ++k) x = stepper.step(x, rng).next;
    double sum = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      x = stepper.step(x, rng).next;
      particles[r * per + i] = x;
      sum += x[0];
    }
    means[r] = sum / static_cast<double>(per);
  });

  InvariantEstimate est;
  est.replicas = options.replicas;
  est.samples_per_replica = options.samples;
  est.replica_means = std::move(means);
  std::vector<double> weights(particles.size(), 1.0 / static_cast<double>(particles.size()));
  est.measure = EmpiricalMeasure(std::move(particles), std::move(weights));
  return est;
}

EmpiricalMeasure apply_G_lambda(const EmpiricalMeasure& mu, double lambda, const SemiFlow& flow, GMode mode,
                                RngStream& rng) {
  if (mode.count < 1) throw std::invalid_argument("apply_G_lambda: k or nodes must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("apply_G_lambda: lambda must be positive");
  EmpiricalMeasure out;
  out.reserve(mu.size() * static_cast<std::size_t>(mode.count));
  if (mode.kind == GMode::Kind::kMonteCarlo) {
    const double share = 1.0 / mode.count;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (int k = 0; k < mode.count; ++k) {
        const double t = sample_holding_time(lambda, rng);
        out.add(flow(t, mu.support()[i]), mu.weights()[i] * share);
      }
    }
  } else {
    const QuadratureRule rule = exponential_rule(gauss_laguerre(mode.count), lambda);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t k = 0; k < rule.size(); ++k) {
        out.add(flow(rule.nodes[k], mu.support()[i]), mu.weights()[i] * rule.weights[k]);
      }
    }
  }
  return out;
}

}  // namespace pdmp
