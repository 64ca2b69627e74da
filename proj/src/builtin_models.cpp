#include "pdmp/builtin_models.hpp"

#include <cmath>
#include <stdexcept>

#include "pdmp/errors.hpp"

namespace pdmp::builtin {

namespace {

void validate(const DecayBurstParams& p) {
  if (!(p.a > 0.0)) throw std::invalid_argument("decay rate a must be positive");
  if (!(p.beta >= 0.0 && p.beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (!(p.lambda_min > 0.0) || p.lambda_max < p.lambda_min) {
    throw std::invalid_argument("rate interval must satisfy 0 < lambda_min <= lambda_max");
  }
  if (!(p.xbar >= 0.0)) throw std::invalid_argument("xbar must lie in [0, inf)");
}

StateSpace half_line() {
  StateSpace space;
  space.dimension = 1;
  space.contains = [](const StatePoint& x) { return x.dimension() == 1 && x[0] >= 0.0; };
  space.sample_lo = {0.0};
  space.sample_hi = {10.0};
  return space;
}

ModelSpec make_decay_burst(const std::string& name, const DecayBurstParams& p) {
  validate(p);
  ModelSpec spec;
  spec.name = name;
  spec.flow = decay_flow(p.a);
  spec.space = half_line();
  spec.lambda_min = p.lambda_min;
  spec.lambda_max = p.lambda_max;
  spec.xbar = StatePoint(p.xbar);

  const double beta = p.beta;
  spec.jumps.theta_lo = 0.0;
  spec.jumps.theta_hi = 1.0;
  spec.jumps.apply = [beta](double theta, const StatePoint& x) { return StatePoint(beta * x[0] + theta); };
  spec.jumps.lipschitz_w = beta;
  return spec;
}

void check_mean_contraction(double a, double beta, double lambda) {
  if (!(lambda > 0.0) || !(a > 0.0)) throw std::invalid_argument("a and lambda must be positive");
  if (!(beta * lambda / (lambda + a) < 1.0)) {
    throw ContractivityError("mean contraction factor beta*lambda/(lambda+a) must be < 1");
  }
}

}  // namespace

SemiFlow identity_flow() {
  SemiFlow flow;
  flow.evaluate = [](double, const StatePoint& x) { return x; };
  flow.j_bound = [](const StatePoint&) { return 0.0; };
  flow.lipschitz = 1.0;
  flow.growth = 0.0;
  return flow;
}

SemiFlow decay_flow(double a) {
  SemiFlow flow;
  flow.evaluate = [a](double t, const StatePoint& x) { return StatePoint(x[0] * std::exp(-a * t)); };
  flow.j_bound = [a](const StatePoint& x) { return a * std::abs(x[0]); };
  flow.lipschitz = 1.0;
  flow.growth = -a;
  return flow;
}

ModelSpec make_model_a(const DecayBurstParams& params) {
  ModelSpec spec = make_decay_burst("modelA", params);
  spec.jumps.density = [](const StatePoint&, double theta) { return (theta >= 0.0 && theta <= 1.0) ? 1.0 : 0.0; };
  spec.jumps.lipschitz_p = 0.0;
  spec.jumps.overlap_pbar = 1.0;
  spec.jumps.place_dependent = false;
  return spec;
}

ModelSpec make_model_b(const DecayBurstParams& params) {
  ModelSpec spec = make_decay_burst("modelB", params);
  spec.jumps.density = [](const StatePoint& x, double theta) {
    if (theta < 0.0 || theta > 1.0) return 0.0;
    const double c = model_b_weight(x[0]);
    return c + (1.0 - c) * 2.0 * theta;
  };
  spec.jumps.lipschitz_p = 0.5;
  spec.jumps.overlap_pbar = 0.5;
  spec.jumps.place_dependent = true;
  return spec;
}

ModelSpec make_builtin(const std::string& name, const DecayBurstParams& params) {
  if (name == "modelA") return make_model_a(params);
  if (name == "modelB") return make_model_b(params);
  throw ConfigError("unknown built-in model '" + name + "' (expected modelA or modelB)");
}

double model_a_chain_mean(double a, double beta, double lambda) {
  check_mean_contraction(a, beta, lambda);
  return 0.5 / (1.0 - beta * lambda / (lambda + a));
}

double model_a_flow_mean(double a, double beta, double lambda) {
  return model_a_chain_mean(a, beta, lambda) * lambda / (lambda + a);
}

double model_a_chain_second_moment(double a, double beta, double lambda) {
  // X' = beta E X + theta with E = e^{-aT}: E[E] = lambda/(lambda+a),
  // E[E^2] = lambda/(lambda+2a), E[theta] = 1/2, E[theta^2] = 1/3.
  const double m1 = model_a_chain_mean(a, beta, lambda);
  const double r1 = lambda / (lambda + a);
  const double r2 = lambda / (lambda + 2.0 * a);
  return (beta * r1 * m1 + 1.0 / 3.0) / (1.0 - beta * beta * r2);
}

double model_a_flow_second_moment(double a, double beta, double lambda) {
  return model_a_chain_second_moment(a, beta, lambda) * lambda / (lambda + 2.0 * a);
}

}  // namespace pdmp::builtin
