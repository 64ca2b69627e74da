#pragma once

#include <string>

#include "pdmp/model.hpp"

namespace pdmp::builtin {

/// Parameters shared by the two decay/burst models on X = [0, inf).
struct DecayBurstParams {
  double a = 1.0;      ///< decay rate of the flow x e^{-a t}
  double beta = 0.5;   ///< contraction of the jump map beta x + theta
  double lambda_min = 0.5;
  double lambda_max = 4.0;
  double xbar = 0.0;
};

/// Model A: S(t,x) = x e^{-at}, w_theta(x) = beta x + theta, p = 1 on [0, 1].
/// Certified constants L = 1, alpha = -a, J(x) = a x, L_w = beta, L_p = 0, pbar = 1.
ModelSpec make_model_a(const DecayBurstParams& params = {});

/// Model B: as Model A with p(x, theta) = c(x) + (1 - c(x)) 2 theta, c(x) = 1/(1+x).
/// Certified constants L = 1, alpha = -a, L_w = beta, L_p = 1/2, pbar = 1/2.
ModelSpec make_model_b(const DecayBurstParams& params = {});

/// Looks up "modelA" or "modelB"; throws ConfigError otherwise.
ModelSpec make_builtin(const std::string& name, const DecayBurstParams& params = {});

/// Model B's place-dependent weight c(x) = 1/(1+x).
inline double model_b_weight(double x) { return 1.0 / (1.0 + x); }

/// S(t, x) = x with L = 1, alpha = 0, J = 0.
SemiFlow identity_flow();

/// x e^{-at} with the certified constants of Model A.
SemiFlow decay_flow(double a);

/// Exact mean of the post-jump invariant law for Model A:
/// (1/2) / (1 - beta lambda / (lambda + a)). Throws ContractivityError if the
/// mean contraction factor is >= 1.
double model_a_chain_mean(double a, double beta, double lambda);

/// Exact mean of the continuous-time invariant law nu = mu G_lambda:
/// chain mean times lambda / (lambda + a).
double model_a_flow_mean(double a, double beta, double lambda);

/// Exact second moment of the post-jump invariant law for Model A.
double model_a_chain_second_moment(double a, double beta, double lambda);

/// Exact second moment of nu = mu G_lambda for Model A.
double model_a_flow_second_moment(double a, double beta, double lambda);

}  // namespace pdmp::builtin
