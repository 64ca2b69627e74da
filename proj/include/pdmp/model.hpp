#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pdmp/state.hpp"

namespace pdmp {

/// Deterministic semi-flow S(t, x) with its declared regularity constants.
///
/// `lipschitz` and `growth` are the constants L and alpha in
/// |S(t,x) - S(t,y)| <= L e^{alpha t} |x - y|; `j_bound` is the function J in
/// the time-regularity bound |S(t,x) - S(s,x)| <= (t - s) e^{alpha r} J(x).
struct SemiFlow {
  std::function<StatePoint(double t, const StatePoint& x)> evaluate;
  std::function<double(const StatePoint& x)> j_bound;
  double lipschitz = 1.0;
  double growth = 0.0;

  StatePoint operator()(double t, const StatePoint& x) const { return evaluate(t, x); }
};

/// Family of jump maps w_theta indexed by a mark on the interval [theta_lo, theta_hi]
/// (Lebesgue reference measure), selected with place-dependent density p(x, theta).
struct JumpFamily {
  double theta_lo = 0.0;
  double theta_hi = 1.0;
  std::function<StatePoint(double theta, const StatePoint& x)> apply;
  std::function<double(const StatePoint& x, double theta)> density;
  double lipschitz_w = 1.0;
  double lipschitz_p = 0.0;
  double overlap_pbar = 1.0;
  /// False when p(x, .) does not depend on x; lets samplers cache the inverse CDF.
  bool place_dependent = true;

  double theta_measure() const { return theta_hi - theta_lo; }
};

/// Membership test for X plus a bounding box used to draw audit samples.
struct StateSpace {
  std::size_t dimension = 1;
  std::function<bool(const StatePoint& x)> contains;
  std::vector<double> sample_lo;
  std::vector<double> sample_hi;
};

/// The complete model: flow, jumps, admissible rate interval and reference point.
struct ModelSpec {
  std::string name;
  SemiFlow flow;
  JumpFamily jumps;
  StateSpace space;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  StatePoint xbar;
};

/// max(0, alpha).
inline double alpha_bar(double growth) { return growth > 0.0 ? growth : 0.0; }

/// True iff L*L_w + alpha/lambda < 1 and lambda > max(0, alpha).
bool check_contractivity(const ModelSpec& spec, double lambda);

/// Checks the contraction condition on the whole interval [lambda_min, lambda_max].
///
/// The left side L*L_w + alpha/lambda is monotone in lambda, so the two
/// endpoints decide the interval.
bool check_contractivity_interval(const ModelSpec& spec);

/// Coupling-free upper bound on the per-step Lipschitz factor of P_lambda:
/// (L_w + L_p) L lambda / (lambda - alpha). Used by the joint-continuity bound.
double jump_operator_factor(const ModelSpec& spec, double lambda);

}  // namespace pdmp
