#include "pdmp/model.hpp"

namespace pdmp {

bool check_contractivity(const ModelSpec& spec, double lambda) {
  if (!(lambda > 0.0)) return false;
  const double lhs = spec.flow.lipschitz * spec.jumps.lipschitz_w + spec.flow.growth / lambda;
  return lhs < 1.0 && lambda > alpha_bar(spec.flow.growth);
}

bool check_contractivity_interval(const ModelSpec& spec) {
  if (!(spec.lambda_min > 0.0) || spec.lambda_max < spec.lambda_min) return false;
  return check_contractivity(spec, spec.lambda_min) && check_contractivity(spec, spec.lambda_max);
}

double jump_operator_factor(const ModelSpec& spec, double lambda) {
  return (spec.jumps.lipschitz_w + spec.jumps.lipschitz_p) * spec.flow.lipschitz * lambda /
         (lambda - spec.flow.growth);
}

}  // namespace pdmp
