#pragma once

#include <vector>

namespace pdmp {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Laguerre rule for the weight e^{-u} on [0, inf), weights summing to 1.
///
/// Built with the Golub-Welsch eigenvalue method. Integrating against
/// lambda e^{-lambda t} dt uses nodes u_k / lambda with unchanged weights.
QuadratureRule gauss_laguerre(int n);

/// Composite midpoint rule on [lo, hi] with n cells; weights are the cell widths.
QuadratureRule midpoint_rule(double lo, double hi, int n);

/// Nodes of `rule` scaled to the Exp(lambda) law: t_k = u_k / lambda.
QuadratureRule exponential_rule(const QuadratureRule& laguerre, double lambda);

}  // namespace pdmp
