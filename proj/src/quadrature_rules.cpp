#include "pdmp/quadrature_rules.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pdmp {

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
  // Jacobi matrix of the monic Laguerre recurrence: a_i = 2i + 1, b_i = i.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < n) {
      jacobi(i, i + 1) = i + 1.0;
      jacobi(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_laguerre: eigensolver failed");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
  }
  // Eigenvectors are unit-norm, so the weights already sum to mu_0 = 1 up to
  // rounding; renormalize so that constants integrate exactly.
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;
  return rule;
}

QuadratureRule midpoint_rule(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("midpoint_rule: n must be >= 1");
  if (!(hi > lo)) throw std::invalid_argument("midpoint_rule: empty interval");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, (hi - lo) / n);
  for (int k = 0; k < n; ++k) rule.nodes[k] = lo + (hi - lo) * (k + 0.5) / n;
  return rule;
}

QuadratureRule exponential_rule(const QuadratureRule& laguerre, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("exponential_rule: lambda must be positive");
  QuadratureRule rule = laguerre;
  for (double& t : rule.nodes) t /= lambda;
  return rule;
}

}  // namespace pdmp
