#include "pdmp/quadrature.hpp"

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

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("Grid1D: need at least 2 nodes");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("Grid1D: nodes must be strictly increasing");
  }
}

Grid1D Grid1D::uniform(double x_max, std::size_t m) {
  if (!(x_max > 0.0)) throw std::invalid_argument("Grid1D::uniform: x_max must be positive");
  if (m < 2) throw std::invalid_argument("Grid1D::uniform: need at least 2 nodes");
  std::vector<double> nodes(m);
  for (std::size_t i = 0; i < m; ++i) nodes[i] = x_max * static_cast<double>(i) / static_cast<double>(m - 1);
  Grid1D grid(std::move(nodes));
  grid.uniform_ = true;
  grid.spacing_ = x_max / static_cast<double>(m - 1);
  return grid;
}

bool Grid1D::deposit(double x, double w, std::span<double> row) const {
  const std::size_t m = nodes_.size();
  if (!(x >= nodes_.front()) || !(x <= nodes_.back())) return false;
  std::size_t j;
  if (uniform_) {
    j = static_cast<std::size_t>((x - nodes_.front()) / spacing_);
    j = std::min(j, m - 1);
    // The guess can be off by one through rounding; settle it on the stored nodes.
    while (j > 0 && nodes_[j] > x) --j;
    while (j + 1 < m && nodes_[j + 1] <= x) ++j;
  } else {
    j = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin()) - 1;
  }
  if (j + 1 >= m || x == nodes_[j]) {
    row[j] += w;
    return true;
  }
  const double frac = (x - nodes_[j]) / (nodes_[j + 1] - nodes_[j]);
  row[j] += w * (1.0 - frac);
  row[j + 1] += w * frac;
  return true;
}

std::vector<double> Grid1D::binned_dirac(double x) const {
  std::vector<double> v(size(), 0.0);
  if (!deposit(x, 1.0, v)) throw std::out_of_range("Grid1D::binned_dirac: point outside the grid");
  return v;
}

KernelMatrix::KernelMatrix(std::size_t m) : m_(m), entries_(m * m, 0.0), defects_(m, 0.0) {}

KernelMatrix KernelMatrix::identity(std::size_t m) {
  KernelMatrix k(m);
  for (std::size_t i = 0; i < m; ++i) k.entries_[i * m + i] = 1.0;
  return k;
}

double KernelMatrix::max_defect() const {
  return defects_.empty() ? 0.0 : *std::max_element(defects_.begin(), defects_.end());
}

void KernelMatrix::normalize_rows() {
  for (std::size_t i = 0; i < m_; ++i) {
    auto r = row(i);
    const double s = std::accumulate(r.begin(), r.end(), 0.0);
    defects_[i] = std::abs(1.0 - s);
    if (s > 0.0) {
      for (double& v : r) v /= s;
    }
  }
}

std::vector<double> KernelMatrix::left_multiply(std::span<const double> mu) const {
  if (mu.size() != m_) throw std::invalid_argument("KernelMatrix::left_multiply: size mismatch");
  std::vector<double> out(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    const double a = mu[i];
    if (a == 0.0) continue;
    const double* r = entries_.data() + i * m_;
    for (std::size_t j = 0; j < m_; ++j) out[j] += a * r[j];
  }
  return out;
}

namespace {

void check_defect(const KernelMatrix& k, double max_defect, const Grid1D& grid) {
  const double defect = k.max_defect();
  if (defect > max_defect) {
    throw DefectError("kernel row defect " + format_double(defect) + " exceeds " + format_double(max_defect) +
                          "; enlarge x_max (currently " + format_double(grid.nodes().back()) + ")",
                      defect);
  }
}

}  // namespace

KernelMatrix build_P_matrix(const ModelSpec& spec, double lambda, const Grid1D& grid, const KernelOptions& options) {
  if (!check_contractivity(spec, lambda)) {
    throw ContractivityError("rate " + format_double(lambda) + " violates the contraction condition");
  }
  const QuadratureRule t_rule = exponential_rule(gauss_laguerre(options.t_nodes), lambda);
  const QuadratureRule th_rule = midpoint_rule(spec.jumps.theta_lo, spec.jumps.theta_hi, options.theta_nodes);
  KernelMatrix P(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) {
    auto row = P.row(i);
    const StatePoint x(grid[i]);
    for (std::size_t k = 0; k < t_rule.size(); ++k) {
      const StatePoint y = spec.flow(t_rule.nodes[k], x);
      for (std::size_t j = 0; j < th_rule.size(); ++j) {
        const double theta = th_rule.nodes[j];
        const double p = spec.jumps.density(y, theta);
        if (p < 0.0) throw ModelError("negative mark density");
        const double w = t_rule.weights[k] * th_rule.weights[j] * p;
        if (w == 0.0) continue;
        grid.deposit(spec.jumps.apply(theta, y)[0], w, row);
      }
    }
  });
  P.normalize_rows();
  check_defect(P, options.max_defect, grid);
  return P;
}

KernelMatrix build_G_matrix(const SemiFlow& flow, double lambda, const Grid1D& grid, const KernelOptions& options) {
  const QuadratureRule t_rule = exponential_rule(gauss_laguerre(options.t_nodes), lambda);
  KernelMatrix G(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) {
    auto row = G.row(i);
    const StatePoint x(grid[i]);
    for (std::size_t k = 0; k < t_rule.size(); ++k) grid.deposit(flow(t_rule.nodes[k], x)[0], t_rule.weights[k], row);
  });
  G.normalize_rows();
  check_defect(G, options.max_defect, grid);
  return G;
}

PowerResult power_iterate(const KernelMatrix& P, double tol, int max_iter, std::span<const double> start) {
  const std::size_t m = P.size();
  std::vector<double> mu;
  if (start.empty()) {
    mu.assign(m, 1.0 / static_cast<double>(m));
  } else {
    if (start.size() != m) throw std::invalid_argument("power_iterate: start vector size");
    mu.assign(start.begin(), start.end());
  }
  PowerResult result;
  double residual = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    std::vector<double> next = P.left_multiply(mu);
    residual = 0.0;
    for (std::size_t j = 0; j < m; ++j) residual += std::abs(next[j] - mu[j]);
    result.residual_history.push_back(residual);
    mu = std::move(next);
    if (residual <= tol) {
      result.vector = std::move(mu);
      result.iterations = k;
      result.residual = residual;
      return result;
    }
  }
  throw ConvergenceError("power_iterate: no convergence after " + std::to_string(max_iter) +
                             " iterations (residual " + format_double(residual) + ")",
                         residual);
}

std::vector<std::vector<double>> push_n(std::span<const double> mu, const KernelMatrix& P, int n) {
  if (n < 1) throw std::invalid_argument("push_n: n must be >= 1");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(P.left_multiply(mu));
  for (int k = 1; k < n; ++k) out.push_back(P.left_multiply(out.back()));
  return out;
}

EmpiricalMeasure grid_measure(const Grid1D& grid, std::span<const double> weights) {
  if (weights.size() != grid.size()) throw std::invalid_argument("grid_measure: size mismatch");
  EmpiricalMeasure mu;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (weights[i] > 0.0) mu.add(StatePoint(grid[i]), weights[i]);
  }
  return mu;
}

double grid_mean(const Grid1D& grid, std::span<const double> weights) {
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m += grid[i] * weights[i];
    s += weights[i];
  }
  return m / s;
}

EmpiricalMeasure push_through_pi(const ModelSpec& spec, const EmpiricalMeasure& mu, double t, int theta_nodes) {
  const QuadratureRule th_rule = midpoint_rule(spec.jumps.theta_lo, spec.jumps.theta_hi, theta_nodes);
  EmpiricalMeasure out;
  out.reserve(mu.size() * th_rule.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const StatePoint y = spec.flow(t, mu.support()[i]);
    for (std::size_t j = 0; j < th_rule.size(); ++j) {
      const double w = mu.weights()[i] * th_rule.weights[j] * spec.jumps.density(y, th_rule.nodes[j]);
      out.add(spec.jumps.apply(th_rule.nodes[j], y), w);
    }
  }
  return out;
}

EmpiricalMeasure push_through_p(const ModelSpec& spec, const EmpiricalMeasure& mu, double lambda, int t_nodes,
                                int theta_nodes) {
  const QuadratureRule t_rule = exponential_rule(gauss_laguerre(t_nodes), lambda);
  const QuadratureRule th_rule = midpoint_rule(spec.jumps.theta_lo, spec.jumps.theta_hi, theta_nodes);
  EmpiricalMeasure out;
  out.reserve(mu.size() * t_rule.size() * th_rule.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t k = 0; k < t_rule.size(); ++k) {
      const StatePoint y = spec.flow(t_rule.nodes[k], mu.support()[i]);
      for (std::size_t j = 0; j < th_rule.size(); ++j) {
        const double w = mu.weights()[i] * t_rule.weights[k] * th_rule.weights[j] * spec.jumps.density(y, th_rule.nodes[j]);
        out.add(spec.jumps.apply(th_rule.nodes[j], y), w);
      }
    }
  }
  return out;
}

double integrate_against_p(const SemiFlow& flow, const JumpFamily& jumps, double lambda, const StatePoint& x,
                           const std::function<double(const StatePoint&)>& f, int t_nodes, int theta_nodes) {
  const QuadratureRule t_rule = exponential_rule(gauss_laguerre(t_nodes), lambda);
  const QuadratureRule th_rule = midpoint_rule(jumps.theta_lo, jumps.theta_hi, theta_nodes);
  double total = 0.0;
  for (std::size_t k = 0; k < t_rule.size(); ++k) {
    const StatePoint y = flow(t_rule.nodes[k], x);
    double inner = 0.0;
    for (std::size_t j = 0; j < th_rule.size(); ++j) {
      inner += th_rule.weights[j] * jumps.density(y, th_rule.nodes[j]) * f(jumps.apply(th_rule.nodes[j], y));
    }
    total += t_rule.weights[k] * inner;
  }
  return total;
}

QuadratureInvariant estimate_invariant_quadrature(const ModelSpec& spec, double lambda,
                                                  const QuadratureInvariantOptions& options) {
  if (spec.space.dimension != 1) throw std::invalid_argument("quadrature backend requires a one-dimensional model");
  QuadratureInvariant out{Grid1D::uniform(options.x_max, options.grid_size), {}, {}, 0, 0.0, 0.0};
  const KernelMatrix P = build_P_matrix(spec, lambda, out.grid, options.kernel);
  PowerResult power = power_iterate(P, options.power_tolerance, options.power_max_iter);
  const KernelMatrix G = build_G_matrix(spec.flow, lambda, out.grid, options.kernel);
  out.mu = std::move(power.vector);
  out.nu = G.left_multiply(out.mu);
  out.iterations = power.iterations;
  out.residual = power.residual;
  out.max_defect = std::max(P.max_defect(), G.max_defect());
  return out;
}

}  // namespace pdmp
