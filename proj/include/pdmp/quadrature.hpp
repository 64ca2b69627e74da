#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pdmp/measure.hpp"
#include "pdmp/model.hpp"

namespace pdmp {

/// Increasing nodes x_0 < ... < x_{m-1} discretizing a truncated one-dimensional state space.
class Grid1D {
 public:
  explicit Grid1D(std::vector<double> nodes);
  /// m equally spaced nodes on [0, x_max].
  static Grid1D uniform(double x_max, std::size_t m);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }

  /// Linear binning: splits weight w at x between the two bracketing nodes so
  /// that both mass and first moment are preserved. Returns false (and
  /// deposits nothing) when x lies outside [x_0, x_{m-1}].
  bool deposit(double x, double w, std::span<double> row) const;

  /// Probability vector of delta_x after linear binning.
  std::vector<double> binned_dirac(double x) const;

 private:
  std::vector<double> nodes_;
  bool uniform_ = false;
  double spacing_ = 0.0;
};

/// Dense row-stochastic m x m matrix (row-major) with the pre-normalization defects.
class KernelMatrix {
 public:
  explicit KernelMatrix(std::size_t m);
  static KernelMatrix identity(std::size_t m);

  std::size_t size() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * m_ + j]; }
  std::span<double> row(std::size_t i) noexcept { return {entries_.data() + i * m_, m_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {entries_.data() + i * m_, m_}; }

  /// |1 - row sum| before renormalization, per row.
  const std::vector<double>& defects() const noexcept { return defects_; }
  double max_defect() const;

  /// Rescales every row to sum 1 and records the defects.
  void normalize_rows();

  /// mu P.
  std::vector<double> left_multiply(std::span<const double> mu) const;

 private:
  std::size_t m_;
  std::vector<double> entries_;
  std::vector<double> defects_;
};

struct KernelOptions {
  int t_nodes = 64;
  int theta_nodes = 64;
  /// Largest tolerated escaped mass per row.
  double max_defect = 1e-3;
  unsigned threads = 0;
};

/// Discretized transition law P_lambda: for each node x_i, Gauss-Laguerre in t
/// (weight lambda e^{-lambda t}) times composite midpoint in theta; image points
/// w_theta(S(t, x_i)) are linearly binned onto the grid and rows renormalized.
/// Throws ContractivityError for an inadmissible rate and DefectError when
/// more than max_defect of a row escapes the grid.
KernelMatrix build_P_matrix(const ModelSpec& spec, double lambda, const Grid1D& grid, const KernelOptions& options = {});

/// Discretized G_lambda: node x_i is pushed to S(t, x_i), t ~ Exp(lambda).
KernelMatrix build_G_matrix(const SemiFlow& flow, double lambda, const Grid1D& grid, const KernelOptions& options = {});

struct PowerResult {
  std::vector<double> vector;
  int iterations = 0;
  /// L1 change of the final iterate, which bounds |mu P - mu|_1.
  double residual = 0.0;
  /// L1 change after each multiplication.
  std::vector<double> residual_history;
};

/// Iterates mu <- mu P from the uniform vector (or `start`) until |mu_k - mu_{k-1}|_1 <= tol.
/// Throws ConvergenceError carrying the last residual when max_iter is exceeded.
PowerResult power_iterate(const KernelMatrix& P, double tol, int max_iter, std::span<const double> start = {});

/// Trajectory mu P, mu P^2, ..., mu P^n.
std::vector<std::vector<double>> push_n(std::span<const double> mu, const KernelMatrix& P, int n);

/// Grid probability vector as a measure on the nodes carrying positive mass.
EmpiricalMeasure grid_measure(const Grid1D& grid, std::span<const double> weights);

double grid_mean(const Grid1D& grid, std::span<const double> weights);

/// Atoms of mu pushed through Pi_(t): x becomes the cloud w_theta(S(t,x)) with
/// weights p(S(t,x), theta) times midpoint weights.
EmpiricalMeasure push_through_pi(const ModelSpec& spec, const EmpiricalMeasure& mu, double t, int theta_nodes);

/// Atoms of mu pushed through P_lambda by the t x theta product rule.
EmpiricalMeasure push_through_p(const ModelSpec& spec, const EmpiricalMeasure& mu, double lambda, int t_nodes,
                                int theta_nodes);

/// <f, delta_x P> for the chain built from `flow`, `jumps` and rate lambda, by the same product rule.
double integrate_against_p(const SemiFlow& flow, const JumpFamily& jumps, double lambda, const StatePoint& x,
                           const std::function<double(const StatePoint&)>& f, int t_nodes, int theta_nodes);

struct QuadratureInvariantOptions {
  double x_max = 8.0;
  std::size_t grid_size = 2000;
  KernelOptions kernel;
  double power_tolerance = 1e-12;
  int power_max_iter = 100000;
};

/// Grid estimates of mu*_lambda (power iteration on P_lambda) and nu*_lambda = mu*_lambda G_lambda.
struct QuadratureInvariant {
  Grid1D grid;
  std::vector<double> mu;
  std::vector<double> nu;
  int iterations = 0;
  double residual = 0.0;
  /// Largest row defect over the P and G matrices.
  double max_defect = 0.0;

  EmpiricalMeasure mu_measure() const { return grid_measure(grid, mu); }
  EmpiricalMeasure nu_measure() const { return grid_measure(grid, nu); }
};

QuadratureInvariant estimate_invariant_quadrature(const ModelSpec& spec, double lambda,
                                                  const QuadratureInvariantOptions& options = {});

}  // namespace pdmp
