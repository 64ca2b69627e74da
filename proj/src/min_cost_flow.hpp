#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace pdmp::detail {

/// Successive-shortest-path min-cost flow on real-valued supplies.
///
/// Arcs have nonnegative costs and may be uncapacitated. Node potentials are
/// maintained so that every residual arc keeps a nonnegative reduced cost;
/// at termination they form an optimal dual solution y = -potential, i.e.
/// y_u - y_v <= cost(u, v) on every arc with equality on arcs carrying flow.
class MinCostFlow {
 public:
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  explicit MinCostFlow(std::size_t nodes);

  void add_arc(std::size_t from, std::size_t to, double cost, double capacity = kUnbounded);

  struct Solution {
    double cost = 0.0;
    /// Optimal dual variable of each node (y = -potential).
    std::vector<double> dual;
    /// Supply that could not be routed (zero for balanced, connected problems).
    double unrouted = 0.0;
    std::size_t augmentations = 0;
  };

  /// Routes supplies b (out-flow minus in-flow per node, summing to zero).
  /// Supplies with |b| <= `negligible` are ignored. Consumes the arc
  /// capacities, so a solver instance is solved once.
  Solution solve(const std::vector<double>& supply, double negligible = 0.0);

 private:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    double capacity;
    double cost;
    bool original;
  };

  std::size_t nodes_;
  std::vector<std::vector<Arc>> graph_;
};

}  // namespace pdmp::detail
