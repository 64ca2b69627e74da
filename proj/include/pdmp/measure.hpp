#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pdmp/state.hpp"

namespace pdmp {

/// Finitely supported nonnegative measure: support points with weights.
///
/// Points may repeat; canonical() sorts the support and merges duplicates.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  EmpiricalMeasure(std::vector<StatePoint> support, std::vector<double> weights);

  static EmpiricalMeasure dirac(const StatePoint& x, double mass = 1.0);
  /// Equal weights 1/n on the given points.
  static EmpiricalMeasure uniform(std::vector<StatePoint> support);
  /// Points on the real line with the given weights.
  static EmpiricalMeasure on_line(std::span<const double> xs, std::span<const double> weights);

  std::size_t size() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }
  std::size_t dimension() const noexcept { return support_.empty() ? 1 : support_.front().dimension(); }

  const std::vector<StatePoint>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  void add(const StatePoint& x, double weight);
  void reserve(std::size_t n);

  double total_mass() const;
  /// Integral of the given coordinate raised to `power`.
  double moment(int power, std::size_t coord = 0) const;
  double mean(std::size_t coord = 0) const { return moment(1, coord) / total_mass(); }

  /// Same measure rescaled to total mass 1.
  EmpiricalMeasure normalized() const;
  /// Support sorted lexicographically, duplicates merged, zero weights dropped.
  EmpiricalMeasure canonical() const;

 private:
  std::vector<StatePoint> support_;
  std::vector<double> weights_;
};

}  // namespace pdmp
