#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pdmp/measure.hpp"

namespace pdmp {

/// Fortet-Mourier (bounded-Lipschitz) distance with its optimal dual witness.
struct FMResult {
  double value = 0.0;
  /// Union support of the two measures, sorted lexicographically.
  std::vector<StatePoint> points;
  /// Optimal test function f at each union support point: |f| <= 1, |f(z)-f(z')| <= |z-z'|.
  std::vector<double> witness;
  /// Signed weights mu({z}) - nu({z}) on the union support.
  std::vector<double> signed_weights;
  /// |primal transport cost - dual objective|.
  double duality_gap = 0.0;
};

struct FMOptions {
  std::size_t support_cap = 2000;
  double tolerance = 1e-8;
};

/// Exact FM distance: max sum_i f_i (mu_i - nu_i) over -1 <= f_i <= 1 and
/// f_i - f_j <= |z_i - z_j|, solved as its dual min-cost flow problem with an
/// auxiliary ground node (cost 1 to every point). In one dimension only
/// neighbouring points need Lipschitz arcs; in higher dimensions all pairs
/// closer than 2 are linked.
///
/// Throws SupportCapError when the union support exceeds options.support_cap.
FMResult fm_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const FMOptions& options = {});

/// FM norm of the signed measure sum_i w_i delta_{z_i}.
FMResult fm_norm(std::span<const StatePoint> points, std::span<const double> signed_weights,
                 const FMOptions& options = {});

/// Re-checks a witness against every pairwise constraint and the reported value.
/// Returns the largest constraint or value violation observed.
double witness_violation(const FMResult& result);

/// Merges support points falling in the same cell of a grid with cell
/// diameter `resolution`; each cell becomes one atom at the weighted mean of
/// its members. Every atom moves by at most `resolution`, so the FM change is
/// at most resolution * total mass.
EmpiricalMeasure coalesce(const EmpiricalMeasure& mu, double resolution);

/// Two measures coalesced onto shared support points so their union support fits a cap.
struct CoalescedPair {
  EmpiricalMeasure first;
  EmpiricalMeasure second;
  double resolution = 0.0;
  /// Bound on |fm(first, second) - fm(original pair)|.
  double error_bound = 0.0;
};

/// Returns the inputs unchanged when their union support is within `cap`;
/// otherwise coalesces both with a common cell grid (each cell's atoms move to
/// the cell's pooled weighted mean) at the smallest tried resolution that fits.
CoalescedPair coalesce_to_cap(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap);

/// Number of distinct points in the union of the two supports.
std::size_t union_support_size(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// sum_z |mu({z}) - nu({z})| over the union support.
double tv_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Integral of |F_mu - F_nu| for one-dimensional measures of equal mass.
/// Throws std::invalid_argument for unequal masses or d != 1.
double wasserstein1_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

}  // namespace pdmp
