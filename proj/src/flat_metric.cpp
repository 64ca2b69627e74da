#include "pdmp/flat_metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "min_cost_flow.hpp"
#include "pdmp/errors.hpp"

namespace pdmp {

namespace {

struct SignedAtoms {
  std::vector<StatePoint> points;
  std::vector<double> weights;
};

SignedAtoms merge_signed(std::span<const StatePoint> points, std::span<const double> weights) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  SignedAtoms out;
  out.points.reserve(points.size());
  out.weights.reserve(points.size());
  for (std::size_t idx : order) {
    if (!out.points.empty() && out.points.back() == points[idx]) {
      out.weights.back() += weights[idx];
    } else {
      out.points.push_back(points[idx]);
      out.weights.push_back(weights[idx]);
    }
  }
  return out;
}

SignedAtoms difference(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (!mu.empty() && !nu.empty() && mu.dimension() != nu.dimension()) {
    throw std::invalid_argument("measures live in different dimensions");
  }
  std::vector<StatePoint> pts;
  std::vector<double> w;
  pts.reserve(mu.size() + nu.size());
  w.reserve(mu.size() + nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    pts.push_back(mu.support()[i]);
    w.push_back(mu.weights()[i]);
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    pts.push_back(nu.support()[i]);
    w.push_back(-nu.weights()[i]);
  }
  return merge_signed(pts, w);
}

using CellKey = std::array<long long, StatePoint::kMaxDimension>;

CellKey cell_of(const StatePoint& p, double side) {
  CellKey key{};
  for (std::size_t i = 0; i < p.dimension(); ++i) key[i] = static_cast<long long>(std::floor(p[i] / side));
  return key;
}

// Groups atoms by grid cell and returns, for every atom, the index of its cell
// representative in `representatives` (weighted mean of the pooled cell mass).
struct CellAssignment {
  std::vector<StatePoint> representatives;
  std::vector<std::size_t> cell_of_atom;
};

CellAssignment assign_cells(std::span<const StatePoint> points, std::span<const double> weights, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("coalesce: resolution must be positive");
  const std::size_t n = points.size();
  CellAssignment out;
  out.cell_of_atom.resize(n);
  if (n == 0) return out;
  const std::size_t dim = points.front().dimension();
  const double side = resolution / std::sqrt(static_cast<double>(dim));

  std::vector<CellKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = cell_of(points[i], side);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end < n && keys[order[end]] == keys[order[start]]) ++end;
    double mass = 0.0;
    std::array<double, StatePoint::kMaxDimension> acc{};
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t i = order[k];
      mass += weights[i];
      for (std::size_t c = 0; c < dim; ++c) acc[c] += weights[i] * points[i][c];
    }
    StatePoint rep = points[order[start]];
    if (end - start > 1 && mass > 0.0) {
      for (std::size_t c = 0; c < dim; ++c) rep[c] = acc[c] / mass;
    }
    for (std::size_t k = start; k < end; ++k) out.cell_of_atom[order[k]] = out.representatives.size();
    out.representatives.push_back(rep);
    start = end;
  }
  return out;
}

}  // namespace

FMResult fm_norm(std::span<const StatePoint> points, std::span<const double> signed_weights, const FMOptions& options) {
  if (points.size() != signed_weights.size()) throw std::invalid_argument("fm_norm: size mismatch");
  SignedAtoms atoms = merge_signed(points, signed_weights);
  const std::size_t n = atoms.points.size();
  if (n > options.support_cap) {
    throw SupportCapError("union support of " + std::to_string(n) + " points exceeds the cap of " +
                          std::to_string(options.support_cap) + "; coalesce the measures first");
  }
  FMResult result;
  result.points = std::move(atoms.points);
  result.signed_weights = std::move(atoms.weights);
  result.witness.assign(n, 0.0);
  if (n == 0) return result;

  const std::size_t ground = n;
  detail::MinCostFlow flow(n + 1);
  const bool one_dimensional = result.points.front().dimension() == 1;
  if (one_dimensional) {
    // Along a line the Lipschitz constraints between neighbours imply all others.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double gap = result.points[i + 1][0] - result.points[i][0];
      if (gap < 2.0) {
        flow.add_arc(i, i + 1, gap);
        flow.add_arc(i + 1, i, gap);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = distance(result.points[i], result.points[j]);
        if (d < 2.0) {
          flow.add_arc(i, j, d);
          flow.add_arc(j, i, d);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    flow.add_arc(i, ground, 1.0);
    flow.add_arc(ground, i, 1.0);
  }

  std::vector<double> supply(n + 1);
  double scale = 0.0;
  double net = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    supply[i] = result.signed_weights[i];
    net += supply[i];
    scale = std::max(scale, std::abs(supply[i]));
  }
  supply[ground] = -net;
  const auto sol = flow.solve(supply, 1e-300);

  double dual_objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.witness[i] = sol.dual[i] - sol.dual[ground];
    dual_objective += result.witness[i] * result.signed_weights[i];
  }
  result.value = sol.cost;
  result.duality_gap = std::abs(sol.cost - dual_objective);
  if (result.duality_gap > std::max(1.0, std::abs(sol.cost)) * 1e3 * options.tolerance) {
    throw Error("fm_norm: optimality certificate failed (duality gap " + std::to_string(result.duality_gap) + ")");
  }
  return result;
}

FMResult fm_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const FMOptions& options) {
  SignedAtoms diff = difference(mu, nu);
  return fm_norm(diff.points, diff.weights, options);
}

double witness_violation(const FMResult& result) {
  const std::size_t n = result.points.size();
  double worst = 0.0;
  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(result.witness[i]) - 1.0);
    objective += result.witness[i] * result.signed_weights[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(result.points[i], result.points[j]);
      worst = std::max(worst, std::abs(result.witness[i] - result.witness[j]) - d);
    }
  }
  worst = std::max(worst, std::abs(objective - result.value));
  return std::max(0.0, worst);
}

EmpiricalMeasure coalesce(const EmpiricalMeasure& mu, double resolution) {
  const CellAssignment cells = assign_cells(mu.support(), mu.weights(), resolution);
  std::vector<double> w(cells.representatives.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) w[cells.cell_of_atom[i]] += mu.weights()[i];
  return EmpiricalMeasure(cells.representatives, std::move(w));
}

std::size_t union_support_size(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return difference(mu, nu).points.size();
}

CoalescedPair coalesce_to_cap(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap) {
  if (cap < 3) throw std::invalid_argument("coalesce_to_cap: cap must be >= 3");
  if (union_support_size(mu, nu) <= cap) return {mu, nu, 0.0, 0.0};

  std::vector<StatePoint> pts(mu.support());
  pts.insert(pts.end(), nu.support().begin(), nu.support().end());
  std::vector<double> w(mu.weights());
  w.insert(w.end(), nu.weights().begin(), nu.weights().end());

  const std::size_t dim = pts.front().dimension();
  double span = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                        [c](const StatePoint& a, const StatePoint& b) { return a[c] < b[c]; });
    span = std::max(span, (*hi)[c] - (*lo)[c]);
  }
  // In one dimension this resolution yields at most span/r + 2 <= cap cells.
  double resolution = span * std::sqrt(static_cast<double>(dim)) / static_cast<double>(cap - 2) * (1.0 + 1e-12);
  for (;;) {
    const CellAssignment cells = assign_cells(pts, w, resolution);
    if (cells.representatives.size() <= cap) {
      std::vector<double> w_mu(cells.representatives.size(), 0.0), w_nu(cells.representatives.size(), 0.0);
      for (std::size_t i = 0; i < mu.size(); ++i) w_mu[cells.cell_of_atom[i]] += mu.weights()[i];
      for (std::size_t i = 0; i < nu.size(); ++i) w_nu[cells.cell_of_atom[mu.size() + i]] += nu.weights()[i];
      CoalescedPair out;
      out.first = EmpiricalMeasure(cells.representatives, std::move(w_mu));
      out.second = EmpiricalMeasure(cells.representatives, std::move(w_nu));
      out.resolution = resolution;
      out.error_bound = resolution * (mu.total_mass() + nu.total_mass());
      return out;
    }
    resolution *= 1.5;
  }
}

double tv_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  const SignedAtoms diff = difference(mu, nu);
  double s = 0.0;
  for (double g : diff.weights) s += std::abs(g);
  return s;
}

double wasserstein1_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if ((!mu.empty() && mu.dimension() != 1) || (!nu.empty() && nu.dimension() != 1)) {
    throw std::invalid_argument("wasserstein1_1d: measures must be one-dimensional");
  }
  const double m1 = mu.total_mass();
  const double m2 = nu.total_mass();
  if (std::abs(m1 - m2) > 1e-9 * std::max(1.0, std::max(m1, m2))) {
    throw std::invalid_argument("wasserstein1_1d: total masses differ");
  }
  const SignedAtoms diff = difference(mu, nu);
  double cdf = 0.0;
  double w1 = 0.0;
  for (std::size_t i = 0; i + 1 < diff.points.size(); ++i) {
    cdf += diff.weights[i];
    w1 += std::abs(cdf) * (diff.points[i + 1][0] - diff.points[i][0]);
  }
  return w1;
}

}  // namespace pdmp
