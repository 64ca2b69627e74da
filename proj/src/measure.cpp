#include "pdmp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pdmp {

EmpiricalMeasure::EmpiricalMeasure(std::vector<StatePoint> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() != weights_.size()) {
    throw std::invalid_argument("EmpiricalMeasure: support and weights differ in length");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("EmpiricalMeasure: weights must be finite and nonnegative");
    }
    if (support_[i].dimension() != support_.front().dimension()) {
      throw std::invalid_argument("EmpiricalMeasure: mixed dimensions in support");
    }
  }
}

EmpiricalMeasure EmpiricalMeasure::dirac(const StatePoint& x, double mass) { return EmpiricalMeasure({x}, {mass}); }

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<StatePoint> support) {
  if (support.empty()) throw std::invalid_argument("EmpiricalMeasure::uniform: empty support");
  std::vector<double> w(support.size(), 1.0 / static_cast<double>(support.size()));
  return EmpiricalMeasure(std::move(support), std::move(w));
}

EmpiricalMeasure EmpiricalMeasure::on_line(std::span<const double> xs, std::span<const double> weights) {
  std::vector<StatePoint> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.emplace_back(x);
  return EmpiricalMeasure(std::move(pts), std::vector<double>(weights.begin(), weights.end()));
}

void EmpiricalMeasure::add(const StatePoint& x, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("EmpiricalMeasure::add: negative weight");
  if (!support_.empty() && x.dimension() != support_.front().dimension()) {
    throw std::invalid_argument("EmpiricalMeasure::add: dimension mismatch");
  }
  support_.push_back(x);
  weights_.push_back(weight);
}

void EmpiricalMeasure::reserve(std::size_t n) {
  support_.reserve(n);
  weights_.reserve(n);
}

double EmpiricalMeasure::total_mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

double EmpiricalMeasure::moment(int power, std::size_t coord) const {
  double s = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) s += weights_[i] * std::pow(support_[i][coord], power);
  return s;
}

EmpiricalMeasure EmpiricalMeasure::normalized() const {
  const double mass = total_mass();
  if (!(mass > 0.0)) throw std::invalid_argument("EmpiricalMeasure::normalized: zero mass");
  EmpiricalMeasure out = *this;
  for (double& w : out.weights_) w /= mass;
  return out;
}

EmpiricalMeasure EmpiricalMeasure::canonical() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return support_[a] < support_[b]; });
  EmpiricalMeasure out;
  out.reserve(size());
  for (std::size_t idx : order) {
    if (weights_[idx] == 0.0) continue;
    if (!out.support_.empty() && out.support_.back() == support_[idx]) {
      out.weights_.back() += weights_[idx];
    } else {
      out.support_.push_back(support_[idx]);
      out.weights_.push_back(weights_[idx]);
    }
  }
  return out;
}

}  // namespace pdmp
