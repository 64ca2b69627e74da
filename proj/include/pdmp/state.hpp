#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace pdmp {

/// A point of the state space X, a closed subset of R^d with d <= kMaxDimension.
///
/// Stored inline so that flows and jump maps can return points by value
/// in tight simulation loops without touching the heap.
class StatePoint {
 public:
  static constexpr std::size_t kMaxDimension = 4;

  StatePoint() = default;

  explicit StatePoint(double x) : dim_(1) { coords_[0] = x; }

  StatePoint(std::initializer_list<double> coords) : StatePoint(std::span<const double>(coords.begin(), coords.size())) {}

  explicit StatePoint(std::span<const double> coords) : dim_(coords.size()) {
    if (coords.empty() || coords.size() > kMaxDimension) {
      throw std::invalid_argument("StatePoint: dimension must be in [1, 4]");
    }
    std::copy(coords.begin(), coords.end(), coords_.begin());
  }

  std::size_t dimension() const noexcept { return dim_; }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  double& operator[](std::size_t i) noexcept { return coords_[i]; }
  std::span<const double> coords() const noexcept { return {coords_.data(), dim_}; }

  /// First coordinate; the natural accessor for the 1-D models.
  double x() const noexcept { return coords_[0]; }

  friend bool operator==(const StatePoint& a, const StatePoint& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i) {
      if (a.coords_[i] != b.coords_[i]) return false;
    }
    return true;
  }

  /// Lexicographic order, used to sort and merge supports.
  friend bool operator<(const StatePoint& a, const StatePoint& b) noexcept {
    for (std::size_t i = 0; i < std::min(a.dim_, b.dim_); ++i) {
      if (a.coords_[i] != b.coords_[i]) return a.coords_[i] < b.coords_[i];
    }
    return a.dim_ < b.dim_;
  }

 private:
  std::array<double, kMaxDimension> coords_{};
  std::size_t dim_ = 1;
};

/// Euclidean distance.
inline double distance(const StatePoint& a, const StatePoint& b) {
  if (a.dimension() == 1 && b.dimension() == 1) return std::abs(a[0] - b[0]);
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double norm(const StatePoint& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

}  // namespace pdmp
