#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library's numerical code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Composite Simpson rule on [lo, hi] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (n % 2 != 0) ++n;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Solves A x = b by Gaussian elimination with partial pivoting; false when singular.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-12) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= m * a[c][k];
      b[r] -= m * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

/// max sum g_i f_i over |f_i| <= 1, f_i - f_j <= |z_i - z_j| by enumerating
/// every vertex of the feasible polytope (n <= 5 or so).
inline double bl_lp_vertex_enumeration(const std::vector<double>& z, const std::vector<double>& g) {
  const std::size_t n = z.size();
  if (n == 0) return 0.0;
  struct Row {
    std::vector<double> a;
    double b;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> a(n, 0.0);
    a[i] = 1.0;
    rows.push_back({a, 1.0});
    a[i] = -1.0;
    rows.push_back({a, 1.0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> a(n, 0.0);
      a[i] = 1.0;
      a[j] = -1.0;
      rows.push_back({a, std::abs(z[i] - z[j])});
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(n);
  for (std::size_t k = 0; k < n; ++k) pick[k] = k;
  const std::size_t m = rows.size();
  for (;;) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t k : pick) {
      a.push_back(rows[k].a);
      b.push_back(rows[k].b);
    }
    std::vector<double> f;
    if (solve_dense(a, b, f)) {
      bool feasible = true;
      for (const auto& r : rows) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) lhs += r.a[i] * f[i];
        if (lhs > r.b + 1e-10) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += g[i] * f[i];
        best = std::max(best, v);
      }
    }
    // Next combination of n rows out of m.
    std::size_t k = n;
    while (k > 0 && pick[k - 1] == m - n + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// 0.1% critical value of the one-sample KS statistic (asymptotic).
inline double ks_critical(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

/// E[e^{-c T}] for T ~ Exp(lambda), by Simpson on a truncated range.
inline double exp_moment(double c, double lambda) {
  return simpson([&](double t) { return lambda * std::exp(-lambda * t) * std::exp(-c * t); }, 0.0, 60.0 / lambda,
                 200000);
}

/// Stationary first and second moments of X' = beta e^{-a T} X + theta, theta ~ U(0,1),
/// found by iterating the moment recursions to a fixed point.
struct Moments {
  double m1;
  double m2;
};

inline Moments decay_burst_chain_moments(double a, double beta, double lambda) {
  const double k1 = exp_moment(a, lambda);
  const double k2 = exp_moment(2.0 * a, lambda);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double n1 = beta * k1 * m1 + 0.5;
    const double n2 = beta * beta * k2 * m2 + beta * k1 * m1 + 1.0 / 3.0;
    m1 = n1;
    m2 = n2;
  }
  return {m1, m2};
}

/// Moments of the flow law: S(T, X) = e^{-a T} X with X stationary for the chain.
inline Moments decay_burst_flow_moments(double a, double beta, double lambda) {
  const Moments c = decay_burst_chain_moments(a, beta, lambda);
  return {c.m1 * exp_moment(a, lambda), c.m2 * exp_moment(2.0 * a, lambda)};
}

}  // namespace oracle
