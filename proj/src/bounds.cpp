#include "pdmp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "pdmp/errors.hpp"
#include "pdmp/format.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/quadrature_rules.hpp"

namespace pdmp {

BoundReport make_report(std::string bound_id, std::string inputs, double lhs, double rhs, double tolerance,
                        double lhs_err, bool required) {
  BoundReport r;
  r.bound_id = std::move(bound_id);
  r.inputs = std::move(inputs);
  r.lhs = lhs;
  r.lhs_err = lhs_err;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.slack = rhs - lhs;
  r.pass = lhs <= rhs + tolerance;
  r.required = required;
  return r;
}

bool all_required_pass(const std::vector<BoundReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.pass || !r.required; });
}

void write_reports_csv(std::ostream& out, const std::vector<BoundReport>& reports) {
  out << "bound_id,inputs,lhs,lhs_err,rhs,tolerance,slack,pass,required\n";
  for (const auto& r : reports) {
    out << r.bound_id << ',' << r.inputs << ',' << format_double(r.lhs) << ',' << format_double(r.lhs_err) << ','
        << format_double(r.rhs) << ',' << format_double(r.tolerance) << ',' << format_double(r.slack) << ','
        << (r.pass ? 1 : 0) << ',' << (r.required ? 1 : 0) << '\n';
  }
}

double mvt_exact(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw std::invalid_argument("mvt_exact: rates must be positive");
  if (lambda1 == lambda2) return 0.0;
  const double lo = std::min(lambda1, lambda2);
  const double hi = std::max(lambda1, lambda2);
  // Crossing at t* = ln(hi/lo)/(hi-lo); e^{-lo t*} = r^{lo/(hi-lo)}, e^{-hi t*} = r^{hi/(hi-lo)}.
  const double r = lo / hi;
  const double gap = hi - lo;
  return 2.0 * (std::pow(r, lo / gap) - std::pow(r, hi / gap));
}

double mvt_bound(double lambda1, double lambda2) {
  return std::abs(lambda1 - lambda2) * (1.0 / lambda1 + 1.0 / lambda2);
}

namespace {

std::string kv(const std::string& key, double value) { return key + "=" + format_double(value); }

std::string join(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += ';';
    s += p;
  }
  return s;
}

}  // namespace

std::vector<BoundReport> verify_mvt(const std::vector<double>& lambdas) {
  for (double l : lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("verify_mvt: rates must be positive");
  }
  std::vector<BoundReport> out;
  auto add = [&](double l1, double l2) {
    out.push_back(make_report("mvt", join({kv("lambda1", l1), kv("lambda2", l2)}), mvt_exact(l1, l2),
                              mvt_bound(l1, l2), 0.0));
  };
  if (lambdas.size() == 1) add(lambdas[0], lambdas[0]);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) add(lambdas[i], lambdas[j]);
  }
  return out;
}

CappedDistance fm_capped(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t cap,
                         double lp_tolerance) {
  const CoalescedPair pair = coalesce_to_cap(mu.canonical(), nu.canonical(), cap);
  FMOptions opts;
  opts.support_cap = cap;
  opts.tolerance = lp_tolerance;
  return {fm_distance(pair.first, pair.second, opts).value, pair.error_bound};
}

std::vector<BoundReport> verify_equicnt(const ModelSpec& spec, const EmpiricalMeasure& mu1,
                                        const EmpiricalMeasure& mu2, const std::vector<double>& t_grid,
                                        const VerifyOptions& options) {
  const double base = fm_capped(mu1, mu2, options.support_cap).value;
  const double lw_lp = spec.jumps.lipschitz_w + spec.jumps.lipschitz_p;
  std::vector<BoundReport> out;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("verify_equicnt: times must be nonnegative");
    const EmpiricalMeasure a = push_through_pi(spec, mu1, t, options.theta_nodes);
    const EmpiricalMeasure b = push_through_pi(spec, mu2, t, options.theta_nodes);
    const CappedDistance d = fm_capped(a, b, options.support_cap);
    const double factor = 1.0 + lw_lp * spec.flow.lipschitz * std::exp(spec.flow.growth * t);
    out.push_back(make_report("equicontinuity",
                              join({"model=" + spec.name, kv("t", t), kv("fm_inputs", base),
                                    "theta_nodes=" + std::to_string(options.theta_nodes)}),
                              d.value, factor * base, options.tolerance + d.error_bound));
  }
  return out;
}

BoundReport verify_joint_continuity(const ModelSpec& spec, double lambda1, double lambda2,
                                    const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                    const VerifyOptions& options) {
  const double abar = alpha_bar(spec.flow.growth);
  if (!(lambda1 > abar) || !(lambda2 > abar)) {
    throw ContractivityError("verify_joint_continuity: rates must exceed max(0, alpha)");
  }
  const EmpiricalMeasure a = push_through_p(spec, mu1, lambda1, options.t_nodes, options.theta_nodes);
  const EmpiricalMeasure b = push_through_p(spec, mu2, lambda2, options.t_nodes, options.theta_nodes);
  const CappedDistance d = fm_capped(a, b, options.support_cap);
  const CappedDistance base = fm_capped(mu1, mu2, options.support_cap);
  const double rhs = mu1.total_mass() * mvt_bound(lambda1, lambda2) +
                     (base.value + base.error_bound) * (1.0 + jump_operator_factor(spec, lambda2));
  return make_report("joint_continuity",
                     join({"model=" + spec.name, kv("lambda1", lambda1), kv("lambda2", lambda2),
                           kv("fm_inputs", base.value)}),
                     d.value, rhs, options.tolerance + d.error_bound);
}

RateFit fit_ergodic_rate(const ModelSpec& spec, double lambda, const Grid1D& grid, double x0,
                         const RateFitOptions& options) {
  if (options.steps < 3) throw std::invalid_argument("fit_ergodic_rate: need at least 3 steps");
  const KernelMatrix P = build_P_matrix(spec, lambda, grid, options.kernel);
  const PowerResult star = power_iterate(P, options.power_tolerance, options.power_max_iter);
  const EmpiricalMeasure target = grid_measure(grid, star.vector);
  const std::vector<double> start = grid.binned_dirac(x0);
  const auto path = push_n(start, P, options.steps);

  RateFit fit;
  FMOptions fm_opts;
  fm_opts.support_cap = std::max<std::size_t>(grid.size(), 3);
  for (const auto& v : path) fit.distances.push_back(fm_distance(grid_measure(grid, v), target, fm_opts).value);

  // Linear regime: the leading run of distances above the floor.
  std::vector<double> xs, ys;
  for (int n = 1; n <= options.steps; ++n) {
    const double d = fit.distances[static_cast<std::size_t>(n - 1)];
    if (!(d > options.floor)) break;
    fit.used.push_back(n);
    xs.push_back(n);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 3) {
    throw EstimationError("no linear regime: only " + std::to_string(xs.size()) + " distances above " +
                          format_double(options.floor));
  }
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    sse += e * e;
  }
  fit.q = std::exp(slope);
  fit.C = std::exp(intercept);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

std::vector<TestFunction> default_test_functions() {
  return {
      {"min1", [](const StatePoint& z) { return std::min(1.0, z[0]); }},
      {"clipped_shift", [](const StatePoint& z) { return std::clamp(z[0] - 1.0, -1.0, 1.0); }},
      // e^{-u^2} has Lipschitz constant sqrt(2/e) < 1.
      {"bump", [](const StatePoint& z) { return std::exp(-(z[0] - 1.0) * (z[0] - 1.0)); }},
      {"sin", [](const StatePoint& z) { return std::sin(z[0]); }},
      {"one", [](const StatePoint&) { return 1.0; }},
  };
}

BoundReport verify_rescaling_identity(const ModelSpec& spec, double lambda, const std::vector<StatePoint>& points,
                                      const std::vector<TestFunction>& functions, int t_nodes, int theta_nodes,
                                      double tolerance) {
  if (spec.flow.growth > 0.0) {
    throw std::invalid_argument("verify_rescaling_identity: only non-expansive flows (alpha <= 0) are supported");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("verify_rescaling_identity: lambda must be positive");
  const double lmax = spec.lambda_max;
  const double scale = lmax / lambda;
  SemiFlow rescaled = spec.flow;
  rescaled.evaluate = [flow = spec.flow, scale](double u, const StatePoint& x) { return flow(scale * u, x); };

  double worst = 0.0;
  for (const auto& x : points) {
    for (const auto& tf : functions) {
      const double direct = integrate_against_p(spec.flow, spec.jumps, lambda, x, tf.f, t_nodes, theta_nodes);
      const double viaMax = integrate_against_p(rescaled, spec.jumps, lmax, x, tf.f, t_nodes, theta_nodes);
      worst = std::max(worst, std::abs(direct - viaMax));
    }
  }
  return make_report("rescaling",
                     join({"model=" + spec.name, kv("lambda", lambda), kv("lambda_max", lmax),
                           "points=" + std::to_string(points.size()),
                           "functions=" + std::to_string(functions.size())}),
                     worst, tolerance, 0.0);
}

Backend parse_backend(const std::string& name) {
  if (name == "montecarlo") return Backend::kMonteCarlo;
  if (name == "quadrature") return Backend::kQuadrature;
  throw ConfigError("unknown backend '" + name + "' (expected montecarlo or quadrature)");
}

std::string backend_name(Backend backend) {
  return backend == Backend::kMonteCarlo ? "montecarlo" : "quadrature";
}

namespace {

// Particles of replicas with the given parity, for a measure laid out replica by replica.
EmpiricalMeasure parity_half(const EmpiricalMeasure& m, int replicas, int parity) {
  const std::size_t per = m.size() / static_cast<std::size_t>(replicas);
  EmpiricalMeasure out;
  for (int r = parity; r < replicas; r += 2) {
    for (std::size_t i = r * per; i < (r + 1) * per; ++i) out.add(m.support()[i], m.weights()[i]);
  }
  return out.normalized();
}

constexpr std::uint64_t kGStream = 0x6000000000000000ULL;

}  // namespace

InvariantPair estimate_invariant_pair(const ModelSpec& spec, double lambda, const SweepOptions& options) {
  InvariantPair out;
  if (options.backend == Backend::kQuadrature) {
    const QuadratureInvariant q = estimate_invariant_quadrature(spec, lambda, options.quadrature);
    out.mu = q.mu_measure();
    out.nu = q.nu_measure();
    out.defect = q.max_defect + q.residual;
    return out;
  }
  const InvariantEstimate est = estimate_invariant_chain(spec, lambda, options.chain);
  RngStream rng(options.chain.seed, kGStream);
  out.mu = est.measure;
  out.nu = apply_G_lambda(est.measure, lambda, spec.flow, GMode::monte_carlo(options.g_draws), rng);
  if (est.replicas >= 2) {
    out.err_mu = 0.5 * fm_capped(parity_half(out.mu, est.replicas, 0), parity_half(out.mu, est.replicas, 1),
                                 options.support_cap, options.lp_tolerance)
                           .value;
    out.err_nu = 0.5 * fm_capped(parity_half(out.nu, est.replicas, 0), parity_half(out.nu, est.replicas, 1),
                                 options.support_cap, options.lp_tolerance)
                           .value;
  }
  return out;
}

SweepResult sweep_invariant(const ModelSpec& spec, double lambda_bar, std::vector<double> lambdas,
                            const SweepOptions& options) {
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  for (double l : lambdas) {
    if (l < spec.lambda_min || l > spec.lambda_max) {
      throw ContractivityError("sweep rate " + format_double(l) + " outside [" + format_double(spec.lambda_min) +
                               ", " + format_double(spec.lambda_max) + "]");
    }
  }
  if (!(lambda_bar > spec.flow.growth)) throw ContractivityError("lambda_bar must exceed alpha");

  SweepResult result;
  result.lambda_bar = lambda_bar;
  result.c = 1.0 + spec.flow.lipschitz * lambda_bar / (lambda_bar - spec.flow.growth);
  const InvariantPair ref = estimate_invariant_pair(spec, lambda_bar, options);

  result.rows.resize(lambdas.size());
  parallel_for(lambdas.size(), options.threads, [&](std::size_t i) {
    SweepRow& row = result.rows[i];
    row.lambda = lambdas[i];
    try {
      const InvariantPair cur = lambdas[i] == lambda_bar ? ref : estimate_invariant_pair(spec, lambdas[i], options);
      const CappedDistance dm = fm_capped(cur.mu, ref.mu, options.support_cap, options.lp_tolerance);
      const CappedDistance dn = fm_capped(cur.nu, ref.nu, options.support_cap, options.lp_tolerance);
      row.d_mu = dm.value;
      row.d_nu = dn.value;
      row.mean_mu = cur.mu.mean();
      row.mean_nu = cur.nu.mean();
      row.bound = mvt_bound(lambdas[i], lambda_bar) + result.c * row.d_mu;
      // Additive budget: LP tolerance, coalescing, quadrature defects, 3 half-sample errors.
      row.err = 2.0 * options.lp_tolerance + dm.error_bound + dn.error_bound + cur.defect + ref.defect +
                3.0 * (cur.err_mu + ref.err_mu + cur.err_nu + ref.err_nu);
      row.pass = row.d_nu <= row.bound + row.err;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.pass = false;
    }
  });

  const std::string model = "model=" + spec.name;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) {
      BoundReport r = make_report("sweep_bound", join({model, kv("lambda", row.lambda), "error=1"}),
                                  std::nan(""), 0.0, 0.0);
      r.pass = false;
      result.reports.push_back(r);
      continue;
    }
    result.reports.push_back(make_report("sweep_bound", join({model, kv("lambda", row.lambda), kv("lambda_bar", lambda_bar)}),
                                         row.d_nu, row.bound, row.err));
  }

  // Nearest evaluated rates on each side of lambda_bar.
  const SweepRow* below = nullptr;
  const SweepRow* above = nullptr;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) continue;
    if (row.lambda < lambda_bar) below = &row;
    if (row.lambda > lambda_bar && above == nullptr) above = &row;
  }
  for (const SweepRow* near : {below, above}) {
    if (near == nullptr) continue;
    const std::string in = join({model, kv("lambda", near->lambda), kv("lambda_bar", lambda_bar)});
    result.reports.push_back(make_report("sweep_near_mu", in, near->d_mu, options.continuity_threshold, 0.0));
    result.reports.push_back(make_report("sweep_near_nu", in, near->d_nu, options.continuity_threshold, 0.0));
  }

  // Trend check, moving outward from lambda_bar on each side: a warning only.
  auto trend = [&](auto first, auto last) {
    const SweepRow* prev = nullptr;
    for (auto it = first; it != last; ++it) {
      if (!it->error.empty()) continue;
      if (prev != nullptr) {
        const std::string in = join({model, kv("lambda", it->lambda), kv("inner_lambda", prev->lambda)});
        const double slack_mu = 2.0 * (prev->err + it->err);
        result.reports.push_back(make_report("sweep_trend_mu", in, prev->d_mu, it->d_mu, slack_mu, 0.0, false));
        result.reports.push_back(make_report("sweep_trend_nu", in, prev->d_nu, it->d_nu, slack_mu, 0.0, false));
      }
      prev = &*it;
    }
  };
  const auto split = std::lower_bound(result.rows.begin(), result.rows.end(), lambda_bar,
                                      [](const SweepRow& r, double l) { return r.lambda < l; });
  trend(std::make_reverse_iterator(split), result.rows.rend());
  trend(split, result.rows.end());
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "lambda,D_mu,D_nu,B,err,pass,mean_mu,mean_nu\n";
  for (const auto& r : result.rows) {
    out << format_double(r.lambda) << ',' << format_double(r.d_mu) << ',' << format_double(r.d_nu) << ','
        << format_double(r.bound) << ',' << format_double(r.err) << ',' << (r.pass ? 1 : 0) << ','
        << format_double(r.mean_mu) << ',' << format_double(r.mean_nu) << '\n';
  }
}

}  // namespace pdmp
