// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "pdmp/audit.hpp"
#include "pdmp/bounds.hpp"
#include "pdmp/builtin_models.hpp"
#include "pdmp/flat_metric.hpp"
#include "pdmp/format.hpp"
#include "pdmp/quadrature.hpp"
#include "pdmp/simulate.hpp"

using namespace pdmp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v) { return format_double(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ChainEstimateOptions mc_defaults() {
  ChainEstimateOptions o;
  o.burn_in = 1000;
  o.samples = 125000;
  o.replicas = 8;
  o.seed = 1;
  return o;
}

QuadratureInvariantOptions quad_defaults() {
  QuadratureInvariantOptions o;
  o.grid_size = 2000;
  o.x_max = 8.0;
  o.kernel.t_nodes = 64;
  o.kernel.theta_nodes = 64;
  return o;
}

Outcome model_audits() {
  Outcome o;
  for (const char* name : {"modelA", "modelB"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const AuditReport r = audit_model(builtin::make_builtin(name), 10000, 5.0, 64, 1);
    const double secs = seconds_since(t0);
    double worst = 0.0;
    for (const auto& row : r.rows) {
      if (row.required) worst = std::max(worst, row.max_violation);
    }
    o.require(r.passed() && worst <= 1e-9, std::string(name) + " audit");
    o.require(secs < 10.0, std::string(name) + " runtime");
    o.note(std::string(name) + " max_violation=" + fmt(worst) + " t=" + fmt(std::round(secs * 1000) / 1000) + "s");
  }
  return o;
}

struct ModelAEstimates {
  InvariantEstimate mc;
  EmpiricalMeasure mc_nu;
  QuadratureInvariant quad;
  double mc_secs = 0.0;
  double quad_secs = 0.0;
};

ModelAEstimates estimate_model_a() {
  const ModelSpec a = builtin::make_model_a();
  auto t0 = std::chrono::steady_clock::now();
  InvariantEstimate mc = estimate_invariant_chain(a, 2.0, mc_defaults());
  RngStream rng(1, 0x6000000000000000ULL);
  EmpiricalMeasure nu = apply_G_lambda(mc.measure, 2.0, a.flow, GMode::monte_carlo(1), rng);
  const double mc_secs = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  QuadratureInvariant q = estimate_invariant_quadrature(a, 2.0, quad_defaults());
  return {std::move(mc), std::move(nu), std::move(q), mc_secs, seconds_since(t0)};
}

Outcome chain_mean(const ModelAEstimates& e) {
  Outcome o;
  const auto exact = oracle::decay_burst_chain_moments(1.0, 0.5, 2.0);
  const double mc = e.mc.measure.mean();
  const double q = grid_mean(e.quad.grid, e.quad.mu);
  o.require(e.mc.measure.size() == 1000000, "pooled sample count");
  o.require(std::abs(mc - exact.m1) <= 0.01, "Monte Carlo mean");
  o.require(std::abs(q - exact.m1) <= 2e-3, "quadrature mean");
  o.require(e.mc_secs < 60.0 && e.quad_secs < 60.0, "runtime");
  o.note("oracle=" + fmt(exact.m1) + " mc=" + fmt(mc) + " quad=" + fmt(q));
  return o;
}

Outcome flow_mean(const ModelAEstimates& e) {
  Outcome o;
  const auto exact = oracle::decay_burst_flow_moments(1.0, 0.5, 2.0);
  const double mc = e.mc_nu.mean();
  const double q = grid_mean(e.quad.grid, e.quad.nu);
  o.require(std::abs(mc - exact.m1) <= 0.01, "Monte Carlo mean");
  o.require(std::abs(q - exact.m1) <= 2e-3, "quadrature mean");
  o.note("oracle=" + fmt(exact.m1) + " mc=" + fmt(mc) + " quad=" + fmt(q));
  return o;
}

Outcome cross_validation() {
  Outcome o;
  for (const char* name : {"modelA", "modelB"}) {
    const ModelSpec spec = builtin::make_builtin(name);
    for (double lambda : {1.0, 2.0, 4.0}) {
      const InvariantEstimate mc = estimate_invariant_chain(spec, lambda, mc_defaults());
      const QuadratureInvariant q = estimate_invariant_quadrature(spec, lambda, quad_defaults());
      const CappedDistance d = fm_capped(mc.measure, q.mu_measure(), 2000);
      // The coalescing bound is added so a passing value is certified for the uncoalesced measures.
      const double certified = d.value + d.error_bound;
      o.require(certified <= 0.02, std::string(name) + " lambda=" + fmt(lambda));
      o.note(std::string(name) + "@" + fmt(lambda) + " fm=" + fmt(d.value) + "+" + fmt(d.error_bound));
    }
  }
  return o;
}

Outcome flat_metric_exactness() {
  Outcome o;
  auto line = [](std::vector<double> xs, std::vector<double> ws) { return EmpiricalMeasure::on_line(xs, ws); };
  struct Case {
    EmpiricalMeasure a, b;
    std::vector<double> z, g;
    double expected;
  };
  const std::vector<Case> cases = {
      {line({0.0}, {1.0}), line({1.0}, {1.0}), {0.0, 1.0}, {1.0, -1.0}, 1.0},
      {line({0.0}, {1.0}), line({3.0}, {1.0}), {0.0, 3.0}, {1.0, -1.0}, 2.0},
      {line({0.0, 2.0}, {0.5, 0.5}), line({1.0}, {1.0}), {0.0, 2.0, 1.0}, {0.5, 0.5, -1.0}, 1.0},
  };
  for (const auto& c : cases) {
    const double v = fm_distance(c.a, c.b).value;
    const double brute = oracle::bl_lp_vertex_enumeration(c.z, c.g);
    o.require(std::abs(v - brute) <= 1e-8 && std::abs(v - c.expected) <= 1e-8, "textbook value " + fmt(c.expected));
  }
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> pos(0.0, 3.0), wt(0.05, 1.0);
  auto random_prob = [&](int k) {
    std::vector<double> xs, ws;
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      xs.push_back(pos(gen));
      ws.push_back(wt(gen));
      s += ws.back();
    }
    for (double& w : ws) w /= s;
    return EmpiricalMeasure::on_line(xs, ws);
  };
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const auto mu = random_prob(1 + i % 5), nu = random_prob(1 + (i / 5) % 5), rho = random_prob(4);
    const double d = fm_distance(mu, nu).value;
    const bool ok = d >= 0.0 && std::abs(d - fm_distance(nu, mu).value) <= 1e-12 &&
                    fm_distance(mu, mu).value == 0.0 &&
                    d <= fm_distance(mu, rho).value + fm_distance(rho, nu).value + 1e-12 &&
                    d <= tv_discrete(mu, nu) + 1e-12 && d <= wasserstein1_1d(mu, nu) + 1e-12;
    if (!ok) ++violations;
  }
  o.require(violations == 0, "axioms/sandwich on random pairs");
  o.note("random pairs=100 violations=" + std::to_string(violations));
  return o;
}

Outcome mvt_certificate() {
  Outcome o;
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.5 + 3.5 * i / 9.0);
  const auto reports = verify_mvt(grid);
  bool zero_tol = true;
  for (const auto& r : reports) zero_tol &= r.tolerance == 0.0;
  o.require(all_required_pass(reports) && zero_tol && reports.size() == 45, "grid reports");
  o.require(mvt_exact(1.0, 2.0) == 0.5, "mvt_exact(1,2) == 0.5");
  o.require(mvt_bound(1.0, 2.0) == 1.5, "bound(1,2) == 1.5");
  o.note("pairs=" + std::to_string(reports.size()));
  return o;
}

Outcome kernel_certificates() {
  Outcome o;
  const auto d0 = EmpiricalMeasure::dirac(StatePoint(0.0));
  const auto d1 = EmpiricalMeasure::dirac(StatePoint(1.0));
  int count = 0;
  double worst_det_tol = 0.0;
  for (const char* name : {"modelA", "modelB"}) {
    const ModelSpec spec = builtin::make_builtin(name);
    VerifyOptions v;
    for (const auto& r : verify_equicnt(spec, d0, d1, {0.0, 0.5, 1.0, 2.0}, v)) {
      o.require(r.pass, std::string(name) + " " + r.inputs);
      ++count;
    }
    for (double l1 : {1.9, 2.0, 2.1}) {
      for (double l2 : {1.9, 2.0, 2.1}) {
        for (const auto* pair : {&d0, &d1}) {
          const BoundReport r = verify_joint_continuity(spec, l1, l2, *pair, d1, v);
          o.require(r.pass, std::string(name) + " " + r.inputs);
          ++count;
        }
      }
    }
    worst_det_tol = std::max(worst_det_tol, v.tolerance);
  }
  o.require(worst_det_tol <= 1e-3, "deterministic tolerance");
  o.note("reports=" + std::to_string(count));
  return o;
}

Outcome ergodic_rate() {
  Outcome o;
  const ModelSpec a = builtin::make_model_a();
  const RateFit fit = fit_ergodic_rate(a, 2.0, Grid1D::uniform(8.0, 2000), 0.0);
  o.require(fit.q <= 1.0 / 3.0 + 0.05, "q bound");
  o.require(fit.r_squared >= 0.99, "R^2");
  o.note("q=" + fmt(fit.q) + " C=" + fmt(fit.C) + " R2=" + fmt(fit.r_squared) +
         " points=" + std::to_string(fit.used.size()));
  return o;
}

Outcome rescaling() {
  Outcome o;
  const ModelSpec a = builtin::make_model_a();
  std::vector<StatePoint> points;
  for (int i = 0; i < 10; ++i) points.emplace_back(0.5 * i);
  for (double lambda : {1.0, 2.0}) {
    const BoundReport r = verify_rescaling_identity(a, lambda, points, default_test_functions(), 64, 64, 1e-6);
    o.require(r.pass && r.lhs <= 1e-6, "lambda=" + fmt(lambda));
    o.note("lambda=" + fmt(lambda) + " discrepancy=" + fmt(r.lhs));
  }
  return o;
}

Outcome continuity_sweep() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SweepOptions opts;
  opts.backend = Backend::kQuadrature;
  opts.quadrature = quad_defaults();
  const SweepResult s = sweep_invariant(builtin::make_model_a(), 2.0, {1.0, 1.5, 1.9, 2.0, 2.1, 2.5, 4.0}, opts);
  const double secs = seconds_since(t0);
  for (const auto& row : s.rows) {
    o.require(row.error.empty() && row.d_nu <= row.bound, "D_nu <= B at " + fmt(row.lambda));
    if (row.lambda == 1.9 || row.lambda == 2.1) {
      o.require(row.d_mu <= 0.05 && row.d_nu <= 0.05, "near-point threshold at " + fmt(row.lambda));
      o.note("lambda=" + fmt(row.lambda) + " D_mu=" + fmt(row.d_mu) + " D_nu=" + fmt(row.d_nu));
    }
  }
  o.require(secs < 300.0, "runtime");
  o.note("t=" + fmt(std::round(secs * 1000) / 1000) + "s");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pdmp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome reproducibility(const fs::path& work) {
  Outcome o;
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path cfg = work / "run.json";
  {
    std::ofstream f(cfg);
    f << R"({"model": {"name": "modelB", "a": 1, "beta": 0.5, "lambda_min": 0.5, "lambda_max": 4},
             "lambda": 2, "lambda_bar": 2, "seed": 5,
             "budgets": {"n": 20000, "burn_in": 500, "replicas": 4, "grid_size": 600}})";
  }
  const std::vector<std::vector<std::string>> runs = {
      {"check", "--config", cfg.string()},
      {"simulate", "--config", cfg.string()},
      {"invariant", "--config", cfg.string()},
      {"invariant", "--config", cfg.string(), "--backend", "quadrature"},
      {"sweep", "--config", cfg.string()},
      {"verify", "--config", cfg.string(), "--suite", "all", "--backend", "quadrature"},
  };
  std::size_t files = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<int> codes;
    for (const char* rep : {"a", "b"}) {
      auto args = runs[i];
      args.push_back("--out");
      args.push_back((work / rep / std::to_string(i)).string());
      codes.push_back(cli(args));
    }
    o.require(codes[0] == codes[1], "exit codes of run " + std::to_string(i));
  }
  const fs::path pa = work / "a" / "2" / "mu_particles.csv";
  const fs::path pb = work / "b" / "3" / "mu_particles.csv";
  for (const char* rep : {"a", "b"}) {
    cli({"distance", pa.string(), pb.string(), "--out", (work / rep / "distance").string()});
  }
  for (const auto& entry : fs::recursive_directory_iterator(work / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), work / "a");
    const fs::path other = work / "b" / rel;
    o.require(fs::exists(other) && slurp(entry.path()) == slurp(other), "identical " + rel.string());
    ++files;
  }
  o.require(files >= 15, "expected output files");
  o.note("compared files=" + std::to_string(files));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "pdmp_acceptance";
  int failures = 0;
  auto report = [&](int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (!o.pass) ++failures;
    std::printf("%s [%2d] %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "model audits", model_audits);
  std::optional<ModelAEstimates> est;
  std::string est_error;
  try {
    est.emplace(estimate_model_a());
  } catch (const std::exception& e) {
    est_error = e.what();
  }
  auto needs_est = [&](Outcome (*f)(const ModelAEstimates&)) {
    return [&, f]() {
      if (!est) throw std::runtime_error(est_error);
      return f(*est);
    };
  };
  report(2, "chain invariant mean oracle", needs_est(chain_mean));
  report(3, "flow invariant mean oracle", needs_est(flow_mean));
  report(4, "backend cross-validation", cross_validation);
  report(5, "flat metric exactness", flat_metric_exactness);
  report(6, "rate mean-value certificate", mvt_certificate);
  report(7, "kernel equicontinuity and joint continuity certificates", kernel_certificates);
  report(8, "ergodic rate fit", ergodic_rate);
  report(9, "rescaling identity", rescaling);
  report(10, "continuity sweep", continuity_sweep);
  report(11, "CLI reproducibility", [&] { return reproducibility(work); });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
