#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pdmp/audit.hpp"
#include "pdmp/builtin_models.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/flat_metric.hpp"
#include "pdmp/format.hpp"
#include "pdmp/quadrature.hpp"
#include "pdmp/simulate.hpp"

namespace pdmp::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& target) {
  if (!obj.contains(key)) return;
  T value{};
  read_field(obj, key, value);
  target = value;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

ModelSpec build_model(const json& block, std::string& name) {
  if (!block.is_object()) throw ConfigError("'model' must be an object");
  if (!block.contains("name")) throw ConfigError("'model.name' is required");
  read_field(block, "name", name);
  builtin::DecayBurstParams params;
  read_field(block, "a", params.a);
  read_field(block, "beta", params.beta);
  read_field(block, "lambda_min", params.lambda_min);
  read_field(block, "lambda_max", params.lambda_max);
  read_field(block, "xbar", params.xbar);
  ModelSpec spec;
  try {
    spec = builtin::make_builtin(name, params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model parameters: ") + e.what());
  }
  // Declared constants may be overridden to audit a misdeclared model.
  read_field(block, "L", spec.flow.lipschitz);
  read_field(block, "alpha", spec.flow.growth);
  read_field(block, "L_w", spec.jumps.lipschitz_w);
  read_field(block, "L_p", spec.jumps.lipschitz_p);
  read_field(block, "p_bar", spec.jumps.overlap_pbar);
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!doc.contains("model")) throw ConfigError("config is missing the 'model' block");

  RunConfig cfg;
  cfg.model = build_model(doc.at("model"), cfg.model_name);
  read_optional(doc, "lambda", cfg.lambda);
  read_optional(doc, "lambda_bar", cfg.lambda_bar);
  read_field(doc, "lambdas", cfg.lambdas);
  if (doc.contains("backend")) {
    std::string b;
    read_field(doc, "backend", b);
    cfg.backend = parse_backend(b);
  }
  read_field(doc, "seed", cfg.seed);
  if (doc.contains("out")) {
    std::string o;
    read_field(doc, "out", o);
    cfg.out = o;
  }
  if (doc.contains("budgets")) {
    const json& b = doc.at("budgets");
    if (!b.is_object()) throw ConfigError("'budgets' must be an object");
    Budgets& g = cfg.budgets;
    read_field(b, "n", g.samples);
    read_field(b, "burn_in", g.burn_in);
    read_field(b, "replicas", g.replicas);
    read_field(b, "mark_grid", g.mark_grid);
    read_field(b, "grid_size", g.grid_size);
    read_field(b, "x_max", g.x_max);
    read_field(b, "t_nodes", g.t_nodes);
    read_field(b, "theta_nodes", g.theta_nodes);
    read_field(b, "lp_cap", g.lp_cap);
    read_field(b, "audit_samples", g.audit_samples);
    read_field(b, "g_draws", g.g_draws);
    read_field(b, "rate_steps", g.rate_steps);
    read_field(b, "chain_steps", g.chain_steps);
    read_field(b, "tolerance", g.tolerance);
    read_field(b, "continuity_threshold", g.continuity_threshold);
    read_field(b, "threads", g.threads);
    if (g.samples < 1 || g.burn_in < 0 || g.replicas < 1 || g.mark_grid < 2 || g.grid_size < 2 ||
        g.t_nodes < 1 || g.theta_nodes < 1 || g.lp_cap < 3 || g.audit_samples < 1 || g.g_draws < 1 ||
        g.rate_steps < 3 || g.chain_steps < 1) {
      throw ConfigError("budgets out of range");
    }
    check_positive(g.x_max, "budgets.x_max");
    if (!(g.tolerance >= 0.0)) throw ConfigError("budgets.tolerance must be nonnegative");
    check_positive(g.continuity_threshold, "budgets.continuity_threshold");
  }
  if (cfg.lambda) check_positive(*cfg.lambda, "lambda");
  if (cfg.lambda_bar) check_positive(*cfg.lambda_bar, "lambda_bar");
  for (double l : cfg.lambdas) check_positive(l, "lambdas entries");
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& s, const fs::path& path, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

EmpiricalMeasure read_particles(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open particle file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "replica" || header[1] != "index" || header.back() != "weight") {
    throw ConfigError(path.string() + ": header must be replica,index,<state...>,weight");
  }
  const std::size_t dim = header.size() - 3;
  if (dim > StatePoint::kMaxDimension) throw ConfigError(path.string() + ": too many state columns");
  std::vector<StatePoint> pts;
  std::vector<double> ws;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " columns");
    }
    std::vector<double> coords(dim);
    for (std::size_t c = 0; c < dim; ++c) coords[c] = parse_number(cells[2 + c], path, line_no);
    const double w = parse_number(cells.back(), path, line_no);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": weight must be nonnegative");
    }
    pts.emplace_back(std::span<const double>(coords));
    ws.push_back(w);
  }
  return EmpiricalMeasure(std::move(pts), std::move(ws));
}

void write_particles(std::ostream& out, const EmpiricalMeasure& m, int replicas) {
  const std::size_t dim = m.dimension();
  out << "replica,index";
  if (dim == 1) {
    out << ",x";
  } else {
    for (std::size_t c = 0; c < dim; ++c) out << ",x" << c;
  }
  out << ",weight\n";
  const std::size_t per = replicas > 0 ? std::max<std::size_t>(1, m.size() / static_cast<std::size_t>(replicas)) : m.size();
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << i / per << ',' << i % per;
    for (std::size_t c = 0; c < dim; ++c) out << ',' << format_double(m.support()[i][c]);
    out << ',' << format_double(m.weights()[i]) << '\n';
  }
}

namespace {

struct Context {
  RunConfig cfg;
  std::string command;
  std::ostream& out;
  std::ostream& err;
};

std::ofstream open_output(const Context& ctx, const std::string& name) {
  fs::create_directories(ctx.cfg.out);
  std::ofstream f(ctx.cfg.out / name, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + (ctx.cfg.out / name).string() + "'");
  return f;
}

// One line per run; the output directory is deliberately left out so reruns elsewhere compare equal.
void append_manifest(const Context& ctx, int code, const std::string& summary) {
  fs::create_directories(ctx.cfg.out);
  const fs::path path = ctx.cfg.out / "manifest.csv";
  const bool fresh = !fs::exists(path);
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (fresh) f << "command,model,backend,seed,lambda,exit_code,summary\n";
  f << ctx.command << ',' << ctx.cfg.model_name << ',' << backend_name(ctx.cfg.backend) << ',' << ctx.cfg.seed << ','
    << (ctx.cfg.lambda ? format_double(*ctx.cfg.lambda) : std::string()) << ',' << code << ',' << summary << '\n';
}

double require_lambda(const RunConfig& cfg) {
  if (!cfg.lambda) throw ConfigError("config needs 'lambda' for this command");
  const double l = *cfg.lambda;
  if (l < cfg.model.lambda_min || l > cfg.model.lambda_max) {
    throw ContractivityError("lambda " + format_double(l) + " lies outside [" + format_double(cfg.model.lambda_min) +
                             ", " + format_double(cfg.model.lambda_max) + "]");
  }
  if (!check_contractivity(cfg.model, l)) {
    throw ContractivityError("rate " + format_double(l) +
                             " violates the contraction condition L*L_w + alpha/lambda < 1");
  }
  return l;
}

ChainEstimateOptions chain_options(const RunConfig& cfg) {
  ChainEstimateOptions o;
  o.burn_in = cfg.budgets.burn_in;
  o.samples = cfg.budgets.samples;
  o.replicas = cfg.budgets.replicas;
  o.mark_grid = cfg.budgets.mark_grid;
  o.seed = cfg.seed;
  o.threads = cfg.budgets.threads;
  return o;
}

QuadratureInvariantOptions quadrature_options(const RunConfig& cfg) {
  QuadratureInvariantOptions o;
  o.x_max = cfg.budgets.x_max;
  o.grid_size = cfg.budgets.grid_size;
  o.kernel.t_nodes = cfg.budgets.t_nodes;
  o.kernel.theta_nodes = cfg.budgets.theta_nodes;
  o.kernel.threads = cfg.budgets.threads;
  return o;
}

SweepOptions sweep_options(const RunConfig& cfg) {
  SweepOptions o;
  o.backend = cfg.backend;
  o.quadrature = quadrature_options(cfg);
  o.chain = chain_options(cfg);
  o.g_draws = cfg.budgets.g_draws;
  o.support_cap = cfg.budgets.lp_cap;
  o.continuity_threshold = cfg.budgets.continuity_threshold;
  o.threads = cfg.budgets.threads;
  return o;
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions o;
  o.tolerance = cfg.budgets.tolerance;
  o.support_cap = cfg.budgets.lp_cap;
  o.t_nodes = cfg.budgets.t_nodes;
  o.theta_nodes = cfg.budgets.theta_nodes;
  return o;
}

int cmd_check(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  AuditOptions opts;
  AuditReport report = audit_model(cfg.model, cfg.budgets.audit_samples, 5.0, cfg.budgets.theta_nodes, cfg.seed, opts);
  auto f = open_output(ctx, "check.csv");
  write_audit_csv(f, report);
  for (const auto& row : report.rows) {
    ctx.out << (row.passed ? "PASS " : "FAIL ") << row.condition << " max_violation=" << format_double(row.max_violation)
            << (row.required ? "" : " (info)") << '\n';
  }
  const int code = report.passed() ? kOk : kFailure;
  ctx.out << (code == kOk ? "all audits passed" : "audit failures detected") << '\n';
  append_manifest(ctx, code, report.passed() ? "audits_pass" : "audits_fail");
  return code;
}

int cmd_simulate(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const double lambda = require_lambda(cfg);
  RngStream rng(cfg.seed, 0);
  const ChainSample chain = run_chain(cfg.model.xbar, cfg.budgets.chain_steps, lambda, cfg.model, rng,
                                      cfg.budgets.mark_grid);
  auto f = open_output(ctx, "chain.csv");
  f << "step,time,mark";
  const std::size_t dim = cfg.model.space.dimension;
  for (std::size_t c = 0; c < dim; ++c) f << (dim == 1 ? ",x" : ",x" + std::to_string(c));
  f << '\n';
  for (std::size_t n = 0; n < chain.states.size(); ++n) {
    f << n << ',' << format_double(chain.jump_times[n]) << ',' << (n == 0 ? std::string() : format_double(chain.marks[n - 1]));
    for (std::size_t c = 0; c < dim; ++c) f << ',' << format_double(chain.states[n][c]);
    f << '\n';
  }
  const StatePoint& last = chain.states.back();
  ctx.out << "simulated " << chain.steps() << " jumps; final state " << format_double(last[0]) << " at time "
          << format_double(chain.jump_times.back()) << '\n';
  append_manifest(ctx, kOk, "steps=" + std::to_string(chain.steps()));
  return kOk;
}

int cmd_invariant(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const double lambda = require_lambda(cfg);
  SweepOptions opts = sweep_options(cfg);
  EmpiricalMeasure mu, nu;
  double se_mu = 0.0;
  int replicas = 1;
  if (cfg.backend == Backend::kMonteCarlo) {
    const InvariantEstimate est = estimate_invariant_chain(cfg.model, lambda, opts.chain);
    RngStream rng(cfg.seed, 0x6000000000000000ULL);
    mu = est.measure;
    nu = apply_G_lambda(mu, lambda, cfg.model.flow, GMode::monte_carlo(opts.g_draws), rng);
    se_mu = est.mean_standard_error();
    replicas = est.replicas;
  } else {
    const QuadratureInvariant q = estimate_invariant_quadrature(cfg.model, lambda, opts.quadrature);
    mu = q.mu_measure();
    nu = q.nu_measure();
  }
  {
    auto f = open_output(ctx, "mu_particles.csv");
    write_particles(f, mu, replicas);
  }
  {
    auto f = open_output(ctx, "nu_particles.csv");
    write_particles(f, nu, replicas);
  }
  const double m1 = mu.mean(), m2 = mu.moment(2) / mu.total_mass();
  const double n1 = nu.mean(), n2 = nu.moment(2) / nu.total_mass();
  auto f = open_output(ctx, "invariant_summary.csv");
  f << "model,lambda,backend,mean_mu,second_moment_mu,mean_nu,second_moment_nu,stderr_mean_mu,samples,burn_in,"
       "replicas,grid_size,x_max,t_nodes,theta_nodes\n";
  f << cfg.model_name << ',' << format_double(lambda) << ',' << backend_name(cfg.backend) << ',' << format_double(m1)
    << ',' << format_double(m2) << ',' << format_double(n1) << ',' << format_double(n2) << ',' << format_double(se_mu)
    << ',' << cfg.budgets.samples << ',' << cfg.budgets.burn_in << ',' << cfg.budgets.replicas << ','
    << cfg.budgets.grid_size << ',' << format_double(cfg.budgets.x_max) << ',' << cfg.budgets.t_nodes << ','
    << cfg.budgets.theta_nodes << '\n';
  ctx.out << "mean(mu*) = " << format_double(m1) << "  mean(nu*) = " << format_double(n1) << "  ["
          << backend_name(cfg.backend) << "]\n";
  append_manifest(ctx, kOk, "mean_mu=" + format_double(m1) + ";mean_nu=" + format_double(n1));
  return kOk;
}

int cmd_distance(Context& ctx, const std::string& a_path, const std::string& b_path) {
  const EmpiricalMeasure a = read_particles(a_path);
  const EmpiricalMeasure b = read_particles(b_path);
  if (!a.empty() && !b.empty() && a.dimension() != b.dimension()) {
    throw ConfigError("particle files have different state dimensions");
  }
  const CoalescedPair pair = coalesce_to_cap(a.canonical(), b.canonical(), ctx.cfg.budgets.lp_cap);
  FMOptions opts;
  opts.support_cap = ctx.cfg.budgets.lp_cap;
  const FMResult r = fm_distance(pair.first, pair.second, opts);
  {
    auto f = open_output(ctx, "distance.csv");
    f << "fm,duality_gap,coalescing_bound,support\n"
      << format_double(r.value) << ',' << format_double(r.duality_gap) << ',' << format_double(pair.error_bound) << ','
      << r.points.size() << '\n';
  }
  {
    auto f = open_output(ctx, "witness.csv");
    const std::size_t dim = r.points.empty() ? 1 : r.points.front().dimension();
    f << "index";
    for (std::size_t c = 0; c < dim; ++c) f << (dim == 1 ? ",x" : ",x" + std::to_string(c));
    f << ",signed_weight,witness\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      f << i;
      for (std::size_t c = 0; c < dim; ++c) f << ',' << format_double(r.points[i][c]);
      f << ',' << format_double(r.signed_weights[i]) << ',' << format_double(r.witness[i]) << '\n';
    }
  }
  ctx.out << "fm = " << format_double(r.value) << '\n';
  append_manifest(ctx, kOk, "fm=" + format_double(r.value));
  return kOk;
}

std::vector<double> default_sweep_grid() { return {1.0, 1.5, 1.9, 2.0, 2.1, 2.5, 4.0}; }

SweepResult run_sweep(const RunConfig& cfg) {
  const double lbar = cfg.lambda_bar ? *cfg.lambda_bar : (cfg.lambda ? *cfg.lambda : 2.0);
  std::vector<double> grid = cfg.lambdas.empty() ? default_sweep_grid() : cfg.lambdas;
  if (cfg.lambdas.empty()) {
    std::erase_if(grid, [&](double l) { return l < cfg.model.lambda_min || l > cfg.model.lambda_max; });
    if (std::find(grid.begin(), grid.end(), lbar) == grid.end()) grid.push_back(lbar);
  }
  return sweep_invariant(cfg.model, lbar, grid, sweep_options(cfg));
}

void print_reports(std::ostream& out, const std::vector<BoundReport>& reports) {
  for (const auto& r : reports) {
    out << (r.pass ? "PASS " : (r.required ? "FAIL " : "WARN ")) << r.bound_id << " [" << r.inputs
        << "] lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs) << " tol=" << format_double(r.tolerance)
        << '\n';
  }
}

int finish_reports(Context& ctx, const std::vector<BoundReport>& reports, const std::string& file) {
  {
    auto f = open_output(ctx, file);
    write_reports_csv(f, reports);
  }
  print_reports(ctx.out, reports);
  const std::size_t failed = static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const BoundReport& r) { return r.required && !r.pass; }));
  ctx.out << reports.size() << " reports, " << failed << " required failures\n";
  const int code = failed == 0 ? kOk : kFailure;
  append_manifest(ctx, code, "reports=" + std::to_string(reports.size()) + ";failed=" + std::to_string(failed));
  return code;
}

int cmd_sweep(Context& ctx) {
  const SweepResult result = run_sweep(ctx.cfg);
  {
    auto f = open_output(ctx, "sweep.csv");
    write_sweep_csv(f, result);
  }
  for (const auto& row : result.rows) {
    if (!row.error.empty()) ctx.err << "lambda " << format_double(row.lambda) << ": " << row.error << '\n';
  }
  return finish_reports(ctx, result.reports, "sweep_reports.csv");
}

std::vector<BoundReport> suite_mvt() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.5 + 3.5 * i / 9.0);
  return verify_mvt(grid);
}

std::vector<BoundReport> suite_equicnt(const RunConfig& cfg) {
  const auto d0 = EmpiricalMeasure::dirac(StatePoint(0.0));
  const auto d1 = EmpiricalMeasure::dirac(StatePoint(1.0));
  return verify_equicnt(cfg.model, d0, d1, {0.0, 0.5, 1.0, 2.0}, verify_options(cfg));
}

std::vector<BoundReport> suite_joint(const RunConfig& cfg) {
  const auto d0 = EmpiricalMeasure::dirac(StatePoint(0.0));
  const auto d1 = EmpiricalMeasure::dirac(StatePoint(1.0));
  std::vector<BoundReport> out;
  const double centre = cfg.lambda_bar ? *cfg.lambda_bar : (cfg.lambda ? *cfg.lambda : 2.0);
  const std::vector<double> rates = {centre - 0.1, centre, centre + 0.1};
  for (double l1 : rates) {
    for (double l2 : rates) {
      out.push_back(verify_joint_continuity(cfg.model, l1, l2, d0, d1, verify_options(cfg)));
      out.push_back(verify_joint_continuity(cfg.model, l1, l2, d1, d1, verify_options(cfg)));
    }
  }
  return out;
}

std::vector<BoundReport> suite_rate(const RunConfig& cfg) {
  const double lambda = cfg.lambda ? *cfg.lambda : 2.0;
  RateFitOptions opts;
  opts.steps = cfg.budgets.rate_steps;
  opts.kernel.t_nodes = cfg.budgets.t_nodes;
  opts.kernel.theta_nodes = cfg.budgets.theta_nodes;
  opts.kernel.threads = cfg.budgets.threads;
  const Grid1D grid = Grid1D::uniform(cfg.budgets.x_max, cfg.budgets.grid_size);
  const RateFit fit = fit_ergodic_rate(cfg.model, lambda, grid, cfg.model.xbar[0], opts);
  const std::string in = "model=" + cfg.model_name + ";lambda=" + format_double(lambda) +
                         ";C=" + format_double(fit.C) + ";points=" + std::to_string(fit.used.size());
  // Per-step Lipschitz factor of P_lambda bounds the contraction of the coupled chains.
  return {make_report("ergodic_rate", in, fit.q, jump_operator_factor(cfg.model, lambda), 0.05),
          make_report("ergodic_fit_r2", in, 0.99, fit.r_squared, 0.0)};
}

std::vector<BoundReport> suite_rescale(const RunConfig& cfg) {
  std::vector<StatePoint> points;
  for (int i = 0; i < 10; ++i) points.emplace_back(0.5 * i);
  std::vector<BoundReport> out;
  for (double l : {1.0, 2.0}) {
    if (l < cfg.model.lambda_min || l > cfg.model.lambda_max) continue;
    out.push_back(verify_rescaling_identity(cfg.model, l, points, default_test_functions(), cfg.budgets.t_nodes,
                                            cfg.budgets.theta_nodes));
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"mvt", "equicnt", "joint", "rate", "rescale", "sweep", "all"};
  return names;
}

int cmd_verify(Context& ctx, const std::string& suite) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<BoundReport> reports;
  auto take = [&](std::vector<BoundReport> r) { reports.insert(reports.end(), r.begin(), r.end()); };
  const bool all = suite == "all";
  if (all || suite == "mvt") take(suite_mvt());
  if (all || suite == "equicnt") take(suite_equicnt(cfg));
  if (all || suite == "joint") take(suite_joint(cfg));
  if (all || suite == "rate") take(suite_rate(cfg));
  if (all || suite == "rescale") take(suite_rescale(cfg));
  if (all || suite == "sweep") {
    const SweepResult sweep = run_sweep(cfg);
    auto f = open_output(ctx, "sweep.csv");
    write_sweep_csv(f, sweep);
    take(sweep.reports);
  }
  return finish_reports(ctx, reports, "reports.csv");
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.model_name = "modelA";
  cfg.model = builtin::make_model_a();
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification toolkit for piecewise-deterministic Markov processes", "pdmp"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string out_dir;
  std::string suite = "all";
  std::vector<std::string> files;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "Random seed (overrides PDMP_SEED and the config)");
    sub->add_option("--backend", backend, "Estimator backend")->check(CLI::IsMember({"montecarlo", "quadrature"}));
    sub->add_option("--out", out_dir, "Output directory (overrides PDMP_OUT and the config)");
  };
  CLI::App* check = app.add_subcommand("check", "Audit the model's regularity conditions");
  CLI::App* simulate = app.add_subcommand("simulate", "Run one post-jump chain from xbar");
  CLI::App* invariant = app.add_subcommand("invariant", "Estimate the invariant laws of the chain and the flow");
  CLI::App* distance = app.add_subcommand("distance", "Flat-metric distance between two particle CSV files");
  CLI::App* sweep = app.add_subcommand("sweep", "Continuity sweep of invariant laws over a rate grid");
  CLI::App* verify = app.add_subcommand("verify", "Run bound verification suites");
  for (CLI::App* sub : {check, simulate, invariant, distance, sweep, verify}) add_common(sub);
  distance->add_option("files", files, "Two particle CSV files")->expected(2)->required();
  verify->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember(suite_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg_out, msg_err;
    const int rc = app.exit(e, msg_out, msg_err);
    out << msg_out.str();
    err << msg_err.str();
    return rc == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Context ctx{default_config(), chosen->get_name(), out, err};
  try {
    if (!config_path.empty()) {
      ctx.cfg = load_config(config_path);
    } else if (chosen != distance && chosen != verify) {
      throw ConfigError("--config is required for '" + ctx.command + "'");
    }
    if (!seed) {
      if (const char* env = std::getenv("PDMP_SEED"); env != nullptr && *env != '\0') {
        try {
          std::size_t used = 0;
          const unsigned long long v = std::stoull(env, &used);
          if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
          seed = v;
        } catch (const std::exception&) {
          throw ConfigError(std::string("PDMP_SEED is not a nonnegative integer: '") + env + "'");
        }
      }
    }
    if (seed) ctx.cfg.seed = *seed;
    if (!out_dir.empty()) {
      ctx.cfg.out = out_dir;
    } else if (const char* env = std::getenv("PDMP_OUT"); env != nullptr && *env != '\0') {
      ctx.cfg.out = env;
    }
    if (!backend.empty()) ctx.cfg.backend = parse_backend(backend);

    if (chosen == check) return cmd_check(ctx);
    if (chosen == simulate) return cmd_simulate(ctx);
    if (chosen == invariant) return cmd_invariant(ctx);
    if (chosen == distance) return cmd_distance(ctx, files.at(0), files.at(1));
    if (chosen == sweep) return cmd_sweep(ctx);
    return cmd_verify(ctx, suite);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractivityError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace pdmp::cli
