#include "pdmp/audit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "pdmp/errors.hpp"
#include "pdmp/format.hpp"
#include "pdmp/quadrature_rules.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

namespace {

std::string describe(const StatePoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.dimension(); ++i) {
    if (i) s += ' ';
    s += format_double(p[i]);
  }
  return s;
}

StatePoint sample_point(const StateSpace& space, RngStream& rng) {
  StatePoint p;
  std::vector<double> c(space.dimension);
  for (std::size_t i = 0; i < space.dimension; ++i) c[i] = rng.uniform(space.sample_lo[i], space.sample_hi[i]);
  return StatePoint(std::span<const double>(c));
}

// Running maximum of a clamped violation together with the input that produced it.
class Tracker {
 public:
  Tracker(std::string condition, double tolerance) : condition_(std::move(condition)), tolerance_(tolerance) {}

  void observe(double violation, const std::string& input) {
    const double v = std::max(0.0, violation);
    if (v > worst_ || worst_input_.empty()) {
      worst_ = v;
      worst_input_ = input;
    }
  }

  AuditRow row() const {
    AuditRow r;
    r.condition = condition_;
    r.max_violation = worst_;
    r.worst_input = worst_input_;
    r.passed = worst_ <= tolerance_;
    return r;
  }

 private:
  std::string condition_;
  double tolerance_;
  double worst_ = 0.0;
  std::string worst_input_;
};

void validate_space(const StateSpace& space) {
  if (space.sample_lo.size() != space.dimension || space.sample_hi.size() != space.dimension) {
    throw std::invalid_argument("StateSpace: sample box does not match the dimension");
  }
}

}  // namespace

bool AuditReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const AuditRow& r) { return !r.required || r.passed; });
}

const AuditRow* AuditReport::find(const std::string& condition) const {
  for (const auto& r : rows) {
    if (r.condition == condition) return &r;
  }
  return nullptr;
}

void AuditReport::append(const AuditReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  observed_pbar = std::min(observed_pbar, other.observed_pbar);
}

AuditReport audit_flow(const SemiFlow& flow, const StateSpace& space, int sample_count, double t_max,
                       std::uint64_t seed, const AuditOptions& options) {
  if (sample_count < 1) throw std::invalid_argument("audit_flow: sample_count must be >= 1");
  if (!(t_max > 0.0)) throw std::invalid_argument("audit_flow: t_max must be positive");
  validate_space(space);

  const double tol = options.tolerance;
  Tracker identity("flow_identity", tol);
  Tracker semigroup("flow_semigroup", tol);
  Tracker lipschitz("flow_lipschitz", tol);
  Tracker time_reg("flow_time_regularity", tol);
  AuditRow state_row{"flow_state_space", 0.0, "", true, true};

  auto check_inside = [&](const StatePoint& p, const std::string& input) {
    if (space.contains && !space.contains(p) && state_row.passed) {
      state_row.passed = false;
      state_row.max_violation = 1.0;
      state_row.worst_input = input;
    }
  };

  RngStream rng(seed, 0);
  const double alpha = flow.growth;
  for (int k = 0; k < sample_count; ++k) {
    const StatePoint x = sample_point(space, rng);
    const StatePoint y = sample_point(space, rng);
    double s = rng.uniform(0.0, t_max);
    double t = rng.uniform(0.0, t_max);
    if (s > t) std::swap(s, t);
    const std::string input = "x=" + describe(x) + ";y=" + describe(y) + ";s=" + format_double(s) +
                              ";t=" + format_double(t);

    const StatePoint x0 = flow(0.0, x);
    identity.observe(distance(x0, x), input);

    const StatePoint sx = flow(s, x);
    const StatePoint tx = flow(t, x);
    const StatePoint ty = flow(t, y);
    check_inside(sx, input);
    check_inside(tx, input);
    check_inside(ty, input);

    const StatePoint composed = flow(s, tx);
    check_inside(composed, input);
    semigroup.observe(distance(flow(s + t, x), composed), input);

    lipschitz.observe(distance(tx, ty) - flow.lipschitz * std::exp(alpha * t) * distance(x, y), input);

    const double anchor = alpha <= 0.0 ? s : t;
    time_reg.observe(distance(tx, sx) - (t - s) * std::exp(alpha * anchor) * flow.j_bound(x), input);
  }

  AuditReport report;
  report.tolerance = tol;
  report.rows = {identity.row(), semigroup.row(), lipschitz.row(), time_reg.row(), state_row};
  return report;
}

AuditReport audit_jumps(const JumpFamily& jumps, const StateSpace& space, int sample_count, int quad_nodes,
                        std::uint64_t seed, const AuditOptions& options) {
  if (sample_count < 1) throw std::invalid_argument("audit_jumps: sample_count must be >= 1");
  if (quad_nodes < 16) throw std::invalid_argument("audit_jumps: quad_nodes must be >= 16");
  validate_space(space);

  const double tol = options.tolerance;
  const QuadratureRule rule = midpoint_rule(jumps.theta_lo, jumps.theta_hi, quad_nodes);
  Tracker normalization("density_normalization", options.normalization_tolerance);
  Tracker jump_lip("jump_lipschitz", tol);
  Tracker density_lip("density_lipschitz", tol);
  Tracker overlap("jump_overlap", tol);
  AuditRow state_row{"jump_state_space", 0.0, "", true, true};
  double observed_pbar = 1.0;

  std::vector<double> px(rule.size()), py(rule.size());
  auto fill_density = [&](const StatePoint& p, std::vector<double>& out) {
    for (std::size_t k = 0; k < rule.size(); ++k) {
      out[k] = jumps.density(p, rule.nodes[k]);
      if (out[k] < 0.0 || std::isnan(out[k])) {
        throw ModelError("negative density p(" + describe(p) + ", " + format_double(rule.nodes[k]) + ")");
      }
    }
  };

  RngStream rng(seed, 1);
  for (int k = 0; k < sample_count; ++k) {
    const StatePoint x = sample_point(space, rng);
    // Every 64th pair is coincident so the x = y edge case is always exercised.
    const StatePoint y = (k % 64 == 0) ? x : sample_point(space, rng);
    const std::string input = "x=" + describe(x) + ";y=" + describe(y);
    const double dxy = distance(x, y);
    fill_density(x, px);
    fill_density(y, py);

    double mass = 0.0, lip_w = 0.0, lip_p = 0.0, common = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double theta = rule.nodes[q];
      const double h = rule.weights[q];
      const StatePoint wx = jumps.apply(theta, x);
      const StatePoint wy = jumps.apply(theta, y);
      if (space.contains && (!space.contains(wx) || !space.contains(wy)) && state_row.passed) {
        state_row.passed = false;
        state_row.max_violation = 1.0;
        state_row.worst_input = input + ";theta=" + format_double(theta);
      }
      const double dw = distance(wx, wy);
      mass += h * px[q];
      lip_w += h * px[q] * dw;
      lip_p += h * std::abs(px[q] - py[q]);
      // Membership in Theta(x, y) allows for rounding in the equality case.
      if (dw <= jumps.lipschitz_w * dxy * (1.0 + 1e-12) + 1e-15) common += h * std::min(px[q], py[q]);
    }
    normalization.observe(std::abs(mass - 1.0), input);
    jump_lip.observe(lip_w - jumps.lipschitz_w * dxy, input);
    density_lip.observe(lip_p - jumps.lipschitz_p * dxy, input);
    overlap.observe(jumps.overlap_pbar - common, input);
    observed_pbar = std::min(observed_pbar, common);
  }

  AuditReport report;
  report.tolerance = tol;
  report.observed_pbar = observed_pbar;
  report.rows = {normalization.row(), jump_lip.row(), density_lip.row(), overlap.row(), state_row};
  AuditRow pbar_row{"observed_pbar", observed_pbar, "", false, true};
  report.rows.push_back(pbar_row);
  return report;
}

AuditRow audit_integrability(const ModelSpec& spec, int sample_count, int t_nodes, int theta_nodes,
                             std::uint64_t seed) {
  const QuadratureRule t_rule = exponential_rule(gauss_laguerre(t_nodes), spec.lambda_min);
  const QuadratureRule th_rule = midpoint_rule(spec.jumps.theta_lo, spec.jumps.theta_hi, theta_nodes);
  RngStream rng(seed, 2);
  double worst = 0.0;
  std::string worst_input;
  for (int k = 0; k < sample_count; ++k) {
    const StatePoint x = sample_point(spec.space, rng);
    double value = 0.0;
    for (std::size_t i = 0; i < t_rule.size(); ++i) {
      const StatePoint sx = spec.flow(t_rule.nodes[i], x);
      const StatePoint sxbar = spec.flow(t_rule.nodes[i], spec.xbar);
      double inner = 0.0;
      for (std::size_t j = 0; j < th_rule.size(); ++j) {
        inner += th_rule.weights[j] * spec.jumps.density(sx, th_rule.nodes[j]) *
                 norm(spec.jumps.apply(th_rule.nodes[j], sxbar));
      }
      value += t_rule.weights[i] * inner;
    }
    // The Laguerre weights integrate against lambda e^{-lambda t}; the supremand has no lambda factor.
    value /= spec.lambda_min;
    if (value > worst || worst_input.empty()) {
      worst = value;
      worst_input = "x=" + describe(x);
    }
  }
  return AuditRow{"integrability_sup_estimate", worst, worst_input, false, std::isfinite(worst)};
}

AuditReport audit_model(const ModelSpec& spec, int sample_count, double t_max, int quad_nodes,
                        std::uint64_t seed, const AuditOptions& options) {
  AuditReport report = audit_flow(spec.flow, spec.space, sample_count, t_max, seed, options);
  report.append(audit_jumps(spec.jumps, spec.space, sample_count, quad_nodes, seed, options));

  const bool interval_ok = check_contractivity_interval(spec);
  const double worst_lhs =
      std::max(spec.flow.lipschitz * spec.jumps.lipschitz_w + spec.flow.growth / spec.lambda_min,
               spec.flow.lipschitz * spec.jumps.lipschitz_w + spec.flow.growth / spec.lambda_max);
  report.rows.push_back(AuditRow{"rate_contractivity", std::max(0.0, worst_lhs - 1.0),
                                 "lambda_min=" + format_double(spec.lambda_min) +
                                     ";lambda_max=" + format_double(spec.lambda_max),
                                 true, interval_ok});
  report.rows.push_back(audit_integrability(spec, std::min(sample_count, 256), 32, 32, seed));
  return report;
}

void write_audit_csv(std::ostream& out, const AuditReport& report) {
  out << "condition,max_violation,worst_input,required,pass\n";
  for (const auto& r : report.rows) {
    out << r.condition << ',' << format_double(r.max_violation) << ',' << r.worst_input << ','
        << (r.required ? 1 : 0) << ',' << (r.passed ? 1 : 0) << '\n';
  }
}

}  // namespace pdmp
