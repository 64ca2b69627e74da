#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdmp/model.hpp"

namespace pdmp {

struct AuditRow {
  std::string condition;
  /// Largest observed (lhs - rhs), clamped below at 0. For informational
  /// rows this holds the observed statistic instead.
  double max_violation = 0.0;
  std::string worst_input;
  /// Informational rows never fail the audit.
  bool required = true;
  bool passed = true;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  double tolerance = 1e-9;
  /// Smallest overlap integral seen while auditing the jump family.
  double observed_pbar = 1.0;

  bool passed() const;
  const AuditRow* find(const std::string& condition) const;
  void append(const AuditReport& other);
};

struct AuditOptions {
  double tolerance = 1e-9;
  /// Allowed |integral of p(x, .) - 1|; composite quadrature is not exact for general densities.
  double normalization_tolerance = 1e-6;
};

/// Samples (s, t, x, y) and checks S(0,x) = x, the semigroup law, the Lipschitz
/// bound |S(t,x)-S(t,y)| <= L e^{alpha t}|x-y| and the time-regularity bound
/// with J. A flow leaving X is reported as a failed "flow_state_space" row.
AuditReport audit_flow(const SemiFlow& flow, const StateSpace& space, int sample_count, double t_max,
                       std::uint64_t seed, const AuditOptions& options = {});

/// Evaluates the Theta integrals of the jump conditions on sampled pairs by
/// composite midpoint quadrature with `quad_nodes` nodes.
///
/// Throws ModelError on a negative density value.
AuditReport audit_jumps(const JumpFamily& jumps, const StateSpace& space, int sample_count, int quad_nodes,
                        std::uint64_t seed, const AuditOptions& options = {});

/// Informational estimate of the uniform-integrability supremand at xbar
/// (rate lambda_min) over sampled x. Reported, never enforced.
AuditRow audit_integrability(const ModelSpec& spec, int sample_count, int t_nodes, int theta_nodes,
                             std::uint64_t seed);

/// Full model audit: flow, jumps, integrability and the rate-interval contraction check.
AuditReport audit_model(const ModelSpec& spec, int sample_count, double t_max, int quad_nodes,
                        std::uint64_t seed, const AuditOptions& options = {});

/// CSV with header `condition,max_violation,worst_input,required,pass`.
void write_audit_csv(std::ostream& out, const AuditReport& report);

}  // namespace pdmp
