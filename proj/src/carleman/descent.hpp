#pragma once

#include "carleman/functional.hpp"

namespace carleman {

enum class MembershipPolicy { Reject, Backtrack };

struct DescentConfig {
  double sigma = 0.0;  // step size; <= 0 selects 0.5 / L_hat by power iteration
  double theta = 1e-8; // gradient-norm stopping tolerance
  int max_iters = 20000;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  MembershipPolicy membership_policy = MembershipPolicy::Backtrack;
  int record_every = 1;
};

enum class DescentStatus { Converged, MaxIters, LeftSet };

const char* descent_status_name(DescentStatus s);

struct DescentIterate {
  CoeffVector B;
  double J = 0.0;
  double grad_norm = 0.0;
  double min_margin = 0.0;
  double step_used = 0.0;
};

struct DescentTrace {
  std::vector<DescentIterate> iterates;
  DescentStatus status = DescentStatus::MaxIters;
  double sigma_nominal = 0.0;
  bool boundary_minimizer = false;
  const CoeffVector& terminal() const { return iterates.back().B; }
};

// Fixed-step gradient descent B_{n+1} = B_n - sigma g^n with descent and
// membership safeguards; stops when |g^n| <= theta. Accepted iterates keep J
// nonincreasing and all membership margins positive.
DescentTrace minimize(const FunctionalContext& ctx, const CoeffVector& B1,
                      const DescentConfig& config);

struct RateEstimate {
  double q_fit = 1.0;
  double fit_residual = 0.0;
  bool contracting = false;  // NOT_CONTRACTING flag when false
  int points_used = 0;
};

// Geometric-rate fit of |B_n - B_ref| over the tail half of the trace.
RateEstimate estimate_rate(const DescentTrace& trace, const CoeffVector& B_ref);

}  // namespace carleman
