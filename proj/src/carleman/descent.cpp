#include "carleman/descent.hpp"

#include <algorithm>
#include <cmath>

#include "carleman/util.hpp"

namespace carleman {

const char* descent_status_name(DescentStatus s) {
  switch (s) {
    case DescentStatus::Converged: return "CONVERGED";
    case DescentStatus::MaxIters: return "MAX_ITERS";
    case DescentStatus::LeftSet: return "LEFT_SET";
  }
  return "UNKNOWN";
}

DescentTrace minimize(const FunctionalContext& ctx, const CoeffVector& B1,
                      const DescentConfig& config) {
  require(config.sigma < 1.0, ErrorCode::CONFIG_ERROR, "sigma must lie in (0,1)");
  require(config.theta > 0.0, ErrorCode::CONFIG_ERROR, "theta must be positive");

  MembershipReport rep = ctx.membership(B1);
  require(rep.interior, ErrorCode::LEFT_SET,
          "starting point must have strictly positive membership margins");

  DescentTrace trace;
  double sigma = config.sigma;
  if (sigma <= 0.0) {
    double L = ctx.frozen_hessian_largest_eigenvalue(B1);
    sigma = L > 0.0 ? std::min(0.5 / L, 0.95) : 0.95;
  }
  trace.sigma_nominal = sigma;

  CoeffVector B = B1;
  double J = ctx.eval(B);
  double step_used = 0.0;

  for (int n = 0; n < config.max_iters; ++n) {
    CoeffVector g = ctx.gradient(B);
    double gnorm = g.norm();
    if (n % config.record_every == 0 || gnorm <= config.theta)
      trace.iterates.push_back({B, J, gnorm, rep.min_margin(), step_used});
    if (gnorm <= config.theta) {
      trace.status = DescentStatus::Converged;
      break;
    }

    double s = sigma;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      CoeffVector Bn = B - s * g;
      MembershipReport rn = ctx.membership(Bn);
      if (rn.min_margin() > 0.0) {
        double Jn = ctx.eval(Bn);
        if (Jn <= J) {
          B = std::move(Bn);
          J = Jn;
          rep = rn;
          step_used = s;
          accepted = true;
          break;
        }
      }
      if (config.membership_policy == MembershipPolicy::Reject) break;
      s *= config.backtrack_factor;
    }
    if (!accepted) {
      trace.status = DescentStatus::LeftSet;
      break;
    }
  }

  if (trace.iterates.empty() || (trace.iterates.back().B - B).norm() != 0.0) {
    CoeffVector g = ctx.gradient(B);
    trace.iterates.push_back({B, J, g.norm(), rep.min_margin(), step_used});
    if (trace.status == DescentStatus::MaxIters && g.norm() <= config.theta)
      trace.status = DescentStatus::Converged;
  }
  trace.boundary_minimizer = rep.min_margin() <= ctx.params().interior_margin;
  return trace;
}

RateEstimate estimate_rate(const DescentTrace& trace, const CoeffVector& B_ref) {
  const auto& its = trace.iterates;
  require(its.size() >= 5, ErrorCode::TOO_SHORT, "need at least 5 recorded iterates");
  std::vector<double> ns, logs;
  std::size_t start = its.size() / 2;
  for (std::size_t i = start; i < its.size(); ++i) {
    double d = (its[i].B - B_ref).norm();
    if (d <= 1e-300) continue;
    ns.push_back(static_cast<double>(i));
    logs.push_back(std::log(d));
  }
  RateEstimate est;
  est.points_used = static_cast<int>(ns.size());
  if (ns.size() < 2) {
    // Everything collapsed onto the reference: contraction complete.
    est.q_fit = 0.0;
    est.contracting = true;
    return est;
  }
  LineFit fit = fit_line(ns, logs);
  est.q_fit = std::exp(fit.slope);
  est.fit_residual = fit.rms_residual;
  est.contracting = est.q_fit < 0.999;
  return est;
}

}  // namespace carleman
