#pragma once

#include <limits>

#include "carleman/descent.hpp"
#include "carleman/preprocess.hpp"
#include "carleman/util.hpp"

namespace carleman {

// One certified property: per-row sweep data for the CSV, fitted constants,
// and an overall pass flag. Asymptotic statements are reported as empirical
// thresholds and monotone trends, never as fixed universal constants.
struct CertificateReport {
  std::string property;
  int samples = 0;
  double pass_fraction = 0.0;
  bool pass = false;
  double lambda_star = std::numeric_limits<double>::quiet_NaN();
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();
  double worst_case = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string summary;
};

// Rejection sampler for admissible coefficient vectors: perturbs the
// reference by componentwise uniform noise, shrinking the scale until the
// membership margins are positive (interior) or nonnegative (member).
CoeffVector sample_member(const FunctionalContext& ctx, const CoeffVector& B_ref, double scale,
                          bool interior, Rng& rng, int max_attempts = 200);

CertificateReport certify_strong_convexity(FunctionalContext& ctx, const CoeffVector& B_ref,
                                           const std::vector<double>& lambda_grid, int samples,
                                           std::uint64_t seed);

CertificateReport certify_set_convexity(const FunctionalContext& ctx, const CoeffVector& B_ref,
                                        int samples, std::uint64_t seed);

CertificateReport certify_volterra(const Geometry& geom, const Grid& qt_grid,
                                   const std::vector<double>& lambda_grid, int samples,
                                   std::uint64_t seed);

// c_omega: coefficient on the Omega grid (defaults to 1 when null); g_field:
// the coupling weight of the nonlinear term (defaults to 0 when null).
CertificateReport probe_carleman(const Geometry& geom, const Grid& qt_grid, const Field* c_omega,
                                 const Field* g_field, const std::vector<double>& lambda_grid,
                                 int samples, std::uint64_t seed);

// Theorem-style parameter schedules for data error level delta.
struct NoiseSchedule {
  double lambda = 0.0;
  double alpha_paper = 0.0;      // 2 c_hat delta^(N/(2M))
  double alpha_effective = 0.0;  // alpha_paper exp(-2 lambda M), the normalized-weight pairing
  double rho = 0.0;              // min(1/2, N/(4M))
};
NoiseSchedule noise_schedule(double delta, double M, double N, double c_hat);

struct NoiseScalingInputs {
  const Geometry* geom = nullptr;
  const TensorBasis* basis = nullptr;
  const BoundaryRecord* clean_record = nullptr;  // noise-free traces
  Field lap_f;       // on the Omega grid
  Field w_star;      // clean ground truth w on Q_T
  CoeffVector B_init;
  double b = 0.5, R = 10.0, c_hat = 1.0;
  double layer_width = 0.2, kappa0 = 1.0;
  int m = 3;
  double theta = 1e-8;
  int max_iters = 20000;
  std::uint64_t seed = 1;
  bool lambda_sweep = false;                 // errorless branch: sweep lambda at delta = 0
  std::vector<double> lambda_grid;           // used when lambda_sweep
};

CertificateReport experiment_noise_scaling(const NoiseScalingInputs& in,
                                           const std::vector<double>& deltas);

}  // namespace carleman
