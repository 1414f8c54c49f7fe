#pragma once

#include "carleman/admissible.hpp"
#include "carleman/quadrature.hpp"

namespace carleman {

enum class FunctionalVariant { JAlpha, JTilde, JBar };

struct FunctionalConfig {
  double lambda = 0.0;
  double alpha = 0.0;
  int m = 3;          // penalty norm order
  double c_hat = 1.0; // surrogate for the convexity-threshold constant

  // alpha >= 2 c_hat exp(-lambda N) is the certified-convexity regime.
  bool theorem_regime(double N) const;
  static double alpha_for(double lambda, double c_hat, double N);
};

struct GapReport {
  double gap = 0.0;           // J(B2) - J(B1) - (grad J(B1), B2 - B1)
  double penalty_floor = 0.0; // (alpha/2) |w2 - w1|_m^2
  double h1pd_norm_sq = 0.0;  // |w2 - w1|_{H1(P_d)}^2
  double b_dist_sq = 0.0;     // |B2 - B1|^2
  bool floor_ok = false;      // gap >= penalty_floor
};

// Evaluates the weighted residual functional and its exact discrete gradient
// over the tensor basis. The Carleman weight is kept normalized as
// exp(2 lambda (psi - M)) so magnitudes stay O(1) across the lambda sweep;
// this scales the residual term of the paper-form functional by a positive
// constant and leaves every convexity statement intact with the configured
// alpha.
class FunctionalContext {
 public:
  FunctionalContext(const Geometry& geom, const TensorBasis& basis, const Field& F,
                    const AdmissibleParams& params, const FunctionalConfig& config);

  const Geometry& geometry() const { return geom_; }
  const TensorBasis& basis() const { return basis_; }
  const AdmissibleParams& params() const { return params_; }
  const FunctionalConfig& config() const { return config_; }
  const PdMask& mask() const { return mask_; }
  const Field& lifting() const { return F_; }
  const Eigen::MatrixXd& penalty_gram() const { return gram_m_; }

  void set_lambda(double lambda);
  void set_alpha(double alpha) { config_.alpha = alpha; }

  // Y(B) = A(w_B) dtt(w_B + F) - laplacian(w_B + F) on the grid stencils.
  Field residual(const CoeffVector& B) const;

  double eval(const CoeffVector& B, FunctionalVariant variant = FunctionalVariant::JAlpha) const;

  // Linearized residual action on the direction h = synth(H).
  Field frechet_apply(const CoeffVector& B, const CoeffVector& H) const;

  CoeffVector gradient(const CoeffVector& B,
                       FunctionalVariant variant = FunctionalVariant::JAlpha) const;

  GapReport convexity_gap(const CoeffVector& B1, const CoeffVector& B2) const;

  MembershipReport membership(const CoeffVector& B) const {
    return carleman::membership(B, params_, basis_);
  }

  double penalty_norm_sq(const CoeffVector& B) const { return B.dot(gram_m_ * B); }

  // Hessian-vector product of the quadratic obtained by freezing A at
  // B_freeze (drops the initial-slice coupling); used for step sizing and as
  // a test oracle.
  CoeffVector frozen_hessian_apply(const CoeffVector& B_freeze, const CoeffVector& V) const;
  double frozen_hessian_largest_eigenvalue(const CoeffVector& B_freeze, int iters = 60,
                                           std::uint64_t seed = 1) const;

 private:
  struct ResidualParts {
    Field w_plus_F;      // w_B + F
    Field dtt_wpF;       // dtt(w_B + F)
    Field A;             // spatial, on the Omega grid
    Field denom0;        // (w_B + F)(., 0)
    Field Y;
  };
  ResidualParts assemble_residual(const CoeffVector& B) const;

  // Entries <Z, A dtt(h_e) - lap(h_e)> summed over grid nodes. Basis entries
  // are tensor products, so their discrete dtt / laplacian split into cached
  // one-dimensional stencil lines and the contraction runs in
  // O(k_t * nodes + entries * spatial window).
  CoeffVector assemble_against(const Field& Z, const Field& A) const;
  // S(x) = sum_t omega Y G used by the initial-slice gradient term.
  Field slice_accumulator(const Field& Y, const Field& G) const;

  Geometry geom_;
  const TensorBasis& basis_;
  Field F_;
  AdmissibleParams params_;
  FunctionalConfig config_;
  PdMask mask_;
  Field omega_weight_;  // trapezoid weight x normalized Carleman weight, per node
  Eigen::MatrixXd gram_m_;
  // Discrete stencil lines of the per-axis factors: [axis][fn][node].
  std::vector<std::vector<std::vector<double>>> d2_lines_;
};

}  // namespace carleman
