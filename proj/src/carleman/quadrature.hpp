#pragma once

#include "carleman/geometry.hpp"

namespace carleman {

enum class Region { QT, Pd, OmegaT, ST };

// Composite trapezoid node weights, one array per axis (h/2 at the ends).
struct TrapezoidWeights {
  explicit TrapezoidWeights(const Grid& g);
  std::array<std::vector<double>, kMaxDim> wx;
  std::vector<double> wt;
  double spatial(const Grid& g, std::int64_t s) const;
};

// exp(2 lambda (psi - psi_shift)) sampled on the grid; exponent clamped to
// +-700. psi_shift = 0 is the plain Carleman weight.
struct WeightField {
  Field phi_sq;
  bool clamped = false;
};
WeightField carleman_weight_field(const Geometry& geom, const Grid& grid, double lambda,
                                  double psi_shift = 0.0);

// Trapezoid quadrature of  f * g * phi_lambda^2  over the region.
// P_d is resolved at node granularity through the mask (computed on demand
// when not supplied). Omega_T is the t = T slice, S_T the lateral boundary.
double weighted_inner(const Field& f, const Field& g, const Geometry& geom, double lambda,
                      Region region = Region::QT, const PdMask* mask = nullptr);

// Same quadrature with an explicit weight field (used by the functional,
// which keeps a normalized weight).
double weighted_inner(const Field& f, const Field& g, const Field& weight, Region region,
                      const PdMask* mask = nullptr);

// Unweighted L2(Q_T) norm squared by trapezoid quadrature.
double l2_norm_sq(const Field& f);

// H1-type norm squared over P_d nodes: sum of (f^2 + f_t^2 + |grad f|^2)
// with trapezoid weights restricted to the mask.
double h1_pd_norm_sq(const Field& f, const PdMask& mask);

}  // namespace carleman
