#pragma once

#include "carleman/wave.hpp"

namespace carleman {

// Regularized second time differentiation of a boundary trace. Clean data
// (delta_hint = 0) uses centered second differences with even reflection at
// t = 0. Noisy data is mollified first: convolution in t with a compactly
// supported bump kernel of half-width kappa0 * delta_hint^(1/3) * T. The
// first time slab of the output is resampled so the one-sided first
// derivative at t = 0 vanishes exactly, which every admissible trace
// satisfies in the continuum.
FaceTrace second_time_derivative(const FaceTrace& trace, double delta_hint, double T,
                                 double kappa0 = 1.0);

struct SecondDerivativeRecord {
  std::vector<FaceTrace> s_bar;
  std::vector<FaceTrace> p_bar;
};

SecondDerivativeRecord second_time_derivative(const BoundaryRecord& record, double delta_hint,
                                              double T, double kappa0 = 1.0);

struct LiftingField {
  Field F;
  double layer_width = 0.0;
  double max_dirichlet_residual = 0.0;
  double max_neumann_residual = 0.0;
};

// Boundary-layer Hermite blend matching the Dirichlet trace exactly at
// boundary nodes and the Neumann trace to second order, with F identically
// zero farther than layer_width from the boundary and F_t(x,0) = 0 in the
// discrete stencil sense. Faces are processed axis by axis on the current
// residual; a value-only sweep then restores exact boundary interpolation.
LiftingField build_lifting(const std::vector<FaceTrace>& s_bar,
                           const std::vector<FaceTrace>& p_bar, const Geometry& geom,
                           const Grid& qt_grid, double layer_width);

}  // namespace carleman
