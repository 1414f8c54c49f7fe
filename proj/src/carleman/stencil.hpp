#pragma once

#include <vector>

#include "carleman/geometry.hpp"

namespace carleman {

// Second-order finite differences on the tensor grid. Interior nodes use
// centered stencils; faces use one-sided second-order stencils. Time
// derivatives at t = 0 use the even reflection u(x,-t) = u(x,t), matching
// u_t(x,0) = 0.

// Second time derivative.
Field dtt(const Field& f);

// First time derivative (even reflection gives exactly 0 at t = 0).
Field dt(const Field& f);

// Sum of second derivatives along all spatial axes.
Field laplacian(const Field& f);

// Spatial gradient, one field per axis.
std::vector<Field> grad(const Field& f);

// Second derivative along a single spatial axis.
Field dxx(const Field& f, int axis);

// First derivative along a single spatial axis.
Field dx(const Field& f, int axis);

// One-dimensional line version of the same stencils (out may alias nothing).
void diff_series(const double* v, double* out, int n, double h, int order,
                 bool even_reflect_at_zero);

}  // namespace carleman
