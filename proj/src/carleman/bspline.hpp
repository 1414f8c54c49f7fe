#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "carleman/errors.hpp"

namespace carleman {

// Clamped B-splines on [a, b] with uniform interior knots (open knot vector,
// full multiplicity at the ends). Values and derivatives come from the de
// Boor recurrence, so differentiation is exact.
class Spline1D {
 public:
  Spline1D(double a, double b, int degree, int n_interior);

  int degree() const { return p_; }
  int n_basis() const { return n_basis_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double knot(int i) const { return knots_[static_cast<std::size_t>(i)]; }
  int n_spans() const { return n_interior_ + 1; }
  double span_lo(int s) const { return knot(p_ + s); }
  double span_hi(int s) const { return knot(p_ + s + 1); }

  int find_span(double x) const;

  // ders[k * (p+1) + j] = k-th derivative of N_{span-p+j} at x, k <= max_order.
  void eval_span(double x, int span, int max_order, double* ders) const;

  // Single basis function derivative (0 outside its support).
  double eval(int i, double x, int der) const;

  double support_lo(int i) const { return knot(i); }
  double support_hi(int i) const { return knot(i + p_ + 1); }

 private:
  double a_, b_;
  int p_, n_interior_, n_basis_;
  std::vector<double> knots_;
};

// Gauss-Legendre rule with n points on [-1, 1], n <= 8.
struct GaussRule {
  std::vector<double> x, w;
};
GaussRule gauss_rule(int n);

// One axis of the tensor basis, after imposing the homogeneous conditions:
//  - SpatialZeroPair: drop the first/last two clamped splines, so every kept
//    function and its first derivative vanish at both ends;
//  - TimeFlatStart: replace the two leading splines by their sum (their end
//    slopes cancel), so every kept function has zero derivative at t = 0.
class AxisBasis {
 public:
  enum class Kind { SpatialZeroPair, TimeFlatStart };

  AxisBasis(double a, double b, int degree, int count, Kind kind);

  int count() const { return count_; }
  int degree() const { return spline_.degree(); }
  Kind kind() const { return kind_; }
  const Spline1D& spline() const { return spline_; }

  double eval(int i, double x, int der) const;

  std::pair<double, double> support(int i) const;

  // Inclusive node-index window of function i on a uniform grid of n nodes
  // starting at `lo` with spacing h.
  std::pair<int, int> node_window(int i, int n, double lo, double h) const;

  // Exact integral of f_i^(order) f_j^(order) over [a, b].
  Eigen::MatrixXd gram(int order) const;

 private:
  Kind kind_;
  int count_;
  Spline1D spline_;
};

}  // namespace carleman
