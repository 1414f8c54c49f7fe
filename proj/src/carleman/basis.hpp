#pragma once

#include <Eigen/Dense>
#include <memory>

#include "carleman/bspline.hpp"
#include "carleman/geometry.hpp"

namespace carleman {

struct BasisSpec {
  int degree = 3;                      // spline degree p >= 3
  int m = 3;                           // Sobolev order of the penalty norm, m <= degree
  std::array<int, kMaxDim> k_x{6, 6, 6};  // kept functions per spatial axis
  int k_t = 6;
};

using CoeffVector = Eigen::VectorXd;

// Tensor-product spline subspace over Q_T with homogeneous conditions built
// into the per-axis bases, plus grid evaluation tables (values and exact
// derivatives at the nodes) and the penalty Gram matrix machinery.
class TensorBasis {
 public:
  TensorBasis(const Geometry& geom, const Grid& qt_grid, const BasisSpec& spec);

  const BasisSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  int dim() const { return dim_; }
  int n_axes() const { return dim_ + 1; }
  int count(int axis) const { return axes_[static_cast<std::size_t>(axis)]->count(); }
  const AxisBasis& axis(int a) const { return *axes_[static_cast<std::size_t>(a)]; }
  std::int64_t size() const { return size_; }

  std::int64_t flatten(const int* mi) const;
  void unflatten(std::int64_t e, int* mi) const;

  // Evaluation tables on the grid: table(axis, order) is row-major
  // [node][function]; zero rows outside each function's support window.
  double table(int axis, int order, int node, int fn) const {
    return tables_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(order)]
                  [static_cast<std::size_t>(node) * count(axis) + static_cast<std::size_t>(fn)];
  }
  int max_order() const { return max_order_; }

  std::pair<int, int> window(int axis, int fn) const {
    return windows_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(fn)];
  }

  // Exact tensor-product evaluation at every grid node; linear in B.
  Field synth(const CoeffVector& B) const;
  // Spatial slice of the synthesis at time index it (nt = 1 field over omega).
  Field synth_time_slice(const CoeffVector& B, int it) const;
  // Single basis entry sampled over its (clamped) window, with stencil halo.
  struct LocalWindow {
    std::array<int, kMaxDim> lo{}, hi{};  // spatial node window, inclusive
    int t_lo = 0, t_hi = 0;
  };
  LocalWindow entry_window(std::int64_t e, int halo) const;

  // Sobolev Gram of order m: sum over derivative multi-orders of total order
  // <= m of Kronecker products of per-axis exact one-dimensional Grams.
  Eigen::MatrixXd sobolev_gram(int m) const;

  // Node Gram in the trapezoid L2(Q_T) product (Kronecker of per-axis node
  // Grams) and the matching moment vector of a field.
  Eigen::MatrixXd l2_node_gram() const;
  CoeffVector l2_moments(const Field& f) const;

  // Masked H1(P_d)-type Gram and moments (value, time and space derivatives,
  // trapezoid weights restricted to the mask).
  Eigen::MatrixXd h1_pd_gram(const PdMask& mask) const;
  CoeffVector h1_pd_moments(const Field& f, const PdMask& mask) const;

 private:
  BasisSpec spec_;
  Grid grid_;
  int dim_ = 1;
  int max_order_ = 2;
  std::int64_t size_ = 0;
  std::vector<std::unique_ptr<AxisBasis>> axes_;
  std::vector<std::vector<std::vector<double>>> tables_;  // [axis][order][node*count+fn]
  std::vector<std::vector<std::pair<int, int>>> windows_; // [axis][fn]
  std::array<std::int64_t, kMaxDim + 1> estride_{};

  int axis_nodes(int a) const { return a == dim_ ? grid_.nt() : grid_.nx(a); }
};

enum class ProjectionNorm { L2, H1Pd };

// Least-squares projection of a grid field onto the subspace: solves
// Gram B = moments; idempotent on fields already in the span.
CoeffVector project(const Field& f, const TensorBasis& basis,
                    ProjectionNorm norm = ProjectionNorm::L2, const PdMask* mask = nullptr);

CoeffVector convex_combination(const CoeffVector& B1, const CoeffVector& B2, double beta);

}  // namespace carleman
