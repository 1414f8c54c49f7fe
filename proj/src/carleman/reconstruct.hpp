#pragma once

#include "carleman/basis.hpp"

namespace carleman {

// Spatial tensor sub-basis of a TensorBasis (the phi_i of the recovery
// scheme) with trapezoid-quadrature Gram/moment assembly on the Omega grid.
class SpatialBasis {
 public:
  SpatialBasis(const TensorBasis& basis, const Grid& omega_grid);

  int dim() const { return dim_; }
  std::int64_t size() const { return size_; }
  int count(int axis) const { return basis_.count(axis); }
  const Grid& grid() const { return grid_; }
  const TensorBasis& parent() const { return basis_; }

  std::int64_t flatten(const int* mi) const;
  void unflatten(std::int64_t e, int* mi) const;

  Eigen::MatrixXd node_gram() const;                 // [phi_i, phi_j] by trapezoid
  Eigen::VectorXd moments(const Field& f) const;     // [f, phi_j] by trapezoid

 private:
  const TensorBasis& basis_;
  Grid grid_;
  int dim_;
  std::int64_t size_;
  std::array<std::int64_t, kMaxDim> estride_{};
};

struct FemRecovery {
  Eigen::VectorXd c_tilde;    // (Q^L)^{-1} Z, lumped rows
  Eigen::VectorXd w_coeffs;   // expansion of w(x,0) in the spatial basis
  Eigen::VectorXd load;       // Z_j = [lap f, phi_j]
  Eigen::VectorXd lumped;     // Q^L diagonal
};

// Mass assembly [w_i phi_i, phi_j] from the projected t = 0 slice, row-sum
// lumping, and the explicit diagonal solve.
FemRecovery assemble_and_solve(const Field& w0_plus_F0, const Field& lap_f,
                               const SpatialBasis& basis);

// Dense (unlumped) solve of Q c = Z for cross-checking the lumping error.
Eigen::VectorXd solve_unlumped(const FemRecovery& rec, const SpatialBasis& basis);

struct PiecewiseConstantCoefficient {
  std::array<int, kMaxDim> cells{1, 1, 1};
  std::vector<double> values;   // row-major over cell multi-index
  std::vector<Point> centers;
  std::int64_t clamped_cells = 0;
};

// Averages c_tilde over the basis functions supported on the Moore
// neighborhood of each tensor cell (the knot spans), then clamps to [1,1+b].
PiecewiseConstantCoefficient cell_average(const Eigen::VectorXd& c_tilde,
                                          const SpatialBasis& basis, double b);

// Piecewise-constant evaluation at a point (for error scans).
double pcc_value(const PiecewiseConstantCoefficient& pcc, const SpatialBasis& basis,
                 const double* x);

}  // namespace carleman
