#include "carleman/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "carleman/quadrature.hpp"

namespace carleman {

SpatialBasis::SpatialBasis(const TensorBasis& basis, const Grid& omega_grid)
    : basis_(basis), grid_(omega_grid), dim_(basis.dim()) {
  require(grid_.nt() == 1, ErrorCode::CONFIG_ERROR, "spatial basis expects an nt = 1 grid");
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= basis_.count(a);
  std::int64_t stride = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    estride_[static_cast<std::size_t>(a)] = stride;
    stride *= basis_.count(a);
  }
}

std::int64_t SpatialBasis::flatten(const int* mi) const {
  std::int64_t e = 0;
  for (int a = 0; a < dim_; ++a) e += mi[a] * estride_[static_cast<std::size_t>(a)];
  return e;
}

void SpatialBasis::unflatten(std::int64_t e, int* mi) const {
  for (int a = 0; a < dim_; ++a) {
    mi[a] = static_cast<int>(e / estride_[static_cast<std::size_t>(a)]);
    e -= mi[a] * estride_[static_cast<std::size_t>(a)];
  }
}

Eigen::MatrixXd SpatialBasis::node_gram() const {
  TrapezoidWeights tw(grid_);
  std::vector<Eigen::MatrixXd> ng;
  for (int a = 0; a < dim_; ++a) {
    const int n = grid_.nx(a);
    const int k = basis_.count(a);
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(k, k);
    for (int node = 0; node < n; ++node)
      for (int i = 0; i < k; ++i) {
        double vi = basis_.table(a, 0, node, i);
        if (vi == 0.0) continue;
        for (int j = 0; j < k; ++j)
          N(i, j) += tw.wx[a][static_cast<std::size_t>(node)] * vi * basis_.table(a, 0, node, j);
      }
    ng.push_back(std::move(N));
  }
  const int K = static_cast<int>(size_);
  Eigen::MatrixXd G(K, K);
  int mi[kMaxDim], mj[kMaxDim];
  for (int e = 0; e < K; ++e) {
    unflatten(e, mi);
    for (int f = 0; f < K; ++f) {
      unflatten(f, mj);
      double term = 1.0;
      for (int a = 0; a < dim_; ++a) term *= ng[static_cast<std::size_t>(a)](mi[a], mj[a]);
      G(e, f) = term;
    }
  }
  return G;
}

Eigen::VectorXd SpatialBasis::moments(const Field& f) const {
  require(f.grid().same_shape(grid_), ErrorCode::TRACE_SHAPE_MISMATCH,
          "field not on the spatial grid");
  TrapezoidWeights tw(grid_);
  Eigen::VectorXd M = Eigen::VectorXd::Zero(size_);
  int mi[kMaxDim];
  for (std::int64_t e = 0; e < size_; ++e) {
    unflatten(e, mi);
    std::array<std::pair<int, int>, kMaxDim> w{{{0, 0}, {0, 0}, {0, 0}}};
    for (int a = 0; a < dim_; ++a) w[static_cast<std::size_t>(a)] = basis_.window(a, mi[a]);
    double acc = 0.0;
    for (int i0 = w[0].first; i0 <= w[0].second; ++i0) {
      double f0 = tw.wx[0][static_cast<std::size_t>(i0)] * basis_.table(0, 0, i0, mi[0]);
      if (f0 == 0.0) continue;
      for (int i1 = w[1].first; i1 <= w[1].second; ++i1) {
        double f1 = dim_ > 1 ? f0 * tw.wx[1][static_cast<std::size_t>(i1)] * basis_.table(1, 0, i1, mi[1]) : f0;
        for (int i2 = w[2].first; i2 <= w[2].second; ++i2) {
          double f2 = dim_ > 2 ? f1 * tw.wx[2][static_cast<std::size_t>(i2)] * basis_.table(2, 0, i2, mi[2]) : f1;
          std::int64_t s = i0 * grid_.spatial_stride(0);
          if (dim_ > 1) s += i1 * grid_.spatial_stride(1);
          if (dim_ > 2) s += i2 * grid_.spatial_stride(2);
          acc += f2 * f[s];
        }
      }
    }
    M[e] = acc;
  }
  return M;
}

FemRecovery assemble_and_solve(const Field& w0_plus_F0, const Field& lap_f,
                               const SpatialBasis& basis) {
  FemRecovery rec;
  Eigen::MatrixXd G = basis.node_gram();
  Eigen::VectorXd mw = basis.moments(w0_plus_F0);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  require(llt.info() == Eigen::Success, ErrorCode::SINGULAR_GRAM,
          "spatial Gram matrix is not positive definite");
  rec.w_coeffs = llt.solve(mw);
  rec.load = basis.moments(lap_f);
  // Row sums of Q_{j,i} = w_i [phi_i, phi_j] collapse to [w(.,0), phi_j].
  rec.lumped = G * rec.w_coeffs;
  double scale = rec.lumped.cwiseAbs().maxCoeff();
  rec.c_tilde = Eigen::VectorXd::Zero(basis.size());
  for (std::int64_t j = 0; j < basis.size(); ++j) {
    require(std::abs(rec.lumped[j]) > 1e-14 * std::max(scale, 1e-300),
            ErrorCode::ZERO_LUMPED_ROW,
            "degenerate lumped mass row at basis function " + std::to_string(j));
    rec.c_tilde[j] = rec.load[j] / rec.lumped[j];
  }
  return rec;
}

Eigen::VectorXd solve_unlumped(const FemRecovery& rec, const SpatialBasis& basis) {
  Eigen::MatrixXd Q = basis.node_gram() * rec.w_coeffs.asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Q);
  Eigen::VectorXd c = lu.solve(rec.load);
  require((Q * c - rec.load).norm() <= 1e-8 * std::max(1.0, rec.load.norm()),
          ErrorCode::SINGULAR_GRAM, "unlumped mass matrix is numerically singular");
  return c;
}

namespace {

// Per-axis range of cells (knot spans) a kept basis function overlaps.
std::pair<int, int> cell_range(const AxisBasis& ab, int i) {
  const Spline1D& sp = ab.spline();
  auto [lo, hi] = ab.support(i);
  int first = 0, last = sp.n_spans() - 1;
  for (int s = 0; s < sp.n_spans(); ++s) {
    if (sp.span_hi(s) > lo + 1e-14) { first = s; break; }
  }
  for (int s = sp.n_spans() - 1; s >= 0; --s) {
    if (sp.span_lo(s) < hi - 1e-14) { last = s; break; }
  }
  return {first, last};
}

}  // namespace

PiecewiseConstantCoefficient cell_average(const Eigen::VectorXd& c_tilde,
                                          const SpatialBasis& basis, double b) {
  const int dim = basis.dim();
  PiecewiseConstantCoefficient out;
  std::int64_t n_cells = 1;
  for (int a = 0; a < dim; ++a) {
    out.cells[static_cast<std::size_t>(a)] = basis.parent().axis(a).spline().n_spans();
    n_cells *= out.cells[static_cast<std::size_t>(a)];
  }
  out.values.assign(static_cast<std::size_t>(n_cells), 0.0);
  out.centers.assign(static_cast<std::size_t>(n_cells), Point{});

  // Precompute, per axis, which kept functions touch each cell's Moore
  // neighborhood.
  std::array<std::vector<std::pair<int, int>>, kMaxDim> fn_range;
  for (int a = 0; a < dim; ++a) {
    const AxisBasis& ab = basis.parent().axis(a);
    const int nc = out.cells[static_cast<std::size_t>(a)];
    fn_range[static_cast<std::size_t>(a)].assign(static_cast<std::size_t>(nc), {1 << 30, -1});
    for (int i = 0; i < ab.count(); ++i) {
      auto [clo, chi] = cell_range(ab, i);
      for (int cell = std::max(0, clo - 1); cell <= std::min(nc - 1, chi + 1); ++cell) {
        auto& r = fn_range[static_cast<std::size_t>(a)][static_cast<std::size_t>(cell)];
        r.first = std::min(r.first, i);
        r.second = std::max(r.second, i);
      }
    }
  }

  int cj[kMaxDim] = {0, 0, 0};
  for (std::int64_t cell = 0; cell < n_cells; ++cell) {
    std::int64_t rem = cell;
    for (int a = 0; a < dim; ++a) {
      std::int64_t block = 1;
      for (int bb = a + 1; bb < dim; ++bb) block *= out.cells[static_cast<std::size_t>(bb)];
      cj[a] = static_cast<int>(rem / block);
      rem %= block;
    }
    Point center{};
    for (int a = 0; a < dim; ++a) {
      const Spline1D& sp = basis.parent().axis(a).spline();
      center[static_cast<std::size_t>(a)] = 0.5 * (sp.span_lo(cj[a]) + sp.span_hi(cj[a]));
    }
    out.centers[static_cast<std::size_t>(cell)] = center;

    std::array<std::pair<int, int>, kMaxDim> r{{{0, 0}, {0, 0}, {0, 0}}};
    for (int a = 0; a < dim; ++a)
      r[static_cast<std::size_t>(a)] = fn_range[static_cast<std::size_t>(a)][static_cast<std::size_t>(cj[a])];

    double sum = 0.0;
    std::int64_t cnt = 0;
    int mi[kMaxDim] = {0, 0, 0};
    for (mi[0] = r[0].first; mi[0] <= r[0].second; ++mi[0])
      for (mi[1] = dim > 1 ? r[1].first : 0; mi[1] <= (dim > 1 ? r[1].second : 0); ++mi[1])
        for (mi[2] = dim > 2 ? r[2].first : 0; mi[2] <= (dim > 2 ? r[2].second : 0); ++mi[2]) {
          sum += c_tilde[basis.flatten(mi)];
          ++cnt;
        }
    double v = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
    double clamped = std::clamp(v, 1.0, 1.0 + b);
    if (clamped != v) ++out.clamped_cells;
    out.values[static_cast<std::size_t>(cell)] = clamped;
  }
  return out;
}

double pcc_value(const PiecewiseConstantCoefficient& pcc, const SpatialBasis& basis,
                 const double* x) {
  const int dim = basis.dim();
  std::int64_t cell = 0;
  for (int a = 0; a < dim; ++a) {
    const Spline1D& sp = basis.parent().axis(a).spline();
    int ca = 0;
    for (int s = 0; s < sp.n_spans(); ++s)
      if (x[a] >= sp.span_lo(s) - 1e-14) ca = s;
    std::int64_t block = 1;
    for (int bb = a + 1; bb < dim; ++bb) block *= pcc.cells[static_cast<std::size_t>(bb)];
    cell += ca * block;
  }
  return pcc.values[static_cast<std::size_t>(cell)];
}

}  // namespace carleman
