#include "carleman/basis.hpp"

#include <algorithm>
#include <cmath>

#include "carleman/parallel.hpp"
#include "carleman/quadrature.hpp"
#include "carleman/stencil.hpp"

namespace carleman {

TensorBasis::TensorBasis(const Geometry& geom, const Grid& qt_grid, const BasisSpec& spec)
    : spec_(spec), grid_(qt_grid), dim_(geom.dim()) {
  require(spec.degree >= 3, ErrorCode::CONFIG_ERROR, "basis degree must be >= 3");
  require(spec.m >= 1 && spec.m <= spec.degree, ErrorCode::CONFIG_ERROR,
          "penalty order m must satisfy 1 <= m <= degree");
  max_order_ = std::max(spec.m, 2);

  for (int a = 0; a < dim_; ++a)
    axes_.push_back(std::make_unique<AxisBasis>(geom.omega().lo[a], geom.omega().hi[a],
                                                spec.degree, spec.k_x[a],
                                                AxisBasis::Kind::SpatialZeroPair));
  axes_.push_back(std::make_unique<AxisBasis>(0.0, geom.T(), spec.degree, spec.k_t,
                                              AxisBasis::Kind::TimeFlatStart));

  size_ = 1;
  for (int a = 0; a <= dim_; ++a) size_ *= count(a);
  std::int64_t stride = 1;
  for (int a = dim_; a >= 0; --a) {
    estride_[static_cast<std::size_t>(a)] = stride;
    stride *= count(a);
  }

  tables_.resize(static_cast<std::size_t>(dim_) + 1);
  windows_.resize(static_cast<std::size_t>(dim_) + 1);
  for (int a = 0; a <= dim_; ++a) {
    const AxisBasis& ab = axis(a);
    const int n = axis_nodes(a);
    const double lo = a == dim_ ? 0.0 : grid_.box().lo[a];
    const double h = a == dim_ ? grid_.ht() : grid_.hx(a);
    tables_[static_cast<std::size_t>(a)].assign(
        static_cast<std::size_t>(max_order_) + 1,
        std::vector<double>(static_cast<std::size_t>(n) * ab.count(), 0.0));
    for (int r = 0; r <= max_order_; ++r)
      for (int node = 0; node < n; ++node) {
        double x = lo + h * node;
        for (int i = 0; i < ab.count(); ++i)
          tables_[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)]
                 [static_cast<std::size_t>(node) * ab.count() + static_cast<std::size_t>(i)] =
              ab.eval(i, x, r);
      }
    windows_[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(ab.count()));
    for (int i = 0; i < ab.count(); ++i)
      windows_[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] =
          ab.node_window(i, n, lo, h);
  }
}

std::int64_t TensorBasis::flatten(const int* mi) const {
  std::int64_t e = 0;
  for (int a = 0; a <= dim_; ++a) e += mi[a] * estride_[static_cast<std::size_t>(a)];
  return e;
}

void TensorBasis::unflatten(std::int64_t e, int* mi) const {
  for (int a = 0; a <= dim_; ++a) {
    mi[a] = static_cast<int>(e / estride_[static_cast<std::size_t>(a)]);
    e -= mi[a] * estride_[static_cast<std::size_t>(a)];
  }
}

Field TensorBasis::synth(const CoeffVector& B) const {
  require(B.size() == size_, ErrorCode::CONFIG_ERROR, "coefficient count mismatch");
  Field out(grid_);
  const int nt = grid_.nt();
  int mi[kMaxDim + 1];
  for (std::int64_t e = 0; e < size_; ++e) {
    const double be = B[e];
    if (be == 0.0) continue;
    unflatten(e, mi);
    auto [tlo, thi] = window(dim_, mi[dim_]);
    const double* tabt = tables_[static_cast<std::size_t>(dim_)][0].data();
    const int kt = count(dim_);
    std::array<std::pair<int, int>, kMaxDim> w{{{0, 0}, {0, 0}, {0, 0}}};
    for (int a = 0; a < dim_; ++a) w[static_cast<std::size_t>(a)] = window(a, mi[a]);
    for (int i0 = w[0].first; i0 <= w[0].second; ++i0) {
      double f0 = be * table(0, 0, i0, mi[0]);
      if (f0 == 0.0) continue;
      for (int i1 = w[1].first; i1 <= w[1].second; ++i1) {
        double f1 = dim_ > 1 ? f0 * table(1, 0, i1, mi[1]) : f0;
        if (f1 == 0.0) continue;
        for (int i2 = w[2].first; i2 <= w[2].second; ++i2) {
          double f2 = dim_ > 2 ? f1 * table(2, 0, i2, mi[2]) : f1;
          std::int64_t s = i0 * grid_.spatial_stride(0);
          if (dim_ > 1) s += i1 * grid_.spatial_stride(1);
          if (dim_ > 2) s += i2 * grid_.spatial_stride(2);
          double* row = out.values().data() + s * nt;
          const double* trow = tabt;
          for (int it = tlo; it <= thi; ++it)
            row[it] += f2 * trow[static_cast<std::size_t>(it) * kt + static_cast<std::size_t>(mi[dim_])];
        }
      }
    }
  }
  return out;
}

Field TensorBasis::synth_time_slice(const CoeffVector& B, int it) const {
  require(B.size() == size_, ErrorCode::CONFIG_ERROR, "coefficient count mismatch");
  std::array<int, kMaxDim> nx{grid_.nx(0), grid_.nx(1), grid_.nx(2)};
  Grid sg(grid_.box(), nx, 0.0, 1);
  Field out(sg);
  int mi[kMaxDim + 1];
  for (std::int64_t e = 0; e < size_; ++e) {
    unflatten(e, mi);
    double ft = B[e] * table(dim_, 0, it, mi[dim_]);
    if (ft == 0.0) continue;
    std::array<std::pair<int, int>, kMaxDim> w{{{0, 0}, {0, 0}, {0, 0}}};
    for (int a = 0; a < dim_; ++a) w[static_cast<std::size_t>(a)] = window(a, mi[a]);
    for (int i0 = w[0].first; i0 <= w[0].second; ++i0) {
      double f0 = ft * table(0, 0, i0, mi[0]);
      if (f0 == 0.0) continue;
      for (int i1 = w[1].first; i1 <= w[1].second; ++i1) {
        double f1 = dim_ > 1 ? f0 * table(1, 0, i1, mi[1]) : f0;
        for (int i2 = w[2].first; i2 <= w[2].second; ++i2) {
          double f2 = dim_ > 2 ? f1 * table(2, 0, i2, mi[2]) : f1;
          std::int64_t s = i0 * grid_.spatial_stride(0);
          if (dim_ > 1) s += i1 * grid_.spatial_stride(1);
          if (dim_ > 2) s += i2 * grid_.spatial_stride(2);
          out[s] += f2;
        }
      }
    }
  }
  return out;
}

TensorBasis::LocalWindow TensorBasis::entry_window(std::int64_t e, int halo) const {
  int mi[kMaxDim + 1];
  unflatten(e, mi);
  LocalWindow lw;
  for (int a = 0; a < dim_; ++a) {
    auto [lo, hi] = window(a, mi[a]);
    lw.lo[static_cast<std::size_t>(a)] = std::max(0, lo - halo);
    lw.hi[static_cast<std::size_t>(a)] = std::min(grid_.nx(a) - 1, hi + halo);
  }
  auto [tlo, thi] = window(dim_, mi[dim_]);
  lw.t_lo = std::max(0, tlo - halo);
  lw.t_hi = std::min(grid_.nt() - 1, thi + halo);
  return lw;
}

Eigen::MatrixXd TensorBasis::sobolev_gram(int m) const {
  const int K = static_cast<int>(size_);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, K);
  // Cache per-axis one-dimensional Grams for the orders in use.
  std::vector<std::vector<Eigen::MatrixXd>> g1(static_cast<std::size_t>(dim_) + 1);
  for (int a = 0; a <= dim_; ++a)
    for (int r = 0; r <= m; ++r) g1[static_cast<std::size_t>(a)].push_back(axis(a).gram(r));

  std::vector<std::array<int, kMaxDim + 1>> orders;
  std::array<int, kMaxDim + 1> r{};
  // All derivative multi-orders with |r| <= m over dim_+1 axes.
  const int n_axes = dim_ + 1;
  std::function<void(int, int)> rec = [&](int a, int left) {
    if (a == n_axes) { orders.push_back(r); return; }
    for (int v = 0; v <= left; ++v) {
      r[static_cast<std::size_t>(a)] = v;
      rec(a + 1, left - v);
    }
  };
  rec(0, m);

  std::vector<int> mi(static_cast<std::size_t>(n_axes)), mj(static_cast<std::size_t>(n_axes));
  for (int e = 0; e < K; ++e) {
    unflatten(e, mi.data());
    for (int f = e; f < K; ++f) {
      unflatten(f, mj.data());
      double acc = 0.0;
      for (const auto& ord : orders) {
        double term = 1.0;
        for (int a = 0; a < n_axes; ++a)
          term *= g1[static_cast<std::size_t>(a)][static_cast<std::size_t>(
              ord[static_cast<std::size_t>(a)])](mi[static_cast<std::size_t>(a)],
                                                 mj[static_cast<std::size_t>(a)]);
        acc += term;
      }
      G(e, f) = acc;
      G(f, e) = acc;
    }
  }
  return G;
}

Eigen::MatrixXd TensorBasis::l2_node_gram() const {
  TrapezoidWeights tw(grid_);
  std::vector<Eigen::MatrixXd> ng;
  for (int a = 0; a <= dim_; ++a) {
    const int n = axis_nodes(a);
    const int k = count(a);
    const std::vector<double>& w = a == dim_ ? tw.wt : tw.wx[a];
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(k, k);
    for (int node = 0; node < n; ++node)
      for (int i = 0; i < k; ++i) {
        double vi = table(a, 0, node, i);
        if (vi == 0.0) continue;
        for (int j = 0; j < k; ++j) N(i, j) += w[static_cast<std::size_t>(node)] * vi * table(a, 0, node, j);
      }
    ng.push_back(std::move(N));
  }
  const int K = static_cast<int>(size_);
  Eigen::MatrixXd G(K, K);
  std::vector<int> mi(static_cast<std::size_t>(dim_) + 1), mj(static_cast<std::size_t>(dim_) + 1);
  for (int e = 0; e < K; ++e) {
    unflatten(e, mi.data());
    for (int f = 0; f < K; ++f) {
      unflatten(f, mj.data());
      double term = 1.0;
      for (int a = 0; a <= dim_; ++a)
        term *= ng[static_cast<std::size_t>(a)](mi[static_cast<std::size_t>(a)],
                                                mj[static_cast<std::size_t>(a)]);
      G(e, f) = term;
    }
  }
  return G;
}

CoeffVector TensorBasis::l2_moments(const Field& f) const {
  require(f.grid().same_shape(grid_), ErrorCode::TRACE_SHAPE_MISMATCH,
          "field not on the basis grid");
  TrapezoidWeights tw(grid_);
  CoeffVector M = CoeffVector::Zero(size_);
  const int nt = grid_.nt();
  int mi[kMaxDim + 1];
  for (std::int64_t e = 0; e < size_; ++e) {
    unflatten(e, mi);
    auto [tlo, thi] = window(dim_, mi[dim_]);
    std::array<std::pair<int, int>, kMaxDim> w{{{0, 0}, {0, 0}, {0, 0}}};
    for (int a = 0; a < dim_; ++a) w[static_cast<std::size_t>(a)] = window(a, mi[a]);
    double acc = 0.0;
    for (int i0 = w[0].first; i0 <= w[0].second; ++i0) {
      double f0 = tw.wx[0][static_cast<std::size_t>(i0)] * table(0, 0, i0, mi[0]);
      if (f0 == 0.0) continue;
      for (int i1 = w[1].first; i1 <= w[1].second; ++i1) {
        double f1 = dim_ > 1 ? f0 * tw.wx[1][static_cast<std::size_t>(i1)] * table(1, 0, i1, mi[1]) : f0;
        for (int i2 = w[2].first; i2 <= w[2].second; ++i2) {
          double f2 = dim_ > 2 ? f1 * tw.wx[2][static_cast<std::size_t>(i2)] * table(2, 0, i2, mi[2]) : f1;
          std::int64_t s = i0 * grid_.spatial_stride(0);
          if (dim_ > 1) s += i1 * grid_.spatial_stride(1);
          if (dim_ > 2) s += i2 * grid_.spatial_stride(2);
          const double* row = f.values().data() + s * nt;
          double ct = 0.0;
          for (int it = tlo; it <= thi; ++it)
            ct += tw.wt[static_cast<std::size_t>(it)] * table(dim_, 0, it, mi[dim_]) * row[it];
          acc += f2 * ct;
        }
      }
    }
    M[e] = acc;
  }
  return M;
}

namespace {

// Per-node interval of active (possibly nonzero) functions along an axis.
struct ActiveRanges {
  std::vector<int> first, last;
};

ActiveRanges active_ranges(const TensorBasis& basis, int axis, int n) {
  ActiveRanges ar;
  ar.first.assign(static_cast<std::size_t>(n), 1 << 30);
  ar.last.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < basis.count(axis); ++i) {
    auto [lo, hi] = basis.window(axis, i);
    for (int node = lo; node <= hi; ++node) {
      ar.first[static_cast<std::size_t>(node)] = std::min(ar.first[static_cast<std::size_t>(node)], i);
      ar.last[static_cast<std::size_t>(node)] = std::max(ar.last[static_cast<std::size_t>(node)], i);
    }
  }
  return ar;
}

}  // namespace

Eigen::MatrixXd TensorBasis::h1_pd_gram(const PdMask& mask) const {
  const int K = static_cast<int>(size_);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, K);
  TrapezoidWeights tw(grid_);
  const int nt = grid_.nt();
  const int n_patterns = dim_ + 2;  // value, d/dt, d/dx_a

  std::vector<ActiveRanges> ar;
  for (int a = 0; a <= dim_; ++a) ar.push_back(active_ranges(*this, a, axis_nodes(a)));

  std::vector<std::int64_t> act_e;
  std::vector<std::vector<double>> act_v(static_cast<std::size_t>(n_patterns));

  int idx[kMaxDim];
  for (std::int64_t s = 0; s < grid_.spatial_nodes(); ++s) {
    grid_.decode_spatial(s, idx);
    double wsp = tw.spatial(grid_, s);
    for (int it = 0; it < nt; ++it) {
      if (!mask.mask[static_cast<std::size_t>(s * nt + it)]) continue;
      double wq = wsp * tw.wt[static_cast<std::size_t>(it)];
      act_e.clear();
      for (auto& v : act_v) v.clear();
      int flo[kMaxDim + 1], fhi[kMaxDim + 1];
      for (int a = 0; a < dim_; ++a) {
        flo[a] = ar[static_cast<std::size_t>(a)].first[static_cast<std::size_t>(idx[a])];
        fhi[a] = ar[static_cast<std::size_t>(a)].last[static_cast<std::size_t>(idx[a])];
      }
      flo[dim_] = ar[static_cast<std::size_t>(dim_)].first[static_cast<std::size_t>(it)];
      fhi[dim_] = ar[static_cast<std::size_t>(dim_)].last[static_cast<std::size_t>(it)];
      if (fhi[dim_] < flo[dim_]) continue;
      bool empty = false;
      for (int a = 0; a < dim_; ++a)
        if (fhi[a] < flo[a]) empty = true;
      if (empty) continue;

      int mi[kMaxDim + 1];
      for (mi[0] = flo[0]; mi[0] <= fhi[0]; ++mi[0])
        for (mi[1] = dim_ > 1 ? flo[1] : 0; mi[1] <= (dim_ > 1 ? fhi[1] : 0); ++mi[1])
          for (mi[2] = dim_ > 2 ? flo[2] : 0; mi[2] <= (dim_ > 2 ? fhi[2] : 0); ++mi[2])
            for (mi[dim_] = flo[dim_]; mi[dim_] <= fhi[dim_]; ++mi[dim_]) {
              double v[kMaxDim + 1], d[kMaxDim + 1];
              for (int a = 0; a < dim_; ++a) {
                v[a] = table(a, 0, idx[a], mi[a]);
                d[a] = table(a, 1, idx[a], mi[a]);
              }
              v[dim_] = table(dim_, 0, it, mi[dim_]);
              d[dim_] = table(dim_, 1, it, mi[dim_]);
              double val = 1.0;
              for (int a = 0; a <= dim_; ++a) val *= v[a];
              act_e.push_back(flatten(mi));
              act_v[0].push_back(val);
              double dtv = d[dim_];
              for (int a = 0; a < dim_; ++a) dtv *= v[a];
              act_v[1].push_back(dtv);
              for (int a = 0; a < dim_; ++a) {
                double dxv = d[a] * v[dim_];
                for (int b = 0; b < dim_; ++b)
                  if (b != a) dxv *= v[b];
                act_v[static_cast<std::size_t>(2 + a)].push_back(dxv);
              }
            }

      const std::size_t na = act_e.size();
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
          double acc = 0.0;
          for (int pat = 0; pat < n_patterns; ++pat)
            acc += act_v[static_cast<std::size_t>(pat)][i] * act_v[static_cast<std::size_t>(pat)][j];
          G(act_e[i], act_e[j]) += wq * acc;
        }
    }
  }
  return G;
}

CoeffVector TensorBasis::h1_pd_moments(const Field& f, const PdMask& mask) const {
  require(f.grid().same_shape(grid_), ErrorCode::TRACE_SHAPE_MISMATCH,
          "field not on the basis grid");
  CoeffVector M = CoeffVector::Zero(size_);
  TrapezoidWeights tw(grid_);
  Field ft = dt(f);
  std::vector<Field> gx = grad(f);
  const int nt = grid_.nt();
  const int n_patterns = dim_ + 2;

  std::vector<ActiveRanges> ar;
  for (int a = 0; a <= dim_; ++a) ar.push_back(active_ranges(*this, a, axis_nodes(a)));

  int idx[kMaxDim];
  for (std::int64_t s = 0; s < grid_.spatial_nodes(); ++s) {
    grid_.decode_spatial(s, idx);
    double wsp = tw.spatial(grid_, s);
    for (int it = 0; it < nt; ++it) {
      std::int64_t node = s * nt + it;
      if (!mask.mask[static_cast<std::size_t>(node)]) continue;
      double wq = wsp * tw.wt[static_cast<std::size_t>(it)];
      double fval[kMaxDim + 2];
      fval[0] = f[node];
      fval[1] = ft[node];
      for (int a = 0; a < dim_; ++a) fval[2 + a] = gx[static_cast<std::size_t>(a)][node];

      int flo[kMaxDim + 1], fhi[kMaxDim + 1];
      for (int a = 0; a < dim_; ++a) {
        flo[a] = ar[static_cast<std::size_t>(a)].first[static_cast<std::size_t>(idx[a])];
        fhi[a] = ar[static_cast<std::size_t>(a)].last[static_cast<std::size_t>(idx[a])];
      }
      flo[dim_] = ar[static_cast<std::size_t>(dim_)].first[static_cast<std::size_t>(it)];
      fhi[dim_] = ar[static_cast<std::size_t>(dim_)].last[static_cast<std::size_t>(it)];

      int mi[kMaxDim + 1];
      for (mi[0] = flo[0]; mi[0] <= fhi[0]; ++mi[0])
        for (mi[1] = dim_ > 1 ? flo[1] : 0; mi[1] <= (dim_ > 1 ? fhi[1] : 0); ++mi[1])
          for (mi[2] = dim_ > 2 ? flo[2] : 0; mi[2] <= (dim_ > 2 ? fhi[2] : 0); ++mi[2])
            for (mi[dim_] = flo[dim_]; mi[dim_] <= fhi[dim_]; ++mi[dim_]) {
              double v[kMaxDim + 1], d[kMaxDim + 1];
              for (int a = 0; a < dim_; ++a) {
                v[a] = table(a, 0, idx[a], mi[a]);
                d[a] = table(a, 1, idx[a], mi[a]);
              }
              v[dim_] = table(dim_, 0, it, mi[dim_]);
              d[dim_] = table(dim_, 1, it, mi[dim_]);
              double val = 1.0;
              for (int a = 0; a <= dim_; ++a) val *= v[a];
              double acc = fval[0] * val;
              double dtv = d[dim_];
              for (int a = 0; a < dim_; ++a) dtv *= v[a];
              acc += fval[1] * dtv;
              for (int a = 0; a < dim_; ++a) {
                double dxv = d[a] * v[dim_];
                for (int b = 0; b < dim_; ++b)
                  if (b != a) dxv *= v[b];
                acc += fval[2 + a] * dxv;
              }
              M[flatten(mi)] += wq * acc;
            }
      (void)n_patterns;
    }
  }
  return M;
}

CoeffVector project(const Field& f, const TensorBasis& basis, ProjectionNorm norm,
                    const PdMask* mask) {
  Eigen::MatrixXd G;
  CoeffVector M;
  if (norm == ProjectionNorm::L2) {
    G = basis.l2_node_gram();
    M = basis.l2_moments(f);
  } else {
    require(mask != nullptr, ErrorCode::CONFIG_ERROR, "H1(P_d) projection needs a mask");
    G = basis.h1_pd_gram(*mask);
    M = basis.h1_pd_moments(f, *mask);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  require(llt.info() == Eigen::Success, ErrorCode::SINGULAR_GRAM,
          "basis Gram matrix is not positive definite");
  return llt.solve(M);
}

CoeffVector convex_combination(const CoeffVector& B1, const CoeffVector& B2, double beta) {
  require(beta >= 0.0 && beta <= 1.0, ErrorCode::CONFIG_ERROR, "beta must lie in [0,1]");
  return beta * B1 + (1.0 - beta) * B2;
}

}  // namespace carleman
