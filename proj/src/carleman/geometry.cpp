#include "carleman/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "carleman/parallel.hpp"

namespace carleman {

double Box::min_edge() const {
  double e = edge(0);
  for (int a = 1; a < dim; ++a) e = std::min(e, edge(a));
  return e;
}

bool Box::contains_closure(const Point& x) const {
  for (int a = 0; a < dim; ++a)
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  return true;
}

Geometry Geometry::make(const Box& omega, const Point& x0, double eta, double T,
                        double d_level) {
  require(omega.dim >= 1 && omega.dim <= kMaxDim, ErrorCode::CONFIG_ERROR, "dim must be 1, 2 or 3");
  for (int a = 0; a < omega.dim; ++a)
    require(omega.hi[a] > omega.lo[a], ErrorCode::CONFIG_ERROR, "degenerate box");
  require(eta > 0.0 && eta < 1.0, ErrorCode::CONFIG_ERROR, "eta must be in (0,1)");
  require(T > 0.0, ErrorCode::CONFIG_ERROR, "T must be positive");
  require(!omega.contains_closure(x0), ErrorCode::X0_INSIDE,
          "x0 must lie outside the closure of omega");

  double M = 0.0, r_min = 0.0;
  for (int a = 0; a < omega.dim; ++a) {
    double dlo = x0[a] - omega.lo[a], dhi = x0[a] - omega.hi[a];
    M += std::max(dlo * dlo, dhi * dhi);
    double near = 0.0;
    if (x0[a] < omega.lo[a]) near = omega.lo[a] - x0[a];
    else if (x0[a] > omega.hi[a]) near = x0[a] - omega.hi[a];
    r_min += near * near;
  }
  double N = eta * T * T - M;
  require(N > 0.0, ErrorCode::NONPOSITIVE_N, "eta*T^2 must exceed max |x-x0|^2 over omega");
  require(d_level > 0.0 && d_level < r_min, ErrorCode::BAD_D,
          "d_level must lie in (0, min |x-x0|^2)");

  Geometry g;
  g.omega_ = omega;
  g.x0_ = x0;
  g.eta_ = eta;
  g.T_ = T;
  g.d_ = d_level;
  g.M_ = M;
  g.N_ = N;
  g.r_min_ = r_min;
  return g;
}

double Geometry::dist_sq_x0(const double* x) const {
  double r = 0.0;
  for (int a = 0; a < omega_.dim; ++a) {
    double d = x[a] - x0_[a];
    r += d * d;
  }
  return r;
}

double Geometry::psi(const double* x, double t) const {
  return dist_sq_x0(x) - eta_ * t * t;
}

WeightValue Geometry::weight(const double* x, double t, double lambda) const {
  WeightValue w;
  w.psi = psi(x, t);
  double e = 2.0 * lambda * w.psi;
  if (e > 700.0) { e = 700.0; w.clamped = true; }
  if (e < -700.0) { e = -700.0; w.clamped = true; }
  w.phi_sq = std::exp(e);
  return w;
}

Grid::Grid(const Box& box, const std::array<int, kMaxDim>& nx, double T, int nt)
    : box_(box), nx_(nx), nt_(nt), T_(T) {
  require(nt_ >= 1, ErrorCode::CONFIG_ERROR, "nt must be >= 1");
  nsp_ = 1;
  for (int a = 0; a < box_.dim; ++a) {
    require(nx_[a] >= 2, ErrorCode::CONFIG_ERROR, "nx must be >= 2 per axis");
    hx_[a] = box_.edge(a) / (nx_[a] - 1);
    nsp_ *= nx_[a];
  }
  for (int a = box_.dim; a < kMaxDim; ++a) { nx_[a] = 1; hx_[a] = 0.0; }
  ht_ = nt_ > 1 ? T_ / (nt_ - 1) : 0.0;
  std::int64_t stride = 1;
  for (int a = box_.dim - 1; a >= 0; --a) {
    sstride_[a] = stride;
    stride *= nx_[a];
  }
}

void Grid::decode_spatial(std::int64_t s, int* idx) const {
  for (int a = 0; a < box_.dim; ++a) {
    idx[a] = static_cast<int>(s / sstride_[a]);
    s -= idx[a] * sstride_[a];
  }
}

std::int64_t Grid::encode_spatial(const int* idx) const {
  std::int64_t s = 0;
  for (int a = 0; a < box_.dim; ++a) s += idx[a] * sstride_[a];
  return s;
}

void Grid::node_point(std::int64_t s, double* x) const {
  int idx[kMaxDim];
  decode_spatial(s, idx);
  for (int a = 0; a < box_.dim; ++a) x[a] = coord(a, idx[a]);
}

bool Grid::same_shape(const Grid& o) const {
  if (box_.dim != o.box_.dim || nt_ != o.nt_) return false;
  for (int a = 0; a < box_.dim; ++a)
    if (nx_[a] != o.nx_[a]) return false;
  return true;
}

std::array<int, kMaxDim> Grid::offset_of(const Box& inner) const {
  std::array<int, kMaxDim> off{0, 0, 0};
  for (int a = 0; a < box_.dim; ++a) {
    double r = (inner.lo[a] - box_.lo[a]) / hx_[a];
    int i = static_cast<int>(std::llround(r));
    require(std::abs(r - i) < 1e-9, ErrorCode::CONFIG_ERROR, "inner box is not node-aligned");
    off[a] = i;
  }
  return off;
}

Field& Field::operator+=(const Field& o) {
  require(grid_.same_shape(o.grid_), ErrorCode::TRACE_SHAPE_MISMATCH, "field shape mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require(grid_.same_shape(o.grid_), ErrorCode::TRACE_SHAPE_MISMATCH, "field shape mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& x : v_) x *= a;
  return *this;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

bool Field::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

Field Field::time_slice(int it) const {
  std::array<int, kMaxDim> nx{grid_.nx(0), grid_.nx(1), grid_.nx(2)};
  Grid sg(grid_.box(), nx, 0.0, 1);
  Field out(sg);
  for (std::int64_t s = 0; s < grid_.spatial_nodes(); ++s) out[s] = at(s, it);
  return out;
}

PdMask pd_mask(const Geometry& geom, const Grid& grid) {
  PdMask out;
  out.mask.assign(static_cast<std::size_t>(grid.nodes()), 0);
  const int nt = grid.nt();
  std::vector<std::int64_t> counts(slab_count(grid.spatial_nodes()), 0);
  parallel_for_slabs(grid.spatial_nodes(), [&](std::int64_t b, std::int64_t e, int slab) {
    double x[kMaxDim];
    std::int64_t c = 0;
    for (std::int64_t s = b; s < e; ++s) {
      grid.node_point(s, x);
      for (int it = 0; it < nt; ++it) {
        if (geom.psi(x, grid.time(it)) > geom.d_level()) {
          out.mask[static_cast<std::size_t>(s * nt + it)] = 1;
          ++c;
        }
      }
    }
    counts[slab] = c;
  });
  for (auto c : counts) out.count += c;
  out.degenerate = (out.count == 0);
  return out;
}

Field psi_field(const Geometry& geom, const Grid& grid) {
  Field out(grid);
  const int nt = grid.nt();
  parallel_for_slabs(grid.spatial_nodes(), [&](std::int64_t b, std::int64_t e, int) {
    double x[kMaxDim];
    for (std::int64_t s = b; s < e; ++s) {
      grid.node_point(s, x);
      for (int it = 0; it < nt; ++it) out.at(s, it) = geom.psi(x, grid.time(it));
    }
  });
  return out;
}

}  // namespace carleman
