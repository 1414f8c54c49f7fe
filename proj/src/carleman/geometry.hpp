#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "carleman/errors.hpp"

namespace carleman {

constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;

struct Box {
  int dim = 1;
  Point lo{}, hi{};

  double edge(int a) const { return hi[a] - lo[a]; }
  double min_edge() const;
  bool contains_closure(const Point& x) const;
};

struct WeightValue {
  double psi = 0.0;
  double phi_sq = 1.0;
  bool clamped = false;  // exponent hit the +-700 guard
};

// Space-time geometry: the box Omega, the exterior point x0, the weight
// psi(x,t) = |x-x0|^2 - eta t^2 with phi_lambda^2 = exp(2 lambda psi), and the
// derived constants
//   M     = max over closure(Omega) of |x-x0|^2,
//   N     = eta T^2 - M        (must be positive),
//   r_min = min over closure(Omega) of |x-x0|^2,
//   d     = level of the region P_d = {psi > d}, 0 < d < r_min.
// M and r_min are exact: per axis the extreme coordinate distance is attained
// at an endpoint (or at x0's own coordinate when it lies inside the interval).
class Geometry {
 public:
  static Geometry make(const Box& omega, const Point& x0, double eta, double T,
                       double d_level);

  int dim() const { return omega_.dim; }
  const Box& omega() const { return omega_; }
  const Point& x0() const { return x0_; }
  double eta() const { return eta_; }
  double T() const { return T_; }
  double d_level() const { return d_; }
  double M() const { return M_; }
  double N() const { return N_; }
  double r_min() const { return r_min_; }

  double dist_sq_x0(const double* x) const;
  double psi(const double* x, double t) const;
  WeightValue weight(const double* x, double t, double lambda) const;

 private:
  Box omega_;
  Point x0_{};
  double eta_ = 0, T_ = 0, d_ = 0;
  double M_ = 0, N_ = 0, r_min_ = 0;
};

// Uniform tensor grid over box x [0, T]; node (i0,..,i_{dim-1}, it) is stored
// at flat index (spatial row-major) * nt + it. nt == 1 encodes a purely
// spatial field.
class Grid {
 public:
  Grid() = default;
  Grid(const Box& box, const std::array<int, kMaxDim>& nx, double T, int nt);

  int dim() const { return box_.dim; }
  const Box& box() const { return box_; }
  int nx(int a) const { return nx_[a]; }
  int nt() const { return nt_; }
  double hx(int a) const { return hx_[a]; }
  double ht() const { return ht_; }
  double T() const { return T_; }

  std::int64_t spatial_nodes() const { return nsp_; }
  std::int64_t nodes() const { return nsp_ * nt_; }

  double coord(int a, int i) const { return box_.lo[a] + hx_[a] * i; }
  double time(int it) const { return ht_ * it; }

  std::int64_t spatial_stride(int a) const { return sstride_[a]; }

  void decode_spatial(std::int64_t s, int* idx) const;
  std::int64_t encode_spatial(const int* idx) const;
  void node_point(std::int64_t s, double* x) const;

  bool same_shape(const Grid& o) const;

  // Index sub-block of this grid covering `inner` (inner must be node-aligned).
  std::array<int, kMaxDim> offset_of(const Box& inner) const;

 private:
  Box box_;
  std::array<int, kMaxDim> nx_{1, 1, 1};
  int nt_ = 1;
  std::array<double, kMaxDim> hx_{0, 0, 0};
  double ht_ = 0, T_ = 0;
  std::int64_t nsp_ = 1;
  std::array<std::int64_t, kMaxDim> sstride_{0, 0, 0};
};

// Scalar samples on a Grid. Value semantics; shape checked on binary ops.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0)
      : grid_(g), v_(static_cast<std::size_t>(g.nodes()), fill) {}

  const Grid& grid() const { return grid_; }
  std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }

  double& operator[](std::int64_t i) { return v_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return v_[static_cast<std::size_t>(i)]; }
  double& at(std::int64_t s, int it) { return v_[static_cast<std::size_t>(s * grid_.nt() + it)]; }
  double at(std::int64_t s, int it) const { return v_[static_cast<std::size_t>(s * grid_.nt() + it)]; }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }

  double max_abs() const;
  bool all_finite() const;

  // t = 0 slice as a spatial field (nt = 1 grid over the same box).
  Field time_slice(int it) const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

struct PdMask {
  std::vector<std::uint8_t> mask;  // per node of the grid, 1 iff psi(node) > d
  std::int64_t count = 0;
  bool degenerate = false;  // DEGENERATE_PD warning: empty mask
};

PdMask pd_mask(const Geometry& geom, const Grid& grid);

// psi sampled on all grid nodes.
Field psi_field(const Geometry& geom, const Grid& grid);

}  // namespace carleman
