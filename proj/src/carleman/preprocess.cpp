#include "carleman/preprocess.hpp"

#include <cmath>

#include "carleman/parallel.hpp"
#include "carleman/util.hpp"

namespace carleman {

namespace {

// Sample with even reflection at both ends of [0, n).
inline double reflect_sample(const std::vector<double>& v, int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * (n - 1) - i;
  return v[static_cast<std::size_t>(i)];
}

std::vector<double> bump_kernel(int half_width) {
  std::vector<double> k(static_cast<std::size_t>(2 * half_width + 1));
  double sum = 0.0;
  for (int j = -half_width; j <= half_width; ++j) {
    double r = static_cast<double>(j) / (half_width + 1);
    double w = std::exp(-1.0 / (1.0 - r * r));
    k[static_cast<std::size_t>(j + half_width)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

void mollify_series(std::vector<double>& v, int half_width) {
  if (half_width < 1) return;
  const int n = static_cast<int>(v.size());
  std::vector<double> kernel = bump_kernel(half_width);
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -half_width; j <= half_width; ++j)
      acc += kernel[static_cast<std::size_t>(j + half_width)] * reflect_sample(v, i + j, n);
    out[static_cast<std::size_t>(i)] = acc;
  }
  v.swap(out);
}

void second_diff_series(const std::vector<double>& v, std::vector<double>& out, double ht) {
  const int n = static_cast<int>(v.size());
  const double h2 = ht * ht;
  out[0] = 2.0 * (v[1] - v[0]) / h2;  // even reflection at t = 0
  for (int i = 1; i < n - 1; ++i)
    out[static_cast<std::size_t>(i)] =
        (v[static_cast<std::size_t>(i - 1)] - 2.0 * v[static_cast<std::size_t>(i)] +
         v[static_cast<std::size_t>(i + 1)]) / h2;
  out[static_cast<std::size_t>(n - 1)] =
      (2.0 * v[static_cast<std::size_t>(n - 1)] - 5.0 * v[static_cast<std::size_t>(n - 2)] +
       4.0 * v[static_cast<std::size_t>(n - 3)] - v[static_cast<std::size_t>(n - 4)]) / h2;
}

}  // namespace

FaceTrace second_time_derivative(const FaceTrace& trace, double delta_hint, double T,
                                 double kappa0) {
  require(trace.nt >= 7, ErrorCode::TOO_FEW_SAMPLES, "need at least 7 time samples");
  require(delta_hint >= 0.0, ErrorCode::CONFIG_ERROR, "delta_hint must be nonnegative");
  const int nt = trace.nt;
  const double ht = T / (nt - 1);
  int half_width = 0;
  if (delta_hint > 0.0) {
    double kappa = kappa0 * std::cbrt(delta_hint) * T;
    half_width = static_cast<int>(std::floor(kappa / ht));
    half_width = std::min(half_width, (nt - 1) / 2);
  }

  FaceTrace out = trace;
  std::vector<double> series(static_cast<std::size_t>(nt)), der(static_cast<std::size_t>(nt));
  for (std::int64_t tau = 0; tau < trace.tangential_nodes; ++tau) {
    for (int it = 0; it < nt; ++it) series[static_cast<std::size_t>(it)] = trace.at(tau, it);
    mollify_series(series, half_width);
    second_diff_series(series, der, ht);
    der[1] = (3.0 * der[0] + der[2]) / 4.0;  // one-sided d/dt at t = 0 becomes exactly 0
    for (int it = 0; it < nt; ++it) out.at(tau, it) = der[static_cast<std::size_t>(it)];
  }
  return out;
}

SecondDerivativeRecord second_time_derivative(const BoundaryRecord& record, double delta_hint,
                                              double T, double kappa0) {
  SecondDerivativeRecord out;
  for (const auto& f : record.s) out.s_bar.push_back(second_time_derivative(f, delta_hint, T, kappa0));
  for (const auto& f : record.p) out.p_bar.push_back(second_time_derivative(f, delta_hint, T, kappa0));
  return out;
}

namespace {

struct FaceGeometry {
  int axis, side;
  std::int64_t q;   // spatial stride of the axis
  int n;            // nodes along the axis
  double h;
};

inline std::int64_t tangential_of(std::int64_t s, const FaceGeometry& fg) {
  return (s / (fg.q * fg.n)) * fg.q + s % fg.q;
}

inline double inward_distance(int ia, const FaceGeometry& fg) {
  return fg.side == 0 ? ia * fg.h : (fg.n - 1 - ia) * fg.h;
}

// Outward normal derivative of F at the face, one-sided second order.
double normal_derivative(const Field& F, const Grid& g, const FaceGeometry& fg, std::int64_t tau,
                         int it) {
  const int nt = g.nt();
  std::int64_t step = fg.q * nt;
  if (fg.side == 0) {
    std::int64_t base = ((tau / fg.q) * fg.n + 0) * fg.q * nt + (tau % fg.q) * nt + it;
    double d = (-3.0 * F[base] + 4.0 * F[base + step] - F[base + 2 * step]) / (2.0 * fg.h);
    return -d;
  }
  std::int64_t base = ((tau / fg.q) * fg.n + (fg.n - 1)) * fg.q * nt + (tau % fg.q) * nt + it;
  return (3.0 * F[base] - 4.0 * F[base - step] + F[base - 2 * step]) / (2.0 * fg.h);
}

double face_value(const Field& F, const Grid& g, const FaceGeometry& fg, std::int64_t tau, int it) {
  const int nt = g.nt();
  int ia = fg.side == 0 ? 0 : fg.n - 1;
  std::int64_t base = ((tau / fg.q) * fg.n + ia) * fg.q * nt + (tau % fg.q) * nt + it;
  return F[base];
}

const FaceTrace& face_of(const std::vector<FaceTrace>& traces, int axis, int side) {
  for (const auto& f : traces)
    if (f.axis == axis && f.side == side) return f;
  fail(ErrorCode::TRACE_SHAPE_MISMATCH, "missing boundary face trace");
}

}  // namespace

LiftingField build_lifting(const std::vector<FaceTrace>& s_bar,
                           const std::vector<FaceTrace>& p_bar, const Geometry& geom,
                           const Grid& qt_grid, double layer_width) {
  require(layer_width > 0.0 && layer_width <= 0.25 * geom.omega().min_edge(),
          ErrorCode::LAYER_TOO_WIDE, "layer_width must be at most a quarter of the smallest edge");
  const int dim = geom.dim();
  const int nt = qt_grid.nt();
  for (int a = 0; a < dim; ++a) {
    for (int side = 0; side < 2; ++side) {
      const FaceTrace& fs = face_of(s_bar, a, side);
      const FaceTrace& fp = face_of(p_bar, a, side);
      require(fs.nt == nt && fp.nt == nt &&
                  fs.tangential_nodes == face_node_count(qt_grid, a) &&
                  fp.tangential_nodes == fs.tangential_nodes,
              ErrorCode::TRACE_SHAPE_MISMATCH, "trace shape does not match the grid");
    }
  }

  LiftingField out;
  out.layer_width = layer_width;
  out.F = Field(qt_grid);
  Field& F = out.F;

  auto add_hermite_pass = [&](int a, bool with_slope) {
    FaceGeometry fg{a, 0, qt_grid.spatial_stride(a), qt_grid.nx(a), qt_grid.hx(a)};
    for (int side = 0; side < 2; ++side) {
      fg.side = side;
      const FaceTrace& fs = face_of(s_bar, a, side);
      const FaceTrace& fp = face_of(p_bar, a, side);
      // Residual traces of the current F on this face.
      std::vector<double> rs(fs.v.size()), rp(fs.v.size());
      for (std::int64_t tau = 0; tau < fs.tangential_nodes; ++tau) {
        for (int it = 0; it < nt; ++it) {
          rs[static_cast<std::size_t>(tau * nt + it)] =
              fs.at(tau, it) - face_value(F, qt_grid, fg, tau, it);
          rp[static_cast<std::size_t>(tau * nt + it)] =
              with_slope ? fp.at(tau, it) - normal_derivative(F, qt_grid, fg, tau, it) : 0.0;
        }
      }
      parallel_for_slabs(qt_grid.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
        int idx[kMaxDim];
        for (std::int64_t s = lo; s < hi; ++s) {
          qt_grid.decode_spatial(s, idx);
          double rho = inward_distance(idx[a], fg);
          if (rho >= layer_width) continue;
          double chi = cutoff_chi(rho, layer_width);
          std::int64_t tau = tangential_of(s, fg);
          for (int it = 0; it < nt; ++it) {
            std::size_t k = static_cast<std::size_t>(tau * nt + it);
            // Inward coordinate rho, outward normal derivative rp: the slope
            // term carries -rho so that -d/drho at the face returns rp.
            F.at(s, it) += chi * (rs[k] - rho * rp[k]);
          }
        }
      });
    }
  };

  for (int a = 0; a < dim; ++a) add_hermite_pass(a, /*with_slope=*/true);
  // Value-only sweep: the cutoff has zero slope at the face, so this restores
  // exact Dirichlet interpolation without disturbing the Neumann match.
  for (int a = 0; a < dim; ++a) add_hermite_pass(a, /*with_slope=*/false);

  // Zero discrete t-derivative at t = 0 by resampling the first time slab.
  // A no-op when the traces already satisfy the same discrete relation.
  if (nt >= 3) {
    for (std::int64_t s = 0; s < qt_grid.spatial_nodes(); ++s)
      F.at(s, 1) = (3.0 * F.at(s, 0) + F.at(s, 2)) / 4.0;
  }

  // Residual report.
  for (int a = 0; a < dim; ++a) {
    FaceGeometry fg{a, 0, qt_grid.spatial_stride(a), qt_grid.nx(a), qt_grid.hx(a)};
    for (int side = 0; side < 2; ++side) {
      fg.side = side;
      const FaceTrace& fs = face_of(s_bar, a, side);
      const FaceTrace& fp = face_of(p_bar, a, side);
      for (std::int64_t tau = 0; tau < fs.tangential_nodes; ++tau) {
        for (int it = 0; it < nt; ++it) {
          out.max_dirichlet_residual =
              std::max(out.max_dirichlet_residual,
                       std::abs(fs.at(tau, it) - face_value(F, qt_grid, fg, tau, it)));
          out.max_neumann_residual =
              std::max(out.max_neumann_residual,
                       std::abs(fp.at(tau, it) - normal_derivative(F, qt_grid, fg, tau, it)));
        }
      }
    }
  }
  return out;
}

}  // namespace carleman
