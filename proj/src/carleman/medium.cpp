#include "carleman/medium.hpp"

#include <cmath>
#include <sstream>

#include "carleman/parallel.hpp"
#include "carleman/stencil.hpp"
#include "carleman/util.hpp"

namespace carleman {

namespace {

Point ray_direction(const Geometry& geom) {
  Point e{};
  double norm = 0.0;
  for (int a = 0; a < geom.dim(); ++a) {
    double c = 0.5 * (geom.omega().lo[a] + geom.omega().hi[a]);
    e[a] = c - geom.x0()[a];
    norm += e[a] * e[a];
  }
  norm = std::sqrt(norm);
  for (int a = 0; a < geom.dim(); ++a) e[a] /= norm;
  return e;
}

class ConstantMedium final : public MediumProfile {
 public:
  explicit ConstantMedium(double v) : v_(v) {}
  double value(const double*) const override { return v_; }
  std::string describe() const override {
    return "constant c = " + std::to_string(v_);
  }

 private:
  double v_;
};

class FlankMedium final : public MediumProfile {
 public:
  FlankMedium(const Geometry& geom, std::vector<FlankBump> bumps)
      : dim_(geom.dim()), x0_(geom.x0()), e_(ray_direction(geom)), bumps_(std::move(bumps)) {}

  double value(const double* x) const override {
    double xi = 0.0;
    for (int a = 0; a < dim_; ++a) xi += (x[a] - x0_[a]) * e_[a];
    double c = 1.0;
    for (const auto& b : bumps_) {
      double r = (xi - b.center) / b.width;
      c += b.amp * std::exp(-r * r);
    }
    return c;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "flank bump(s):";
    for (const auto& b : bumps_)
      os << " {amp " << b.amp << ", center " << b.center << ", width " << b.width << "}";
    return os.str();
  }

 private:
  int dim_;
  Point x0_, e_;
  std::vector<FlankBump> bumps_;
};

double box_distance(const Box& box, const double* x) {
  double d2 = 0.0;
  for (int a = 0; a < box.dim; ++a) {
    double d = 0.0;
    if (x[a] < box.lo[a]) d = box.lo[a] - x[a];
    else if (x[a] > box.hi[a]) d = x[a] - box.hi[a];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace

std::unique_ptr<MediumProfile> make_constant_medium(double value) {
  return std::make_unique<ConstantMedium>(value);
}

std::unique_ptr<MediumProfile> make_flank_bump_medium(const Geometry& geom, const FlankBump& b) {
  return std::make_unique<FlankMedium>(geom, std::vector<FlankBump>{b});
}

std::unique_ptr<MediumProfile> make_two_flank_bump_medium(const Geometry& geom,
                                                          const FlankBump& b1,
                                                          const FlankBump& b2) {
  return std::make_unique<FlankMedium>(geom, std::vector<FlankBump>{b1, b2});
}

MediumSpec sample_medium(const MediumProfile& profile, const Grid& spatial_grid, double b,
                         double b_bar) {
  MediumSpec spec;
  spec.c = Field(spatial_grid);
  spec.b = b;
  spec.b_bar = b_bar;
  parallel_for_slabs(spatial_grid.spatial_nodes(), [&](std::int64_t lo, std::int64_t hi, int) {
    double x[kMaxDim];
    for (std::int64_t s = lo; s < hi; ++s) {
      spatial_grid.node_point(s, x);
      spec.c[s] = profile.value(x);
    }
  });
  return spec;
}

MediumCheck MediumSpec::validate(const Geometry& geom) const {
  MediumCheck out;
  const Grid& g = c.grid();
  double x[kMaxDim];

  out.min_bound_margin = 1e300;
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    double m = std::min(c[s] - 1.0, 1.0 + b - c[s]);
    out.min_bound_margin = std::min(out.min_bound_margin, m);
  }
  out.bounds_ok = out.min_bound_margin >= -1e-12;

  out.max_exterior_dev = 0.0;
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    g.node_point(s, x);
    if (box_distance(geom.omega(), x) >= exterior_clearance)
      out.max_exterior_dev = std::max(out.max_exterior_dev, std::abs(c[s] - b_bar));
  }
  out.exterior_ok = out.max_exterior_dev <= exterior_tol;

  std::vector<Field> gc = grad(c);
  out.min_cone_margin = 1e300;
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    g.node_point(s, x);
    if (!geom.omega().contains_closure({x[0], x[1], x[2]})) continue;
    double m = 0.0;
    for (int a = 0; a < g.dim(); ++a) m += gc[a][s] * (x[a] - geom.x0()[a]);
    out.min_cone_margin = std::min(out.min_cone_margin, m);
  }
  out.cone_ok = out.min_cone_margin >= -cone_tol;
  return out;
}

InitialCheck InitialData::validate(const Geometry& geom) const {
  InitialCheck out;
  const Grid& g = f.grid();
  double x[kMaxDim];
  out.max_support_leak = 0.0;
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    g.node_point(s, x);
    if (!omega_prime.contains_closure({x[0], x[1], x[2]}))
      out.max_support_leak = std::max(out.max_support_leak, std::abs(f[s]));
  }
  out.support_ok = out.max_support_leak <= 1e-8;

  out.min_laplacian = 1e300;
  if (xi > 0.0) {
    const Grid& og = lap_f_omega.grid();
    for (std::int64_t s = 0; s < og.spatial_nodes(); ++s)
      out.min_laplacian = std::min(out.min_laplacian, lap_f_omega[s]);
    out.laplacian_ok = out.min_laplacian >= xi - 1e-9;
  }
  (void)geom;
  return out;
}

InitialData make_quadratic_plateau_initial(const Geometry& geom, const Grid& spatial_grid,
                                           const Grid& omega_grid, double xi, double q0,
                                           double plateau_margin, double support_margin) {
  require(support_margin > plateau_margin && plateau_margin > 0.0, ErrorCode::CONFIG_ERROR,
          "need support_margin > plateau_margin > 0");
  const Box& omega = geom.omega();
  InitialData out;
  out.xi = xi;
  out.omega_prime.dim = omega.dim;
  for (int a = 0; a < omega.dim; ++a) {
    out.omega_prime.lo[a] = omega.lo[a] - support_margin;
    out.omega_prime.hi[a] = omega.hi[a] + support_margin;
  }
  const double q2 = xi / (2.0 * omega.dim);
  Point xc{};
  for (int a = 0; a < omega.dim; ++a) xc[a] = 0.5 * (omega.lo[a] + omega.hi[a]);

  auto f_eval = [&](const double* x) {
    double r2 = 0.0, chi = 1.0;
    for (int a = 0; a < omega.dim; ++a) {
      double d = x[a] - xc[a];
      r2 += d * d;
      chi *= plateau(x[a], omega.lo[a] - support_margin, omega.lo[a] - plateau_margin,
                     omega.hi[a] + plateau_margin, omega.hi[a] + support_margin);
    }
    return (q0 + q2 * r2) * chi;
  };

  out.f = Field(spatial_grid);
  double x[kMaxDim];
  for (std::int64_t s = 0; s < spatial_grid.spatial_nodes(); ++s) {
    spatial_grid.node_point(s, x);
    out.f[s] = f_eval(x);
  }
  // chi == 1 on the closure of Omega, so laplacian f == 2 dim q2 there.
  out.lap_f_omega = Field(omega_grid, 2.0 * omega.dim * q2);
  return out;
}

InitialData make_gaussian_initial(const Geometry& geom, const Grid& spatial_grid,
                                  const Grid& omega_grid, double amp, double sharp,
                                  const Point& center) {
  InitialData out;
  out.xi = 0.0;
  out.omega_prime = spatial_grid.box();  // no compact-support claim
  out.f = Field(spatial_grid);
  double x[kMaxDim];
  for (std::int64_t s = 0; s < spatial_grid.spatial_nodes(); ++s) {
    spatial_grid.node_point(s, x);
    double r2 = 0.0;
    for (int a = 0; a < geom.dim(); ++a) {
      double d = x[a] - center[a];
      r2 += d * d;
    }
    out.f[s] = amp * std::exp(-sharp * r2);
  }
  out.lap_f_omega = Field(omega_grid);
  for (std::int64_t s = 0; s < omega_grid.spatial_nodes(); ++s) {
    omega_grid.node_point(s, x);
    double r2 = 0.0;
    for (int a = 0; a < geom.dim(); ++a) {
      double d = x[a] - center[a];
      r2 += d * d;
    }
    out.lap_f_omega[s] =
        amp * std::exp(-sharp * r2) * (4.0 * sharp * sharp * r2 - 2.0 * sharp * geom.dim());
  }
  return out;
}

}  // namespace carleman
